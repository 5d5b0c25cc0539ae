use serde::Serialize;
use serde_json::{json, Value};
use solenoid::clifford::GammaSet;
use solenoid::dirac::{check_spectrum, lip, lip_equality_check, lip_exact_generator, lip_upper_bound, multiplicities};
use solenoid::group::GroupElement;
use solenoid::metric::{
    bridge_builder_sweep, connes_distance_ball, fejer_lip_contraction_check, fejer_smooth,
    random_self_adjoint, spectral_compare, DistanceMode, FejerSpec, SolverOptions, StateSpec,
    VectorState,
};
use solenoid::report::{csv, num, to_json};
use solenoid::twisted::{Algebra, FourierPolynomial, Truncation};
use solenoid::{Error, Result};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::params::{positive, Format, Params, Series};

pub struct Output {
    pub json: String,
    pub csv: String,
}

impl Output {
    pub fn render(self, format: Format) -> String {
        match format {
            Format::Json => self.json,
            Format::Csv => self.csv,
        }
    }
}

fn element_json(g: &GroupElement) -> Value {
    json!({ "g": g.to_string(), "level": g.level(), "length": g.length() })
}

pub fn ball(p: &Params) -> Result<Output> {
    let group = p.group()?;
    let n = p.n.unwrap_or(0);
    let r = p.radius(2.0)?;
    let ball = group.ball(n, r)?;
    #[derive(Serialize)]
    struct Body {
        p: u64,
        d: usize,
        n: u32,
        r: f64,
        count: usize,
        /// `|ball(n, 2r)| / |ball(n, r)|`
        doubling_ratio: f64,
        elements: Vec<Value>,
    }
    let body = Body {
        p: group.p(),
        d: group.d(),
        n,
        r,
        count: ball.len(),
        doubling_ratio: group.doubling_ratio(n, r)?,
        elements: ball.iter().map(element_json).collect(),
    };
    let header: Vec<String> = (1..=group.d())
        .map(|j| format!("x{j}"))
        .chain(["level".into(), "length".into()])
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = ball.iter().map(|g| {
        let mut row: Vec<String> = g.to_string().split(',').map(str::to_string).collect();
        row.push(g.level().to_string());
        row.push(num(g.length()));
        row
    });
    Ok(Output {
        json: to_json("ball", &body),
        csv: csv(&header, rows),
    })
}

pub fn gammas(p: &Params) -> Result<Output> {
    let d = p.d.unwrap_or(2);
    let set = GammaSet::build(d)?;
    let report = set.verify(p.tol(1e-12)?);
    if !report.pass {
        return Err(Error::CheckFailed(format!("Clifford relations off by {report:?}")));
    }
    let mut v = set.to_json_value();
    v["verification"] = serde_json::to_value(&report).expect("report serializes");
    let mut rows = Vec::new();
    for (k, g) in set.gammas().iter().enumerate() {
        for c in 0..g.ncols() {
            for r in 0..g.nrows() {
                let z = g[(r, c)];
                if z.re != 0.0 || z.im != 0.0 {
                    rows.push(vec![(k + 1).to_string(), r.to_string(), c.to_string(), num(z.re), num(z.im)]);
                }
            }
        }
    }
    Ok(Output {
        json: to_json("gammas", &v),
        csv: csv(&["gamma", "row", "col", "re", "im"], rows),
    })
}

pub fn spectrum(p: &Params) -> Result<Output> {
    let group = p.group()?;
    let n = p.n.unwrap_or(0);
    let r = p.radius(3.0)?;
    let tol = p.tol(1e-9)?;
    let t = Truncation::new(group, n, r)?;
    let report = check_spectrum(&t, tol)?;
    if !report.pass {
        return Err(Error::CheckFailed(format!(
            "spectrum deviates from the ±L oracle by {:e} (tol {tol:e})",
            report.max_deviation
        )));
    }
    let values: Vec<f64> = report.rows.iter().map(|r| r.eigenvalue).collect();
    let mult = multiplicities(&values, tol.max(1e-9));
    let body = json!({
        "p": group.p(),
        "d": group.d(),
        "n": n,
        "r": r,
        "dim": t.dim(),
        "max_deviation": report.max_deviation,
        "tol": tol,
        "pass": report.pass,
        "eigenvalues": values,
        "multiplicities": mult.iter().map(|(v, k)| json!({"value": v, "multiplicity": k})).collect::<Vec<_>>(),
    });
    let rows = mult.iter().map(|(v, k)| vec![num(*v), k.to_string()]);
    Ok(Output {
        json: to_json("spectrum", &body),
        csv: csv(&["value", "multiplicity"], rows),
    })
}

fn load_polynomial(p: &Params, algebra: &Algebra) -> Result<Option<FourierPolynomial>> {
    if let Some(path) = &p.poly {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("{} is not JSON: {e}", path.display())))?;
        return FourierPolynomial::from_json_value(algebra, &v).map(Some);
    }
    if let Some(text) = &p.generator {
        let g = algebra.group().parse_element(text, None)?;
        return Ok(Some(algebra.delta(&g)));
    }
    Ok(None)
}

pub fn lip_cmd(p: &Params) -> Result<Output> {
    let algebra = p.algebra()?;
    let f = load_polynomial(p, &algebra)?
        .ok_or_else(|| Error::invalid("lip needs --generator or --poly"))?;
    if f.is_zero() {
        return Err(Error::invalid("polynomial is zero"));
    }
    let level = p.m.unwrap_or(f.level());
    let rho = f.support_radius();
    let r_max = p.radius(rho + 1.0)?;
    // trace from R = 1 in steps of 1/2, ending exactly at r_max
    let mut radii: Vec<f64> = (0..).map(|k| 1.0 + 0.5 * k as f64).take_while(|r| *r < r_max).collect();
    radii.push(r_max);
    let mut trace = Vec::new();
    for &r in &radii {
        let t = Truncation::new(algebra.group(), level, r)?;
        trace.push((r, lip(&f, &t)?));
    }
    let value = trace.last().expect("nonempty").1;
    let exact = (f.len() == 1).then(|| lip_exact_generator(f.support().next().expect("one term")));
    let coset = if p.coset_check {
        let n = p.n.unwrap_or(f.level());
        let report = lip_equality_check(&f, n, level, r_max, p.tol(1e-9)?)?;
        if !report.pass {
            return Err(Error::CheckFailed(format!("coset block comparison failed: {report:?}")));
        }
        Some(report)
    } else {
        None
    };
    let body = json!({
        "p": algebra.group().p(),
        "d": algebra.group().d(),
        "theta": algebra.cocycle().matrix(),
        "m": level,
        "support_radius": rho,
        "value": value,
        "exact": exact,
        "upper_bound": lip_upper_bound(&f),
        "trace": trace.iter().map(|(r, l)| json!({"r": r, "lip": l})).collect::<Vec<_>>(),
        "coset_check": coset,
    });
    let rows = trace.iter().map(|(r, l)| vec![num(*r), num(*l)]);
    Ok(Output {
        json: to_json("lip", &body),
        csv: csv(&["r", "lip"], rows),
    })
}

fn load_state(spec: Option<&str>, algebra: &Algebra, t: &Truncation, support_radius: f64) -> Result<StateSpec> {
    let spec = spec.unwrap_or("trace");
    if spec == "trace" {
        return Ok(StateSpec::Trace);
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| Error::invalid(format!("bad state seed in '{spec}'")))?;
        let support = algebra.group().ball(t.level(), support_radius)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok(StateSpec::Vector(VectorState::random(support.elements(), t.dim_e(), &mut rng)?));
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::invalid(format!("state '{spec}' is neither trace, random:SEED nor a readable file: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{spec} is not JSON: {e}")))?;
    StateSpec::from_json_value(algebra, t.dim_e(), &v)
}

pub fn distance(p: &Params) -> Result<Output> {
    let algebra = p.algebra()?;
    let n = p.n.unwrap_or(0);
    let r = p.radius(3.0)?;
    let support_radius = positive("support-radius", p.support_radius.unwrap_or(r.min(2.0)))?;
    let mode: DistanceMode = p.mode.as_deref().unwrap_or("certified_lower").parse()?;
    let opts = SolverOptions {
        max_iter: p.max_iter.unwrap_or(SolverOptions::default().max_iter),
        tol: p.tol(SolverOptions::default().tol)?,
    };
    let t = Truncation::new(algebra.group(), n, r)?;
    let phi = load_state(p.phi.as_deref(), &algebra, &t, support_radius)?;
    let psi = load_state(p.psi.as_deref(), &algebra, &t, support_radius)?;
    let report = connes_distance_ball(&algebra, &phi, &psi, &t, support_radius, mode, &opts)?;
    let mut body = serde_json::to_value(&report).expect("report serializes");
    body["n"] = json!(n);
    body["r"] = json!(r);
    body["support_radius"] = json!(support_radius);
    body["phi"] = phi.to_json_value();
    body["psi"] = psi.to_json_value();
    let row = vec![
        mode.to_string(),
        num(report.value),
        report.upper.map(num).unwrap_or_default(),
        num(report.residual),
        report.iterations.to_string(),
        report.degenerate.to_string(),
    ];
    Ok(Output {
        json: to_json("distance", &body),
        csv: csv(&["mode", "value", "upper", "residual", "iterations", "degenerate"], [row]),
    })
}

pub fn fejer(p: &Params) -> Result<Output> {
    let algebra = p.algebra()?;
    let n = p.n.unwrap_or(0);
    let spec = FejerSpec::new(n, p.order.unwrap_or(4))?;
    let m = p.m.unwrap_or(n);
    let r = p.radius(3.0)?;
    let t = Truncation::new(algebra.group(), m, r)?;
    let f = match load_polynomial(p, &algebra)? {
        Some(f) => f,
        None => {
            let sr = positive("support-radius", p.support_radius.unwrap_or(r.min(2.0)))?;
            let support = algebra.group().ball(m, sr)?;
            let mut rng = ChaCha8Rng::seed_from_u64(p.seed.unwrap_or(0));
            random_self_adjoint(&algebra, support.elements(), &mut rng)
        }
    };
    let smoothed = fejer_smooth(&f, &spec);
    let contraction = if f.is_self_adjoint(1e-12) {
        let report = fejer_lip_contraction_check(&f, &spec, &t, p.tol(1e-6)?)?;
        if !report.pass {
            return Err(Error::CheckFailed(format!("Lip contraction failed: {report:?}")));
        }
        Some(report)
    } else {
        None
    };
    let rows: Vec<Vec<String>> = f
        .terms()
        .map(|(g, c)| {
            let s = smoothed.coeff(g);
            vec![g.to_string(), num(spec.weight(g)), num(c.re), num(c.im), num(s.re), num(s.im)]
        })
        .collect();
    let body = json!({
        "n": n,
        "N": spec.order(),
        "m": m,
        "r": r,
        "weights": f.terms().map(|(g, _)| json!({"g": g.to_string(), "weight": spec.weight(g)})).collect::<Vec<_>>(),
        "input": f.to_json_value(),
        "smoothed": smoothed.to_json_value(),
        "contraction": contraction,
    });
    let header = ["g", "weight", "re", "im", "smoothed_re", "smoothed_im"];
    // element text contains commas, so quote it
    let rows = rows.into_iter().map(|mut r| {
        r[0] = format!("\"{}\"", r[0]);
        r
    });
    Ok(Output {
        json: to_json("fejer", &body),
        csv: csv(&header, rows),
    })
}

pub fn converge(p: &Params) -> Result<Output> {
    let algebra = p.algebra()?;
    let n = p.n.unwrap_or(0);
    let m = p.m.unwrap_or(n + 1);
    if m < n {
        return Err(Error::invalid("converge needs m >= n"));
    }
    let r = p.radius(3.0)?;
    let support_radius = positive("support-radius", p.support_radius.unwrap_or(r.min(2.5)))?;
    let samples = p.samples.unwrap_or(8);
    let seed = p.seed.unwrap_or(0);
    let orders = p.sweep_n.clone().unwrap_or_else(|| vec![2, 4, 8, 16]);
    if orders.is_empty() {
        return Err(Error::invalid("sweep-N is empty"));
    }
    let windows = match &p.window {
        Some(w) => w.clone(),
        None => (0..).map(|k| 1.0 + 0.5 * k as f64).take_while(|w| *w <= r).collect(),
    };
    for &w in &windows {
        if !(w > 0.0 && w <= r) {
            return Err(Error::invalid(format!("window {w} must lie in (0, {r}]")));
        }
    }
    let t_m = Truncation::new(algebra.group(), m, r)?;
    let t_n = Truncation::new(algebra.group(), n, r)?;
    let eps = bridge_builder_sweep(&algebra, n, &orders, &t_m, support_radius, samples, seed)?;
    let spectral = windows
        .iter()
        .map(|&w| spectral_compare(&t_n, &t_m, w).map(|h| (w, h)))
        .collect::<Result<Vec<_>>>()?;
    let body = json!({
        "n": n,
        "m": m,
        "r": r,
        "support_radius": support_radius,
        "samples": samples,
        "seed": seed,
        "eps": eps,
        "spectral": spectral.iter().map(|(w, h)| json!({"window": w, "hausdorff": h})).collect::<Vec<_>>(),
    });
    let csv_text = match p.series.unwrap_or(Series::Eps) {
        Series::Eps => csv(
            &["N", "eps_max", "eps_mean"],
            eps.iter().map(|e| vec![e.order.to_string(), num(e.eps_max), num(e.eps_mean)]),
        ),
        Series::Spectral => csv(&["window", "hausdorff"], spectral.iter().map(|(w, h)| vec![num(*w), num(*h)])),
    };
    Ok(Output {
        json: to_json("converge", &body),
        csv: csv_text,
    })
}
