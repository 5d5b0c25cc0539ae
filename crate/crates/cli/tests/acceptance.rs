//! Acceptance gate. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use solenoid::clifford::GammaSet;
use solenoid::dirac::{check_spectrum, lip, lip_equality_check, lip_exact_generator};
use solenoid::group::{Group, GroupElement};
use solenoid::linalg::{max_abs, CMatrix};
use solenoid::metric::{
    bridge_builder_sweep, connes_distance, connes_distance_ball, fejer_lip_contraction_check,
    fejer_smooth, random_self_adjoint, DistanceMode, FejerSpec, SolverOptions, StateSpec,
    VectorState,
};
use solenoid::twisted::{Algebra, Cocycle, Truncation};
use solenoid::Complex64;

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    check(start.elapsed() <= budget, || {
        format!("runtime {:.1?} over budget {budget:?}", start.elapsed())
    })
}

fn clifford() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for d in 1..=6 {
        let set = GammaSet::build(d).map_err(|e| e.to_string())?;
        let report = set.verify(1e-12);
        check(report.pass, || format!("d={d}: {report:?}"))?;
        let dim = set.dim();
        for _ in 0..100 {
            let v: Vec<f64> = (0..=d).map(|_| normal(&mut rng)).collect();
            let a = set.combine(&v);
            let n2: f64 = v.iter().map(|x| x * x).sum();
            let dev = max_abs(&(&a * &a - CMatrix::identity(dim, dim) * Complex64::new(n2, 0.0)));
            worst = worst.max(dev);
        }
    }
    check(worst < 1e-12, || format!("(Σvγ)² deviates by {worst:e}"))?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("d=1..6 relations < 1e-12, worst square deviation {worst:.1e}"))
}

fn random_element(group: &Group, rng: &mut impl Rng) -> GroupElement {
    let level = rng.random_range(0..=3);
    let nums: Vec<i64> = (0..group.d()).map(|_| rng.random_range(-40..=40)).collect();
    group.at_level(&nums, level).unwrap()
}

fn length_level() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in [2u64, 3, 5] {
        for d in 1..=3 {
            let group = Group::new(p, d).unwrap();
            for _ in 0..10_000 {
                let g = random_element(&group, &mut rng);
                let h = random_element(&group, &mut rng);
                let s = &g + &h;
                check(g.length() == (-&g).length(), || format!("L not symmetric at {g}"))?;
                let (lg, lh, ls) = (g.length(), h.length(), s.length());
                check(ls <= lg + lh + 1e-12, || format!("L subadditivity fails at {g}; {h}"))?;
                check(ls.sqrt() <= lg.sqrt() + lh.sqrt() + 1e-12, || {
                    format!("sqrt L subadditivity fails at {g}; {h}")
                })?;
            }
        }
    }
    // exhaustive F difference bound and sup closed form
    let mut pairs = 0usize;
    for (p, d, n, r) in [(2u64, 2usize, 2u32, 8.0), (3, 1, 2, 30.0)] {
        let group = Group::new(p, d).unwrap();
        let ball = group.ball(n, r).unwrap();
        let weights: Vec<u64> = ball.iter().map(|g| g.f_weight()).collect();
        for g in ball.iter() {
            let fg = g.f_weight();
            let mut sup = 0u64;
            for (h, &fh) in ball.iter().zip(&weights) {
                let diff = fh.abs_diff((h - g).f_weight());
                check(diff <= fg, || format!("|F(h) - F(h-g)| > F(g) at g={g}, h={h}"))?;
                sup = sup.max(diff);
                pairs += 1;
            }
            check(sup == g.fdiff_sup(), || {
                format!("fdiff_sup({g}) = {} but brute force gives {sup}", g.fdiff_sup())
            })?;
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("9 x 10^4 random pairs, {pairs} exhaustive pairs"))
}

fn spectrum() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (p, d, n, r) in [(2u64, 2usize, 0u32, 4.0), (2, 2, 1, 4.0), (3, 2, 1, 4.0)] {
        let t = Truncation::new(Group::new(p, d).unwrap(), n, r).map_err(|e| e.to_string())?;
        check(t.dim() <= 4000, || format!("matrix size {}", t.dim()))?;
        let report = check_spectrum(&t, 1e-9).map_err(|e| e.to_string())?;
        check(report.pass, || {
            format!("(p={p}, d={d}, n={n}, R={r}) deviation {:e}", report.max_deviation)
        })?;
        worst = worst.max(report.max_deviation);
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("3 truncations, max deviation {worst:.1e}"))
}

fn lip_generators() -> Outcome {
    let group = Group::new(2, 2).unwrap();
    let gens: Vec<GroupElement> = [
        "1,0", "0,1", "1,1", "2,-1", "1/2,0", "1/2,1/2", "3/2,-1", "1/4,0", "3/4,1/4", "-1/4,1/2",
    ]
    .iter()
    .map(|s| group.parse_element(s, None).unwrap())
    .collect();
    let thetas = [0.0, 0.3, std::f64::consts::FRAC_1_SQRT_2];
    let mut worst: f64 = 0.0;
    for g in &gens {
        let level = g.level();
        let len = g.length();
        let radii = [(len - 1.0).max(1.0), len - 0.5, len + 1e-9, len + 0.25];
        let alg = Algebra::new(group, Cocycle::planar(0.3)).unwrap();
        let f = alg.delta(g);
        let mut prev = 0.0;
        let mut last = 0.0;
        for &r in &radii {
            let t = Truncation::new(group, level, r.max(1.0)).map_err(|e| e.to_string())?;
            let v = lip(&f, &t).map_err(|e| e.to_string())?;
            check(v + 1e-12 >= prev, || format!("{g}: lip decreased at R={r}"))?;
            prev = v;
            last = v;
        }
        let exact = lip_exact_generator(g);
        let err = (last - exact).abs();
        check(err < 1e-6, || format!("{g}: lip {last} vs exact {exact}"))?;
        worst = worst.max(err);
        let t = Truncation::new(group, level, radii[3]).unwrap();
        for &theta in &thetas {
            let alg = Algebra::new(group, Cocycle::planar(theta)).unwrap();
            let v = lip(&alg.delta(g), &t).map_err(|e| e.to_string())?;
            check((v - last).abs() < 1e-9, || format!("{g}: θ={theta} gives {v}, θ=0.3 gives {last}"))?;
        }
    }
    Ok(format!("10 generators, levels 0-2, max error at largest R {worst:.1e}"))
}

fn coset_blocks() -> Outcome {
    let group = Group::new(2, 2).unwrap();
    let alg = Algebra::new(group, Cocycle::planar(0.3)).unwrap();
    let support = group.ball(0, 2.3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut gap: f64 = 0.0;
    let mut margin = f64::INFINITY;
    // radii where each nonzero coset region fits inside a translate of the
    // G_0 region, so the block inequality is a containment statement
    for (m, r) in [(1u32, 4.0), (2, 4.62)] {
        for i in 0..50 {
            let f = random_self_adjoint(&alg, support.elements(), &mut rng);
            let rep = lip_equality_check(&f, 0, m, r, 1e-9).map_err(|e| e.to_string())?;
            check(rep.pass, || format!("m={m}, sample {i}: {rep:?}"))?;
            gap = gap.max((rep.full_norm - rep.k0_norm).abs());
            margin = margin.min(rep.k0_norm - rep.max_coset_norm);
        }
    }
    Ok(format!(
        "100 samples, |full - G_0 block| <= {gap:.1e}, min(G_0 block - other blocks) = {margin:.3}"
    ))
}

fn fejer() -> Outcome {
    let group = Group::new(2, 2).unwrap();
    let alg = Algebra::new(group, Cocycle::planar(0.3)).unwrap();
    let t = Truncation::new(group, 1, 3.5).unwrap();
    let support = group.ball(1, 2.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ratio: f64 = 0.0;
    for i in 0..50 {
        let f = random_self_adjoint(&alg, support.elements(), &mut rng);
        let spec = FejerSpec::new((i % 2) as u32, [2, 4, 8][i % 3]).unwrap();
        let smooth = fejer_smooth(&f, &spec);
        for (g, c) in f.terms() {
            let w = spec.weight(g);
            check((0.0..=1.0).contains(&w), || format!("weight {w} at {g}"))?;
            check(smooth.coeff(g).norm() <= c.norm(), || format!("coefficient grew at {g}"))?;
        }
        let rep = fejer_lip_contraction_check(&f, &spec, &t, 1e-6).map_err(|e| e.to_string())?;
        check(rep.pass, || format!("sample {i}: {rep:?}"))?;
        ratio = ratio.max(rep.lip_smoothed / rep.lip);
    }
    let mut series = Vec::new();
    for (m, r) in [(1u32, 3.5), (2, 3.0)] {
        let t = Truncation::new(group, m, r).unwrap();
        let rows = bridge_builder_sweep(&alg, 0, &[2, 4, 8, 16], &t, 2.5, 20, 7).map_err(|e| e.to_string())?;
        let eps: Vec<f64> = rows.iter().map(|r| r.eps_max).collect();
        check(eps.windows(2).all(|w| w[1] <= w[0]), || format!("m={m}: eps_max not nonincreasing: {eps:?}"))?;
        series.push(format!("m={m}: {}", eps.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>().join(" ")));
    }
    Ok(format!(
        "max Lip(E_N f)/Lip(f) = {ratio:.6}; eps_max over N=2,4,8,16 {}",
        series.join("; ")
    ))
}

fn vector_state(support: &[GroupElement], rng: &mut ChaCha8Rng) -> StateSpec {
    StateSpec::Vector(VectorState::random(support, 2, rng).unwrap())
}

/// Dense search over the direction of `f(e1) = a + ib`; the constraint is a
/// norm, so the optimum along a direction is `c·u / ‖C(u)‖`.
fn tiny_grid_oracle(alg: &Algebra, t: &Truncation, phi: &StateSpec, psi: &StateSpec) -> f64 {
    let e1 = alg.group().unit(0);
    let value = |angle: f64| {
        let c = Complex64::from_polar(1.0, angle);
        let f = alg.from_terms([(e1.clone(), c), (-&e1, c.conj())]);
        let gain = (phi.evaluate(&f) - psi.evaluate(&f)).re;
        gain / lip(&f, t).unwrap()
    };
    let steps = 720;
    let h = std::f64::consts::TAU / steps as f64;
    let (mut best, mut at) = (f64::NEG_INFINITY, 0.0);
    for k in 0..steps {
        let v = value(k as f64 * h);
        if v > best {
            (best, at) = (v, k as f64 * h);
        }
    }
    // refine on successively finer grids around the best angle
    let mut width = h;
    for _ in 0..6 {
        let fine = width / 10.0;
        for k in -10..=10 {
            let a = at + k as f64 * fine;
            let v = value(a);
            if v > best {
                (best, at) = (v, a);
            }
        }
        width = fine;
    }
    best
}

fn distance() -> Outcome {
    let opts = SolverOptions::default();
    let tol = opts.tol;
    let group = Group::new(2, 2).unwrap();
    let alg = Algebra::new(group, Cocycle::planar(0.3)).unwrap();
    let t = Truncation::new(group, 1, 2.5).unwrap();
    let state_support: Vec<GroupElement> = group.ball(1, 2.1).unwrap().iter().cloned().collect();
    let sr = 2.2;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dist = |a: &StateSpec, b: &StateSpec, mode| {
        connes_distance_ball(&alg, a, b, &t, sr, mode, &opts).map(|r| r.value)
    };
    let mut checked = 0;
    for _ in 0..20 {
        let states: Vec<StateSpec> = (0..3).map(|_| vector_state(&state_support, &mut rng)).collect();
        for mode in [DistanceMode::CertifiedLower, DistanceMode::Compressed] {
            let d = |i: usize, j: usize| dist(&states[i], &states[j], mode).map_err(|e| e.to_string());
            let (d01, d12, d02, d10) = (d(0, 1)?, d(1, 2)?, d(0, 2)?, d(1, 0)?);
            check(d(0, 0)?.abs() <= 1e-9, || format!("{mode}: d(φ, φ) != 0"))?;
            check((d01 - d10).abs() <= 1e-9, || format!("{mode}: asymmetric {d01} vs {d10}"))?;
            check(d02 <= d01 + d12 + 2.0 * tol, || format!("{mode}: triangle {d02} > {d01} + {d12}"))?;
            if mode == DistanceMode::Compressed {
                let lower = dist(&states[0], &states[1], DistanceMode::CertifiedLower).unwrap();
                check(lower <= d01 + tol, || format!("certified {lower} > compressed {d01}"))?;
            }
            checked += 1;
        }
    }
    // tiny instance: trivial Θ, support {0, ±e1}
    let alg0 = Algebra::untwisted(group);
    let t0 = Truncation::new(group, 0, 3.0).unwrap();
    let e1 = group.unit(0);
    let support = [group.zero(), e1.clone(), -&e1];
    let near: Vec<GroupElement> = group.ball(0, 2.0).unwrap().iter().cloned().collect();
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let (phi, psi) = (vector_state(&near, &mut rng), vector_state(&near, &mut rng));
        let rep = connes_distance(&alg0, &phi, &psi, &t0, &support, DistanceMode::Compressed, &opts)
            .map_err(|e| e.to_string())?;
        let oracle = tiny_grid_oracle(&alg0, &t0, &phi, &psi);
        let err = (rep.value - oracle).abs();
        check(err < 1e-4, || format!("tiny instance: compressed {} vs grid {oracle}", rep.value))?;
        worst = worst.max(err);
    }
    Ok(format!(
        "{checked} triple checks (both modes); tiny instance |compressed - grid| <= {worst:.1e}"
    ))
}

fn run_cli(args: &[&str], out: &Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_solenoid"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .expect("binary runs");
    assert!(status.success(), "{args:?} exited with {status}");
    std::fs::read(out).unwrap()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"p": 2, "d": 2, "theta": 0.3, "n": 0, "m": 1, "r": 3.0, "seed": 11, "samples": 4}"#,
    )
    .unwrap();
    let cfg = config.to_str().unwrap();
    let runs: [&[&str]; 7] = [
        &["ball", "--config", cfg],
        &["gammas", "--d", "3"],
        &["spectrum", "--config", cfg],
        &["lip", "--config", cfg, "--generator", "1/2,1"],
        &["distance", "--config", cfg, "--phi", "random:1", "--psi", "random:2", "--mode", "compressed"],
        &["fejer", "--config", cfg, "--N", "4"],
        &["converge", "--config", cfg, "--sweep-N", "2,4,8,16"],
    ];
    for args in runs {
        let a = run_cli(args, &dir.path().join("a.json"));
        let b = run_cli(args, &dir.path().join("b.json"));
        check(a == b, || format!("{args:?} differs between runs"))?;
        let v: serde_json::Value = serde_json::from_slice(&a).map_err(|e| e.to_string())?;
        check(v["schema"] == 1, || format!("{args:?} lacks schema 1"))?;
    }
    // the library's own sampling path
    let group = Group::new(2, 2).unwrap();
    let alg = Algebra::new(group, Cocycle::planar(0.3)).unwrap();
    let t = Truncation::new(group, 1, 3.0).unwrap();
    let sweep = |seed| {
        let rows = bridge_builder_sweep(&alg, 0, &[2, 8], &t, 2.0, 3, seed).unwrap();
        solenoid::report::to_json("converge", &rows)
    };
    check(sweep(4) == sweep(4), || "bridge sweep is not reproducible".into())?;
    Ok("7 subcommands byte-identical across two runs".into())
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("Clifford relations", clifford),
        ("length and level", length_level),
        ("Dirac spectrum oracle", spectrum),
        ("Lip generator convergence", lip_generators),
        ("coset block equality", coset_blocks),
        ("Fejér smoothing", fejer),
        ("Connes distance", distance),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
