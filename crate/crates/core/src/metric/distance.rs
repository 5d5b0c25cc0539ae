use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use serde::Serialize;

use crate::dirac::{commutator_matrix, lip_exact_generator};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, CMatrix, I};
use crate::metric::state::StateSpec;
use crate::twisted::{Algebra, FourierPolynomial, Truncation};


#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Closed form over the weighted-ℓ¹ ball `Σ |f(g)| Lip(δ_g) <= 1`.
    CertifiedLower,
    /// Linear maximization under `‖P [D, λ(f)] P‖ <= 1`.
    Compressed,
}

impl FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "certified_lower" | "certified-lower" => Ok(DistanceMode::CertifiedLower),
            "compressed" => Ok(DistanceMode::Compressed),
            _ => Err(Error::invalid(format!("unknown distance mode '{s}'"))),
        }
    }
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMode::CertifiedLower => "certified_lower",
            DistanceMode::Compressed => "compressed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Newton steps, summed over all barrier parameters.
    pub max_iter: usize,
    /// Target duality gap.
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iter: 300,
            tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    pub mode: DistanceMode,
    /// Best feasible value found; for `compressed` this is within `residual`
    /// of the compressed optimum.
    pub value: f64,
    /// Upper bound on the compressed optimum (compressed mode only).
    pub upper: Option<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub degenerate: bool,
    pub support_size: usize,
    /// Element attaining the closed form (certified mode only).
    pub argmax: Option<Vec<[i64; 2]>>,
    /// Optimizing self-adjoint polynomial, normalized to the constraint.
    #[serde(skip)]
    pub certificate: Option<FourierPolynomial>,
}

/// Connes distance restricted to self-adjoint `f` supported on `support`.
///
/// `support` must be symmetric and contained in the truncation ball. The
/// value is a lower bound on the distance in both modes since the feasible
/// sets only shrink the optimization space (certified) or are checked on a
/// compression of the commutator (compressed, within `residual`).
pub fn connes_distance(
    algebra: &Algebra,
    phi: &StateSpec,
    psi: &StateSpec,
    t: &Truncation,
    support: &[GroupElement],
    mode: DistanceMode,
    opts: &SolverOptions,
) -> Result<DistanceReport> {
    if algebra.group() != t.group() {
        return Err(Error::invalid("algebra and truncation live on different groups"));
    }
    for g in support {
        if !t.ball().contains(g) {
            return Err(Error::invalid(format!("support element {g} lies outside the truncation ball")));
        }
        if !support.contains(&-g) {
            return Err(Error::invalid(format!("support is not symmetric: -({g}) is missing")));
        }
    }
    let pairs = pair_representatives(support);
    let deltas: Vec<Complex64> = pairs
        .iter()
        .map(|g| phi.phi(algebra, g) - psi.phi(algebra, g))
        .collect();
    let certified = certified(algebra, &pairs, &deltas);
    let base = DistanceReport {
        mode,
        value: 0.0,
        upper: None,
        residual: 0.0,
        iterations: 0,
        degenerate: true,
        support_size: support.len(),
        argmax: None,
        certificate: None,
    };
    let Some((best, cert)) = certified else {
        return Ok(base);
    };
    match mode {
        DistanceMode::CertifiedLower => Ok(DistanceReport {
            value: cert_value(&deltas, best, &pairs),
            degenerate: false,
            argmax: Some(pairs[best].to_pairs()),
            certificate: Some(cert),
            ..base
        }),
        DistanceMode::Compressed => {
            let lower = cert_value(&deltas, best, &pairs);
            compressed(algebra, t, &pairs, &deltas, lower, cert, opts, base)
        }
    }
}

/// [`connes_distance`] with support `ball(level(T), support_radius)`.
pub fn connes_distance_ball(
    algebra: &Algebra,
    phi: &StateSpec,
    psi: &StateSpec,
    t: &Truncation,
    support_radius: f64,
    mode: DistanceMode,
    opts: &SolverOptions,
) -> Result<DistanceReport> {
    if support_radius.is_nan() || support_radius > t.radius() {
        return Err(Error::invalid(format!(
            "support radius {support_radius} exceeds truncation radius {}",
            t.radius()
        )));
    }
    let ball = t.group().ball(t.level(), support_radius)?;
    connes_distance(algebra, phi, psi, t, ball.elements(), mode, opts)
}

/// One element from each pair `{g, -g}`, `g != 0`, in support order.
fn pair_representatives(support: &[GroupElement]) -> Vec<GroupElement> {
    let mut out: Vec<GroupElement> = support
        .iter()
        .filter(|g| !g.is_zero() && **g < -*g)
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

fn cert_value(deltas: &[Complex64], best: usize, pairs: &[GroupElement]) -> f64 {
    deltas[best].norm() / lip_exact_generator(&pairs[best])
}

/// Index of the maximizing pair and the certificate
/// `c δ_g + conj(c) δ_{-g}` with `c = conj(Δ) / (2 |Δ| Lip(δ_g))`.
fn certified(
    algebra: &Algebra,
    pairs: &[GroupElement],
    deltas: &[Complex64],
) -> Option<(usize, FourierPolynomial)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (g, d)) in pairs.iter().zip(deltas).enumerate() {
        let v = d.norm() / lip_exact_generator(g);
        if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (i, _) = best?;
    let g = &pairs[i];
    let d = deltas[i];
    let c = d.conj() / (2.0 * d.norm() * lip_exact_generator(g));
    let f = algebra.from_terms([(g.clone(), c), (-g, c.conj())]);
    Some((i, f))
}

/// Log-barrier interior point method for `max c·x` subject to
/// `-I ≼ Σ x_i H_i ≼ I`, where `H_i = i P [D, λ(b_i)] P` for the self-adjoint
/// basis `b = δ_g + δ_{-g}, i δ_g - i δ_{-g}`.
///
/// Newton steps center `t c·x + log det(I - M) + log det(I + M)`. Two upper
/// bounds are kept: `tr Z_+ + tr Z_- + Σ |r_i| b_i` with `Z_± = (I ∓ M)^{-1} / t`,
/// `r` the dual equality residual and `b_i` the box `|x_i| <= 1 / Lip(δ_g)`
/// implied by the `(g, 0)` block; and the trace norm of `Z_+ - Z_-` projected
/// onto the dual equality constraints. The value rescales the best iterate to
/// the boundary, `c·x / ‖M(x)‖`. In double precision the bracket closes to a
/// few times `1e-7`.
#[allow(clippy::too_many_arguments)]
fn compressed(
    algebra: &Algebra,
    t: &Truncation,
    pairs: &[GroupElement],
    deltas: &[Complex64],
    lower: f64,
    cert: FourierPolynomial,
    opts: &SolverOptions,
    base: DistanceReport,
) -> Result<DistanceReport> {
    let dim = t.dim();
    // the feasible set is symmetric under x -> -x, so orienting the cost
    // canonically makes d(φ, ψ) and d(ψ, φ) run the identical computation
    let flip = deltas
        .iter()
        .flat_map(|d| [d.re, -d.im])
        .find(|v| *v != 0.0)
        .is_some_and(|v| v < 0.0);
    let orient = if flip { -1.0 } else { 1.0 };
    let mut basis = Vec::with_capacity(2 * pairs.len());
    let mut cost = Vec::with_capacity(2 * pairs.len());
    let mut bound = Vec::with_capacity(2 * pairs.len());
    for (g, d) in pairs.iter().zip(deltas) {
        let one = Complex64::new(1.0, 0.0);
        let a = algebra.from_terms([(g.clone(), one), (-g, one)]);
        let b = algebra.from_terms([(g.clone(), I), (-g, -I)]);
        basis.push(Sparse::from_dense(&(commutator_matrix(&a, t)?.into_matrix() * I)));
        basis.push(Sparse::from_dense(&(commutator_matrix(&b, t)?.into_matrix() * I)));
        cost.push(orient * 2.0 * d.re);
        cost.push(orient * -2.0 * d.im);
        let half = 1.0 / lip_exact_generator(g);
        bound.push(half);
        bound.push(half);
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let barrier = Barrier { basis: &basis, dim };
    let gram = gram_matrix(&basis, dim)
        .cholesky()
        .ok_or_else(|| Error::Numerical("commutator basis is degenerate".into()))?;

    let mut x = vec![0.0; basis.len()];
    let mut tpar = dim as f64 / dot(&cost, &cost).sqrt();
    let mut best = (f64::NEG_INFINITY, x.clone());
    let mut upper = f64::INFINITY;
    let mut steps = 0;
    let mut inner = 0;
    let mut state = barrier.state(&x)?;
    loop {
        let norm = state.norm();
        if norm > 0.0 {
            let v = dot(&cost, &x) / norm;
            if v > best.0 {
                best = (v, x.iter().map(|a| a / norm).collect());
            }
        }
        let (grad, hess, dual) = barrier.derivatives(&state, &cost, tpar);
        let slack: f64 = grad.iter().zip(&bound).map(|(r, b)| (r / tpar).abs() * b).sum();
        upper = upper.min(dual / tpar + slack);
        if best.0.is_finite() {
            upper = upper.min(barrier.projected_dual(&state, &cost, tpar, &gram)?);
        }
        if upper - best.0.max(lower) <= opts.tol {
            break;
        }
        if steps >= opts.max_iter {
            return Err(Error::NonConvergence {
                iterations: steps,
                residual: upper - best.0.max(lower),
            });
        }
        steps += 1;
        let step = solve_spd(hess, &grad)?;
        let decrement = dot(&grad, &step);
        // near the optimum the barrier value loses precision, so centering
        // is capped rather than run to a fixed decrement
        if decrement < 1e-7 || inner >= 20 {
            tpar *= 8.0;
            inner = 0;
            continue;
        }
        inner += 1;
        // the barrier is -t c·x - logdet; only differences are formed since
        // t c·x dwarfs the decrease once t is large
        let ld0 = barrier
            .logdet(&x)
            .ok_or_else(|| Error::Numerical("barrier iterate left the interior".into()))?;
        let cs = dot(&cost, &step);
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - alpha * s).collect();
            let decrease = barrier
                .logdet(&trial)
                .is_some_and(|ld| tpar * alpha * cs - (ld - ld0) <= -0.25 * alpha * decrement);
            if decrease {
                let ts = barrier.state(&trial)?;
                if ts.norm() < 1.0 {
                    (x, state) = (trial, ts);
                    break;
                }
            }
            alpha *= 0.5;
            if alpha < 1e-10 {
                tpar *= 8.0;
                inner = 0;
                break;
            }
        }
    }

    let value = best.0.max(lower);
    let certificate = if best.0 >= lower {
        let xs: Vec<f64> = best.1.iter().map(|v| orient * v).collect();
        polynomial_from(algebra, pairs, &xs)
    } else {
        cert
    };
    Ok(DistanceReport {
        value,
        upper: Some(upper),
        residual: (upper - value).max(0.0),
        iterations: steps,
        degenerate: false,
        certificate: Some(certificate),
        ..base
    })
}

struct Sparse {
    entries: Vec<(usize, usize, Complex64)>,
}

impl Sparse {
    fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if z.re != 0.0 || z.im != 0.0 {
                    entries.push((r, c, z));
                }
            }
        }
        Sparse { entries }
    }

    /// `W H` as a dense matrix.
    fn left_mul(&self, w: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(w.nrows(), w.ncols());
        for &(a, b, v) in &self.entries {
            let mut col = out.column_mut(b);
            col.axpy(v, &w.column(a), Complex64::new(1.0, 0.0));
        }
        out
    }

    /// `tr(W H)`.
    fn trace_with(&self, w: &CMatrix) -> Complex64 {
        self.entries.iter().map(|&(a, b, v)| w[(b, a)] * v).sum()
    }
}

struct BarrierState {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl BarrierState {
    fn norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

}

struct Barrier<'a> {
    basis: &'a [Sparse],
    dim: usize,
}

impl Barrier<'_> {
    fn matrix(&self, x: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (xi, h) in x.iter().zip(self.basis) {
            for &(a, b, v) in &h.entries {
                m[(a, b)] += v * *xi;
            }
        }
        m
    }

    fn state(&self, x: &[f64]) -> Result<BarrierState> {
        let (values, vectors) = hermitian_eigen(&self.matrix(x))?;
        Ok(BarrierState { values, vectors })
    }

    /// `log det(I - M) + log det(I + M)`, or `None` outside `‖M‖ < 1`.
    fn logdet(&self, x: &[f64]) -> Option<f64> {
        let m = self.matrix(x);
        let id = CMatrix::identity(self.dim, self.dim);
        let mut total = 0.0;
        for a in [&id - &m, &id + &m] {
            // complex square roots never fail, so a pivot that is not a
            // positive real marks an indefinite matrix
            let l = a.cholesky()?;
            for z in l.l_dirty().diagonal().iter() {
                if !(z.re > 0.0 && z.im == 0.0) {
                    return None;
                }
                total += 2.0 * z.re.ln();
            }
        }
        Some(total)
    }

    /// Trace norm of `W = ((I - M)^{-1} - (I + M)^{-1}) / t` after projecting
    /// onto `tr(H_i W) = c_i`. Any such `W` gives `c·x <= ‖M(x)‖ ‖W‖_1`.
    fn projected_dual(
        &self,
        s: &BarrierState,
        cost: &[f64],
        t: f64,
        gram: &Cholesky<f64, Dyn>,
    ) -> Result<f64> {
        let mut scaled = s.vectors.clone();
        for (j, l) in s.values.iter().enumerate() {
            let w = (1.0 / (1.0 - l) - 1.0 / (1.0 + l)) / t;
            scaled.column_mut(j).scale_mut(w);
        }
        let mut w = scaled * s.vectors.adjoint();
        let r: Vec<f64> = self.basis.iter().zip(cost).map(|(h, c)| c - h.trace_with(&w).re).collect();
        let y = gram.solve(&DVector::from_vec(r));
        for (h, yj) in self.basis.iter().zip(y.iter()) {
            for &(a, b, v) in &h.entries {
                w[(a, b)] += v * *yj;
            }
        }
        Ok(hermitian_eigenvalues(&w)?.iter().map(|v| v.abs()).sum())
    }

    /// Gradient, Hessian and `tr((I - M)^{-1}) + tr((I + M)^{-1})`.
    fn derivatives(&self, s: &BarrierState, cost: &[f64], t: f64) -> (Vec<f64>, DMatrix<f64>, f64) {
        let k = self.basis.len();
        let mut grad: Vec<f64> = cost.iter().map(|c| -t * c).collect();
        let mut hess = DMatrix::<f64>::zeros(k, k);
        let mut dual = 0.0;
        for sign in [1.0, -1.0] {
            // W = (I - sign M)^{-1}
            let inv: Vec<f64> = s.values.iter().map(|l| 1.0 / (1.0 - sign * l)).collect();
            dual += inv.iter().sum::<f64>();
            let mut scaled = s.vectors.clone();
            for (j, w) in inv.iter().enumerate() {
                scaled.column_mut(j).scale_mut(*w);
            }
            let w = scaled * s.vectors.adjoint();
            let zs: Vec<CMatrix> = self.basis.iter().map(|h| h.left_mul(&w)).collect();
            let zt: Vec<CMatrix> = zs.iter().map(|z| z.transpose()).collect();
            for i in 0..k {
                grad[i] += sign * self.basis[i].trace_with(&w).re;
                for j in 0..=i {
                    let v: f64 = zs[j].iter().zip(zt[i].iter()).map(|(a, b)| (a * b).re).sum();
                    hess[(i, j)] += v;
                    if i != j {
                        hess[(j, i)] += v;
                    }
                }
            }
        }
        (grad, hess, dual)
    }
}

/// `Re tr(H_i H_j)`.
fn gram_matrix(basis: &[Sparse], dim: usize) -> DMatrix<f64> {
    let k = basis.len();
    let mut g = DMatrix::zeros(k, k);
    for j in 0..k {
        let mut hj = CMatrix::zeros(dim, dim);
        for &(a, b, v) in &basis[j].entries {
            hj[(a, b)] = v;
        }
        for i in 0..=j {
            let v = basis[i].trace_with(&hj).re;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Newton direction `H^{-1} g` for a symmetric positive definite `H`, with
/// diagonal equilibration since curvatures span many orders near the boundary.
fn solve_spd(mut hess: DMatrix<f64>, grad: &[f64]) -> Result<Vec<f64>> {
    let k = hess.nrows();
    let d: Vec<f64> = (0..k).map(|i| 1.0 / hess[(i, i)].max(f64::MIN_POSITIVE).sqrt()).collect();
    for i in 0..k {
        for j in 0..k {
            hess[(i, j)] *= d[i] * d[j];
        }
    }
    let mut shift = 0.0;
    let chol = loop {
        let mut h = hess.clone();
        for i in 0..k {
            h[(i, i)] += shift;
        }
        if let Some(c) = h.cholesky() {
            break c;
        }
        shift = if shift == 0.0 { 1e-12 } else { shift * 100.0 };
        if shift > 1e-2 {
            return Err(Error::Numerical("barrier Hessian is not positive definite".into()));
        }
    };
    let rhs = DVector::from_iterator(k, grad.iter().zip(&d).map(|(g, s)| g * s));
    Ok(chol.solve(&rhs).iter().zip(&d).map(|(y, s)| y * s).collect())
}

fn polynomial_from(algebra: &Algebra, pairs: &[GroupElement], x: &[f64]) -> FourierPolynomial {
    let mut f = algebra.zero();
    for (g, ab) in pairs.iter().zip(x.chunks(2)) {
        let c = Complex64::new(ab[0], ab[1]);
        f.add_term(g.clone(), c);
        f.add_term(-g, c.conj());
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::{lip, lip_upper_bound};
    use crate::group::Group;
    use crate::metric::state::VectorState;
    use crate::twisted::Cocycle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_state(support: &[GroupElement], seed: u64) -> StateSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        StateSpec::Vector(VectorState::random(support, 2, &mut rng).unwrap())
    }

    #[test]
    fn identical_states_are_degenerate() {
        let g = Group::new(2, 2).unwrap();
        let alg = Algebra::new(g, Cocycle::planar(0.3)).unwrap();
        let t = Truncation::new(g, 0, 3.0).unwrap();
        let s = random_state(&[g.zero(), g.unit(0)], 1);
        for mode in [DistanceMode::CertifiedLower, DistanceMode::Compressed] {
            let r = connes_distance_ball(&alg, &s, &s, &t, 2.0, mode, &SolverOptions::default()).unwrap();
            assert!(r.degenerate);
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn certified_closed_form_and_certificate() {
        let g = Group::new(2, 2).unwrap();
        let alg = Algebra::new(g, Cocycle::planar(0.3)).unwrap();
        let t = Truncation::new(g, 1, 3.0).unwrap();
        let support: Vec<_> = g.ball(1, 2.0).unwrap().iter().cloned().collect();
        let phi = random_state(&support[..4], 5);
        let r = connes_distance_ball(
            &alg,
            &phi,
            &StateSpec::Trace,
            &t,
            2.0,
            DistanceMode::CertifiedLower,
            &SolverOptions::default(),
        )
        .unwrap();
        let oracle = support
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| phi.phi(&alg, x).norm() / lip_exact_generator(x))
            .fold(0.0, f64::max);
        assert!((r.value - oracle).abs() < 1e-14);
        let f = r.certificate.unwrap();
        assert!(f.is_self_adjoint(1e-15));
        assert!((lip_upper_bound(&f) - 1.0).abs() < 1e-12);
        let gain = phi.evaluate(&f) - StateSpec::Trace.evaluate(&f);
        assert!((gain.re - r.value).abs() < 1e-12);
        assert!(gain.im.abs() < 1e-12);
    }

    #[test]
    fn compressed_brackets_certified() {
        let g = Group::new(2, 2).unwrap();
        let alg = Algebra::new(g, Cocycle::planar(0.3)).unwrap();
        let t = Truncation::new(g, 0, 3.0).unwrap();
        let support: Vec<_> = g.ball(0, 1.5).unwrap().iter().cloned().collect();
        let phi = random_state(&support, 11);
        let psi = random_state(&support, 12);
        let opts = SolverOptions::default();
        let cert = connes_distance_ball(&alg, &phi, &psi, &t, 1.5, DistanceMode::CertifiedLower, &opts).unwrap();
        let comp = connes_distance_ball(&alg, &phi, &psi, &t, 1.5, DistanceMode::Compressed, &opts).unwrap();
        assert!(cert.value <= comp.value + opts.tol);
        assert!(comp.residual <= opts.tol);
        let f = comp.certificate.unwrap();
        assert!(lip(&f, &t).unwrap() <= 1.0 + 1e-9);
        let gain = (phi.evaluate(&f) - psi.evaluate(&f)).re;
        assert!((gain - comp.value).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_support() {
        let g = Group::new(2, 2).unwrap();
        let alg = Algebra::untwisted(g);
        let t = Truncation::new(g, 0, 2.0).unwrap();
        let opts = SolverOptions::default();
        let e = g.unit(0);
        let err = connes_distance(&alg, &StateSpec::Trace, &StateSpec::Trace, &t, std::slice::from_ref(&e), DistanceMode::CertifiedLower, &opts);
        assert!(err.is_err());
        let far = g.integers(&[5, 0]).unwrap();
        let err = connes_distance(&alg, &StateSpec::Trace, &StateSpec::Trace, &t, &[far.clone(), -&far], DistanceMode::CertifiedLower, &opts);
        assert!(err.is_err());
        assert!(connes_distance_ball(&alg, &StateSpec::Trace, &StateSpec::Trace, &t, 3.0, DistanceMode::CertifiedLower, &opts).is_err());
        assert_eq!("compressed".parse::<DistanceMode>().unwrap(), DistanceMode::Compressed);
        assert!("other".parse::<DistanceMode>().is_err());
    }

    #[test]
    fn barrier_derivatives_match_finite_differences() {
        let g = Group::new(2, 2).unwrap();
        let alg = Algebra::new(g, Cocycle::planar(0.3)).unwrap();
        let t = Truncation::new(g, 1, 2.5).unwrap();
        let pairs = pair_representatives(g.ball(1, 2.2).unwrap().elements());
        let mut basis = Vec::new();
        for p in &pairs {
            let one = Complex64::new(1.0, 0.0);
            let a = alg.from_terms([(p.clone(), one), (-p, one)]);
            basis.push(Sparse::from_dense(&(commutator_matrix(&a, &t).unwrap().into_matrix() * I)));
        }
        let k = basis.len();
        let bar = Barrier { basis: &basis, dim: t.dim() };
        let cost: Vec<f64> = (0..k).map(|i| (i as f64 * 0.37).sin()).collect();
        let x: Vec<f64> = (0..k).map(|i| 0.01 * (i as f64 * 1.3).cos()).collect();
        let s = bar.state(&x).unwrap();
        assert!(s.norm() < 1.0);
        let (grad, hess, _) = bar.derivatives(&s, &cost, 3.0);
        let f = |y: &[f64]| -3.0 * cost.iter().zip(y).map(|(c, v)| c * v).sum::<f64>() - bar.logdet(y).unwrap();
        let h = 1e-6;
        for i in 0..k {
            let mut xp = x.clone();
            xp[i] += h;
            let mut xm = x.clone();
            xm[i] -= h;
            let fd = (f(&xp) - f(&xm)) / (2.0 * h);
            assert!((fd - grad[i]).abs() < 1e-4 * (1.0 + fd.abs()), "grad {i}: {fd} vs {}", grad[i]);
            let (gp, _, _) = bar.derivatives(&bar.state(&xp).unwrap(), &cost, 3.0);
            let (gm, _, _) = bar.derivatives(&bar.state(&xm).unwrap(), &cost, 3.0);
            for j in 0..k {
                let fd = (gp[j] - gm[j]) / (2.0 * h);
                assert!((fd - hess[(i, j)]).abs() < 1e-4 * (1.0 + fd.abs()), "hess {i},{j}: {fd} vs {}", hess[(i, j)]);
            }
        }
    }
}
