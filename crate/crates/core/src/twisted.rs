//! Twisted group algebra `C_c(G, σ)` and its compressed left regular
//! σ-projective representation.
//!
//! The cocycle is the antisymmetric bicharacter
//! `σ(g, h) = exp(iπ ⟨g, Θh⟩)`, defined on all of `Z[1/p]^d` and normalized:
//! `σ(0, g) = σ(g, 0) = σ(g, -g) = 1`. The representation acts by
//! `(λ(g)ξ)(h) = σ(g, h - g) ξ(h - g)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::GammaSet;
use crate::error::{Error, Result};
use crate::group::{checked_pow, BallTable, Group, GroupElement, DEFAULT_BALL_CAP};
use crate::linalg::CMatrix;

/// Largest permitted dimension of a truncated Hilbert space.
pub const MAX_MATRIX_DIM: usize = 8192;

const ANTISYMMETRY_TOL: f64 = 1e-12;

/// Antisymmetric `Θ` defining `σ(g, h) = exp(iπ ⟨g, Θh⟩)`.
///
/// Only the strict upper triangle is stored. When every entry is a rational
/// number the phase is reduced modulo 2 exactly before the exponential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cocycle {
    d: usize,
    /// `Θ_jk` for `j < k`, row-major over the strict upper triangle.
    upper: Vec<f64>,
    /// Exact `(numerator, denominator)` form of `upper`, when known.
    rational: Option<Vec<(i64, i64)>>,
}

impl Cocycle {
    pub fn trivial(d: usize) -> Self {
        let m = d * d.saturating_sub(1) / 2;
        Cocycle {
            d,
            upper: vec![0.0; m],
            rational: Some(vec![(0, 1); m]),
        }
    }

    /// `Θ = [[0, θ], [-θ, 0]]`, the standard quantum torus twist.
    pub fn planar(theta: f64) -> Self {
        Cocycle {
            d: 2,
            upper: vec![theta],
            rational: None,
        }
    }

    /// Builds from a full row-major `d × d` matrix, which must be
    /// antisymmetric to `1e-12`.
    pub fn from_matrix(d: usize, theta: &[f64]) -> Result<Self> {
        if theta.len() != d * d {
            return Err(Error::invalid(format!(
                "theta must have {} entries for d = {d}, got {}",
                d * d,
                theta.len()
            )));
        }
        let mut upper = Vec::new();
        for j in 0..d {
            if theta[j * d + j].abs() > ANTISYMMETRY_TOL {
                return Err(Error::invalid("theta must have a zero diagonal"));
            }
            for k in j + 1..d {
                let (a, b) = (theta[j * d + k], theta[k * d + j]);
                if !a.is_finite() || (a + b).abs() > ANTISYMMETRY_TOL {
                    return Err(Error::invalid(format!(
                        "theta is not antisymmetric at ({j}, {k})"
                    )));
                }
                upper.push(a);
            }
        }
        Ok(Cocycle {
            d,
            upper,
            rational: None,
        })
    }

    /// Exact rational `Θ` given as `(numerator, denominator)` pairs, row-major.
    pub fn from_rational_matrix(d: usize, theta: &[(i64, i64)]) -> Result<Self> {
        if theta.iter().any(|&(_, den)| den <= 0) {
            return Err(Error::invalid("theta denominators must be positive"));
        }
        let floats: Vec<f64> = theta.iter().map(|&(a, b)| a as f64 / b as f64).collect();
        let mut c = Self::from_matrix(d, &floats)?;
        let mut exact = Vec::new();
        for j in 0..d {
            if theta[j * d + j].0 != 0 {
                return Err(Error::invalid("theta must have a zero diagonal"));
            }
            for k in j + 1..d {
                let (a, b) = (theta[j * d + k], theta[k * d + j]);
                if (a.0 as i128) * (b.1 as i128) != -(b.0 as i128) * (a.1 as i128) {
                    return Err(Error::invalid(format!(
                        "theta is not antisymmetric at ({j}, {k})"
                    )));
                }
                exact.push(a);
            }
        }
        c.rational = Some(exact);
        Ok(c)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_exact(&self) -> bool {
        self.rational.is_some()
    }

    /// Full row-major `Θ`.
    pub fn matrix(&self) -> Vec<f64> {
        let d = self.d;
        let mut m = vec![0.0; d * d];
        let mut it = self.upper.iter();
        for j in 0..d {
            for k in j + 1..d {
                let v = *it.next().expect("upper triangle");
                m[j * d + k] = v;
                m[k * d + j] = 0.0 - v;
            }
        }
        m
    }

    /// `⟨g, Θh⟩` reduced to `[0, 2)`.
    ///
    /// Computed pairwise as `Σ_{j<k} Θ_jk (x_j(g)x_k(h) - x_k(g)x_j(h))` with
    /// each cross term formed exactly in integers, so `σ(g, ±g) = 1` exactly.
    pub fn phase(&self, g: &GroupElement, h: &GroupElement) -> f64 {
        let (lg, lh) = (g.level(), h.level());
        let (u, v) = match (g.numerators_at(lg), h.numerators_at(lh)) {
            (Some(u), Some(v)) => (u, v),
            _ => return self.phase_float(g, h),
        };
        let denom_exp = lg + lh;
        let p = g.p();
        let mut t = 0.0;
        let mut idx = 0;
        for j in 0..self.d {
            for k in j + 1..self.d {
                let cross = u[j] as i128 * v[k] as i128 - u[k] as i128 * v[j] as i128;
                if cross != 0 {
                    let exact = self
                        .rational
                        .as_ref()
                        .and_then(|r| exact_term(r[idx], cross, p, denom_exp));
                    t += match exact {
                        Some(term) => term,
                        None => {
                            let scale = (p as f64).powi(denom_exp as i32);
                            self.upper[idx] * (cross as f64 / scale)
                        }
                    };
                }
                idx += 1;
            }
        }
        t.rem_euclid(2.0)
    }

    fn phase_float(&self, g: &GroupElement, h: &GroupElement) -> f64 {
        let (x, y) = (g.xs(), h.xs());
        let mut t = 0.0;
        let mut idx = 0;
        for j in 0..self.d {
            for k in j + 1..self.d {
                t += self.upper[idx] * (x[j] * y[k] - x[k] * y[j]);
                idx += 1;
            }
        }
        t.rem_euclid(2.0)
    }

    pub fn sigma(&self, g: &GroupElement, h: &GroupElement) -> Complex64 {
        let t = self.phase(g, h);
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::from_polar(1.0, PI * t)
    }
}

/// `(r/s) · cross / p^e` reduced modulo 2, in exact integer arithmetic.
fn exact_term((r, s): (i64, i64), cross: i128, p: u64, e: u32) -> Option<f64> {
    let pe = checked_pow(p, e)? as i128;
    let den = (s as i128).checked_mul(pe)?;
    let num = (r as i128).checked_mul(cross)?;
    let modulus = den.checked_mul(2)?;
    let reduced = num.rem_euclid(modulus);
    Some(reduced as f64 / den as f64)
}

/// Ambient data of the twisted group algebra: the group and its cocycle.
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra {
    group: Group,
    cocycle: Cocycle,
}

impl Algebra {
    pub fn new(group: Group, cocycle: Cocycle) -> Result<Self> {
        if cocycle.d() != group.d() {
            return Err(Error::invalid(format!(
                "cocycle dimension {} does not match group dimension {}",
                cocycle.d(),
                group.d()
            )));
        }
        Ok(Algebra { group, cocycle })
    }

    pub fn untwisted(group: Group) -> Self {
        Algebra {
            group,
            cocycle: Cocycle::trivial(group.d()),
        }
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn sigma(&self, g: &GroupElement, h: &GroupElement) -> Complex64 {
        self.cocycle.sigma(g, h)
    }

    pub fn zero(&self) -> FourierPolynomial {
        FourierPolynomial {
            algebra: self.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn delta(&self, g: &GroupElement) -> FourierPolynomial {
        self.monomial(g, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(&self, g: &GroupElement, c: Complex64) -> FourierPolynomial {
        let mut f = self.zero();
        f.add_term(g.clone(), c);
        f
    }

    pub fn from_terms(
        &self,
        terms: impl IntoIterator<Item = (GroupElement, Complex64)>,
    ) -> FourierPolynomial {
        let mut f = self.zero();
        for (g, c) in terms {
            f.add_term(g, c);
        }
        f
    }
}

/// A finitely supported `f : G -> C`, standing for `λ(f) = Σ f(g) λ(g)`.
///
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPolynomial {
    algebra: Algebra,
    coeffs: BTreeMap<GroupElement, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    g: Vec<[i64; 2]>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    support: Vec<TermJson>,
}

impl FourierPolynomial {
    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn group(&self) -> Group {
        self.algebra.group
    }

    pub fn add_term(&mut self, g: GroupElement, c: Complex64) {
        assert_eq!(g.group(), self.algebra.group, "element from another group");
        let entry = self.coeffs.entry(g).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.coeffs.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        }
    }

    pub fn coeff(&self, g: &GroupElement) -> Complex64 {
        self.coeffs.get(g).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.coeffs.keys()
    }

    /// Number of nonzero terms; see [`FourierPolynomial::is_zero`].
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest `n` with `supp f ⊆ G_n`.
    pub fn level(&self) -> u32 {
        self.coeffs.keys().map(|g| g.level()).max().unwrap_or(0)
    }

    /// `max L(g)` over the support (0 for the zero polynomial).
    pub fn support_radius(&self) -> f64 {
        self.coeffs.keys().map(|g| g.length()).fold(0.0, f64::max)
    }

    /// Coefficientwise map, dropping terms that become zero.
    pub fn map_coeffs(&self, mut f: impl FnMut(&GroupElement, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(g, &c)| (g.clone(), f(g, c)))
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        FourierPolynomial {
            algebra: self.algebra.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, &c) in &other.coeffs {
            out.add_term(g.clone(), -c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, &c) in &other.coeffs {
            out.add_term(g.clone(), c);
        }
        out
    }

    /// `f*(g) = conj(f(-g))`.
    pub fn adjoint(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(g, c)| (-g, c.conj())).collect();
        FourierPolynomial {
            algebra: self.algebra.clone(),
            coeffs,
        }
    }

    /// `f(-g) = conj(f(g))` for every `g`, within `tol`.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        let adj = self.adjoint();
        let keys = self.coeffs.keys().chain(adj.coeffs.keys());
        keys.into_iter()
            .all(|g| (self.coeff(g) - adj.coeff(g)).norm() <= tol)
    }

    /// `(f1 ⋆ f2)(h) = Σ_g f1(g) f2(h - g) σ(g, h - g)`.
    pub fn twisted_convolve(&self, other: &Self) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::invalid("convolution of polynomials over different algebras"));
        }
        let mut out = self.algebra.zero();
        for (g, &a) in &self.coeffs {
            for (k, &b) in &other.coeffs {
                let h = g.try_add(k)?;
                out.add_term(h, a * b * self.algebra.sigma(g, k));
            }
        }
        Ok(out)
    }

    /// The canonical trace `f(0)`.
    pub fn trace(&self) -> Complex64 {
        self.coeff(&self.algebra.group.zero())
    }

    /// `{support: [{g: [[num, exp], ...], re, im}, ...]}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let support = self
            .coeffs
            .iter()
            .map(|(g, c)| TermJson {
                g: g.to_pairs(),
                re: c.re,
                im: c.im,
            })
            .collect();
        serde_json::to_value(PolynomialJson { support }).expect("polynomial serializes")
    }

    pub fn from_json_value(algebra: &Algebra, value: &serde_json::Value) -> Result<Self> {
        let parsed: PolynomialJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::invalid(format!("bad polynomial JSON: {e}")))?;
        let mut f = algebra.zero();
        for t in parsed.support {
            let g = GroupElement::from_pairs(&algebra.group, &t.g)?;
            f.add_term(g, Complex64::new(t.re, t.im));
        }
        Ok(f)
    }
}

/// Finite compression `ℓ²(ball(n, R)) ⊗ E` of `ℓ²(G_n) ⊗ E`.
///
/// Basis order: ball order, then the standard basis of `E`.
#[derive(Debug, Clone)]
pub struct Truncation {
    ball: BallTable,
    gammas: GammaSet,
}

impl Truncation {
    pub fn new(group: Group, level: u32, radius: f64) -> Result<Self> {
        let gammas = GammaSet::build(group.d())?;
        let cap = DEFAULT_BALL_CAP.min(MAX_MATRIX_DIM / gammas.dim());
        let ball = group.ball_with_cap(level, radius, cap).map_err(|e| match e {
            Error::ResourceCap { size, .. } => Error::ResourceCap {
                what: "truncated Hilbert space",
                size: size * gammas.dim(),
                cap: MAX_MATRIX_DIM,
            },
            other => other,
        })?;
        Ok(Truncation { ball, gammas })
    }

    pub fn group(&self) -> Group {
        self.ball.group()
    }

    pub fn level(&self) -> u32 {
        self.ball.level()
    }

    pub fn radius(&self) -> f64 {
        self.ball.radius()
    }

    pub fn ball(&self) -> &BallTable {
        &self.ball
    }

    pub fn gammas(&self) -> &GammaSet {
        &self.gammas
    }

    pub fn dim_e(&self) -> usize {
        self.gammas.dim()
    }

    /// `|ball| · dim E`.
    pub fn dim(&self) -> usize {
        self.ball.len() * self.gammas.dim()
    }

    pub(crate) fn check_polynomial(&self, f: &FourierPolynomial) -> Result<()> {
        if f.group() != self.group() {
            return Err(Error::invalid("polynomial and truncation live on different groups"));
        }
        let level = f.level();
        if level > self.level() {
            return Err(Error::LevelMismatch {
                level,
                max_level: self.level(),
            });
        }
        Ok(())
    }
}

/// Compression `P λ(f) P` with entries
/// `⟨δ_h ⊗ e, λ(f) δ_h' ⊗ e'⟩ = f(h - h') σ(h - h', h') δ_{e e'}`.
pub fn lambda_matrix(f: &FourierPolynomial, t: &Truncation) -> Result<CMatrix> {
    t.check_polynomial(f)?;
    let de = t.dim_e();
    let ball = t.ball();
    let mut m = CMatrix::zeros(t.dim(), t.dim());
    for (col, hp) in ball.iter().enumerate() {
        for (g, &c) in f.terms() {
            let h = g.try_add(hp)?;
            if let Some(row) = ball.index_of(&h) {
                let v = c * f.algebra().sigma(g, hp);
                for e in 0..de {
                    m[(row * de + e, col * de + e)] += v;
                }
            }
        }
    }
    Ok(m)
}
