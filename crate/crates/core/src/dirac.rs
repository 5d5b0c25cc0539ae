//! Truncated Dirac operators `D_n`, their spectra, commutators `[D_n, λ_n(f)]`
//! and the Lipschitz seminorms `Lip_n(f) = ‖[D_n, λ_n(f)]‖`.
//!
//! On the basis vector `δ_g ⊗ e` the Dirac operator acts by the block
//! `A(g) = Σ_j x_j(g) γ_j + F(g) γ_{d+1}`, so `|D|` is multiplication by `L`.
//! The commutator with `λ(δ_g)` maps `δ_{h-g} ⊗ e` to
//! `σ(g, h-g) δ_h ⊗ (Σ_j x_j(g)γ_j + (F(h) - F(h-g)) γ_{d+1}) e`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg::{hermitian_eigenvalues, spectral_norm, CMatrix};
use crate::twisted::{FourierPolynomial, Truncation};

/// Compressed Dirac operator on a truncation.
#[derive(Debug, Clone)]
pub struct DiracMatrix {
    matrix: CMatrix,
}

impl DiracMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Compressed commutator `P [D, λ(f)] P`.
#[derive(Debug, Clone)]
pub struct CommutatorMatrix {
    matrix: CMatrix,
    support_radius: f64,
}

impl CommutatorMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `max L(g)` over the support of the polynomial.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn norm(&self) -> Result<f64> {
        spectral_norm(&self.matrix)
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `Σ_j x_j(g) γ_j` for the first `d` generators.
fn coordinate_block(t: &Truncation, g: &GroupElement) -> CMatrix {
    let mut coeffs = g.xs();
    coeffs.push(0.0);
    t.gammas().combine(&coeffs)
}

/// Block-diagonal assembly of `A(g)` over the ball.
pub fn dirac_matrix(t: &Truncation) -> DiracMatrix {
    let de = t.dim_e();
    let mut m = CMatrix::zeros(t.dim(), t.dim());
    for (i, g) in t.ball().iter().enumerate() {
        let mut coeffs = g.xs();
        coeffs.push(g.f_weight() as f64);
        let block = t.gammas().combine(&coeffs);
        m.view_mut((i * de, i * de), (de, de)).copy_from(&block);
    }
    DiracMatrix { matrix: m }
}

/// Eigenvalues of the assembled Dirac matrix, ascending.
pub fn dirac_spectrum(t: &Truncation) -> Result<Vec<f64>> {
    hermitian_eigenvalues(dirac_matrix(t).matrix())
}

/// `{±L(g) : g ∈ ball}`, each with multiplicity `dim E / 2`, ascending.
pub fn spectrum_oracle(t: &Truncation) -> Vec<f64> {
    let half = t.dim_e() / 2;
    let mut out = Vec::with_capacity(t.dim());
    for g in t.ball().iter() {
        let l = g.length();
        for _ in 0..half {
            out.push(l);
            out.push(-l);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SpectrumRow {
    pub eigenvalue: f64,
    pub expected: f64,
    pub deviation: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SpectrumReport {
    pub rows: Vec<SpectrumRow>,
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Eigensolve of the assembled matrix compared against the `±L` oracle.
pub fn check_spectrum(t: &Truncation, tol: f64) -> Result<SpectrumReport> {
    let ev = dirac_spectrum(t)?;
    let expected = spectrum_oracle(t);
    if ev.len() != expected.len() {
        return Err(Error::Numerical("spectrum has the wrong size".into()));
    }
    let rows: Vec<SpectrumRow> = ev
        .iter()
        .zip(&expected)
        .map(|(&e, &x)| {
            let deviation = (e - x).abs();
            SpectrumRow {
                eigenvalue: e,
                expected: x,
                deviation,
                matched: deviation < tol,
            }
        })
        .collect();
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(SpectrumReport {
        pass: rows.iter().all(|r| r.matched),
        rows,
        max_deviation,
        tol,
    })
}

/// Groups a sorted spectrum into `(value, multiplicity)` clusters of width `tol`.
pub fn multiplicities(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((first, count)) if (v - *first).abs() <= tol => *count += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// `P [D, λ(f)] P` with exact entries.
pub fn commutator_matrix(f: &FourierPolynomial, t: &Truncation) -> Result<CommutatorMatrix> {
    t.check_polynomial(f)?;
    let de = t.dim_e();
    let ball = t.ball();
    let gamma_level = t.gammas().gamma_level();
    let blocks: Vec<(GroupElement, Complex64, CMatrix)> = f
        .terms()
        .map(|(g, &c)| (g.clone(), c, coordinate_block(t, g)))
        .collect();
    let weights: Vec<f64> = ball.iter().map(|h| h.f_weight() as f64).collect();
    let mut m = CMatrix::zeros(t.dim(), t.dim());
    for (col, hp) in ball.iter().enumerate() {
        for (g, c, xblock) in &blocks {
            let h = g.try_add(hp)?;
            let Some(row) = ball.index_of(&h) else { continue };
            let coeff = c * f.algebra().sigma(g, hp);
            let df = weights[row] - weights[col];
            let mut block = xblock.clone();
            if df != 0.0 {
                block += gamma_level * real(df);
            }
            let mut target = m.view_mut((row * de, col * de), (de, de));
            target += block * coeff;
        }
    }
    Ok(CommutatorMatrix {
        matrix: m,
        support_radius: f.support_radius(),
    })
}

/// `‖P [D, λ(f)] P‖`: a lower bound for `Lip(f)`, nondecreasing in the radius.
pub fn lip(f: &FourierPolynomial, t: &Truncation) -> Result<f64> {
    commutator_matrix(f, t)?.norm()
}

/// `Lip(δ_g) = sqrt(Σ_j x_j(g)^2 + s(g)^2)` with `s(g) = sup_h |F(h) - F(h-g)|`.
///
/// Independent of the cocycle and of the level `n` with `g ∈ G_n`.
pub fn lip_exact_generator(g: &GroupElement) -> f64 {
    let s = g.fdiff_sup() as f64;
    (g.xs().iter().map(|x| x * x).sum::<f64>() + s * s).sqrt()
}

/// Triangle-inequality bound `Σ_g |f(g)| Lip(δ_g) >= Lip(f)`.
pub fn lip_upper_bound(f: &FourierPolynomial) -> f64 {
    f.terms()
        .map(|(g, c)| c.norm() * lip_exact_generator(g))
        .sum()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LipEqualityReport {
    pub n: u32,
    pub m: u32,
    pub r: f64,
    pub cosets: usize,
    pub k0_norm: f64,
    pub max_coset_norm: f64,
    pub full_norm: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Finite-level comparison of `Lip_n` and `Lip_m` for `f ∈ C_c(G_n)`.
///
/// The compressed commutator on `ball(m, R)` preserves each coset
/// `k + G_n`. Its norm is computed on the full ball and on every coset block;
/// the check passes when no block beats the `k = 0` block (which is the
/// `G_n` compression) and the full norm equals it, both within `tol`.
pub fn lip_equality_check(
    f: &FourierPolynomial,
    n: u32,
    m: u32,
    r: f64,
    tol: f64,
) -> Result<LipEqualityReport> {
    if f.level() > n {
        return Err(Error::LevelMismatch {
            level: f.level(),
            max_level: n,
        });
    }
    let group = f.group();
    let reps = group.coset_representatives(m, n)?;
    let t = Truncation::new(group, m, r)?;
    let full = commutator_matrix(f, &t)?.into_matrix();
    let full_norm = spectral_norm(&full)?;

    let de = t.dim_e();
    let block_norms: Vec<Option<f64>> = reps
        .par_iter()
        .map(|k| -> Result<Option<f64>> {
            let idx: Vec<usize> = t
                .ball()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.checked_sub(k).is_some_and(|d| d.in_level(n)))
                .flat_map(|(i, _)| (0..de).map(move |e| i * de + e))
                .collect();
            if idx.is_empty() {
                return Ok(None);
            }
            let block = full.select_rows(&idx).select_columns(&idx);
            spectral_norm(&block).map(Some)
        })
        .collect::<Result<_>>()?;

    let k0_norm = block_norms[0].unwrap_or(0.0);
    let max_coset_norm = block_norms[1..]
        .iter()
        .flatten()
        .fold(0.0, |a: f64, &b| a.max(b));
    let pass = max_coset_norm <= k0_norm + tol && (full_norm - k0_norm).abs() <= tol;
    Ok(LipEqualityReport {
        n,
        m,
        r,
        cosets: reps.len(),
        k0_norm,
        max_coset_norm,
        full_norm,
        tol,
        pass,
    })
}
