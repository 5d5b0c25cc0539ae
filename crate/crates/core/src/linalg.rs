//! Dense complex linear algebra used for spectra and operator norms.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |m - m*|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `max |m + m*|`.
pub fn skew_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] + m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the Hermitian
/// part `(m + m*)/2` is used.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Numerical("eigenvalues of a non-square matrix".into()));
    }
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let ev = h.symmetric_eigenvalues();
    let mut out: Vec<f64> = ev.iter().copied().collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigensolver returned a non-finite value".into()));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Eigenpairs of a Hermitian matrix (columns of the returned matrix).
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(h);
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigensolver returned a non-finite value".into()));
    }
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

/// Operator (spectral) norm.
///
/// Hermitian and skew-Hermitian inputs are handled by a Hermitian eigensolve
/// of `m` or `i·m`; anything else goes through the largest eigenvalue of `m*m`.
pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    let scale = max_abs(m);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let tol = 1e-13 * scale;
    if m.nrows() == m.ncols() {
        if hermiticity_defect(m) <= tol {
            return Ok(extreme_abs(&hermitian_eigenvalues(m)?));
        }
        if skew_defect(m) <= tol {
            return Ok(extreme_abs(&hermitian_eigenvalues(&(m * I))?));
        }
    }
    let gram = m.adjoint() * m;
    let top = hermitian_eigenvalues(&gram)?
        .last()
        .copied()
        .unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

fn extreme_abs(ev: &[f64]) -> f64 {
    ev.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

/// Hausdorff distance between two finite sets of reals.
pub fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one_sided = |xs: &[f64], ys: &[f64]| {
        xs.iter()
            .map(|x| ys.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}
