use crate::dirac::dirac_spectrum;
use crate::error::{Error, Result};
use crate::linalg::hausdorff;
use crate::twisted::Truncation;

/// Hausdorff distance between the two truncated Dirac spectra inside
/// `[-window, window]`.
pub fn spectral_compare(t1: &Truncation, t2: &Truncation, window: f64) -> Result<f64> {
    let limit = t1.radius().min(t2.radius());
    if !(window > 0.0 && window <= limit) {
        return Err(Error::invalid(format!(
            "window {window} must lie in (0, {limit}]"
        )));
    }
    let clip = |t: &Truncation| -> Result<Vec<f64>> {
        Ok(dirac_spectrum(t)?
            .into_iter()
            .filter(|v| v.abs() <= window + 1e-9)
            .collect())
    };
    let (a, b) = (clip(t1)?, clip(t2)?);
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid(format!("no eigenvalues inside window {window}")));
    }
    Ok(hausdorff(&a, &b))
}
