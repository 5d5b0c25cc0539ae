use serde::Serialize;

use crate::dirac::lip;
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::twisted::{FourierPolynomial, Truncation};

/// Product Fejér kernel of order `N` on the dual torus of `G_n ≅ Z^d`.
///
/// Its Fourier coefficients are `w_N(g) = Π_j max(0, 1 - |p^n x_j(g)| / N)` on
/// `G_n` and `0` off `G_n`, so `E_N` multiplies coefficients by `w_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FejerSpec {
    level: u32,
    order: u32,
}

impl FejerSpec {
    pub fn new(level: u32, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("Fejér order N must be at least 1"));
        }
        Ok(FejerSpec { level, order })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn weight(&self, g: &GroupElement) -> f64 {
        if !g.in_level(self.level) {
            return 0.0;
        }
        let Some(a) = g.numerators_at(self.level) else {
            return 0.0;
        };
        let n = self.order as f64;
        a.iter()
            .map(|&v| (1.0 - v.unsigned_abs() as f64 / n).max(0.0))
            .product()
    }
}

/// `E_N f : g ↦ w_N(g) f(g)`.
pub fn fejer_smooth(f: &FourierPolynomial, spec: &FejerSpec) -> FourierPolynomial {
    f.map_coeffs(|g, c| c * spec.weight(g))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FejerContractionReport {
    pub n: u32,
    pub order: u32,
    pub lip: f64,
    pub lip_smoothed: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `Lip(E_N f) <= Lip(f) (1 + tol)` on a truncation.
pub fn fejer_lip_contraction_check(
    f: &FourierPolynomial,
    spec: &FejerSpec,
    t: &Truncation,
    tol: f64,
) -> Result<FejerContractionReport> {
    if !f.is_self_adjoint(1e-12) {
        return Err(Error::invalid("Fejér contraction check needs a self-adjoint polynomial"));
    }
    let before = lip(f, t)?;
    let after = lip(&fejer_smooth(f, spec), t)?;
    Ok(FejerContractionReport {
        n: spec.level,
        order: spec.order,
        lip: before,
        lip_smoothed: after,
        tol,
        pass: after <= before * (1.0 + tol),
    })
}
