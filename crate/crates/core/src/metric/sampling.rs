use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::group::GroupElement;
use crate::twisted::{Algebra, FourierPolynomial};

/// Random self-adjoint polynomial on `support`: a real Gaussian at `0` and a
/// complex Gaussian `c` at one element of each pair `{g, -g}`, with
/// `f(-g) = conj(c)`.
///
/// The support is visited in its given order, so a fixed seed and a fixed
/// support always produce the same polynomial.
pub fn random_self_adjoint(
    algebra: &Algebra,
    support: &[GroupElement],
    rng: &mut impl Rng,
) -> FourierPolynomial {
    let mut f = algebra.zero();
    for g in support {
        if g.is_zero() {
            f.add_term(g.clone(), Complex64::new(rng.sample(StandardNormal), 0.0));
            continue;
        }
        let neg = -g;
        if neg < *g {
            continue;
        }
        let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        f.add_term(g.clone(), c);
        f.add_term(neg, c.conj());
    }
    f
}
