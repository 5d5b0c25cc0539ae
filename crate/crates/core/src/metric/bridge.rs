use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dirac::lip;
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::metric::fejer::{fejer_smooth, FejerSpec};
use crate::metric::sampling::random_self_adjoint;
use crate::twisted::{lambda_matrix, Algebra, FourierPolynomial, Truncation};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BridgeReport {
    /// Fejér level.
    pub n: u32,
    /// Proxy level of the sampled polynomials and of the truncation.
    pub m: u32,
    #[serde(rename = "N")]
    pub order: u32,
    pub r: f64,
    pub support_radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub eps_max: f64,
    pub eps_mean: f64,
    /// The second bridge condition holds with `a = b` for every `b` in the
    /// smaller domain, so it carries no numerical error.
    pub bb2_exact: bool,
}

/// Draws `samples` self-adjoint polynomials on `ball(level(T), support_radius)`
/// normalized to `lip(f, T) = 1`. Zero-seminorm draws are redrawn.
pub fn normalized_samples(
    algebra: &Algebra,
    t: &Truncation,
    support_radius: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<FourierPolynomial>> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    if !(support_radius > 0.0 && support_radius <= t.radius()) {
        return Err(Error::invalid(format!(
            "support radius {support_radius} must lie in (0, {}]",
            t.radius()
        )));
    }
    let support = t.group().ball(t.level(), support_radius)?;
    if support.len() < 2 {
        return Err(Error::invalid("support ball holds only the identity"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    let mut attempts = 0;
    while out.len() < samples {
        attempts += 1;
        if attempts > 10 * samples {
            return Err(Error::Numerical("random samples keep vanishing seminorm".into()));
        }
        let f = random_self_adjoint(algebra, support.elements(), &mut rng);
        let l = lip(&f, t)?;
        if l > 1e-12 {
            out.push(f.map_coeffs(|_, c| c / l));
        }
    }
    Ok(out)
}

/// Empirical `ε` for the first bridge condition: max and mean of
/// `‖P λ(f - E_N f) P‖` over normalized random samples.
pub fn bridge_builder_epsilon(
    algebra: &Algebra,
    spec: &FejerSpec,
    t: &Truncation,
    support_radius: f64,
    samples: usize,
    seed: u64,
) -> Result<BridgeReport> {
    let fs = normalized_samples(algebra, t, support_radius, samples, seed)?;
    epsilon_on(&fs, spec, t, support_radius, seed)
}

/// [`bridge_builder_epsilon`] over several orders with one fixed sample set.
pub fn bridge_builder_sweep(
    algebra: &Algebra,
    level: u32,
    orders: &[u32],
    t: &Truncation,
    support_radius: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<BridgeReport>> {
    let specs = orders
        .iter()
        .map(|&n| FejerSpec::new(level, n))
        .collect::<Result<Vec<_>>>()?;
    let fs = normalized_samples(algebra, t, support_radius, samples, seed)?;
    specs
        .par_iter()
        .map(|spec| epsilon_on(&fs, spec, t, support_radius, seed))
        .collect()
}

fn epsilon_on(
    fs: &[FourierPolynomial],
    spec: &FejerSpec,
    t: &Truncation,
    support_radius: f64,
    seed: u64,
) -> Result<BridgeReport> {
    let mut eps = Vec::with_capacity(fs.len());
    for f in fs {
        let diff = f.sub(&fejer_smooth(f, spec));
        eps.push(spectral_norm(&lambda_matrix(&diff, t)?)?);
    }
    Ok(BridgeReport {
        n: spec.level(),
        m: t.level(),
        order: spec.order(),
        r: t.radius(),
        support_radius,
        samples: fs.len(),
        seed,
        eps_max: eps.iter().copied().fold(0.0, f64::max),
        eps_mean: eps.iter().sum::<f64>() / eps.len() as f64,
        bb2_exact: true,
    })
}
