use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::twisted::{Algebra, FourierPolynomial};

/// A unit vector `ξ ∈ ℓ²(G) ⊗ E` with finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorState {
    dim_e: usize,
    entries: BTreeMap<GroupElement, Vec<Complex64>>,
}

/// A state on the twisted group algebra, described by its positive-definite
/// function `φ(g) = ⟨ξ, λ(g) ξ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// The canonical trace, `φ(g) = δ_{g,0}`.
    Trace,
    Vector(VectorState),
}

impl VectorState {
    /// Normalizes the given entries; all must have length `dim_e`.
    pub fn new(
        dim_e: usize,
        entries: impl IntoIterator<Item = (GroupElement, Vec<Complex64>)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<GroupElement, Vec<Complex64>> = BTreeMap::new();
        for (g, v) in entries {
            if v.len() != dim_e {
                return Err(Error::invalid(format!(
                    "vector state entry has {} components, expected {dim_e}",
                    v.len()
                )));
            }
            let slot = map
                .entry(g)
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); dim_e]);
            for (s, x) in slot.iter_mut().zip(v) {
                *s += x;
            }
        }
        let norm2: f64 = map.values().flatten().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::invalid("vector state must be a nonzero finite vector"));
        }
        let inv = 1.0 / norm2.sqrt();
        for v in map.values_mut() {
            for z in v.iter_mut() {
                *z *= inv;
            }
        }
        Ok(VectorState { dim_e, entries: map })
    }

    /// Independent complex Gaussian components on `support ⊗ E`, normalized.
    pub fn random(support: &[GroupElement], dim_e: usize, rng: &mut impl Rng) -> Result<Self> {
        let entries: Vec<(GroupElement, Vec<Complex64>)> = support
            .iter()
            .map(|g| {
                let v = (0..dim_e)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect();
                (g.clone(), v)
            })
            .collect();
        Self::new(dim_e, entries)
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn entries(&self) -> impl Iterator<Item = (&GroupElement, &Vec<Complex64>)> {
        self.entries.iter()
    }

    /// `⟨ξ, λ(g) ξ⟩ = Σ_h' σ(g, h') ⟨ξ(g + h'), ξ(h')⟩`.
    pub fn phi(&self, algebra: &Algebra, g: &GroupElement) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (hp, v) in &self.entries {
            let Some(h) = g.checked_add(hp) else { continue };
            if let Some(u) = self.entries.get(&h) {
                let inner: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                acc += algebra.sigma(g, hp) * inner;
            }
        }
        acc
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    g: Vec<[i64; 2]>,
    e: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum StateJson {
    Trace,
    Vector { support: Vec<EntryJson> },
}

impl StateSpec {
    pub fn phi(&self, algebra: &Algebra, g: &GroupElement) -> Complex64 {
        match self {
            StateSpec::Trace => {
                if g.is_zero() {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            StateSpec::Vector(v) => v.phi(algebra, g),
        }
    }

    /// `φ(λ(f)) = Σ_g f(g) φ(g)`.
    pub fn evaluate(&self, f: &FourierPolynomial) -> Complex64 {
        f.terms().map(|(g, c)| c * self.phi(f.algebra(), g)).sum()
    }

    /// `{"kind": "trace"}` or `{"kind": "vector", "support": [{g, e: [[re, im], ...]}]}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let repr = match self {
            StateSpec::Trace => StateJson::Trace,
            StateSpec::Vector(v) => StateJson::Vector {
                support: v
                    .entries
                    .iter()
                    .map(|(g, e)| EntryJson {
                        g: g.to_pairs(),
                        e: e.iter().map(|z| [z.re, z.im]).collect(),
                    })
                    .collect(),
            },
        };
        serde_json::to_value(repr).expect("state serializes")
    }

    pub fn from_json_value(algebra: &Algebra, dim_e: usize, value: &serde_json::Value) -> Result<Self> {
        let parsed: StateJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::invalid(format!("bad state JSON: {e}")))?;
        match parsed {
            StateJson::Trace => Ok(StateSpec::Trace),
            StateJson::Vector { support } => {
                let group = algebra.group();
                let entries = support
                    .into_iter()
                    .map(|t| {
                        let g = GroupElement::from_pairs(&group, &t.g)?;
                        let e = t.e.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                        Ok((g, e))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(StateSpec::Vector(VectorState::new(dim_e, entries)?))
            }
        }
    }
}
