//! Anticommuting self-adjoint unitaries `γ_1, ..., γ_{d+1}`.
//!
//! Built as a Pauli chain: with `q = ⌊(d+1)/2⌋` qubits,
//! `γ_{2i+1} = Z^{⊗i} ⊗ X ⊗ 1` and `γ_{2i+2} = Z^{⊗i} ⊗ Y ⊗ 1`, plus the
//! chirality `Z^{⊗q}` when `d + 1` is odd. The representation is irreducible,
//! so `dim E = 2^q`; for `d = 2` this is exactly `(X, Y, Z)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMatrix};

/// Largest permitted `dim E`.
pub const MAX_GAMMA_DIM: usize = 1 << 10;

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    d: usize,
    gammas: Vec<CMatrix>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CliffordReport {
    pub anticommutation: f64,
    pub hermiticity: f64,
    pub unitarity: f64,
    pub trace: f64,
    pub tol: f64,
    pub pass: bool,
}

fn pauli(which: char) -> CMatrix {
    let z0 = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match which {
        'I' => [one, z0, z0, one],
        'X' => [z0, one, one, z0],
        'Y' => [z0, -i, i, z0],
        'Z' => [one, z0, z0, -one],
        _ => unreachable!(),
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

fn chain(factors: &[char]) -> CMatrix {
    factors
        .iter()
        .fold(CMatrix::identity(1, 1), |acc, &c| acc.kronecker(&pauli(c)))
}

impl GammaSet {
    /// Pauli-chain generators for the Clifford algebra of `C^{d+1}`.
    pub fn build(d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::invalid("gamma matrices need d >= 1"));
        }
        let q = d.div_ceil(2);
        if q >= usize::BITS as usize || (1usize << q) > MAX_GAMMA_DIM {
            return Err(Error::ResourceCap {
                what: "gamma matrices",
                size: 1usize.checked_shl(q as u32).unwrap_or(usize::MAX),
                cap: MAX_GAMMA_DIM,
            });
        }
        let mut gammas = Vec::with_capacity(d + 1);
        for i in 0..q {
            for pauli in ['X', 'Y'] {
                let mut factors = vec!['Z'; i];
                factors.push(pauli);
                factors.extend(std::iter::repeat_n('I', q - i - 1));
                gammas.push(chain(&factors));
            }
        }
        if (d + 1) % 2 == 1 {
            gammas.push(chain(&vec!['Z'; q]));
        }
        assert_eq!(gammas.len(), d + 1);
        Ok(GammaSet { d, gammas })
    }

    /// Wraps arbitrary matrices, e.g. to exercise [`GammaSet::verify`].
    pub fn from_matrices(gammas: Vec<CMatrix>) -> Result<Self> {
        if gammas.len() < 2 {
            return Err(Error::invalid("need at least two gamma matrices"));
        }
        let dim = gammas[0].nrows();
        if gammas.iter().any(|g| g.nrows() != dim || g.ncols() != dim) {
            return Err(Error::invalid("gamma matrices must be square of equal size"));
        }
        Ok(GammaSet {
            d: gammas.len() - 1,
            gammas,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.gammas[0].nrows()
    }

    pub fn gammas(&self) -> &[CMatrix] {
        &self.gammas
    }

    /// `γ_{j+1}`, 0-based.
    pub fn gamma(&self, j: usize) -> &CMatrix {
        &self.gammas[j]
    }

    /// The last generator, multiplying the level weight in the Dirac operator.
    pub fn gamma_level(&self) -> &CMatrix {
        self.gammas.last().expect("nonempty")
    }

    /// `Σ_i v_i γ_i` for real coefficients.
    pub fn combine(&self, v: &[f64]) -> CMatrix {
        assert_eq!(v.len(), self.gammas.len());
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (g, &c) in self.gammas.iter().zip(v) {
            if c != 0.0 {
                out += g * Complex64::new(c, 0.0);
            }
        }
        out
    }

    /// Maximal entrywise deviations from `{γ_i, γ_j} = 2δ_ij`, `γ = γ*`,
    /// `γ² = 1` and `tr γ = 0`.
    pub fn verify(&self, tol: f64) -> CliffordReport {
        let n = self.dim();
        let id = CMatrix::identity(n, n);
        let two = Complex64::new(2.0, 0.0);
        let mut anti: f64 = 0.0;
        let mut herm: f64 = 0.0;
        let mut unit: f64 = 0.0;
        let mut trace: f64 = 0.0;
        for (i, a) in self.gammas.iter().enumerate() {
            herm = herm.max(max_abs(&(a - a.adjoint())));
            unit = unit.max(max_abs(&(a * a - &id)));
            trace = trace.max(a.trace().norm());
            for b in &self.gammas[i..] {
                let mut ac = a * b + b * a;
                if std::ptr::eq(a, b) {
                    ac -= &id * two;
                }
                anti = anti.max(max_abs(&ac));
            }
        }
        CliffordReport {
            anticommutation: anti,
            hermiticity: herm,
            unitarity: unit,
            trace,
            tol,
            pass: anti < tol && herm < tol && unit < tol && trace < tol,
        }
    }

    /// Nested `[re, im]` arrays, one matrix per generator.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mats: Vec<Vec<Vec<[f64; 2]>>> = self
            .gammas
            .iter()
            .map(|g| {
                (0..g.nrows())
                    .map(|i| (0..g.ncols()).map(|j| [g[(i, j)].re, g[(i, j)].im]).collect())
                    .collect()
            })
            .collect();
        serde_json::json!({ "d": self.d, "dim": self.dim(), "gammas": mats })
    }
}
