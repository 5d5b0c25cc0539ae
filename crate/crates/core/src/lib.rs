//! Numerical laboratory for the spectral triples
//! `(C*(G_n, σ), ℓ²(G_n) ⊗ E, D_n)` on quantum tori and their inductive limit
//! on the noncommutative solenoid `C*(Z[1/p]^d, σ)`.
//!
//! The Dirac operator is `D = Σ_j X_j ⊗ γ_j + M_F ⊗ γ_{d+1}` where `X_j`
//! multiplies by the j-th coordinate and `M_F` by the level weight
//! `F(g) = p^{level(g)}`. Everything infinite is replaced by a compression to
//! a finite ball `{g ∈ G_n : L(g) <= R}`, `L = sqrt(|x|^2 + F^2)`.
//!
//! Modules:
//! - [`group`]: exact arithmetic, balls, coset transversals.
//! - [`clifford`]: anticommuting Hermitian unitaries.
//! - [`twisted`]: cocycles, Fourier polynomials, compressed left regular representation.
//! - [`dirac`]: Dirac matrices, spectra, commutators and Lipschitz seminorms.
//! - [`metric`]: Fejér smoothing, Connes distances and convergence diagnostics.

pub mod clifford;
pub mod dirac;
pub mod error;
pub mod group;
pub mod linalg;
pub mod metric;
pub mod report;
pub mod twisted;

pub use error::{Error, Result};
pub use num_complex::Complex64;
