//! Fejér smoothing, states, Connes distance and convergence diagnostics.

pub mod bridge;
pub mod distance;
pub mod fejer;
pub mod sampling;
pub mod spectral;
pub mod state;

pub use bridge::{bridge_builder_epsilon, bridge_builder_sweep, BridgeReport};
pub use distance::{connes_distance, connes_distance_ball, DistanceMode, DistanceReport, SolverOptions};
pub use fejer::{fejer_lip_contraction_check, fejer_smooth, FejerContractionReport, FejerSpec};
pub use sampling::random_self_adjoint;
pub use spectral::spectral_compare;
pub use state::{StateSpec, VectorState};
