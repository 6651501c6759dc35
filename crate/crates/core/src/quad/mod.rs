//! Adaptive quadrature over intervals and interval collections, and the
//! substitution-identity check.

pub mod adaptive;
pub mod gk;
pub mod transform;

pub use adaptive::{
    integrate_breaks, integrate_collection, integrate_interval, QuadRule, QuadSpec, QuadratureOutcome,
    MAX_DEPTH_LIMIT,
};
pub use transform::{grid_breaks, transform_residual, TransformResidual};
