//! θ(t), Hardy's Z(t), Z̃²(t) and a high-precision reference evaluator.

mod coeffs;
pub mod hardy;
pub mod oracle;
pub mod theta;

pub use hardy::{
    hardy_z, z_tilde_sq, z_tilde_sq_with, LnFactorMode, RSConfig, SummationMode,
    MAX_CORRECTION_TERMS, T_MIN,
};
pub use oracle::{hardy_z_oracle, oracle_root, HiPrecOracle};
pub use theta::{theta, theta_deriv, ThetaExpansion, THETA_MAX_ORDER};
