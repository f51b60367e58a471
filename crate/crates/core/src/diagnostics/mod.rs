//! Commutators, norms, identities and the desk-scale experiments.

pub mod commutator;
pub mod identity;
pub mod local_limit;
pub mod norms;
pub mod regularity;

pub use commutator::{
    commutator_breakdown, commutator_d2, decay_pair, commutator_decay_experiment, commutator_total, frozen_form, loglog_slope,
    CommutatorBreakdown, DecayConfig, DecayRow, DecayTable,
};
pub use identity::{gamma_constants, hessian_closed_form, hessian_finite_difference, hessian_identity_residual};
pub use local_limit::{local_lame, local_limit_experiment, LocalLimitRow};
pub use norms::{
    korn_bounds_continuum, korn_bounds_discrete, korn_ratio, multiplier_bound_check, multiplier_l2_bound,
    sobolev_lp_norm, sobolev_norm_h, RatioStats,
};
pub use regularity::{regularity_experiment, RegularityConfig, RegularityReport};
