//! Fourier transforms, multipliers and symbol constants.

pub mod multipliers;
pub mod symbols;
pub mod transform;

pub use multipliers::{
    apply_matrix_symbol, apply_scalar_symbol, frac_laplacian, fractional_power, lame_inverse_symbol,
    lame_multiplier_apply, lame_multiplier_solve, lame_symbol, projector, riesz_matrix_apply, riesz_potential,
    riesz_square, vector_frac_laplacian, vector_symbol, Mat2, ZeroModeOutput,
};
pub use symbols::{derive_ell_constants, LameSymbolConstants, Provenance};
pub use transform::{forward_transform, inverse_transform, SpectralField};
