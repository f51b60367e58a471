//! Dirichlet, weighted Lamé and perturbative solvers.

pub mod dirichlet;
pub mod lame;
pub mod mask;
pub mod perturbative;

pub use dirichlet::{
    assemble_stiffness, dense_dirichlet_solve, masked_cg, smallest_stiffness_eigenvalue, solve_dirichlet,
    SolveReport, SolveStatus,
};
pub use lame::{lame_rhs, solve_constant_lame, solve_weighted_lame, weighted_lame_apply, LameSolution};
pub use mask::DomainMask;
pub use perturbative::{masked_bicgstab, solve_full_perturbative, weak_form_probe, FrozenOperator};
