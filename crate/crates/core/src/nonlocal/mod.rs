//! Real-space coefficient, lattice kernel and the discrete nonlocal form.

pub mod coefficient;
pub mod form;
pub mod kernel;

pub use coefficient::{
    read_table, sign_changing_example, validate_coefficient, write_table, Coefficient, CoefficientKind,
    CoefficientReport, PairTable,
};
pub use form::{
    apply_operator, bilinear_form, energy, gagliardo_seminorm, projected_seminorm, separable_fast_apply,
    NonlocalOperator, QuadratureSpec, TailPolicy,
};
pub use kernel::{exterior_tail, KernelTable};
