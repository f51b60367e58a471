//! Weighted fractional Lamé system
//! `(-Delta)^{sigma/2} ( Abar [I + c R(x)R] (-Delta)^{t/2} u ) = (-Delta)^{sigma/2} f1 + f2`,
//! `sigma = 2s - t`, solved spectrally for constant `Abar` and by
//! preconditioned Richardson iteration otherwise.

use crate::error::{Error, Result};
use crate::grid::{ScalarField, VectorField};
use crate::solver::dirichlet::{SolveReport, SolveStatus};
use crate::spectral::{fractional_power, lame_multiplier_apply, lame_multiplier_solve};

/// Spectral solution plus whether a nonzero mean had to be discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct LameSolution {
    pub field: VectorField,
    pub dropped_mode: bool,
}

fn check_orders(t: f64, sigma: f64, c: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::param("t", t, "must lie in (0, 1)"));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::param("two_s_minus_t", sigma, "must lie in (0, 1)"));
    }
    if c == 1.0 {
        return Err(Error::SingularSymbol);
    }
    if !c.is_finite() {
        return Err(Error::param("c", c, "must be finite"));
    }
    Ok(())
}

/// `u = Abar^{-1} I^t D^{-1} (f1 + I^sigma f2)`.
pub fn solve_constant_lame(
    abar: f64,
    t: f64,
    sigma: f64,
    c: f64,
    f1: &VectorField,
    f2: &VectorField,
) -> Result<LameSolution> {
    check_orders(t, sigma, c)?;
    if !(abar > 0.0 && abar.is_finite()) {
        return Err(Error::param("Abar", abar, "must be positive"));
    }
    f1.same_grid(f2)?;
    let dropped_mode = !f1.is_mean_zero() || !f2.is_mean_zero();
    let mut g = fractional_power(f2, -sigma);
    let mut f1m = f1.clone();
    f1m.project_mean_zero();
    g.axpy(1.0, &f1m);
    let w = lame_multiplier_solve(&g, c)?;
    let mut field = fractional_power(&w, -t);
    field.scale(1.0 / abar);
    Ok(LameSolution { field, dropped_mode })
}

/// Forward operator `(-Delta)^{sigma/2} [Abar D (-Delta)^{t/2} u]`.
pub fn weighted_lame_apply(abar: &ScalarField, t: f64, sigma: f64, c: f64, u: &VectorField) -> Result<VectorField> {
    check_orders(t, sigma, c)?;
    let inner = lame_multiplier_apply(&fractional_power(u, t), c)?.weighted(&abar.values);
    Ok(fractional_power(&inner, sigma))
}

/// Assembled data `F = (-Delta)^{sigma/2} f1 + f2`.
pub fn lame_rhs(sigma: f64, f1: &VectorField, f2: &VectorField) -> VectorField {
    fractional_power(f1, sigma).add(f2)
}

/// Richardson iteration preconditioned by the constant solve at the
/// geometric mean of `Abar`. The residual is `|F - Op u| / |F|` with the mean
/// of `F` projected out.
pub fn solve_weighted_lame(
    abar: &ScalarField,
    t: f64,
    sigma: f64,
    c: f64,
    f1: &VectorField,
    f2: &VectorField,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    check_orders(t, sigma, c)?;
    f1.same_grid(f2)?;
    if abar.grid != f1.grid {
        return Err(Error::GridMismatch("weight and data live on different grids".into()));
    }
    if !(abar.min() > 0.0) {
        return Err(Error::param("Abar", abar.min(), "must be positive"));
    }
    let a0 = abar.geometric_mean();
    let mut rhs = lame_rhs(sigma, f1, f2);
    rhs.project_mean_zero();
    let norm = rhs.norm_l2();
    let mut u = VectorField::zeros(f1.grid);
    if norm == 0.0 {
        return Ok(SolveReport::trivial(u));
    }
    let zero = VectorField::zeros(f1.grid);
    let mut residuals = Vec::new();
    let mut status = SolveStatus::MaxIter;
    let mut r = rhs.clone();
    let mut iterations = 0;
    while iterations < max_iter {
        let du = solve_constant_lame(a0, t, sigma, c, &zero, &r)?.field;
        u.axpy(1.0, &du);
        iterations += 1;
        r = rhs.sub(&weighted_lame_apply(abar, t, sigma, c, &u)?);
        r.project_mean_zero();
        let rel = r.norm_l2() / norm;
        residuals.push(rel);
        if rel <= tol {
            status = SolveStatus::Converged;
            break;
        }
    }
    Ok(SolveReport {
        solution: u,
        iterations,
        residual_history: residuals,
        energy_history: Vec::new(),
        status,
    })
}
