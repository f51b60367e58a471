//! Defect between the lattice form and its frozen-coefficient surrogate
//!
//! `D(u, phi) = B_A(u, phi) - <A_D (ell1 U - ell2 R(x)R U), V>`,
//! `U = (-Delta)^{s1/2} u`, `V = (-Delta)^{s2/2} phi`, `s1 + s2 = 2s`,
//!
//! and its Riesz-commutator part `d2 = <[R(x)R, A_D] U, V>`.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField};
use crate::nonlocal::{Coefficient, NonlocalOperator, QuadratureSpec};
use crate::spectral::{fractional_power, riesz_matrix_apply, LameSymbolConstants};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorBreakdown {
    pub total: f64,
    pub d2: f64,
    /// `total - d2`
    pub d1: f64,
}

fn check_split(s: f64, s1: f64, s2: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("s", s, "must lie in (0, 1)"));
    }
    if !(s1 > 0.0) {
        return Err(Error::param("s1", s1, "must be positive"));
    }
    if !(s2 > 0.0) {
        return Err(Error::param("s2", s2, "must be positive"));
    }
    if (s1 + s2 - 2.0 * s).abs() > 1e-12 {
        return Err(Error::param("s1 + s2", s1 + s2, format!("must equal 2s = {}", 2.0 * s)));
    }
    Ok(())
}

/// `<A_D (ell1 U - ell2 R(x)R U), V>` on the grid.
pub fn frozen_form(
    a_d: &ScalarField,
    u: &VectorField,
    phi: &VectorField,
    s1: f64,
    s2: f64,
    consts: &LameSymbolConstants,
) -> f64 {
    let uu = fractional_power(u, s1);
    let vv = fractional_power(phi, s2);
    let mut m = uu.scaled(consts.ell1);
    m.axpy(-consts.ell2, &riesz_matrix_apply(&uu));
    m.weighted(&a_d.values).dot(&vv)
}

/// `D_{s1,s2}(u, phi)` using a prepared lattice operator.
pub fn commutator_total_with(
    op: &NonlocalOperator,
    a: &Coefficient,
    u: &VectorField,
    phi: &VectorField,
    s1: f64,
    s2: f64,
    consts: &LameSymbolConstants,
) -> Result<f64> {
    check_split(op.s(), s1, s2)?;
    u.same_grid(phi)?;
    let b = op.apply(a, u)?.dot(phi);
    Ok(b - frozen_form(&a.diagonal(u.grid), u, phi, s1, s2, consts))
}

#[allow(clippy::too_many_arguments)]
pub fn commutator_total(
    a: &Coefficient,
    s: f64,
    u: &VectorField,
    phi: &VectorField,
    s1: f64,
    s2: f64,
    consts: &LameSymbolConstants,
) -> Result<f64> {
    check_split(s, s1, s2)?;
    let op = NonlocalOperator::new(u.grid, s, QuadratureSpec::default())?;
    commutator_total_with(&op, a, u, phi, s1, s2, consts)
}

/// `<R(x)R (A_D U) - A_D R(x)R U, V>`, computed spectrally.
pub fn commutator_d2(a_d: &ScalarField, u: &VectorField, phi: &VectorField, s1: f64, s2: f64) -> Result<f64> {
    if !(s1 > 0.0 && s2 > 0.0) {
        return Err(Error::param("s1", s1.min(s2), "orders must be positive"));
    }
    u.same_grid(phi)?;
    if a_d.grid != u.grid {
        return Err(Error::GridMismatch("A_D and fields live on different grids".into()));
    }
    let uu = fractional_power(u, s1);
    let vv = fractional_power(phi, s2);
    let left = riesz_matrix_apply(&uu.weighted(&a_d.values));
    let right = riesz_matrix_apply(&uu).weighted(&a_d.values);
    Ok(left.sub(&right).dot(&vv))
}

pub fn commutator_breakdown(
    a: &Coefficient,
    s: f64,
    u: &VectorField,
    phi: &VectorField,
    s1: f64,
    s2: f64,
    consts: &LameSymbolConstants,
) -> Result<CommutatorBreakdown> {
    let total = commutator_total(a, s, u, phi, s1, s2, consts)?;
    let d2 = commutator_d2(&a.diagonal(u.grid), u, phi, s1, s2)?;
    Ok(CommutatorBreakdown { total, d2, d1: total - d2 })
}

/// Settings of the frequency sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayConfig {
    /// Finest grid; the sweep also uses `N/2` (and `N/4` when extrapolating).
    pub grid: GridSpec,
    pub s: f64,
    pub s1: f64,
    pub s2: f64,
    pub frequencies: Vec<f64>,
    /// Richardson-extrapolate the lattice form between `N` and `N/2`.
    pub extrapolate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub k: f64,
    /// All three normalized by `|U| |V|`.
    pub total: f64,
    pub d1: f64,
    pub d2: f64,
    /// Relative change of `total` when the resolution is halved.
    pub refinement_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    /// Least-squares slope of `log |total|` against `log k`.
    pub slope: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Test pair at frequency `k` along the first axis: bump-windowed waves with
/// longitudinal amplitude (plus a transverse part in 2D).
pub fn decay_pair(grid: GridSpec, k: f64) -> (VectorField, VectorField) {
    let amp = if grid.dim() == 1 { [1.0, 0.0] } else { [0.8, 0.6] };
    (
        crate::fields::windowed_wave(grid, [k, 0.0], amp, 0.3),
        crate::fields::windowed_wave(grid, [k, 0.0], amp, 0.0),
    )
}

/// Normalized defects for one `k` on one grid: `(total, d2)`.
fn normalized_defect(
    grid: GridSpec,
    k: f64,
    cfg: &DecayConfig,
    coef: &dyn Fn(GridSpec) -> Result<Coefficient>,
    consts: &LameSymbolConstants,
) -> Result<(f64, f64)> {
    let (u, phi) = decay_pair(grid, k);
    let a = coef(grid)?;
    let op = NonlocalOperator::new(grid, cfg.s, QuadratureSpec::default())?;
    let total = commutator_total_with(&op, &a, &u, &phi, cfg.s1, cfg.s2, consts)?;
    let d2 = commutator_d2(&a.diagonal(grid), &u, &phi, cfg.s1, cfg.s2)?;
    let norm = fractional_power(&u, cfg.s1).norm_l2() * fractional_power(&phi, cfg.s2).norm_l2();
    if norm == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok((total / norm, d2 / norm))
}

/// Sweeps the frequencies with a coefficient built on each grid by `coef`.
pub fn commutator_decay_experiment(
    coef: &dyn Fn(GridSpec) -> Result<Coefficient>,
    cfg: &DecayConfig,
    consts: &LameSymbolConstants,
) -> Result<DecayTable> {
    check_split(cfg.s, cfg.s1, cfg.s2)?;
    if cfg.frequencies.len() < 2 || cfg.frequencies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("frequencies", cfg.frequencies.len() as f64, "need at least two, increasing"));
    }
    let n = cfg.grid.points_per_dim();
    let levels = if cfg.extrapolate { 3 } else { 2 };
    let grids: Vec<GridSpec> = (0..levels).map(|l| cfg.grid.with_points(n >> l)).collect::<Result<_>>()?;
    let q = 2f64.powf(2.0 - 2.0 * cfg.s);
    let mut rows = Vec::new();
    for &k in &cfg.frequencies {
        let vals: Vec<(f64, f64)> = grids
            .iter()
            .map(|g| normalized_defect(*g, k, cfg, coef, consts))
            .collect::<Result<_>>()?;
        let estimate = |i: usize| {
            if cfg.extrapolate {
                (q * vals[i].0 - vals[i + 1].0) / (q - 1.0)
            } else {
                vals[i].0
            }
        };
        let (fine, coarse) = (estimate(0), estimate(1));
        let d2 = vals[0].1;
        rows.push(DecayRow {
            k,
            total: fine,
            d1: fine - d2,
            d2,
            refinement_change: (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE),
        });
    }
    let ks: Vec<f64> = rows.iter().map(|r| r.k).collect();
    let ts: Vec<f64> = rows.iter().map(|r| r.total).collect();
    Ok(DecayTable {
        slope: loglog_slope(&ks, &ts),
        rows,
    })
}
