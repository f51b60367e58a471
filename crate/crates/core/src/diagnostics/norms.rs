//! Fractional Sobolev norms, the Korn ratio and the Lamé multiplier bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, VectorField};
use crate::nonlocal::{NonlocalOperator, QuadratureSpec};
use crate::spectral::{frac_laplacian, fractional_power, lame_multiplier_apply, LameSymbolConstants};

/// `|(-Delta)^{t/2} u|_{L^p(region)}`.
pub fn sobolev_lp_norm(u: &VectorField, t: f64, p: f64, region: Option<&[bool]>) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::param("p", p, "must be at least 1"));
    }
    if let Some(r) = region {
        if r.len() != u.grid.node_count() {
            return Err(Error::InvalidMask(format!("region has {} entries", r.len())));
        }
        if !r.iter().any(|b| *b) {
            return Err(Error::EmptyRegion);
        }
    }
    Ok(frac_laplacian(u, t)?.lp_norm(p, region))
}

/// `(|u|_{L^2}^2 + |(-Delta)^{s/2} u|_{L^2}^2)^{1/2}`.
pub fn sobolev_norm_h(u: &VectorField, s: f64) -> f64 {
    let a = u.norm_l2();
    let b = fractional_power(u, s).norm_l2();
    a.hypot(b)
}

/// Projected-difference form over the unprojected Gagliardo form, both by
/// the same lattice sum.
pub fn korn_ratio(u: &VectorField, s: f64) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let op = NonlocalOperator::new(u.grid, s, QuadratureSpec::default())?;
    let one = crate::nonlocal::Coefficient::constant(1.0);
    let proj = op.apply(&one, u)?.dot(u);
    Ok(proj / op.gagliardo(u))
}

/// Exact range of [`korn_ratio`] on `grid`: extreme eigenvalues of the
/// per-frequency lattice symbol divided by its trace.
pub fn korn_bounds_discrete(grid: GridSpec, s: f64) -> Result<(f64, f64)> {
    let op = NonlocalOperator::new(grid, s, QuadratureSpec::default())?;
    if grid.dim() == 1 {
        return Ok((1.0, 1.0));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m in op.unit_symbol() {
        let tr = m[0] + m[2];
        let disc = ((0.5 * (m[0] - m[2])).powi(2) + m[1] * m[1]).sqrt();
        lo = lo.min((0.5 * tr - disc) / tr);
        hi = hi.max((0.5 * tr + disc) / tr);
    }
    Ok((lo, hi))
}

/// Continuum range `[ell1, ell1 + ell2] / (n ell1 + ell2)`.
pub fn korn_bounds_continuum(consts: &LameSymbolConstants, dim: usize) -> (f64, f64) {
    let tr = consts.trace(dim);
    if dim == 1 {
        return (1.0, 1.0);
    }
    (consts.ell1 / tr, (consts.ell1 + consts.ell2) / tr)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub trials: usize,
}

/// `|U|_p / |U + c R(x)R U|_p` over seeded random band-limited fields.
pub fn multiplier_bound_check(grid: GridSpec, c: f64, p: f64, trial_count: usize, seed: u64) -> Result<RatioStats> {
    if p != 2.0 && p != 4.0 {
        return Err(Error::param("p", p, "must be 2 or 4"));
    }
    if trial_count == 0 {
        return Err(Error::param("trial_count", 0.0, "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = (grid.points_per_dim() / 8).max(1);
    let mut stats = RatioStats {
        min: f64::INFINITY,
        max: 0.0,
        mean: 0.0,
        trials: trial_count,
    };
    for _ in 0..trial_count {
        let u = crate::fields::random_band_limited(grid, kmax, rand::Rng::gen(&mut rng));
        let r = u.lp_norm(p, None) / lame_multiplier_apply(&u, c)?.lp_norm(p, None);
        stats.min = stats.min.min(r);
        stats.max = stats.max.max(r);
        stats.mean += r / trial_count as f64;
    }
    Ok(stats)
}

/// Sharp `L^2` bound `max(1, 1/|1-c|)`.
pub fn multiplier_l2_bound(c: f64) -> f64 {
    1f64.max(1.0 / (1.0 - c).abs())
}
