//! Comparison with the local Lamé operator `div(a grad u) + 2 grad(a div u)`
//! for the separable coefficient `A(x,y) = (a(x)+a(y))/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField};
use crate::nonlocal::{Coefficient, NonlocalOperator, QuadratureSpec};
use crate::spectral::transform::{scalar_spectrum, scalar_synthesis};

/// Spectral `d/dx_axis`; the Nyquist mode is dropped.
pub fn partial(grid: &GridSpec, values: &[f64], axis: usize) -> Vec<f64> {
    let n = grid.points_per_dim();
    let mut spec = scalar_spectrum(grid, values);
    for (k, c) in spec.iter_mut().enumerate() {
        let idx = grid.multi_index(k)[axis];
        let xi = grid.frequency(k)[axis];
        *c *= if idx == n / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, 2.0 * PI * xi) };
    }
    scalar_synthesis(grid, spec)
}

/// `div(a grad u) + 2 grad(a div u)`.
pub fn local_lame(a: &ScalarField, u: &VectorField) -> VectorField {
    let g = u.grid;
    let d = g.dim();
    let comps: Vec<Vec<f64>> = (0..d).map(|c| u.component(c)).collect();
    let mut div = vec![0.0; g.node_count()];
    for j in 0..d {
        for (acc, v) in div.iter_mut().zip(partial(&g, &comps[j], j)) {
            *acc += v;
        }
    }
    let adiv: Vec<f64> = div.iter().zip(&a.values).map(|(x, y)| x * y).collect();
    let mut out = VectorField::zeros(g);
    for i in 0..d {
        let mut acc: Vec<f64> = partial(&g, &adiv, i).iter().map(|v| 2.0 * v).collect();
        for j in 0..d {
            let flux: Vec<f64> = partial(&g, &comps[i], j).iter().zip(&a.values).map(|(x, y)| x * y).collect();
            for (o, v) in acc.iter_mut().zip(partial(&g, &flux, j)) {
                *o += v;
            }
        }
        out.set_component(i, &acc);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalLimitRow {
    pub s: f64,
    /// Least-squares factor in `kappa L^s u ~ L0 u`.
    pub kappa: f64,
    /// `|kappa L^s u - L0 u| / |L0 u|`, 0 when `L0 u = 0`.
    pub residual: f64,
}

pub fn local_limit_experiment(a: &ScalarField, s_list: &[f64], u: &VectorField) -> Result<Vec<LocalLimitRow>> {
    if a.grid != u.grid {
        return Err(Error::GridMismatch("coefficient and field live on different grids".into()));
    }
    if s_list.iter().any(|s| !(*s > 0.5 && *s < 1.0)) || s_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("s_list", s_list.len() as f64, "must increase within (0.5, 1)"));
    }
    let target = local_lame(a, u);
    let tn = target.norm_l2();
    let coef = Coefficient {
        kind: crate::nonlocal::CoefficientKind::Separable(a.clone()),
        ..Coefficient::constant(1.0)
    };
    let mut rows = Vec::new();
    for &s in s_list {
        let op = NonlocalOperator::new(u.grid, s, QuadratureSpec::default())?;
        let lu = op.apply(&coef, u)?;
        let ll = lu.dot(&lu);
        let kappa = if ll == 0.0 { 0.0 } else { lu.dot(&target) / ll };
        let residual = if tn == 0.0 { 0.0 } else { lu.scaled(kappa).sub(&target).norm_l2() / tn };
        rows.push(LocalLimitRow { s, kappa, residual });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine() {
        let g = GridSpec::line(32, 2.0).unwrap();
        let v: Vec<f64> = (0..32).map(|i| (PI * g.coords(i)[0]).sin()).collect();
        let d = partial(&g, &v, 0);
        for i in 0..32 {
            assert!((d[i] - PI * (PI * g.coords(i)[0]).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_coefficient_lame_symbol() {
        // longitudinal wave: div grad + 2 grad div -> -3 (2 pi |xi|)^2
        let g = GridSpec::plane(16, 1.0).unwrap();
        let u = VectorField::from_fn(g, |x| [(2.0 * PI * x[0]).cos(), 0.0]);
        let l = local_lame(&ScalarField::constant(g, 1.0), &u);
        let w = (2.0 * PI).powi(2);
        assert!(l.add(&u.scaled(3.0 * w)).max_abs() < 1e-10);
    }
}
