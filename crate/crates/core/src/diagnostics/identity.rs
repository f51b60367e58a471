//! Hessian of the radial power `|w|^{-(n+2s-2)}`:
//! `gamma1 w_hat (x) w_hat |w|^{-(n+2s)} - gamma2 |w|^{-(n+2s)} I`,
//! `gamma1 = (n+2s-2)(n+2s)`, `gamma2 = n+2s-2`.

use crate::error::{Error, Result};
use crate::grid::Point;
use crate::spectral::Mat2;

/// Closest a sample may come to the singularity.
pub const MIN_RADIUS: f64 = 0.1;
pub const DEFAULT_STEP: f64 = 1e-4;

pub fn gamma_constants(dim: usize, s: f64) -> (f64, f64) {
    let a = dim as f64 + 2.0 * s - 2.0;
    (a * (a + 2.0), a)
}

fn radial_power(dim: usize, s: f64, w: Point) -> f64 {
    let r = if dim == 1 { w[0].abs() } else { w[0].hypot(w[1]) };
    r.powf(-(dim as f64 + 2.0 * s - 2.0))
}

pub fn hessian_closed_form(dim: usize, s: f64, w: Point) -> Mat2 {
    let (g1, g2) = gamma_constants(dim, s);
    let r = if dim == 1 { w[0].abs() } else { w[0].hypot(w[1]) };
    let p = r.powf(-(dim as f64 + 2.0 * s));
    let mut m = [[0.0; 2]; 2];
    for i in 0..dim {
        for j in 0..dim {
            let id = if i == j { 1.0 } else { 0.0 };
            m[i][j] = g1 * w[i] * w[j] / (r * r) * p - g2 * p * id;
        }
    }
    m
}

/// Second-order central differences.
pub fn hessian_finite_difference(dim: usize, s: f64, w: Point, step: f64) -> Mat2 {
    let f = |x: Point| radial_power(dim, s, x);
    let shift = |x: Point, i: usize, h: f64| {
        let mut y = x;
        y[i] += h;
        y
    };
    let mut m = [[0.0; 2]; 2];
    for i in 0..dim {
        m[i][i] = (f(shift(w, i, step)) - 2.0 * f(w) + f(shift(w, i, -step))) / (step * step);
        for j in 0..i {
            let pp = f(shift(shift(w, i, step), j, step));
            let pm = f(shift(shift(w, i, step), j, -step));
            let mp = f(shift(shift(w, i, -step), j, step));
            let mm = f(shift(shift(w, i, -step), j, -step));
            let v = (pp - pm - mp + mm) / (4.0 * step * step);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// Largest entry of `|w|^{n+2s} (FD Hessian - closed form)` over the samples.
pub fn hessian_identity_residual(dim: usize, s: f64, samples: &[Point], step: f64) -> Result<f64> {
    if dim != 1 && dim != 2 {
        return Err(Error::param("dim", dim as f64, "must be 1 or 2"));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("s", s, "must lie in (0, 1)"));
    }
    if !(step > 0.0) {
        return Err(Error::param("step", step, "must be positive"));
    }
    let mut worst = 0.0f64;
    for w in samples {
        let r = if dim == 1 { w[0].abs() } else { w[0].hypot(w[1]) };
        if !(r >= MIN_RADIUS) || r <= 2.0 * step {
            return Err(Error::param("|w|", r, format!("samples must satisfy |w| >= {MIN_RADIUS}")));
        }
        let scale = r.powf(dim as f64 + 2.0 * s);
        let a = hessian_finite_difference(dim, s, *w, step);
        let b = hessian_closed_form(dim, s, *w);
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max(scale * (a[i][j] - b[i][j]).abs());
            }
        }
    }
    Ok(worst)
}
