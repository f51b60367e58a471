//! Constants of the projected fractional symbol.
//!
//! The operator `p.v. int |z|^{-n-2s} (z (x) z / |z|^2) (u(x) - u(x+z)) dz` has
//! symbol `(2 pi |xi|)^{2s} (ell1 I + ell2 xi_hat (x) xi_hat)`. Splitting the
//! plane-wave integral into polar coordinates gives
//!
//! * a radial factor `G(2s) = int_0^inf (1 - cos r) r^{-1-2s} dr`,
//! * angular moments `int cos^2 |cos|^{2s}` (longitudinal) and
//!   `int sin^2 |cos|^{2s}` (transverse),
//!
//! all evaluated here by quadrature. The lattice sums at the bottom of the
//! file give an independent real-space check of the same symbol.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Point;
use crate::quadrature::tanh_sinh;
use crate::spectral::multipliers::{projector, Mat2};

/// How a pair of symbol constants was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    /// Relative change of the estimate between the requested and the doubled
    /// quadrature resolution.
    DerivedByQuadrature { refinement_change: f64 },
    UserSupplied,
}

/// `ell1`, `ell2` of the projected symbol; `c = -ell2/ell1` is the Lamé
/// parameter of the equivalent `ell1 (I + c R (x) R)` form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameSymbolConstants {
    pub ell1: f64,
    pub ell2: f64,
    pub provenance: Provenance,
}

impl LameSymbolConstants {
    pub fn new(ell1: f64, ell2: f64, provenance: Provenance) -> Result<Self> {
        if !(ell1 > 0.0 && ell1.is_finite()) {
            return Err(Error::param("ell1", ell1, "must be positive"));
        }
        // ell2 = 0 is the 1D convention
        if !(ell2 >= 0.0 && ell2.is_finite()) {
            return Err(Error::param("ell2", ell2, "must be nonnegative"));
        }
        Ok(Self { ell1, ell2, provenance })
    }

    pub fn c(&self) -> f64 {
        -self.ell2 / self.ell1
    }

    /// `n ell1 + ell2`, the trace of the angular part (symbol of the
    /// unprojected Gagliardo form).
    pub fn trace(&self, dim: usize) -> f64 {
        dim as f64 * self.ell1 + self.ell2
    }
}

/// Number of `2 pi` periods integrated numerically before the asymptotic tail.
const RADIAL_PERIODS: usize = 40;
/// Relative change tolerated between resolutions `r` and `2r`.
pub const REFINEMENT_TOL: f64 = 1e-10;

/// `G(beta) = int_0^inf (1 - cos r) r^{-1-beta} dr` for `beta` in `(0, 2)`.
pub fn radial_factor(beta: f64, resolution: usize) -> f64 {
    let f = |x: f64| {
        let h = (0.5 * x).sin();
        2.0 * h * h * x.powf(-1.0 - beta)
    };
    let panels = 2 * RADIAL_PERIODS;
    let mut acc = 0.0;
    for p in 0..panels {
        acc += tanh_sinh(f, p as f64 * PI, (p + 1) as f64 * PI, resolution);
    }
    let x = 2.0 * PI * RADIAL_PERIODS as f64;
    // int_X^inf r^{-1-beta} dr
    let plain = x.powf(-beta) / beta;
    // int_X^inf cos r r^{-nu} dr at X = 2 pi M, by repeated integration by parts
    let nu = 1.0 + beta;
    let mut osc = 0.0;
    let mut coef = nu;
    let mut sign = 1.0;
    for m in 0..5 {
        let i = 2 * m;
        osc += sign * coef * x.powf(-nu - 1.0 - i as f64);
        coef *= (nu + i as f64 + 1.0) * (nu + i as f64 + 2.0);
        sign = -sign;
    }
    acc + plain - osc
}

/// `int_0^{2 pi} |cos|^{2s} cos^2` and `int_0^{2 pi} |cos|^{2s} sin^2`.
pub fn angular_moments(s: f64, resolution: usize) -> (f64, f64) {
    let p = 2.0 * s;
    let long = 4.0 * tanh_sinh(|t| t.cos().max(0.0).powf(p + 2.0), 0.0, 0.5 * PI, resolution);
    let trans = 4.0
        * tanh_sinh(
            |t| {
                let sn = t.sin();
                sn * sn * t.cos().max(0.0).powf(p)
            },
            0.0,
            0.5 * PI,
            resolution,
        );
    (long, trans)
}

fn ell_pair(dim: usize, s: f64, resolution: usize) -> (f64, f64) {
    let g = radial_factor(2.0 * s, resolution);
    if dim == 1 {
        (2.0 * g, 0.0)
    } else {
        let (long, trans) = angular_moments(s, resolution);
        (g * trans, g * (long - trans))
    }
}

/// Derives `(ell1, ell2)` by quadrature and checks them under refinement.
pub fn derive_ell_constants(dim: usize, s: f64, resolution: usize) -> Result<LameSymbolConstants> {
    if dim != 1 && dim != 2 {
        return Err(Error::param("dim", dim as f64, "must be 1 or 2"));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("s", s, "must lie in (0, 1)"));
    }
    if resolution < 8 {
        return Err(Error::param("resolution", resolution as f64, "must be at least 8"));
    }
    let (a1, a2) = ell_pair(dim, s, resolution);
    let (b1, b2) = ell_pair(dim, s, 2 * resolution);
    let change = ((a1 + a2) - (b1 + b2)).abs().max((a1 - b1).abs()) / (b1 + b2).abs();
    if !(change <= REFINEMENT_TOL) {
        return Err(Error::Convergence(format!(
            "symbol constants changed by {change:.3e} between resolutions {resolution} and {}",
            2 * resolution
        )));
    }
    LameSymbolConstants::new(b1, b2, Provenance::DerivedByQuadrature { refinement_change: change })
}

/// Surface measure of the unit sphere in `R^dim`.
pub fn sphere_area(dim: usize) -> f64 {
    if dim == 1 {
        2.0
    } else {
        2.0 * PI
    }
}

/// Lattice quadrature of the projected kernel against a plane wave:
/// `sum_{0<|z|<=R, z in h Z^n} h^n |z|^{-n-2s} z_hat (x) z_hat (1 - cos 2 pi xi.z)`
/// plus the exterior of the non-oscillating part, `|S^{n-1}|/n R^{-2s}/(2s) I`.
pub fn lattice_plane_wave_symbol(dim: usize, s: f64, xi: Point, h: f64, radius: f64) -> Mat2 {
    let reach = (radius / h).floor() as i64;
    let ex = -(dim as f64) - 2.0 * s;
    let hn = h.powi(dim as i32);
    let mut m = [[0.0; 2]; 2];
    if dim == 1 {
        let mut acc = 0.0;
        for j in 1..=reach {
            let z = j as f64 * h;
            let sn = (PI * xi[0] * z).sin();
            let w = if j == reach && (z - radius).abs() < 1e-12 * radius { 0.5 } else { 1.0 };
            // +-z contribute equally
            acc += 2.0 * w * z.powf(ex) * 2.0 * sn * sn;
        }
        m[0][0] = hn * acc;
    } else {
        let r2 = radius * radius;
        let rows: Vec<Mat2> = (-reach..=reach)
            .into_par_iter()
            .map(|i| {
                let mut part = [[0.0; 2]; 2];
                for j in -reach..=reach {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let z = [i as f64 * h, j as f64 * h];
                    let rr = z[0] * z[0] + z[1] * z[1];
                    if rr > r2 {
                        continue;
                    }
                    let sn = (PI * (xi[0] * z[0] + xi[1] * z[1])).sin();
                    let w = rr.sqrt().powf(ex) * 2.0 * sn * sn;
                    let p = projector(z);
                    for a in 0..2 {
                        for b in 0..2 {
                            part[a][b] += w * p[a][b];
                        }
                    }
                }
                part
            })
            .collect();
        for part in rows {
            for a in 0..2 {
                for b in 0..2 {
                    m[a][b] += hn * part[a][b];
                }
            }
        }
    }
    let tail = sphere_area(dim) / dim as f64 * radius.powf(-2.0 * s) / (2.0 * s);
    for a in 0..dim {
        m[a][a] += tail;
    }
    m
}

/// Richardson extrapolation of [`lattice_plane_wave_symbol`] between `h` and
/// `2h`, removing the leading `h^{2-2s}` error of the omitted origin cell.
pub fn extrapolated_plane_wave_symbol(dim: usize, s: f64, xi: Point, h: f64, radius: f64) -> Mat2 {
    let fine = lattice_plane_wave_symbol(dim, s, xi, h, radius);
    let coarse = lattice_plane_wave_symbol(dim, s, xi, 2.0 * h, radius);
    let q = 2f64.powf(2.0 - 2.0 * s);
    let mut m = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            m[a][b] = (q * fine[a][b] - coarse[a][b]) / (q - 1.0);
        }
    }
    m
}

/// Quadratic form `e^T M e`.
pub fn quadratic(m: &Mat2, e: Point) -> f64 {
    let mut v = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            v += e[a] * m[a][b] * e[b];
        }
    }
    v
}
