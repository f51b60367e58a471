//! Lattice weights of the projected kernel `|z|^{-n-2s} z_hat (x) z_hat`.
//!
//! Offsets are taken in the minimum-image cell of the torus, so a field
//! supported in the central half of the box interacts with every other node
//! exactly once. What lies beyond the cell is folded into a constant tail
//! `tau * I`, the exact exterior integral of the kernel.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::quadrature::tanh_sinh;
use crate::spectral::transform::fft_in_place;

/// Symmetric 2x2 entries `(xx, xy, yy)`; in 1D only `xx` is used.
pub type Sym2 = [f64; 3];

/// Per-offset lattice weights `W(d) = h^n |z|^{-n-2s} z_hat (x) z_hat`.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub grid: GridSpec,
    pub s: f64,
    /// Indexed by the offset node index; `W(0) = 0`.
    pub weights: Vec<Sym2>,
    /// Exterior of the min-image cell, a multiple of the identity.
    pub tail: f64,
}

pub(crate) fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("s", s, "must lie in (0, 1)"));
    }
    Ok(())
}

/// `int_{exterior of [-L/2, L/2]^n} |z|^{-n-2s} z_hat (x) z_hat dz = tau I`.
pub fn exterior_tail(grid: &GridSpec, s: f64) -> f64 {
    let half = 0.5 * grid.box_length();
    if grid.dim() == 1 {
        half.powf(-2.0 * s) / s
    } else {
        // trace = int_0^{2pi} rho(theta)^{-2s} / (2s), rho = half / max(|cos|, |sin|)
        let ang = 8.0 * tanh_sinh(|t| t.cos().powf(2.0 * s), 0.0, 0.25 * PI, 60);
        0.5 * ang * half.powf(-2.0 * s) / (2.0 * s)
    }
}

/// Minimum-image offset of an index difference.
#[inline]
pub(crate) fn min_image(d: usize, n: usize) -> i64 {
    if d <= n / 2 {
        d as i64
    } else {
        d as i64 - n as i64
    }
}

impl KernelTable {
    pub fn new(grid: GridSpec, s: f64) -> Result<Self> {
        check_s(s)?;
        let n = grid.points_per_dim();
        let h = grid.spacing();
        let hn = grid.cell_volume();
        let dim = grid.dim();
        let ex = -(dim as f64) - 2.0 * s;
        let mut weights = vec![[0.0; 3]; grid.node_count()];
        for (k, w) in weights.iter_mut().enumerate().skip(1) {
            let idx = grid.multi_index(k);
            let z0 = min_image(idx[0], n) as f64 * h;
            if dim == 1 {
                w[0] = hn * z0.abs().powf(ex);
                continue;
            }
            let z1 = min_image(idx[1], n) as f64 * h;
            let r2 = z0 * z0 + z1 * z1;
            let base = hn * r2.sqrt().powf(ex) / r2;
            // the two images at +-L/2 cancel the off-diagonal part
            let cross = if idx[0] == n / 2 || idx[1] == n / 2 { 0.0 } else { z0 * z1 };
            *w = [base * z0 * z0, base * cross, base * z1 * z1];
        }
        Ok(Self {
            grid,
            s,
            weights,
            tail: exterior_tail(&grid, s),
        })
    }

    /// `sum_d W(d)`.
    pub fn total(&self) -> Sym2 {
        let mut t = [0.0; 3];
        for w in &self.weights {
            for c in 0..3 {
                t[c] += w[c];
            }
        }
        t
    }

    /// Weight of the offset from node `x` to node `y`.
    #[inline]
    pub fn between(&self, x: usize, y: usize) -> &Sym2 {
        let g = &self.grid;
        let n = g.points_per_dim();
        if g.dim() == 1 {
            &self.weights[(y + n - x) % n]
        } else {
            let (a, b) = (x / n, x % n);
            let (c, d) = (y / n, y % n);
            &self.weights[((c + n - a) % n) * n + (d + n - b) % n]
        }
    }

    /// Per-frequency symbol of `P f(x) = sum_y W(y-x) (f(x) - f(y))`,
    /// i.e. `sum_d W(d) - W_hat(k)`; real because `W` is even.
    pub fn difference_symbol(&self) -> Vec<Sym2> {
        let g = &self.grid;
        let total = self.total();
        let comps = if g.dim() == 1 { 1 } else { 3 };
        let mut out = vec![[0.0; 3]; g.node_count()];
        for c in 0..comps {
            let mut buf: Vec<Complex64> = self.weights.iter().map(|w| Complex64::new(w[c], 0.0)).collect();
            fft_in_place(g, &mut buf, rustfft::FftDirection::Forward);
            for (o, v) in out.iter_mut().zip(&buf) {
                o[c] = total[c] - v.re;
            }
        }
        out
    }
}
