//! Periodic padded lattice and the real fields that live on it.
//!
//! Nodes are stored row-major (the last axis varies fastest). Node `i` along an
//! axis sits at the centered coordinate `(i - N/2) * h`, so the box is
//! `[-L/2, L/2)` and the support sub-box is centered on the origin.

use crate::error::{Error, Result};

/// A point in the plane; in 1D only the first coordinate is used.
pub type Point = [f64; 2];

/// Discretization of the box on which every field lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    points: usize,
    length: f64,
    support_fraction: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize, length: f64, support_fraction: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per dim must be a power of two >= 8, got {points}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {length}")));
        }
        if !(support_fraction > 0.0 && support_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "support fraction must lie in (0,1], got {support_fraction}"
            )));
        }
        let cells = support_fraction * points as f64;
        if (cells - cells.round()).abs() > 1e-9 || cells.round() < 1.0 {
            return Err(Error::InvalidGrid(format!(
                "support fraction {support_fraction} does not cover an integer number of cells"
            )));
        }
        Ok(Self {
            dim,
            points,
            length,
            support_fraction,
        })
    }

    /// 1D grid with the default half-box support.
    pub fn line(points: usize, length: f64) -> Result<Self> {
        Self::new(1, points, length, 0.5)
    }

    /// 2D grid with the default half-box support.
    pub fn plane(points: usize, length: f64) -> Result<Self> {
        Self::new(2, points, length, 0.5)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_dim(&self) -> usize {
        self.points
    }

    pub fn box_length(&self) -> f64 {
        self.length
    }

    pub fn support_fraction(&self) -> f64 {
        self.support_fraction
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// `h^n`, the weight of one lattice cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn node_count(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    /// Same geometry at a different resolution.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.dim, points, self.length, self.support_fraction)
    }

    /// Per-axis indices of a node.
    pub fn multi_index(&self, node: usize) -> [usize; 2] {
        if self.dim == 1 {
            [node, 0]
        } else {
            [node / self.points, node % self.points]
        }
    }

    pub fn node_index(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.points + idx[1]
        }
    }

    /// Centered coordinate of a node.
    pub fn coords(&self, node: usize) -> Point {
        let h = self.spacing();
        let half = (self.points / 2) as f64;
        let idx = self.multi_index(node);
        let x = (idx[0] as f64 - half) * h;
        let y = if self.dim == 2 {
            (idx[1] as f64 - half) * h
        } else {
            0.0
        };
        [x, y]
    }

    /// Signed integer frequency of an FFT-ordered index.
    pub fn signed_frequency(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Physical frequency vector `xi = k / L` of an FFT-ordered index.
    pub fn frequency(&self, index: usize) -> Point {
        let idx = self.multi_index(index);
        let l = self.length;
        let kx = self.signed_frequency(idx[0]) as f64 / l;
        let ky = if self.dim == 2 {
            self.signed_frequency(idx[1]) as f64 / l
        } else {
            0.0
        };
        [kx, ky]
    }

    /// Index range `[lo, hi)` of the support sub-box along every axis.
    pub fn support_range(&self) -> (usize, usize) {
        let m = (self.support_fraction * self.points as f64).round() as usize;
        let lo = (self.points - m) / 2;
        (lo, lo + m)
    }

    pub fn in_support(&self, node: usize) -> bool {
        let (lo, hi) = self.support_range();
        let idx = self.multi_index(node);
        (0..self.dim).all(|a| idx[a] >= lo && idx[a] < hi)
    }

    /// Half-width of the support sub-box in physical units.
    pub fn support_half_width(&self) -> f64 {
        0.5 * self.support_fraction * self.length
    }
}

/// Real scalar field on a grid (coefficients, weights).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.node_count()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..grid.node_count()).map(|i| f(grid.coords(i))).collect();
        Self { grid, values }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Geometric mean; meaningful for positive fields only.
    pub fn geometric_mean(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.ln()).sum();
        (s / self.values.len() as f64).exp()
    }
}

/// `dim`-component real field; values are node-major, component-minor.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.dim() * grid.node_count()],
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.dim() * grid.node_count() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.dim() * grid.node_count(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("field contains non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every node; only the first `dim` outputs are kept.
    pub fn from_fn(grid: GridSpec, f: impl Fn(Point) -> [f64; 2]) -> Self {
        let d = grid.dim();
        let mut values = Vec::with_capacity(d * grid.node_count());
        for i in 0..grid.node_count() {
            let v = f(grid.coords(i));
            values.extend_from_slice(&v[..d]);
        }
        Self { grid, values }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn at(&self, node: usize) -> &[f64] {
        let d = self.dim();
        &self.values[node * d..node * d + d]
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().skip(c).step_by(self.dim()).copied().collect()
    }

    pub fn set_component(&mut self, c: usize, data: &[f64]) {
        let d = self.dim();
        for (i, v) in data.iter().enumerate() {
            self.values[i * d + c] = *v;
        }
    }

    pub fn same_grid(&self, other: &VectorField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    /// Grid inner product `h^n sum_x u(x).v(x)`.
    pub fn dot(&self, other: &VectorField) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.grid.cell_volume() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm_l2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `(h^n sum |u(x)|^p)^{1/p}` over the nodes selected by `region`
    /// (all nodes when `None`), with `|.|` the Euclidean norm at a node.
    pub fn lp_norm(&self, p: f64, region: Option<&[bool]>) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for node in 0..self.grid.node_count() {
            if region.is_some_and(|r| !r[node]) {
                continue;
            }
            let v = &self.values[node * d..node * d + d];
            let mag = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            acc += mag.powf(p);
        }
        (self.grid.cell_volume() * acc).powf(1.0 / p)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn scale(&mut self, a: f64) {
        self.values.iter_mut().for_each(|v| *v *= a);
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &VectorField) {
        for (v, w) in self.values.iter_mut().zip(&x.values) {
            *v += a * w;
        }
    }

    pub fn add(&self, other: &VectorField) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &VectorField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Pointwise product with a scalar field.
    pub fn weighted(&self, weight: &[f64]) -> Self {
        let d = self.dim();
        let mut out = self.clone();
        for (i, w) in weight.iter().enumerate() {
            for c in 0..d {
                out.values[i * d + c] *= w;
            }
        }
        out
    }

    /// Zeroes every node outside `mask`.
    pub fn masked(&self, mask: &[bool]) -> Self {
        let d = self.dim();
        let mut out = self.clone();
        for (i, keep) in mask.iter().enumerate() {
            if !keep {
                out.values[i * d..i * d + d].iter_mut().for_each(|v| *v = 0.0);
            }
        }
        out
    }

    pub fn component_means(&self) -> Vec<f64> {
        let d = self.dim();
        let mut m = vec![0.0; d];
        for (i, v) in self.values.iter().enumerate() {
            m[i % d] += v;
        }
        let n = self.grid.node_count() as f64;
        m.iter_mut().for_each(|x| *x /= n);
        m
    }

    /// Mean-zero test with tolerance `1e-12` relative to the field scale.
    pub fn is_mean_zero(&self) -> bool {
        let scale = self.max_abs();
        self.component_means().iter().all(|m| m.abs() <= 1e-12 * scale)
    }

    /// Removes the per-component mean and returns it.
    pub fn project_mean_zero(&mut self) -> Vec<f64> {
        let m = self.component_means();
        let d = self.dim();
        for (i, v) in self.values.iter_mut().enumerate() {
            *v -= m[i % d];
        }
        m
    }

    /// Cyclic shift of the lattice by `shift` nodes per axis.
    pub fn cyclic_shift(&self, shift: [usize; 2]) -> Self {
        let g = self.grid;
        let n = g.points_per_dim();
        let d = self.dim();
        let mut out = VectorField::zeros(g);
        for node in 0..g.node_count() {
            let idx = g.multi_index(node);
            let target = g.node_index([(idx[0] + shift[0]) % n, if d == 2 { (idx[1] + shift[1]) % n } else { 0 }]);
            out.values[target * d..target * d + d].copy_from_slice(&self.values[node * d..node * d + d]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(3, 16, 1.0, 0.5).is_err());
        assert!(GridSpec::new(1, 12, 1.0, 0.5).is_err());
        assert!(GridSpec::new(1, 4, 1.0, 0.5).is_err());
        assert!(GridSpec::new(1, 16, 0.0, 0.5).is_err());
        assert!(GridSpec::new(1, 16, 1.0, 0.3).is_err());
        assert!(GridSpec::new(1, 16, 1.0, 0.25).is_ok());
    }

    #[test]
    fn centered_coordinates_and_support() {
        let g = GridSpec::line(16, 2.0).unwrap();
        assert_eq!(g.coords(8), [0.0, 0.0]);
        assert_eq!(g.coords(0)[0], -1.0);
        assert_eq!(g.support_range(), (4, 12));
        assert!(g.in_support(4) && !g.in_support(12));
        let p = GridSpec::plane(8, 1.0).unwrap();
        assert_eq!(p.multi_index(p.node_index([3, 5])), [3, 5]);
        assert_eq!(p.frequency(p.node_index([7, 1])), [-1.0, 1.0]);
    }

    #[test]
    fn norms_and_means() {
        let g = GridSpec::line(8, 1.0).unwrap();
        let mut u = VectorField::from_fn(g, |_| [2.0, 0.0]);
        assert!((u.norm_l2() - 2.0).abs() < 1e-15);
        assert!((u.lp_norm(4.0, None) - 2.0).abs() < 1e-14);
        assert!(!u.is_mean_zero());
        let m = u.project_mean_zero();
        assert_eq!(m, vec![2.0]);
        assert!(u.is_zero());
    }
}
