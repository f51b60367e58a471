use crate::error::{Error, Result};
use crate::grid::{GridSpec, VectorField};

/// The solve region `Omega` and an optional probe region `Omega' cc Omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMask {
    pub grid: GridSpec,
    pub interior: Vec<bool>,
    pub probe: Option<Vec<bool>>,
}

/// Probe nodes must keep this many cells of `Omega` around them.
pub const PROBE_MARGIN: usize = 2;

impl DomainMask {
    pub fn new(grid: GridSpec, interior: Vec<bool>, probe: Option<Vec<bool>>) -> Result<Self> {
        let m = grid.node_count();
        if interior.len() != m || probe.as_ref().is_some_and(|p| p.len() != m) {
            return Err(Error::InvalidMask(format!("masks must have {m} entries")));
        }
        if !interior.iter().any(|b| *b) {
            return Err(Error::EmptyRegion);
        }
        let (lo, hi) = grid.support_range();
        let n = grid.points_per_dim();
        let d = grid.dim();
        for (node, _) in interior.iter().enumerate().filter(|(_, b)| **b) {
            let idx = grid.multi_index(node);
            if (0..d).any(|a| idx[a] <= lo || idx[a] + 1 >= hi) {
                return Err(Error::InvalidMask(format!(
                    "interior node {node} is not strictly inside the support box"
                )));
            }
        }
        if let Some(p) = &probe {
            let r = PROBE_MARGIN as i64;
            for (node, _) in p.iter().enumerate().filter(|(_, b)| **b) {
                let idx = grid.multi_index(node);
                let span = if d == 2 { -r..=r } else { 0..=0 };
                for di in -r..=r {
                    for dj in span.clone() {
                        let a = (idx[0] as i64 + di).rem_euclid(n as i64) as usize;
                        let b = if d == 2 { (idx[1] as i64 + dj).rem_euclid(n as i64) as usize } else { 0 };
                        if !interior[grid.node_index([a, b])] {
                            return Err(Error::InvalidMask(format!(
                                "probe node {node} is closer than {PROBE_MARGIN} cells to the boundary"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { grid, interior, probe })
    }

    /// `Omega = {|x|_inf < omega * w}`, `Omega' = {|x|_inf < probe * w}`, with
    /// `w` the support half-width; nodes on the support boundary are dropped.
    pub fn centered(grid: GridSpec, omega: f64, probe: Option<f64>) -> Result<Self> {
        if omega > 1.0 || probe.is_some_and(|p| p > 1.0) {
            return Err(Error::param("omega", omega, "mask radii must not exceed the support"));
        }
        let w = grid.support_half_width();
        let d = grid.dim();
        let (lo, hi) = grid.support_range();
        let inside = |r: f64| -> Vec<bool> {
            (0..grid.node_count())
                .map(|i| {
                    let x = grid.coords(i);
                    let idx = grid.multi_index(i);
                    (0..d).all(|a| x[a].abs() < r * w && idx[a] > lo && idx[a] + 1 < hi)
                })
                .collect()
        };
        Self::new(grid, inside(omega), probe.map(inside))
    }

    pub fn count(&self) -> usize {
        self.interior.iter().filter(|b| **b).count()
    }

    pub fn apply(&self, u: &VectorField) -> VectorField {
        u.masked(&self.interior)
    }

    pub fn probe_or_interior(&self) -> &[bool] {
        self.probe.as_deref().unwrap_or(&self.interior)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_masks() {
        let g = GridSpec::line(64, 1.0).unwrap();
        let m = DomainMask::centered(g, 0.8, Some(0.5)).unwrap();
        assert!(m.count() > 0 && m.count() < 32);
        assert!(DomainMask::centered(g, 1.2, None).is_err());
        assert!(matches!(DomainMask::centered(g, 0.0, None), Err(Error::EmptyRegion)));
        assert!(DomainMask::centered(g, 0.8, Some(0.8)).is_err());
    }

    #[test]
    fn coarse_grid_drops_support_boundary() {
        let g = GridSpec::line(16, 1.0).unwrap();
        let m = DomainMask::centered(g, 0.8, None).unwrap();
        assert_eq!((0..16).filter(|i| m.interior[*i]).collect::<Vec<_>>(), (5..11).collect::<Vec<_>>());
    }
}
