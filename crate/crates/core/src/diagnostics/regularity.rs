//! Grid sweep comparing `|(-Delta)^{t/2} u|_{L^q(Omega')}` with the data bundle
//! `|u|_{H^s} + sum_i (|f_i|_{L^q(Omega)} + |f_i|_{L^2})`.

use crate::diagnostics::norms::{sobolev_lp_norm, sobolev_norm_h};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, VectorField};
use crate::nonlocal::Coefficient;
use crate::solver::{lame_rhs, solve_dirichlet, DomainMask, SolveStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityConfig {
    /// Geometry of every grid in the sweep; the point count is replaced.
    pub base: GridSpec,
    pub grids: Vec<usize>,
    pub s: f64,
    pub t: f64,
    pub q: f64,
    /// `Omega` and `Omega'` as fractions of the support half-width.
    pub omega: f64,
    pub probe: f64,
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub grids: Vec<usize>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub ratios: Vec<f64>,
    pub iterations: Vec<usize>,
}

impl RegularityReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    /// Relative change of the ratio between the two finest grids.
    pub fn finest_variation(&self) -> f64 {
        let n = self.ratios.len();
        if n < 2 {
            return 0.0;
        }
        let (a, b) = (self.ratios[n - 2], self.ratios[n - 1]);
        if a == 0.0 && b == 0.0 {
            0.0
        } else {
            (b - a).abs() / b.abs().max(a.abs())
        }
    }
}

pub type FieldBuilder<'a> = &'a dyn Fn(GridSpec) -> VectorField;

/// Solves `L u = (-Delta)^{(2s-t)/2} f1 + f2` on each grid and records the ratio.
pub fn regularity_experiment(
    cfg: &RegularityConfig,
    coef: &dyn Fn(GridSpec) -> Result<Coefficient>,
    f1: FieldBuilder,
    f2: FieldBuilder,
) -> Result<RegularityReport> {
    let (s, t) = (cfg.s, cfg.t);
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("s", s, "must lie in (0, 1)"));
    }
    if !(t >= s && t < (2.0 * s).min(1.0)) {
        return Err(Error::param("t", t, format!("must satisfy s <= t < min(2s, 1) = {}", (2.0 * s).min(1.0))));
    }
    if !(cfg.q >= 1.0) {
        return Err(Error::param("q", cfg.q, "must be at least 1"));
    }
    let mut rep = RegularityReport {
        grids: cfg.grids.clone(),
        lhs: Vec::new(),
        rhs: Vec::new(),
        ratios: Vec::new(),
        iterations: Vec::new(),
    };
    for &n in &cfg.grids {
        let g = cfg.base.with_points(n)?;
        let mask = DomainMask::centered(g, cfg.omega, Some(cfg.probe))?;
        let (a, b) = (f1(g), f2(g));
        let data = mask.apply(&lame_rhs(2.0 * s - t, &a, &b));
        let sol = solve_dirichlet(&coef(g)?, s, &data, &mask, cfg.tol, cfg.max_iter)?;
        if sol.status != SolveStatus::Converged {
            return Err(Error::Convergence(format!(
                "Dirichlet solve on N = {n} ended with {:?} at residual {:.3e}",
                sol.status,
                sol.final_residual()
            )));
        }
        let u = &sol.solution;
        let lhs = sobolev_lp_norm(u, t, cfg.q, mask.probe.as_deref())?;
        let bundle = |f: &VectorField| f.lp_norm(cfg.q, Some(&mask.interior)) + f.norm_l2();
        let rhs = sobolev_norm_h(u, s) + bundle(&a) + bundle(&b);
        rep.ratios.push(if lhs == 0.0 { 0.0 } else { lhs / rhs });
        rep.lhs.push(lhs);
        rep.rhs.push(rhs);
        rep.iterations.push(sol.iterations);
    }
    Ok(rep)
}
