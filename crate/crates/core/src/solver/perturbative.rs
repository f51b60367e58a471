//! Outer iteration around the frozen-coefficient operator.
//!
//! The lattice operator is split as `L = F + (L - F)` with
//!
//! `F u = (-Delta)^{sigma/2} [A_D C (-Delta)^{t/2} u] + tau A_D u`,
//!
//! where `C(k) = (sum W - W_hat(k)) / (2 pi |xi|)^{2s}` is the order-zero
//! part of the lattice symbol. `L - F` collects the commutator terms and is
//! re-evaluated on the previous iterate; for constant `A` it vanishes and one
//! outer step is exact.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{ScalarField, VectorField};
use crate::nonlocal::form::apply_sym_symbol;
use crate::nonlocal::kernel::Sym2;
use crate::nonlocal::{Coefficient, NonlocalOperator, QuadratureSpec};
use crate::solver::dirichlet::{SolveReport, SolveStatus};
use crate::solver::lame::lame_rhs;
use crate::solver::mask::DomainMask;
use crate::spectral::fractional_power;

/// The frozen operator `F` on one grid.
pub struct FrozenOperator {
    pub t: f64,
    pub sigma: f64,
    pub tail: f64,
    pub diag: ScalarField,
    order_zero: Vec<Sym2>,
    precond: Vec<Sym2>,
}

fn inverse(m: &Sym2, dim: usize) -> Sym2 {
    if dim == 1 {
        return [1.0 / m[0], 0.0, 0.0];
    }
    let det = m[0] * m[2] - m[1] * m[1];
    [m[2] / det, -m[1] / det, m[0] / det]
}

impl FrozenOperator {
    pub fn new(op: &NonlocalOperator, a: &Coefficient, t: f64) -> Result<Self> {
        let s = op.s();
        let sigma = 2.0 * s - t;
        if !(t >= s && t < (2.0 * s).min(1.0)) {
            return Err(Error::param("t", t, format!("must satisfy s <= t < min(2s, 1) with s = {s}")));
        }
        let g = op.grid();
        let diag = a.diagonal(g);
        if !(diag.min() > 0.0) {
            return Err(Error::param("A_D", diag.min(), "diagonal must be positive"));
        }
        let a0 = diag.geometric_mean();
        let tail = op.tail();
        let d = g.dim();
        let mut order_zero = Vec::with_capacity(g.node_count());
        let mut precond = Vec::with_capacity(g.node_count());
        for (k, m) in op.symbol.iter().enumerate() {
            let xi = g.frequency(k);
            let r = xi[0].hypot(xi[1]);
            let w = if r == 0.0 { 0.0 } else { (2.0 * PI * r).powf(-2.0 * s) };
            order_zero.push([m[0] * w, m[1] * w, m[2] * w]);
            let full = [a0 * (m[0] + tail), a0 * m[1], a0 * (m[2] + tail)];
            precond.push(inverse(&full, d));
        }
        Ok(Self {
            t,
            sigma,
            tail,
            diag,
            order_zero,
            precond,
        })
    }

    pub fn apply(&self, u: &VectorField) -> VectorField {
        let inner = apply_sym_symbol(&self.order_zero, &fractional_power(u, self.t)).weighted(&self.diag.values);
        let mut out = fractional_power(&inner, self.sigma);
        out.axpy(self.tail, &u.weighted(&self.diag.values));
        out
    }

    /// Inverse of the constant-coefficient lattice operator at the geometric
    /// mean of `A_D`.
    pub fn precondition(&self, r: &VectorField) -> VectorField {
        apply_sym_symbol(&self.precond, r)
    }
}

/// Right-preconditioned BiCGSTAB for `mask A mask x = mask b`.
pub fn masked_bicgstab(
    apply: impl Fn(&VectorField) -> VectorField,
    precond: impl Fn(&VectorField) -> VectorField,
    b: &VectorField,
    x0: &VectorField,
    mask: &DomainMask,
    tol: f64,
    max_iter: usize,
) -> SolveReport {
    let a = |v: &VectorField| mask.apply(&apply(v));
    let k = |v: &VectorField| mask.apply(&precond(v));
    let b = mask.apply(b);
    let bnorm = b.norm_l2();
    let mut x = mask.apply(x0);
    if bnorm == 0.0 {
        return SolveReport::trivial(VectorField::zeros(b.grid));
    }
    let mut r = b.sub(&a(&x));
    let rhat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = VectorField::zeros(b.grid);
    let mut p = VectorField::zeros(b.grid);
    let mut residuals = Vec::new();
    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0;
    if r.norm_l2() / bnorm <= tol {
        return SolveReport {
            solution: x,
            iterations: 0,
            residual_history: vec![r.norm_l2() / bnorm],
            energy_history: Vec::new(),
            status: SolveStatus::Converged,
        };
    }
    while iterations < max_iter {
        let rho_new = rhat.dot(&r);
        if rho_new == 0.0 || omega == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for ((pv, rv), vv) in p.values.iter_mut().zip(&r.values).zip(&v.values) {
            *pv = rv + beta * (*pv - omega * vv);
        }
        let phat = k(&p);
        v = a(&phat);
        alpha = rho / rhat.dot(&v);
        x.axpy(alpha, &phat);
        let mut sres = r.clone();
        sres.axpy(-alpha, &v);
        iterations += 1;
        let snorm = sres.norm_l2() / bnorm;
        if snorm <= tol {
            residuals.push(snorm);
            status = SolveStatus::Converged;
            break;
        }
        let shat = k(&sres);
        let tv = a(&shat);
        omega = tv.dot(&sres) / tv.dot(&tv);
        x.axpy(omega, &shat);
        r = sres;
        r.axpy(-omega, &tv);
        let rel = r.norm_l2() / bnorm;
        residuals.push(rel);
        if rel <= tol {
            status = SolveStatus::Converged;
            break;
        }
    }
    SolveReport {
        solution: x,
        iterations,
        residual_history: residuals,
        energy_history: Vec::new(),
        status,
    }
}

/// Consecutive outer residual increases treated as divergence.
pub const DIVERGENCE_STREAK: usize = 3;

/// Solves `L u = (-Delta)^{sigma/2} f1 + f2` on `Omega` by
/// `F u_{k+1} = f - (L - F) u_k`.
#[allow(clippy::too_many_arguments)]
pub fn solve_full_perturbative(
    a: &Coefficient,
    s: f64,
    t: f64,
    f1: &VectorField,
    f2: &VectorField,
    mask: &DomainMask,
    tol: f64,
    outer_max: usize,
) -> Result<SolveReport> {
    f1.same_grid(f2)?;
    if f1.grid != mask.grid {
        return Err(Error::GridMismatch("data and mask live on different grids".into()));
    }
    a.check_grid(&f1.grid)?;
    let op = NonlocalOperator::new(f1.grid, s, QuadratureSpec::default())?;
    let frozen = FrozenOperator::new(&op, a, t)?;
    let f = mask.apply(&lame_rhs(frozen.sigma, f1, f2));
    let fnorm = f.norm_l2();
    let mut u = VectorField::zeros(f1.grid);
    if fnorm == 0.0 {
        return Ok(SolveReport::trivial(u));
    }
    let inner_tol = 0.1 * tol;
    let inner_max = 500;
    let mut residuals: Vec<f64> = Vec::new();
    let mut status = SolveStatus::MaxIter;
    let mut streak = 0;
    let mut lu = VectorField::zeros(f1.grid);
    for _ in 0..outer_max {
        let defect = lu.sub(&frozen.apply(&u));
        let rhs = f.sub(&defect);
        let inner = masked_bicgstab(|v| frozen.apply(v), |v| frozen.precondition(v), &rhs, &u, mask, inner_tol, inner_max);
        if inner.status != SolveStatus::Converged {
            return Err(Error::Convergence(format!(
                "inner frozen-coefficient solve stalled at residual {:.3e}",
                inner.final_residual()
            )));
        }
        u = inner.solution;
        lu = op.apply(a, &u)?;
        let rel = mask.apply(&f.sub(&lu)).norm_l2() / fnorm;
        if residuals.last().is_some_and(|p| rel > *p) {
            streak += 1;
        } else {
            streak = 0;
        }
        residuals.push(rel);
        if rel <= tol {
            status = SolveStatus::Converged;
            break;
        }
        if streak >= DIVERGENCE_STREAK {
            break;
        }
    }
    Ok(SolveReport {
        iterations: residuals.len(),
        solution: u,
        residual_history: residuals,
        energy_history: Vec::new(),
        status,
    })
}

/// Largest `|<L u, phi> - <f, phi>| / (|f| |phi|)` over `count` random
/// smooth test fields supported in `Omega`.
pub fn weak_form_probe(
    a: &Coefficient,
    s: f64,
    u: &VectorField,
    f: &VectorField,
    mask: &DomainMask,
    count: usize,
    seed: u64,
) -> Result<f64> {
    let op = NonlocalOperator::new(u.grid, s, QuadratureSpec::default())?;
    let lu = op.apply(a, u)?;
    let fm = mask.apply(f);
    let scale = fm.norm_l2().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for i in 0..count {
        let phi = mask.apply(&crate::fields::random_band_limited(u.grid, 6, seed.wrapping_add(i as u64)));
        let pn = phi.norm_l2();
        if pn == 0.0 {
            continue;
        }
        worst = worst.max((lu.dot(&phi) - fm.dot(&phi)).abs() / (scale * pn));
    }
    Ok(worst)
}
