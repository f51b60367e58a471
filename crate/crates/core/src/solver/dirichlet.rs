//! Volume-constrained Dirichlet problem: minimize `E(u) = B(u,u)/2 - <f,u>`
//! over fields vanishing outside `Omega`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::VectorField;
use crate::nonlocal::{Coefficient, NonlocalOperator, QuadratureSpec};
use crate::solver::mask::DomainMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIter,
    IndefiniteDetected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: VectorField,
    pub iterations: usize,
    /// Relative residual after each iteration.
    pub residual_history: Vec<f64>,
    /// Energy of each iterate (empty for solvers without an energy).
    pub energy_history: Vec<f64>,
    pub status: SolveStatus,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }

    pub(crate) fn trivial(solution: VectorField) -> Self {
        Self {
            solution,
            iterations: 0,
            residual_history: Vec::new(),
            energy_history: Vec::new(),
            status: SolveStatus::Converged,
        }
    }
}

fn check_solve_args(f: &VectorField, mask: &DomainMask, tol: f64) -> Result<()> {
    if f.grid != mask.grid {
        return Err(Error::GridMismatch("right-hand side and mask live on different grids".into()));
    }
    if f.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid("right-hand side is not finite".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", tol, "must be positive"));
    }
    Ok(())
}

/// Conjugate gradients for `mask L mask u = mask f` with `L` given by `apply`.
pub fn masked_cg(
    apply: impl Fn(&VectorField) -> Result<VectorField>,
    f: &VectorField,
    mask: &DomainMask,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    check_solve_args(f, mask, tol)?;
    let b = mask.apply(f);
    let bnorm = b.norm_l2();
    let mut x = VectorField::zeros(f.grid);
    if bnorm == 0.0 {
        return Ok(SolveReport::trivial(x));
    }
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    let mut residuals = Vec::new();
    let mut energies = Vec::new();
    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0;
    while iterations < max_iter {
        let ap = mask.apply(&apply(&p)?);
        let curv = p.dot(&ap);
        if !(curv > 0.0) {
            status = SolveStatus::IndefiniteDetected;
            break;
        }
        let alpha = rr / curv;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        iterations += 1;
        // E(x) = x.(A x)/2 - b.x with A x = b - r
        energies.push(-0.5 * (b.dot(&x) + r.dot(&x)));
        let rr_new = r.dot(&r);
        let rel = rr_new.sqrt() / bnorm;
        residuals.push(rel);
        if rel <= tol {
            status = SolveStatus::Converged;
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pv, rv) in p.values.iter_mut().zip(&r.values) {
            *pv = rv + beta * *pv;
        }
    }
    Ok(SolveReport {
        solution: x,
        iterations,
        residual_history: residuals,
        energy_history: energies,
        status,
    })
}

/// CG on the lattice operator; uses the FFT path for constant and separable
/// coefficients.
pub fn solve_dirichlet(
    a: &Coefficient,
    s: f64,
    f: &VectorField,
    mask: &DomainMask,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    let op = NonlocalOperator::new(f.grid, s, QuadratureSpec::default())?;
    a.check_grid(&f.grid)?;
    masked_cg(|p| op.apply(a, p), f, mask, tol, max_iter)
}

/// Degrees of freedom `(node, component)` of a mask, in storage order.
pub fn mask_dofs(mask: &DomainMask) -> Vec<usize> {
    let d = mask.grid.dim();
    mask.interior
        .iter()
        .enumerate()
        .filter(|(_, b)| **b)
        .flat_map(|(node, _)| (0..d).map(move |c| node * d + c))
        .collect()
}

/// Stiffness `K_ij = (L e_j)_i` restricted to the mask, assembled column by
/// column from the dense operator; symmetric for symmetric `A`.
pub fn assemble_stiffness(a: &Coefficient, s: f64, mask: &DomainMask) -> Result<DMatrix<f64>> {
    let g = mask.grid;
    a.check_grid(&g)?;
    let op = NonlocalOperator::new(g, s, QuadratureSpec::default())?;
    let dofs = mask_dofs(mask);
    let m = dofs.len();
    let mut k = DMatrix::zeros(m, m);
    for (j, &dj) in dofs.iter().enumerate() {
        let mut e = VectorField::zeros(g);
        e.values[dj] = 1.0;
        let col = op.dense_apply(a, &e);
        for (i, &di) in dofs.iter().enumerate() {
            k[(i, j)] = col.values[di];
        }
    }
    Ok(k)
}

/// Direct solve of the assembled system; the reference for small grids.
pub fn dense_dirichlet_solve(a: &Coefficient, s: f64, f: &VectorField, mask: &DomainMask) -> Result<VectorField> {
    check_solve_args(f, mask, 1.0)?;
    let k = assemble_stiffness(a, s, mask)?;
    let dofs = mask_dofs(mask);
    let rhs = DVector::from_iterator(dofs.len(), dofs.iter().map(|&d| f.values[d]));
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Convergence("assembled stiffness is singular".into()))?;
    let mut u = VectorField::zeros(f.grid);
    for (i, &d) in dofs.iter().enumerate() {
        u.values[d] = sol[i];
    }
    Ok(u)
}

/// Smallest eigenvalue of the assembled stiffness, in the grid inner product.
pub fn smallest_stiffness_eigenvalue(a: &Coefficient, s: f64, mask: &DomainMask) -> Result<f64> {
    let k = assemble_stiffness(a, s, mask)?;
    // symmetrize away rounding before the eigensolve
    let sym = (&k + k.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}
