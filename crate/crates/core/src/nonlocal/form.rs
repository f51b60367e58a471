//! Lattice quadrature of the nonlocal form
//!
//! `B(u,v) = 1/2 sum_x sum_{y != x} A(x,y) (u(x)-u(y))^T W(y-x) (v(x)-v(y)) h^n
//!          + h^n sum_x tau A(x,x) u(x).v(x)`
//!
//! and of the operator whose grid pairing reproduces it. With the factor one
//! half, `B` approximates `<L u, v>` for the principal-value operator
//! `L u(x) = int A(x,y) K(y-x)(u(x)-u(y)) dy`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField};
use crate::nonlocal::coefficient::{Coefficient, CoefficientKind};
use crate::nonlocal::kernel::{check_s, KernelTable, Sym2};
use crate::spectral::transform::{forward_transform, scalar_spectrum, scalar_synthesis, synthesize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailPolicy {
    /// Add the exact exterior of the min-image cell with `A(x,y) ~ A(x,x)`.
    #[default]
    ExteriorCell,
    None,
}

/// Diagonal pairs are always omitted; only the tail is configurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QuadratureSpec {
    pub tail_policy: TailPolicy,
}

#[inline]
fn sym_mul(w: &Sym2, v: &[f64]) -> [f64; 2] {
    if v.len() == 1 {
        [w[0] * v[0], 0.0]
    } else {
        [w[0] * v[0] + w[1] * v[1], w[1] * v[0] + w[2] * v[1]]
    }
}

/// Applies a per-frequency symmetric symbol to a vector field.
pub(crate) fn apply_sym_symbol(symbol: &[Sym2], u: &VectorField) -> VectorField {
    let d = u.dim();
    let mut spec = forward_transform(u);
    for (k, m) in symbol.iter().enumerate() {
        if d == 1 {
            spec.coeffs[k] *= m[0];
        } else {
            let (a, b) = (spec.coeffs[2 * k], spec.coeffs[2 * k + 1]);
            spec.coeffs[2 * k] = a * m[0] + b * m[1];
            spec.coeffs[2 * k + 1] = a * m[1] + b * m[2];
        }
    }
    synthesize(&spec)
}

fn scalar_apply(grid: &GridSpec, values: &[f64], symbol: &[Sym2], comp: usize) -> Vec<f64> {
    let mut spec = scalar_spectrum(grid, values);
    for (c, m) in spec.iter_mut().zip(symbol) {
        *c *= m[comp];
    }
    scalar_synthesis(grid, spec)
}

/// Kernel table plus its difference symbol for one `(grid, s)`; reuse it
/// across many applications.
#[derive(Debug, Clone)]
pub struct NonlocalOperator {
    pub kernel: KernelTable,
    pub symbol: Vec<Sym2>,
    pub quad: QuadratureSpec,
}

impl NonlocalOperator {
    pub fn new(grid: GridSpec, s: f64, quad: QuadratureSpec) -> Result<Self> {
        let kernel = KernelTable::new(grid, s)?;
        let symbol = kernel.difference_symbol();
        Ok(Self { kernel, symbol, quad })
    }

    pub fn grid(&self) -> GridSpec {
        self.kernel.grid
    }

    pub fn s(&self) -> f64 {
        self.kernel.s
    }

    pub fn tail(&self) -> f64 {
        match self.quad.tail_policy {
            TailPolicy::ExteriorCell => self.kernel.tail,
            TailPolicy::None => 0.0,
        }
    }

    fn check(&self, a: &Coefficient, u: &VectorField) -> Result<()> {
        if u.grid != self.grid() {
            return Err(Error::GridMismatch(format!("operator on {:?}, field on {:?}", self.grid(), u.grid)));
        }
        a.check_grid(&u.grid)
    }

    /// Full symbol `sum W - W_hat(k) + tau I` of the constant-one operator.
    pub fn unit_symbol(&self) -> Vec<Sym2> {
        let tau = self.tail();
        self.symbol.iter().map(|m| [m[0] + tau, m[1], m[2] + tau]).collect()
    }

    /// `P u`, the translation-invariant part with unit coefficient.
    pub fn difference_apply(&self, u: &VectorField) -> VectorField {
        apply_sym_symbol(&self.symbol, u)
    }

    /// Best available application: FFT for constant and separable
    /// coefficients, the dense double sum otherwise.
    pub fn apply(&self, a: &Coefficient, u: &VectorField) -> Result<VectorField> {
        self.check(a, u)?;
        match &a.kind {
            CoefficientKind::Constant(k) => {
                let mut out = self.difference_apply(u);
                out.axpy(self.tail(), u);
                out.scale(*k);
                Ok(out)
            }
            CoefficientKind::Separable(f) => Ok(self.separable_apply(f, u)),
            CoefficientKind::General(_) => Ok(self.dense_apply(a, u)),
        }
    }

    /// `1/2 [a P(u) + P(a u) - P(a) u] + tau a u`, with `P(a)` the matrix field
    /// obtained by filtering `a` with each entry of the symbol.
    pub fn separable_apply(&self, a: &ScalarField, u: &VectorField) -> VectorField {
        let g = u.grid;
        let d = g.dim();
        let pu = self.difference_apply(u);
        let au = u.weighted(&a.values);
        let pau = self.difference_apply(&au);
        let comps = if d == 1 { 1 } else { 3 };
        let pa: Vec<Vec<f64>> = (0..comps).map(|c| scalar_apply(&g, &a.values, &self.symbol, c)).collect();
        let tau = self.tail();
        let mut out = VectorField::zeros(g);
        for x in 0..g.node_count() {
            let m = if d == 1 { [pa[0][x], 0.0, 0.0] } else { [pa[0][x], pa[1][x], pa[2][x]] };
            let pmu = sym_mul(&m, u.at(x));
            for c in 0..d {
                let i = x * d + c;
                out.values[i] = 0.5 * (a.values[x] * pu.values[i] + pau.values[i] - pmu[c]) + tau * au.values[i];
            }
        }
        out
    }

    /// `L u(x) = sum_{y != x} A(x,y) W(y-x)(u(x)-u(y)) + tau A(x,x) u(x)`,
    /// evaluated pair by pair.
    pub fn dense_apply(&self, a: &Coefficient, u: &VectorField) -> VectorField {
        let g = u.grid;
        let d = g.dim();
        let m = g.node_count();
        let tau = self.tail();
        let k = &self.kernel;
        let rows: Vec<[f64; 2]> = (0..m)
            .into_par_iter()
            .map(|x| {
                let ux = u.at(x);
                let mut acc = [0.0; 2];
                if d == 1 {
                    for y in 0..m {
                        if y != x {
                            acc[0] += a.eval(x, y) * k.between(x, y)[0] * (ux[0] - u.values[y]);
                        }
                    }
                } else {
                    for y in 0..m {
                        if y == x {
                            continue;
                        }
                        let uy = u.at(y);
                        let du = [ux[0] - uy[0], ux[1] - uy[1]];
                        let r = sym_mul(k.between(x, y), &du);
                        let w = a.eval(x, y);
                        acc[0] += w * r[0];
                        acc[1] += w * r[1];
                    }
                }
                let ad = tau * a.eval(x, x);
                for c in 0..d {
                    acc[c] += ad * ux[c];
                }
                acc
            })
            .collect();
        let mut out = VectorField::zeros(g);
        for (x, r) in rows.iter().enumerate() {
            out.values[x * d..x * d + d].copy_from_slice(&r[..d]);
        }
        out
    }

    /// The symmetric double sum itself, without forming `L u`.
    pub fn bilinear(&self, a: &Coefficient, u: &VectorField, v: &VectorField) -> Result<f64> {
        self.check(a, u)?;
        u.same_grid(v)?;
        let g = u.grid;
        let d = g.dim();
        let m = g.node_count();
        let tau = self.tail();
        let k = &self.kernel;
        let rows: Vec<f64> = (0..m)
            .into_par_iter()
            .map(|x| {
                let (ux, vx) = (u.at(x), v.at(x));
                let mut acc = 0.0;
                for y in 0..m {
                    if y == x {
                        continue;
                    }
                    let (uy, vy) = (u.at(y), v.at(y));
                    let du = [ux[0] - uy[0], if d == 2 { ux[1] - uy[1] } else { 0.0 }];
                    let r = sym_mul(k.between(x, y), &du[..d]);
                    let mut dot = r[0] * (vx[0] - vy[0]);
                    if d == 2 {
                        dot += r[1] * (vx[1] - vy[1]);
                    }
                    acc += a.eval(x, y) * dot;
                }
                let uv: f64 = (0..d).map(|c| ux[c] * vx[c]).sum();
                0.5 * acc + tau * a.eval(x, x) * uv
            })
            .collect();
        Ok(g.cell_volume() * rows.iter().sum::<f64>())
    }

    /// Unprojected Gagliardo form (kernel `|z|^{-n-2s} I`), same lattice rules.
    pub fn gagliardo(&self, u: &VectorField) -> f64 {
        let d = u.dim();
        let tau = self.tail();
        let trace: Vec<Sym2> = self
            .symbol
            .iter()
            .map(|m| {
                let t = m[0] + if d == 2 { m[2] } else { 0.0 } + d as f64 * tau;
                [t, 0.0, t]
            })
            .collect();
        apply_sym_symbol(&trace, u).dot(u)
    }
}

/// `B_A(u, v)` by the symmetric double lattice sum.
pub fn bilinear_form(a: &Coefficient, s: f64, u: &VectorField, v: &VectorField, quad: QuadratureSpec) -> Result<f64> {
    check_s(s)?;
    NonlocalOperator::new(u.grid, s, quad)?.bilinear(a, u, v)
}

/// Dense (pairwise) application of the operator; `<L u, v>_grid = B_A(u, v)`.
pub fn apply_operator(a: &Coefficient, s: f64, u: &VectorField, quad: QuadratureSpec) -> Result<VectorField> {
    let op = NonlocalOperator::new(u.grid, s, quad)?;
    op.check(a, u)?;
    Ok(op.dense_apply(a, u))
}

/// FFT application for `A(x,y) = (a(x)+a(y))/2`; other kinds are rejected.
pub fn separable_fast_apply(a: &Coefficient, s: f64, u: &VectorField) -> Result<VectorField> {
    let op = NonlocalOperator::new(u.grid, s, QuadratureSpec::default())?;
    op.check(a, u)?;
    match &a.kind {
        CoefficientKind::Separable(f) => Ok(op.separable_apply(f, u)),
        CoefficientKind::Constant(k) => Ok(op.separable_apply(&ScalarField::constant(u.grid, *k), u)),
        CoefficientKind::General(_) => Err(Error::Unsupported("fast path needs a separable coefficient".into())),
    }
}

/// `E(u) = B_A(u,u)/2 - <f, u>`.
pub fn energy(a: &Coefficient, s: f64, u: &VectorField, f: &VectorField, quad: QuadratureSpec) -> Result<f64> {
    u.same_grid(f)?;
    Ok(0.5 * bilinear_form(a, s, u, u, quad)? - f.dot(u))
}

/// `B_1(u, u)`: the projected-difference seminorm squared.
pub fn projected_seminorm(u: &VectorField, s: f64) -> Result<f64> {
    bilinear_form(&Coefficient::constant(1.0), s, u, u, QuadratureSpec::default())
}

/// Lattice Gagliardo seminorm squared with the unprojected kernel.
pub fn gagliardo_seminorm(u: &VectorField, s: f64) -> Result<f64> {
    Ok(NonlocalOperator::new(u.grid, s, QuadratureSpec::default())?.gagliardo(u))
}
