//! Fourier-multiplier operators on vector fields.
//!
//! Every symbol here is real and even in `xi`, so real fields map to real
//! fields and the Nyquist modes stay self-conjugate. Negative-order and
//! degree-zero symbols send the zero mode to zero.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Point, VectorField};
use crate::spectral::symbols::LameSymbolConstants;
use crate::spectral::transform::{forward_transform, synthesize};

/// 2x2 real matrix; only the leading `dim x dim` block is used.
pub type Mat2 = [[f64; 2]; 2];

pub(crate) fn xi_norm(xi: Point) -> f64 {
    xi[0].hypot(xi[1])
}

/// `xi_hat (x) xi_hat`, zero at the origin.
pub fn projector(xi: Point) -> Mat2 {
    let r = xi_norm(xi);
    if r == 0.0 {
        return [[0.0; 2]; 2];
    }
    let (a, b) = (xi[0] / r, xi[1] / r);
    [[a * a, a * b], [a * b, b * b]]
}

/// Applies a per-frequency real matrix symbol.
pub fn apply_matrix_symbol(field: &VectorField, symbol: impl Fn(Point) -> Mat2) -> VectorField {
    let g = field.grid;
    let d = g.dim();
    let mut spec = forward_transform(field);
    for k in 0..g.node_count() {
        let m = symbol(g.frequency(k));
        if d == 1 {
            spec.coeffs[k] *= m[0][0];
        } else {
            let (u0, u1) = (spec.coeffs[2 * k], spec.coeffs[2 * k + 1]);
            spec.coeffs[2 * k] = u0 * m[0][0] + u1 * m[0][1];
            spec.coeffs[2 * k + 1] = u0 * m[1][0] + u1 * m[1][1];
        }
    }
    synthesize(&spec)
}

/// Applies the same real scalar symbol to every component.
pub fn apply_scalar_symbol(field: &VectorField, symbol: impl Fn(Point) -> f64) -> VectorField {
    let g = field.grid;
    let d = g.dim();
    let mut spec = forward_transform(field);
    for k in 0..g.node_count() {
        let m = symbol(g.frequency(k));
        for c in 0..d {
            spec.coeffs[k * d + c] *= m;
        }
    }
    synthesize(&spec)
}

/// `(2 pi |xi|)^t` for any real `t`, zero mode mapped to 0.
pub fn fractional_power(field: &VectorField, t: f64) -> VectorField {
    apply_scalar_symbol(field, |xi| {
        let r = xi_norm(xi);
        if r == 0.0 {
            0.0
        } else {
            (2.0 * PI * r).powf(t)
        }
    })
}

fn check_order(name: &'static str, t: f64) -> Result<()> {
    if !(t > 0.0 && t < 2.0) {
        return Err(Error::param(name, t, "must lie in (0, 2)"));
    }
    Ok(())
}

/// `(-Delta)^{t/2}`.
pub fn frac_laplacian(field: &VectorField, t: f64) -> Result<VectorField> {
    check_order("t", t)?;
    Ok(fractional_power(field, t))
}

/// Output of a multiplier that cannot see the zero mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroModeOutput {
    pub field: VectorField,
    /// Set when the input carried a nonzero mean that was discarded.
    pub dropped_mode: bool,
}

/// Riesz potential `I^t = (-Delta)^{-t/2}`.
pub fn riesz_potential(field: &VectorField, t: f64) -> Result<ZeroModeOutput> {
    check_order("t", t)?;
    Ok(ZeroModeOutput {
        dropped_mode: !field.is_mean_zero(),
        field: fractional_power(field, -t),
    })
}

/// The matrix of second-order Riesz transforms, symbol `-xi_hat (x) xi_hat`.
pub fn riesz_matrix_apply(field: &VectorField) -> VectorField {
    apply_matrix_symbol(field, |xi| {
        let p = projector(xi);
        [[-p[0][0], -p[0][1]], [-p[1][0], -p[1][1]]]
    })
}

/// `R_j^2` applied componentwise, symbol `-xi_j^2 / |xi|^2`.
pub fn riesz_square(field: &VectorField, axis: usize) -> VectorField {
    apply_scalar_symbol(field, |xi| -projector(xi)[axis][axis])
}

/// Full symbol of the constant-coefficient projected operator:
/// `(2 pi |xi|)^{2s} (ell1 I + ell2 xi_hat (x) xi_hat)`.
pub fn vector_symbol(xi: Point, s: f64, consts: &LameSymbolConstants) -> Mat2 {
    let r = xi_norm(xi);
    if r == 0.0 {
        return [[0.0; 2]; 2];
    }
    let w = (2.0 * PI * r).powf(2.0 * s);
    let p = projector(xi);
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { 1.0 } else { 0.0 };
            m[i][j] = w * (consts.ell1 * id + consts.ell2 * p[i][j]);
        }
    }
    m
}

pub fn vector_frac_laplacian(field: &VectorField, s: f64, consts: &LameSymbolConstants) -> Result<VectorField> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("s", s, "must lie in (0, 1)"));
    }
    Ok(apply_matrix_symbol(field, |xi| vector_symbol(xi, s, consts)))
}

/// `D(xi) = I - c xi_hat (x) xi_hat`; at `xi = 0` the projector vanishes.
pub fn lame_symbol(xi: Point, c: f64) -> Mat2 {
    let p = projector(xi);
    [[1.0 - c * p[0][0], -c * p[0][1]], [-c * p[1][0], 1.0 - c * p[1][1]]]
}

/// `D(xi)^{-1} = I + c/(1-c) xi_hat (x) xi_hat`.
pub fn lame_inverse_symbol(xi: Point, c: f64) -> Mat2 {
    let b = c / (1.0 - c);
    let p = projector(xi);
    [[1.0 + b * p[0][0], b * p[0][1]], [b * p[1][0], 1.0 + b * p[1][1]]]
}

fn check_c(c: f64) -> Result<()> {
    if !c.is_finite() {
        return Err(Error::param("c", c, "must be finite"));
    }
    if c == 1.0 {
        return Err(Error::SingularSymbol);
    }
    Ok(())
}

/// `U + c (R (x) R) U`.
pub fn lame_multiplier_apply(field: &VectorField, c: f64) -> Result<VectorField> {
    check_c(c)?;
    Ok(apply_matrix_symbol(field, |xi| lame_symbol(xi, c)))
}

/// Inverse of [`lame_multiplier_apply`].
pub fn lame_multiplier_solve(field: &VectorField, c: f64) -> Result<VectorField> {
    check_c(c)?;
    Ok(apply_matrix_symbol(field, |xi| lame_inverse_symbol(xi, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::spectral::symbols::Provenance;

    fn consts(ell1: f64, ell2: f64) -> LameSymbolConstants {
        LameSymbolConstants::new(ell1, ell2, Provenance::UserSupplied).unwrap()
    }

    fn max_diff(a: &VectorField, b: &VectorField) -> f64 {
        a.values.iter().zip(&b.values).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn sine_is_eigenfunction() {
        let g = GridSpec::line(64, 1.0).unwrap();
        let u = VectorField::from_fn(g, |x| [(2.0 * PI * x[0]).sin(), 0.0]);
        let lu = frac_laplacian(&u, 1.0).unwrap();
        assert!(max_diff(&lu, &u.scaled(2.0 * PI)) < 1e-12);
        let iu = riesz_potential(&u, 1.0).unwrap();
        assert!(!iu.dropped_mode);
        assert!(max_diff(&iu.field, &u.scaled(1.0 / (2.0 * PI))) < 1e-14);
    }

    #[test]
    fn zero_mode_is_annihilated() {
        let g = GridSpec::line(32, 1.0).unwrap();
        let u = VectorField::from_fn(g, |_| [3.0, 0.0]);
        assert!(frac_laplacian(&u, 0.7).unwrap().max_abs() < 1e-14);
        let iu = riesz_potential(&u, 0.7).unwrap();
        assert!(iu.dropped_mode && iu.field.max_abs() < 1e-14);
    }

    #[test]
    fn order_range_is_enforced() {
        let g = GridSpec::line(16, 1.0).unwrap();
        let u = VectorField::zeros(g);
        assert!(frac_laplacian(&u, 0.0).is_err());
        assert!(frac_laplacian(&u, 2.0).is_err());
        assert!(riesz_potential(&u, -0.5).is_err());
        assert!(vector_frac_laplacian(&u, 1.0, &consts(1.0, 0.0)).is_err());
        assert!(matches!(lame_multiplier_apply(&u, 1.0), Err(Error::SingularSymbol)));
        assert!(matches!(lame_multiplier_solve(&u, 1.0), Err(Error::SingularSymbol)));
    }

    #[test]
    fn longitudinal_and_transverse_waves() {
        let g = GridSpec::plane(32, 1.0).unwrap();
        // xi = (1, 0): longitudinal amplitude along x
        let long = VectorField::from_fn(g, |x| [(2.0 * PI * x[0]).cos(), 0.0]);
        let trans = VectorField::from_fn(g, |x| [0.0, (2.0 * PI * x[0]).cos()]);
        assert!(max_diff(&riesz_matrix_apply(&long), &long.scaled(-1.0)) < 1e-13);
        assert!(riesz_matrix_apply(&trans).max_abs() < 1e-13);

        let k = consts(1.3, 0.4);
        let s = 0.3;
        let w = (2.0 * PI).powf(2.0 * s);
        let vl = vector_frac_laplacian(&long, s, &k).unwrap();
        assert!(max_diff(&vl, &long.scaled(w * 1.7)) < 1e-12);
        let vt = vector_frac_laplacian(&trans, s, &k).unwrap();
        assert!(max_diff(&vt, &trans.scaled(w * 1.3)) < 1e-12);

        assert!(max_diff(&lame_multiplier_apply(&long, 0.5).unwrap(), &long.scaled(0.5)) < 1e-13);
        assert!(max_diff(&lame_multiplier_apply(&trans, 0.5).unwrap(), &trans) < 1e-13);
        assert!(max_diff(&lame_multiplier_solve(&long, 0.5).unwrap(), &long.scaled(2.0)) < 1e-13);
        assert!(max_diff(&lame_multiplier_solve(&trans, -3.0).unwrap(), &trans) < 1e-13);
    }

    #[test]
    fn c_zero_is_identity() {
        let g = GridSpec::plane(16, 1.0).unwrap();
        let u = VectorField::from_fn(g, |x| [x[0] + 0.3, (x[1] * 5.0).sin()]);
        assert!(max_diff(&lame_multiplier_apply(&u, 0.0).unwrap(), &u) < 1e-14);
    }

    #[test]
    fn inverse_symbol_is_exact_inverse() {
        for &c in &[-3.0, -0.5, 0.5, 2.0] {
            for &xi in &[[1.0, 0.0], [0.3, -2.0], [-1.5, 0.7]] {
                let a = lame_symbol(xi, c);
                let b = lame_inverse_symbol(xi, c);
                for i in 0..2 {
                    for j in 0..2 {
                        let v: f64 = (0..2).map(|k| a[i][k] * b[k][j]).sum();
                        let id = if i == j { 1.0 } else { 0.0 };
                        assert!((v - id).abs() < 1e-14);
                    }
                }
            }
        }
    }
}
