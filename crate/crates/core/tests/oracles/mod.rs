//! Reference computations written independently of the library internals:
//! closed-form symbol constants, explicit DFT matrices and a pair-by-pair
//! stiffness assembly.

#![allow(dead_code)]

use std::f64::consts::PI;

use fraclame_core::nonlocal::Coefficient;
use fraclame_core::solver::DomainMask;
use fraclame_core::{GridSpec, ScalarField, VectorField};
use nalgebra::DMatrix;
use num_complex::Complex64;
use statrs::function::gamma::gamma;

/// `int_0^inf (1 - cos r) r^{-1-beta} dr = pi / (2 Gamma(1+beta) sin(pi beta/2))`.
pub fn radial_closed(beta: f64) -> f64 {
    PI / (2.0 * gamma(1.0 + beta) * (0.5 * PI * beta).sin())
}

/// `int_0^{2pi} |cos psi|^p dpsi`.
pub fn cos_moment(p: f64) -> f64 {
    2.0 * PI.sqrt() * gamma(0.5 * (p + 1.0)) / gamma(0.5 * p + 1.0)
}

/// `(ell1, ell2)` from the Gamma-function closed forms.
pub fn ell_closed(dim: usize, s: f64) -> (f64, f64) {
    let g = radial_closed(2.0 * s);
    if dim == 1 {
        return (2.0 * g, 0.0);
    }
    let long = cos_moment(2.0 * s + 2.0);
    let trans = cos_moment(2.0 * s) - long;
    (g * trans, g * (long - trans))
}

/// Signed integer frequency, Nyquist at `-N/2`.
pub fn signed(i: usize, n: usize) -> f64 {
    if i < n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// Applies a per-frequency matrix symbol by explicit DFT sums
/// (`O(N^{2n})`, small grids only). Symbols receive `xi = k / L`.
pub fn dense_matrix_multiplier(u: &VectorField, symbol: &dyn Fn([f64; 2]) -> [[f64; 2]; 2]) -> VectorField {
    let g = u.grid;
    let (d, n, m) = (g.dim(), g.points_per_dim(), g.node_count());
    let l = g.box_length();
    let idx = |j: usize| if d == 1 { [j, 0] } else { [j / n, j % n] };
    let phase = |j: usize, k: usize| {
        let (a, b) = (idx(j), idx(k));
        2.0 * PI * ((a[0] * b[0] + a[1] * b[1]) % n) as f64 / n as f64
    };
    let mut spec = vec![Complex64::new(0.0, 0.0); m * d];
    for k in 0..m {
        for j in 0..m {
            let e = Complex64::from_polar(1.0 / m as f64, -phase(j, k));
            for c in 0..d {
                spec[k * d + c] += e * u.values[j * d + c];
            }
        }
    }
    for k in 0..m {
        let i = idx(k);
        let xi = [signed(i[0], n) / l, if d == 2 { signed(i[1], n) / l } else { 0.0 }];
        let s = symbol(xi);
        let v: Vec<Complex64> = (0..d).map(|c| spec[k * d + c]).collect();
        for r in 0..d {
            spec[k * d + r] = (0..d).map(|c| v[c] * s[r][c]).sum();
        }
    }
    let mut out = vec![0.0; m * d];
    for j in 0..m {
        for k in 0..m {
            let e = Complex64::from_polar(1.0, phase(j, k));
            for c in 0..d {
                out[j * d + c] += (e * spec[k * d + c]).re;
            }
        }
    }
    VectorField::from_values(g, out).unwrap()
}

pub fn dense_power(u: &VectorField, t: f64) -> VectorField {
    dense_matrix_multiplier(u, &|xi| {
        let r = xi[0].hypot(xi[1]);
        let v = if r == 0.0 { 0.0 } else { (2.0 * PI * r).powf(t) };
        [[v, 0.0], [0.0, v]]
    })
}

pub fn dense_riesz_matrix(u: &VectorField) -> VectorField {
    dense_matrix_multiplier(u, &|xi| {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        if r2 == 0.0 {
            return [[0.0; 2]; 2];
        }
        [[-xi[0] * xi[0] / r2, -xi[0] * xi[1] / r2], [-xi[0] * xi[1] / r2, -xi[1] * xi[1] / r2]]
    })
}

/// `<R(x)R (a U) - a R(x)R U, V>` with every transform done by DFT sums.
pub fn dense_d2(a: &ScalarField, u: &VectorField, phi: &VectorField, s1: f64, s2: f64) -> f64 {
    let uu = dense_power(u, s1);
    let vv = dense_power(phi, s2);
    let left = dense_riesz_matrix(&uu.weighted(&a.values));
    let right = dense_riesz_matrix(&uu).weighted(&a.values);
    left.sub(&right).dot(&vv)
}

/// 1D exterior tail `int_{|z| > L/2} |z|^{-1-2s} dz`.
pub fn tail_1d(l: f64, s: f64) -> f64 {
    2.0 * (0.5 * l).powf(-2.0 * s) / (2.0 * s)
}

/// 1D stiffness on the masked nodes, pair by pair:
/// `K_ii = sum_y A(i,y) w(y-i) + tau A(i,i)`, `K_ij = -A(i,j) w(j-i)`,
/// `w(d) = h |z|^{-1-2s}` with the minimum-image `z`.
pub fn stiffness_1d(a: &Coefficient, s: f64, mask: &DomainMask) -> (DMatrix<f64>, Vec<usize>) {
    let g = mask.grid;
    assert_eq!(g.dim(), 1);
    let n = g.points_per_dim();
    let h = g.spacing();
    let w = |x: usize, y: usize| {
        let d = (y + n - x) % n;
        let z = d.min(n - d) as f64 * h;
        h * z.powf(-1.0 - 2.0 * s)
    };
    let tau = tail_1d(g.box_length(), s);
    let nodes: Vec<usize> = (0..n).filter(|i| mask.interior[*i]).collect();
    let mut k = DMatrix::zeros(nodes.len(), nodes.len());
    for (p, &i) in nodes.iter().enumerate() {
        let mut diag = tau * a.eval(i, i);
        for y in (0..n).filter(|y| *y != i) {
            diag += a.eval(i, y) * w(i, y);
        }
        k[(p, p)] = diag;
        for (q, &j) in nodes.iter().enumerate() {
            if j != i {
                k[(p, q)] = -a.eval(i, j) * w(i, j);
            }
        }
    }
    (k, nodes)
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn field_relative(a: &VectorField, b: &VectorField) -> f64 {
    a.sub(b).norm_l2() / b.norm_l2().max(f64::MIN_POSITIVE)
}

#[allow(unused)]
pub fn grid_1d(n: usize) -> GridSpec {
    GridSpec::line(n, 1.0).unwrap()
}
