//! Discrete Fourier transform contract.
//!
//! `coeff(k) = N^{-n} sum_j u_j exp(-2 pi i k.j / N)` with `k` in FFT order,
//! which is the sampled form of the `exp(-2 pi i x.xi)` kernel with `xi = k/L`.
//! Plancherel reads `h^n sum |u|^2 = L^n sum |coeff|^2`.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, VectorField};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Frequency-domain image of a [`VectorField`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    /// Frequency-major, component-minor, frequencies in FFT order.
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.dim() * grid.node_count()],
        }
    }

    pub fn coeff(&self, freq_index: usize, component: usize) -> Complex64 {
        self.coeffs[freq_index * self.grid.dim() + component]
    }

    pub fn coeff_mut(&mut self, freq_index: usize, component: usize) -> &mut Complex64 {
        let d = self.grid.dim();
        &mut self.coeffs[freq_index * d + component]
    }

    /// FFT-ordered index of the frequency `-k`.
    pub fn negated_index(&self, freq_index: usize) -> usize {
        let g = &self.grid;
        let n = g.points_per_dim();
        let idx = g.multi_index(freq_index);
        g.node_index([(n - idx[0]) % n, (n - idx[1]) % n])
    }

    /// Largest `|coeff(-k) - conj(coeff(k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.grid.dim();
        let mut worst = 0.0f64;
        for k in 0..self.grid.node_count() {
            let mk = self.negated_index(k);
            for c in 0..d {
                let diff = self.coeff(mk, c) - self.coeff(k, c).conj();
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    /// `sum |coeff|^2`, the spectral side of Plancherel.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub(crate) fn fft_in_place(grid: &GridSpec, buf: &mut [Complex64], direction: FftDirection) {
    let n = grid.points_per_dim();
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft(n, direction);
        if grid.dim() == 1 {
            fft.process(buf);
        } else {
            // rows are contiguous
            fft.process(buf);
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = buf[i * n + j];
                }
                fft.process(&mut col);
                for i in 0..n {
                    buf[i * n + j] = col[i];
                }
            }
        }
    });
}

/// Normalized spectrum of one scalar lattice array.
pub(crate) fn scalar_spectrum(grid: &GridSpec, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    fft_in_place(grid, &mut buf, FftDirection::Forward);
    let inv = 1.0 / grid.node_count() as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

/// Real part of the synthesis of a normalized spectrum.
pub(crate) fn scalar_synthesis(grid: &GridSpec, mut spec: Vec<Complex64>) -> Vec<f64> {
    fft_in_place(grid, &mut spec, FftDirection::Inverse);
    spec.into_iter().map(|c| c.re).collect()
}


pub fn forward_transform(field: &VectorField) -> SpectralField {
    let g = field.grid;
    let d = g.dim();
    let mut out = SpectralField::zeros(g);
    for c in 0..d {
        let spec = scalar_spectrum(&g, &field.component(c));
        for (k, v) in spec.into_iter().enumerate() {
            out.coeffs[k * d + c] = v;
        }
    }
    out
}

/// Relative Hermitian defect above which a spectrum is rejected.
const HERMITIAN_TOL: f64 = 1e-10;

pub fn inverse_transform(spec: &SpectralField) -> Result<VectorField> {
    let scale = spec.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let defect = spec.hermitian_defect();
    if defect > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NonHermitian { defect });
    }
    Ok(synthesize(spec))
}

/// Synthesis without the Hermitian check; imaginary parts are discarded.
pub(crate) fn synthesize(spec: &SpectralField) -> VectorField {
    let g = spec.grid;
    let d = g.dim();
    let mut out = VectorField::zeros(g);
    for c in 0..d {
        let comp: Vec<Complex64> = (0..g.node_count()).map(|k| spec.coeffs[k * d + c]).collect();
        out.set_component(c, &scalar_synthesis(&g, comp));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_lives_in_zero_mode() {
        let g = GridSpec::line(16, 1.0).unwrap();
        let s = forward_transform(&VectorField::from_fn(g, |_| [1.0, 0.0]));
        assert!((s.coeff(0, 0).re - 1.0).abs() < 1e-15);
        assert!(s.coeffs.iter().skip(1).all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn pure_tone_hits_plus_minus_one() {
        let g = GridSpec::line(32, 1.0).unwrap();
        let s = forward_transform(&VectorField::from_fn(g, |x| [(2.0 * PI * x[0]).sin(), 0.0]));
        for k in 0..32 {
            let expect = if k == 1 || k == 31 { 0.5 } else { 0.0 };
            assert!((s.coeff(k, 0).norm() - expect).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn zero_spectrum_and_cosine_pair() {
        let g = GridSpec::line(16, 1.0).unwrap();
        assert!(inverse_transform(&SpectralField::zeros(g)).unwrap().is_zero());
        let mut s = SpectralField::zeros(g);
        *s.coeff_mut(1, 0) = Complex64::new(0.5, 0.0);
        *s.coeff_mut(15, 0) = Complex64::new(0.5, 0.0);
        let u = inverse_transform(&s).unwrap();
        // phases refer to the lattice index, not the centred coordinate
        for i in 0..16 {
            let x = i as f64 / 16.0;
            assert!((u.values[i] - (2.0 * PI * x).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let g = GridSpec::line(16, 1.0).unwrap();
        let mut s = SpectralField::zeros(g);
        *s.coeff_mut(1, 0) = Complex64::new(0.5, 0.0);
        assert!(matches!(inverse_transform(&s), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn plancherel() {
        let g = GridSpec::plane(16, 2.0).unwrap();
        let u = VectorField::from_fn(g, |x| [(x[0] * 3.0).sin() + x[1], (x[0] * x[1]).cos()]);
        let s = forward_transform(&u);
        let lhs = u.norm_l2().powi(2);
        let rhs = g.box_length().powi(2) * s.energy();
        assert!((lhs - rhs).abs() < 1e-12 * lhs);
    }
}
