//! Smooth test fields: bump windows, windowed plane waves, and seeded random
//! band-limited fields.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{GridSpec, Point, ScalarField, VectorField};
use crate::spectral::transform::{synthesize, SpectralField};

/// `exp(1 - 1/(1 - r^2))` on `|r| < 1`, zero outside; equals 1 at the origin.
pub fn bump_1d(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// Product bump filling the support sub-box of `grid`.
pub fn support_bump(grid: GridSpec) -> ScalarField {
    let w = grid.support_half_width();
    let d = grid.dim();
    ScalarField::from_fn(grid, |x| (0..d).map(|a| bump_1d(x[a] / w)).product())
}

/// `window(x) * amplitude * cos(2 pi xi.x + phase)`.
pub fn windowed_wave(grid: GridSpec, xi: Point, amplitude: Point, phase: f64) -> VectorField {
    let w = support_bump(grid);
    let u = VectorField::from_fn(grid, |x| {
        let c = (2.0 * PI * (xi[0] * x[0] + xi[1] * x[1]) + phase).cos();
        [amplitude[0] * c, amplitude[1] * c]
    });
    u.weighted(&w.values)
}

/// Mean-zero random field with integer frequencies `0 < |k|_inf <= kmax`
/// and coefficients uniform in the unit square, fixed by `seed`.
pub fn random_band_limited(grid: GridSpec, kmax: usize, seed: u64) -> VectorField {
    let n = grid.points_per_dim();
    let d = grid.dim();
    assert!(kmax < n / 2, "kmax must stay below the Nyquist index");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = SpectralField::zeros(grid);
    let km = kmax as i64;
    let ky_range = if d == 2 { -km..=km } else { 0..=0 };
    let wrap = |k: i64| ((k + n as i64) % n as i64) as usize;
    for kx in -km..=km {
        for ky in ky_range.clone() {
            // visit each +-k pair once
            if (kx, ky) <= (0, 0) {
                continue;
            }
            let idx = grid.node_index([wrap(kx), wrap(ky)]);
            let neg = grid.node_index([wrap(-kx), wrap(-ky)]);
            for c in 0..d {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                spec.coeffs[idx * d + c] = z;
                spec.coeffs[neg * d + c] = z.conj();
            }
        }
    }
    synthesize(&spec)
}

/// Random band-limited field (box frequencies `<= kmax`) multiplied by the
/// support bump; smooth and compactly supported.
pub fn random_supported(grid: GridSpec, kmax: usize, seed: u64) -> VectorField {
    random_band_limited(grid, kmax, seed).weighted(&support_bump(grid).values)
}

/// Random smooth scalar field `mean + amp * (band-limited, unit max)`.
pub fn random_smooth_scalar(grid: GridSpec, kmax: usize, mean: f64, amp: f64, seed: u64) -> ScalarField {
    let f = random_band_limited(grid, kmax, seed);
    let comp = f.component(0);
    let m = comp.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    ScalarField {
        grid,
        values: comp.iter().map(|v| mean + amp * v / m).collect(),
    }
}
