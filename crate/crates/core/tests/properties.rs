use std::f64::consts::PI;

use fraclame_core::diagnostics::{commutator_breakdown, korn_ratio};
use fraclame_core::fields::random_band_limited;
use fraclame_core::nonlocal::*;
use fraclame_core::spectral::*;
use fraclame_core::{GridSpec, ScalarField};
use proptest::prelude::*;

fn line() -> GridSpec {
    GridSpec::line(64, 1.0).unwrap()
}

fn plane() -> GridSpec {
    GridSpec::plane(16, 1.0).unwrap()
}

fn smooth_pairs(g: GridSpec, amp: f64) -> Coefficient {
    let t = PairTable::from_fn(g, |x, y| 1.0 + amp * (2.0 * PI * (x[0] + y[0])).cos() * (2.0 * PI * x[1]).cos());
    Coefficient::general(t, 0.9, 0.3, 10.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip(seed in any::<u64>(), kmax in 1usize..7, two_d in any::<bool>()) {
        let g = if two_d { plane() } else { line() };
        let u = random_band_limited(g, kmax, seed);
        let back = inverse_transform(&forward_transform(&u)).unwrap();
        prop_assert!(back.sub(&u).max_abs() <= 1e-13 * u.max_abs().max(1.0));
    }

    #[test]
    fn riesz_squares_sum_to_minus_identity(seed in any::<u64>()) {
        let u = random_band_limited(plane(), 6, seed);
        let s = riesz_square(&u, 0).add(&riesz_square(&u, 1));
        prop_assert!(s.add(&u).norm_l2() <= 1e-12 * u.norm_l2());
    }

    #[test]
    fn lame_symbol_eigenstructure(theta in 0.0..(2.0 * PI), c in -5.0f64..0.95) {
        let xi = [theta.cos(), theta.sin()];
        let d = lame_symbol(xi, c);
        let perp = [-xi[1], xi[0]];
        for i in 0..2 {
            let long: f64 = (0..2).map(|j| d[i][j] * xi[j]).sum();
            let trans: f64 = (0..2).map(|j| d[i][j] * perp[j]).sum();
            prop_assert!((long - (1.0 - c) * xi[i]).abs() < 1e-12);
            prop_assert!((trans - perp[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn bilinear_form_symmetric_and_nonnegative(seed in any::<u64>(), s in 0.1f64..0.9) {
        let g = line();
        let a = smooth_pairs(g, 0.4);
        let u = random_band_limited(g, 5, seed);
        let v = random_band_limited(g, 5, seed ^ 0x5555);
        let q = QuadratureSpec::default();
        let uv = bilinear_form(&a, s, &u, &v, q).unwrap();
        let vu = bilinear_form(&a, s, &v, &u, q).unwrap();
        prop_assert!((uv - vu).abs() <= 1e-10 * uv.abs().max(1.0));
        prop_assert!(bilinear_form(&a, s, &u, &u, q).unwrap() >= 0.0);
    }

    #[test]
    fn constant_form_translation_covariant(seed in any::<u64>(), shift in 0usize..16, s in 0.1f64..0.9) {
        let g = plane();
        let a = Coefficient::constant(1.7);
        let u = random_band_limited(g, 4, seed);
        let v = random_band_limited(g, 4, seed.wrapping_add(1));
        let q = QuadratureSpec::default();
        let base = bilinear_form(&a, s, &u, &v, q).unwrap();
        let moved = bilinear_form(&a, s, &u.cyclic_shift([shift, 3]), &v.cyclic_shift([shift, 3]), q).unwrap();
        prop_assert!((base - moved).abs() <= 1e-10 * base.abs().max(1.0));
    }

    #[test]
    fn separable_fast_path_matches_dense(seed in any::<u64>(), s in 0.1f64..0.9) {
        let g = plane();
        let a = ScalarField::from_fn(g, |x| 1.5 + 0.4 * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos());
        let coef = Coefficient::separable(a, 0.9, 0.3, 10.0).unwrap();
        let u = random_band_limited(g, 5, seed);
        let op = NonlocalOperator::new(g, s, QuadratureSpec::default()).unwrap();
        let fast = op.apply(&coef, &u).unwrap();
        let dense = op.dense_apply(&coef, &u);
        prop_assert!(fast.sub(&dense).max_abs() <= 1e-10 * dense.max_abs());
    }

    #[test]
    fn diagnostics_invariant_under_sign_flip(seed in any::<u64>()) {
        let g = line();
        let a = smooth_pairs(g, 0.3);
        let consts = derive_ell_constants(1, 0.5, 16).unwrap();
        let u = random_band_limited(g, 4, seed);
        let phi = random_band_limited(g, 4, seed ^ 7);
        let b = commutator_breakdown(&a, 0.5, &u, &phi, 0.4, 0.6, &consts).unwrap();
        let f = commutator_breakdown(&a, 0.5, &u.scaled(-1.0), &phi.scaled(-1.0), 0.4, 0.6, &consts).unwrap();
        prop_assert_eq!(b.total, f.total);
        prop_assert_eq!(b.d1 + b.d2, b.total);
        let r = korn_ratio(&u, 0.5).unwrap();
        prop_assert_eq!(r, korn_ratio(&u.scaled(-1.0), 0.5).unwrap());
    }

    #[test]
    fn korn_ratio_within_lattice_bounds(seed in any::<u64>()) {
        let g = plane();
        let (lo, hi) = fraclame_core::diagnostics::korn_bounds_discrete(g, 0.4).unwrap();
        let r = korn_ratio(&random_band_limited(g, 7, seed), 0.4).unwrap();
        prop_assert!(r >= lo - 1e-12 && r <= hi + 1e-12);
    }
}
