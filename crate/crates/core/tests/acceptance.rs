//! One pass/fail line per acceptance criterion; exits nonzero if any fails.

mod oracles;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use fraclame_core::diagnostics::*;
use fraclame_core::fields::{random_band_limited, random_supported, windowed_wave};
use fraclame_core::nonlocal::*;
use fraclame_core::solver::*;
use fraclame_core::spectral::symbols::{extrapolated_plane_wave_symbol, quadratic};
use fraclame_core::spectral::*;
use fraclame_core::{GridSpec, Result, ScalarField, VectorField};
use nalgebra::{DVector, SymmetricEigen};
use oracles::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

const S_VALUES: [f64; 3] = [0.25, 0.5, 0.75];

// ---------------------------------------------------------------- 1

fn spectral_algebra_on(grid: GridSpec) -> Result<(f64, Duration)> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..3 {
        let u = random_band_limited(grid, grid.points_per_dim() / 4, seed);
        let back = inverse_transform(&forward_transform(&u))?;
        worst = worst.max(field_relative(&back, &u));

        let mut sum = u.clone();
        for j in 0..grid.dim() {
            sum.axpy(1.0, &riesz_square(&u, j));
        }
        worst = worst.max(sum.norm_l2() / u.norm_l2());

        let two = fractional_power(&fractional_power(&u, 0.6), 0.7);
        let one = fractional_power(&u, 1.3);
        worst = worst.max(field_relative(&two, &one));
        let back = fractional_power(&frac_laplacian(&u, 0.8)?, -0.8);
        worst = worst.max(field_relative(&back, &u));

        for c in [-3.0, -0.5, 0.5, 2.0] {
            let back = lame_multiplier_solve(&lame_multiplier_apply(&u, c)?, c)?;
            worst = worst.max(field_relative(&back, &u));
        }
    }
    Ok((worst, start.elapsed()))
}

fn criterion_1() -> Result<Outcome> {
    let (e1, t1) = spectral_algebra_on(GridSpec::line(256, 1.0)?)?;
    let (e2, t2) = spectral_algebra_on(GridSpec::plane(128, 1.0)?)?;
    // eigenstructure of D against the closed 2x2 eigenvalues {1, 1-c}
    let mut eig = 0.0f64;
    for (i, c) in [-3.0, -0.5, 0.5, 2.0].iter().enumerate() {
        let th = 0.7 * i as f64 + 0.1;
        let m = lame_symbol([th.cos(), th.sin()], *c);
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        eig = eig.max((tr - (2.0 - c)).abs()).max((det - (1.0 - c)).abs());
    }
    let err = e1.max(e2).max(eig);
    outcome(
        err <= 1e-12 && t1 < Duration::from_secs(1) && t2 < Duration::from_secs(1),
        format!("max rel {err:.2e}; 1D N=256 {:.0} ms, 2D N=128 {:.0} ms", ms(t1), ms(t2)),
    )
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Result<Outcome> {
    let mut positive = true;
    let mut closed = 0.0f64;
    let mut err1 = 0.0f64;
    let mut err2 = 0.0f64;
    for &s in &S_VALUES {
        for dim in [1, 2] {
            let k = derive_ell_constants(dim, s, 40)?;
            positive &= k.ell1 > 0.0 && (dim == 1 || k.ell2 > 0.0);
            let (a, b) = ell_closed(dim, s);
            closed = closed.max(relative(k.ell1, a));
            if dim == 2 {
                closed = closed.max(relative(k.ell2, b));
            }
        }
        let k1 = derive_ell_constants(1, s, 40)?;
        for xi in [1.0, 4.0] {
            let m = extrapolated_plane_wave_symbol(1, s, [xi, 0.0], 1.0 / 4096.0, 64.0);
            err1 = err1.max(relative(m[0][0], vector_symbol([xi, 0.0], s, &k1)[0][0]));
        }
        let k2 = derive_ell_constants(2, s, 40)?;
        for xi in [[1.0, 0.0], [2.0, 1.0]] {
            let m = extrapolated_plane_wave_symbol(2, s, xi, 1.0 / 128.0, 4.0);
            let spec = vector_symbol(xi, s, &k2);
            let r = xi[0].hypot(xi[1]);
            let (e, p) = ([xi[0] / r, xi[1] / r], [-xi[1] / r, xi[0] / r]);
            err2 = err2.max(relative(quadratic(&m, e), quadratic(&spec, e)));
            err2 = err2.max(relative(quadratic(&m, p), quadratic(&spec, p)));
        }
    }
    outcome(
        positive && closed <= 1e-9 && err1 <= 1e-3 && err2 <= 5e-2,
        format!("positive {positive}; vs Gamma closed form {closed:.1e}; plane waves 1D {err1:.1e}, 2D {err2:.1e}"),
    )
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for dim in [1, 2] {
        let samples: Vec<[f64; 2]> = if dim == 1 {
            vec![[0.5, 0.0], [-0.7, 0.0], [1.0, 0.0], [1.9, 0.0]]
        } else {
            (0..12)
                .map(|i| {
                    let r = [0.5, 1.0, 2.0][i % 3];
                    let th = 0.55 * i as f64;
                    [r * th.cos(), r * th.sin()]
                })
                .collect()
        };
        for &s in &S_VALUES {
            worst = worst.max(hessian_identity_residual(dim, s, &samples, 1e-4)?);
        }
    }
    let inst = gamma_constants(2, 0.5) == (3.0, 1.0);
    outcome(worst <= 1e-6 && inst, format!("max scaled residual {worst:.2e}; gamma(2, 0.5) = (3, 1): {inst}"))
}

// ---------------------------------------------------------------- 4

fn constant_defect(s: f64, k: f64, n: usize) -> Result<f64> {
    let g = GridSpec::line(n, 1.0)?;
    let consts = derive_ell_constants(1, s, 40)?;
    let u = windowed_wave(g, [k, 0.0], [1.0, 0.0], 0.3);
    let phi = windowed_wave(g, [k, 0.0], [1.0, 0.0], 0.0);
    let d = commutator_total(&Coefficient::constant(1.0), s, &u, &phi, s, s, &consts)?;
    Ok(d.abs() / (fractional_power(&u, s).norm_l2() * fractional_power(&phi, s).norm_l2()))
}

fn criterion_4() -> Result<Outcome> {
    let grids = [128, 256, 512];
    let quarter: Vec<f64> = grids.iter().map(|n| constant_defect(0.25, 8.0, *n)).collect::<Result<_>>()?;
    let half: Vec<f64> = grids.iter().map(|n| constant_defect(0.5, 8.0, *n)).collect::<Result<_>>()?;
    let order = |v: &[f64]| (v[1] / v[2]).log2().min((v[0] / v[1]).log2());
    let (oq, oh) = (order(&quarter), order(&half));
    outcome(
        quarter[2] <= 1e-2 && oq >= 0.5 && oh >= 0.5,
        format!(
            "s=0.25 k=8: {:.2e} {:.2e} {:.2e} (order {oq:.2}); s=0.5 order {oh:.2} (N=512 value {:.2e})",
            quarter[0], quarter[1], quarter[2], half[2]
        ),
    )
}

// ---------------------------------------------------------------- 5

fn normalized_d2(a: &ScalarField, u: &VectorField, phi: &VectorField, s1: f64, s2: f64) -> Result<f64> {
    let scale = fractional_power(u, s1).norm_l2() * fractional_power(phi, s2).norm_l2();
    Ok(commutator_d2(a, u, phi, s1, s2)? / scale)
}

fn criterion_5() -> Result<Outcome> {
    let mut constant = 0.0f64;
    for g in [GridSpec::line(256, 1.0)?, GridSpec::plane(64, 1.0)?] {
        for seed in 0..3 {
            let u = random_band_limited(g, 10, seed);
            let phi = random_band_limited(g, 10, seed + 100);
            for kappa in [1.0, 2.5] {
                let d = normalized_d2(&ScalarField::constant(g, kappa), &u, &phi, 0.4, 0.6)?;
                constant = constant.max(d.abs());
            }
        }
    }
    let mut oracle = 0.0f64;
    let mut magnitude = 0.0f64;
    for g in [GridSpec::line(64, 1.0)?, GridSpec::plane(16, 1.0)?] {
        let a = ScalarField::from_fn(g, |x| 2.0 + 0.5 * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos());
        let u = random_band_limited(g, 3, 7);
        let phi = random_band_limited(g, 3, 8);
        let scale = fractional_power(&u, 0.5).norm_l2() * fractional_power(&phi, 0.5).norm_l2();
        let lib = commutator_d2(&a, &u, &phi, 0.5, 0.5)?;
        let dense = dense_d2(&a, &u, &phi, 0.5, 0.5);
        oracle = oracle.max((lib - dense).abs() / scale);
        magnitude = magnitude.max(dense.abs() / scale);
    }
    outcome(
        constant <= 1e-12 && oracle <= 1e-8,
        format!("constant A_D {constant:.1e}; vs dense DFT {oracle:.1e} (|d2| up to {magnitude:.2e})"),
    )
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Result<Outcome> {
    let coef = |g: GridSpec| {
        let t = PairTable::from_fn(g, |x, y| 2.0 + 0.5 * (2.0 * PI * x[0]).sin() * (2.0 * PI * y[0]).sin());
        Coefficient::general(t, 0.9, 0.4, 4.0)
    };
    let cfg = DecayConfig {
        grid: GridSpec::line(4096, 1.0)?,
        s: 0.5,
        s1: 0.5,
        s2: 0.5,
        frequencies: vec![4.0, 8.0, 16.0, 32.0],
        extrapolate: true,
    };
    let table = commutator_decay_experiment(&coef, &cfg, &derive_ell_constants(1, 0.5, 40)?)?;
    let totals: Vec<String> = table.rows.iter().map(|r| format!("{:.2e}", r.total.abs())).collect();
    let change = table.rows.iter().map(|r| r.refinement_change).fold(0.0, f64::max);
    outcome(
        table.slope <= -0.1,
        format!("slope {:.3}; |D| {}; max refinement change {change:.1e}", table.slope, totals.join(" ")),
    )
}

// ---------------------------------------------------------------- 7

fn oracle_solve(a: &Coefficient, s: f64, f: &VectorField, mask: &DomainMask) -> VectorField {
    let (k, nodes) = stiffness_1d(a, s, mask);
    let rhs = DVector::from_iterator(nodes.len(), nodes.iter().map(|i| f.values[*i]));
    let x = k.lu().solve(&rhs).expect("oracle stiffness is singular");
    let mut out = VectorField::zeros(f.grid);
    for (p, i) in nodes.iter().enumerate() {
        out.values[*i] = x[p];
    }
    out
}

fn criterion_7() -> Result<Outcome> {
    let g = GridSpec::line(64, 1.0)?;
    let mask = DomainMask::centered(g, 0.8, None)?;
    let f = mask.apply(&random_supported(g, 5, 11));
    let mut agree = 0.0f64;
    let mut residual = 0.0f64;
    let mut monotone = true;
    let smooth = Coefficient::general(
        PairTable::from_fn(g, |x, y| 1.0 + 0.3 * (2.0 * PI * (x[0] + y[0])).cos()),
        0.9,
        0.5,
        4.0,
    )?;
    for a in [Coefficient::constant(1.5), smooth] {
        for &s in &S_VALUES {
            let rep = solve_dirichlet(&a, s, &f, &mask, 1e-12, 2000)?;
            let reference = oracle_solve(&a, s, &f, &mask);
            agree = agree.max(field_relative(&rep.solution, &reference));
            residual = residual.max(rep.final_residual());
            monotone &= rep.converged();
            monotone &= rep.energy_history.windows(2).all(|w| w[1] <= w[0] + 1e-14 * w[0].abs());
        }
    }
    let bad = sign_changing_example(g, 0.5, 1.0, 1e6)?;
    let rep = solve_dirichlet(&bad, 0.5, &f, &mask, 1e-10, 500)?;
    let (k, _) = stiffness_1d(&bad, 0.5, &mask);
    let lowest = SymmetricEigen::new((&k + k.transpose()) * 0.5).eigenvalues.min();
    let detected = rep.status == SolveStatus::IndefiniteDetected && lowest < 0.0;
    outcome(
        agree <= 1e-8 && residual <= 1e-8 && monotone && detected,
        format!(
            "vs pairwise oracle {agree:.1e}; residual {residual:.1e}; energy monotone {monotone}; \
             indefinite {:?} with oracle eigenvalue {lowest:.2e}",
            rep.status
        ),
    )
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Result<Outcome> {
    let (t, sigma) = (0.6, 0.4);
    let mut recovery = 0.0f64;
    for g in [GridSpec::line(256, 1.0)?, GridSpec::plane(64, 1.0)?] {
        let exact = random_band_limited(g, 8, 21);
        let zero = VectorField::zeros(g);
        for c in [-0.5, 0.5] {
            let f1 = lame_multiplier_apply(&fractional_power(&exact, t), c)?.scaled(1.3);
            let u = solve_constant_lame(1.3, t, sigma, c, &f1, &zero)?.field;
            recovery = recovery.max(field_relative(&u, &exact));
            let f2 = weighted_lame_apply(&ScalarField::constant(g, 1.3), t, sigma, c, &exact)?;
            let u = solve_constant_lame(1.3, t, sigma, c, &zero, &f2)?.field;
            recovery = recovery.max(field_relative(&u, &exact));
        }
    }
    let g = GridSpec::line(256, 1.0)?;
    let abar = ScalarField::from_fn(g, |x| 1.0 + 0.2 * (2.0 * PI * x[0]).sin());
    let exact = random_band_limited(g, 8, 22);
    let f2 = weighted_lame_apply(&abar, t, sigma, 0.5, &exact)?;
    let zero = VectorField::zeros(g);
    let rep = solve_weighted_lame(&abar, t, sigma, 0.5, &zero, &f2, 1e-8, 200)?;
    let ratio = abar.max() / abar.min();
    outcome(
        recovery <= 1e-10 && rep.converged() && rep.final_residual() <= 1e-8,
        format!(
            "manufactured recovery {recovery:.1e}; weight ratio {ratio:.2}: {} iterations, residual {:.1e}, error {:.1e}",
            rep.iterations,
            rep.final_residual(),
            field_relative(&rep.solution, &exact)
        ),
    )
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Result<Outcome> {
    let g = GridSpec::line(128, 1.0)?;
    let mask = DomainMask::centered(g, 0.8, None)?;
    let (s, t, tol) = (0.5, 0.6, 1e-10);
    let f1 = windowed_wave(g, [2.0, 0.0], [1.0, 0.0], 0.0);
    let f2 = windowed_wave(g, [3.0, 0.0], [1.0, 0.0], 0.5);
    let flat = Coefficient::constant(1.5);
    let one = solve_full_perturbative(&flat, s, t, &f1, &f2, &mask, tol, 20)?;

    let bumpy = Coefficient::general(
        PairTable::from_fn(g, |x, y| {
            1.5 * (1.0 + 0.05 * (x[0] - y[0]).abs().sqrt() + 0.05 * (2.0 * PI * (x[0] + y[0])).sin())
        }),
        0.5,
        0.5,
        1.0,
    )?;
    let rep = solve_full_perturbative(&bumpy, s, t, &f1, &f2, &mask, tol, 50)?;
    let h = &rep.residual_history;
    let factors: Vec<f64> = h.windows(2).map(|w| w[1] / w[0]).collect();
    let contraction = factors.iter().copied().fold(0.0, f64::max);
    let data = mask.apply(&lame_rhs(2.0 * s - t, &f1, &f2));
    let cg = solve_dirichlet(&bumpy, s, &data, &mask, tol, 5000)?;
    let gap = field_relative(&rep.solution, &cg.solution);
    outcome(
        one.converged() && one.iterations == 1 && rep.converged() && contraction < 1.0 && gap <= 10.0 * tol,
        format!(
            "constant A: {} step(s); 5% perturbation: {} steps, max contraction {contraction:.1e}; vs CG {gap:.1e}",
            one.iterations, rep.iterations
        ),
    )
}

// ---------------------------------------------------------------- 10

fn criterion_10() -> Result<Outcome> {
    let base = GridSpec::line(64, 1.0)?;
    let f1 = |g: GridSpec| windowed_wave(g, [2.0, 0.0], [1.0, 0.0], 0.0);
    let f2 = |g: GridSpec| windowed_wave(g, [3.0, 0.0], [1.0, 0.0], 0.5);
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (s, t, q, kind) in [(0.5, 0.6, 2.0, 0), (0.4, 0.5, 4.0, 1), (0.7, 0.8, 2.0, 2), (0.3, 0.3, 2.0, 0)] {
        let cfg = RegularityConfig {
            base,
            grids: vec![64, 128, 256],
            s,
            t,
            q,
            omega: 0.6,
            probe: 0.3,
            tol: 1e-10,
            max_iter: 5000,
        };
        let coef = move |g: GridSpec| match kind {
            0 => Ok(Coefficient::constant(1.0)),
            1 => Coefficient::separable(ScalarField::from_fn(g, |x| 1.5 + 0.3 * (2.0 * PI * x[0]).sin()), 0.9, 0.4, 3.0),
            _ => Coefficient::general(
                PairTable::from_fn(g, |x, y| {
                    1.0 + 0.2 * (x[0] - y[0]).abs().sqrt() + 0.1 * (2.0 * PI * (x[0] + y[0])).cos()
                }),
                0.5,
                0.4,
                2.0,
            ),
        };
        let rep = regularity_experiment(&cfg, &coef, &f1, &f2)?;
        worst = worst.max(rep.finest_variation());
        lines.push(format!("{:.1}%", 100.0 * rep.finest_variation()));
    }
    outcome(worst <= 0.2, format!("finest-grid variation per configuration: {}", lines.join(", ")))
}

// ---------------------------------------------------------------- 11

fn criterion_11() -> Result<Outcome> {
    let mut one = 0.0f64;
    let g1 = GridSpec::line(256, 1.0)?;
    for seed in 0..10 {
        one = one.max((korn_ratio(&random_band_limited(g1, 20, seed), 0.5)? - 1.0).abs());
    }
    let g2 = GridSpec::plane(64, 1.0)?;
    let (lo, hi) = korn_bounds_discrete(g2, 0.5)?;
    let (clo, chi) = korn_bounds_continuum(&derive_ell_constants(2, 0.5, 40)?, 2);
    let mut seen = (f64::INFINITY, 0.0f64);
    for seed in 0..100 {
        let r = korn_ratio(&random_band_limited(g2, 8, 1000 + seed), 0.5)?;
        seen = (seen.0.min(r), seen.1.max(r));
    }
    let inside = seen.0 >= lo - 1e-12 && seen.1 <= hi + 1e-12;
    outcome(
        one <= 1e-10 && inside,
        format!(
            "1D |ratio-1| {one:.1e}; 2D observed [{:.4}, {:.4}] within lattice bounds [{lo:.4}, {hi:.4}] \
             (continuum [{clo:.4}, {chi:.4}])",
            seen.0, seen.1
        ),
    )
}

// ---------------------------------------------------------------- 12

fn criterion_12(suite_start: Instant) -> Result<Outcome> {
    let g = GridSpec::line(4096, 1.0)?;
    let a = ScalarField::from_fn(g, |x| 1.5 + 0.3 * (2.0 * PI * x[0]).sin());
    let coef = Coefficient::separable(a, 0.9, 0.4, 3.0)?;
    let u = random_supported(g, 20, 3);
    let op = NonlocalOperator::new(g, 0.5, QuadratureSpec::default())?;
    let start = Instant::now();
    let dense = op.dense_apply(&coef, &u);
    let td = start.elapsed();
    let mut tf = Duration::MAX;
    let mut fast = VectorField::zeros(g);
    for _ in 0..3 {
        let start = Instant::now();
        fast = op.apply(&coef, &u)?;
        tf = tf.min(start.elapsed());
    }
    let diff = fast.sub(&dense).max_abs() / dense.max_abs();
    let speedup = td.as_secs_f64() / tf.as_secs_f64();
    let total = suite_start.elapsed();
    outcome(
        diff <= 1e-10 && speedup >= 10.0 && total < Duration::from_secs(600),
        format!("fast vs dense {diff:.1e}; speedup {speedup:.0}x at N=4096; suite {:.1} s", total.as_secs_f64()),
    )
}

fn main() {
    let start = Instant::now();
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("spectral algebra", criterion_1),
        ("symbol derivation", criterion_2),
        ("hessian identity", criterion_3),
        ("constant-coefficient coincidence", criterion_4),
        ("riesz commutator", criterion_5),
        ("commutator decay", criterion_6),
        ("dirichlet solver", criterion_7),
        ("weighted lame solver", criterion_8),
        ("perturbative solver", criterion_9),
        ("regularity sweep", criterion_10),
        ("korn ratio", criterion_11),
    ];
    let mut failed = 0;
    let mut report = |i: usize, name: &str, r: Result<Outcome>| {
        let (ok, detail) = match r {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!("criterion {:>2} {:<34} {}  {detail}", i, name, if ok { "PASS" } else { "FAIL" });
    };
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = run();
        report(i + 1, name, r);
        eprintln!("    ({:.2} s)", t.elapsed().as_secs_f64());
    }
    report(12, "performance", criterion_12(start));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
