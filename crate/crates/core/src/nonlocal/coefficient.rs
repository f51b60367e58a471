//! The kernel weight `A(x, y)` and its class checks.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Point, ScalarField};

/// Symmetric table over unordered node pairs, diagonal included.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTable {
    pub grid: GridSpec,
    values: Vec<f64>,
}

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

impl PairTable {
    /// Tabulates `(f(x,y) + f(y,x)) / 2` so the table is symmetric whatever `f` is.
    pub fn from_fn(grid: GridSpec, f: impl Fn(Point, Point) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        let m = grid.node_count();
        let rows: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let y = grid.coords(j);
                (0..=j)
                    .map(|i| {
                        let x = grid.coords(i);
                        0.5 * (f(x, y) + f(y, x))
                    })
                    .collect()
            })
            .collect();
        Self {
            grid,
            values: rows.concat(),
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let m = grid.node_count();
        Self {
            grid,
            values: vec![0.0; m * (m + 1) / 2],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[pair_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[pair_index(i, j)] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientKind {
    Constant(f64),
    /// `A(x,y) = (a(x) + a(y)) / 2`
    Separable(ScalarField),
    General(PairTable),
}

/// `A(x,y)` together with the claimed class parameters `(alpha, lambda, Lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub kind: CoefficientKind,
    pub claimed_alpha: f64,
    pub claimed_lambda: f64,
    pub claimed_holder: f64,
}

impl Coefficient {
    pub fn new(kind: CoefficientKind, alpha: f64, lambda: f64, holder: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param("alpha", alpha, "must lie in (0, 1)"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", lambda, "must be positive"));
        }
        if !(holder > 0.0 && holder.is_finite()) {
            return Err(Error::param("Lambda", holder, "must be positive"));
        }
        Ok(Self {
            kind,
            claimed_alpha: alpha,
            claimed_lambda: lambda,
            claimed_holder: holder,
        })
    }

    /// Constant coefficient with permissive class claims.
    pub fn constant(kappa: f64) -> Self {
        let lambda = (0.5 * kappa.abs()).min(0.5 / kappa.abs().max(f64::MIN_POSITIVE));
        Self {
            kind: CoefficientKind::Constant(kappa),
            claimed_alpha: 0.5,
            claimed_lambda: lambda.max(f64::MIN_POSITIVE),
            claimed_holder: 1.0,
        }
    }

    pub fn separable(a: ScalarField, alpha: f64, lambda: f64, holder: f64) -> Result<Self> {
        Self::new(CoefficientKind::Separable(a), alpha, lambda, holder)
    }

    pub fn general(table: PairTable, alpha: f64, lambda: f64, holder: f64) -> Result<Self> {
        Self::new(CoefficientKind::General(table), alpha, lambda, holder)
    }

    /// Grid the coefficient is tied to, if any.
    pub fn grid(&self) -> Option<GridSpec> {
        match &self.kind {
            CoefficientKind::Constant(_) => None,
            CoefficientKind::Separable(a) => Some(a.grid),
            CoefficientKind::General(t) => Some(t.grid),
        }
    }

    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        match self.grid() {
            Some(g) if g != *grid => Err(Error::GridMismatch(format!(
                "coefficient lives on {g:?}, field on {grid:?}"
            ))),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, i: usize, j: usize) -> f64 {
        match &self.kind {
            CoefficientKind::Constant(k) => *k,
            CoefficientKind::Separable(a) => 0.5 * (a.values[i] + a.values[j]),
            CoefficientKind::General(t) => t.get(i, j),
        }
    }

    /// `A_D(x) = A(x,x)` on `grid`.
    pub fn diagonal(&self, grid: GridSpec) -> ScalarField {
        ScalarField {
            grid,
            values: (0..grid.node_count()).map(|i| self.eval(i, i)).collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, CoefficientKind::Constant(_))
    }

    /// Tabulated form on `grid` (for dense checks of structured kinds).
    pub fn to_general(&self, grid: GridSpec) -> Result<Coefficient> {
        self.check_grid(&grid)?;
        let mut t = PairTable::zeros(grid);
        let m = grid.node_count();
        for j in 0..m {
            for i in 0..=j {
                t.set(i, j, self.eval(i, j));
            }
        }
        Ok(Coefficient {
            kind: CoefficientKind::General(t),
            ..self.clone()
        })
    }
}

/// Pair `(x_node, y_node, value)` found during validation.
pub type Witness = (usize, usize, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientReport {
    pub diag_inf: f64,
    pub sup_abs: f64,
    /// `sup |A(z,x) - A(z,y)| / |x-y|^alpha` over sampled triples.
    pub holder_quotient: f64,
    pub holder_within_claim: bool,
    /// Sampled off-diagonal pairs with `A < 0` (allowed by the class).
    pub negative_off_diagonal: Vec<Witness>,
    pub samples: usize,
}

const MAX_WITNESSES: usize = 16;

fn torus_distance(grid: &GridSpec, i: usize, j: usize) -> f64 {
    let n = grid.points_per_dim();
    let (a, b) = (grid.multi_index(i), grid.multi_index(j));
    let mut r2 = 0.0;
    for ax in 0..grid.dim() {
        let d = a[ax].abs_diff(b[ax]);
        let d = d.min(n - d) as f64 * grid.spacing();
        r2 += d * d;
    }
    r2.sqrt()
}

/// Checks the class bounds on the lattice: the full diagonal, the sup bound
/// on the diagonal and on `sample_count` seeded random pairs, and a sampled
/// Hölder quotient.
pub fn validate_coefficient(a: &Coefficient, grid: GridSpec, sample_count: usize, seed: u64) -> Result<CoefficientReport> {
    if sample_count < 100 {
        return Err(Error::param("sample_count", sample_count as f64, "must be at least 100"));
    }
    a.check_grid(&grid)?;
    let m = grid.node_count();
    let lambda = a.claimed_lambda;
    let sup_bound = 1.0 / lambda;

    let mut diag_inf = f64::INFINITY;
    let mut sup_abs = 0.0f64;
    let mut diag_bad = Vec::new();
    let mut sup_bad = Vec::new();
    for i in 0..m {
        let v = a.eval(i, i);
        diag_inf = diag_inf.min(v);
        sup_abs = sup_abs.max(v.abs());
        if v <= lambda && diag_bad.len() < MAX_WITNESSES {
            diag_bad.push((i, i, v));
        }
        if v.abs() > sup_bound && sup_bad.len() < MAX_WITNESSES {
            sup_bad.push((i, i, v));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut negatives = Vec::new();
    let mut holder = 0.0f64;
    for _ in 0..sample_count {
        let (x, y, z) = (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m));
        let v = a.eval(x, y);
        sup_abs = sup_abs.max(v.abs());
        if v.abs() > sup_bound && sup_bad.len() < MAX_WITNESSES {
            sup_bad.push((x, y, v));
        }
        if x != y {
            if v < 0.0 && negatives.len() < MAX_WITNESSES {
                negatives.push((x, y, v));
            }
            let q = (a.eval(z, x) - a.eval(z, y)).abs() / torus_distance(&grid, x, y).powf(a.claimed_alpha);
            holder = holder.max(q);
        }
    }

    let mut problems = String::new();
    if !diag_bad.is_empty() {
        let _ = write!(problems, "diagonal not above lambda = {lambda}: {diag_bad:?}; ");
    }
    if !sup_bad.is_empty() {
        let _ = write!(problems, "|A| exceeds 1/lambda = {sup_bound}: {sup_bad:?}");
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    Ok(CoefficientReport {
        diag_inf,
        sup_abs,
        holder_quotient: holder,
        holder_within_claim: holder <= a.claimed_holder,
        negative_off_diagonal: negatives,
        samples: sample_count,
    })
}

/// The sign-changing example of the class:
/// `(2 lam + |x|^a + |y|^a)/(lam + |x|^a + |y|^a) + amp (sin x1 + sin y1) |x-y|^a/(1+|x-y|^a)`.
pub fn sign_changing_example(grid: GridSpec, alpha: f64, lam: f64, amp: f64) -> Result<Coefficient> {
    let norm = |p: Point| p[0].hypot(p[1]);
    let table = PairTable::from_fn(grid, |x, y| {
        let (xa, ya) = (norm(x).powf(alpha), norm(y).powf(alpha));
        let r = norm([x[0] - y[0], x[1] - y[1]]).powf(alpha);
        (2.0 * lam + xa + ya) / (lam + xa + ya) + amp * (x[0].sin() + y[0].sin()) * r / (1.0 + r)
    });
    // |A| <= 2 + 2 amp; the diagonal lies in (1, 2]
    let class_lambda = (1.0 / (2.0 + 2.0 * amp)).min(0.5);
    Coefficient::general(table, alpha, class_lambda, 2.0 * amp + 2.0 / lam)
}

/// Writes a general coefficient in the text table format
/// (`n N L alpha lambda Lambda` header, then `i j value` per unordered pair).
pub fn write_table(a: &Coefficient, path: &Path) -> Result<()> {
    let CoefficientKind::General(t) = &a.kind else {
        return Err(Error::Unsupported("only general coefficients are tabulated".into()));
    };
    let g = t.grid;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {} {} {} {}",
        g.dim(),
        g.points_per_dim(),
        g.box_length(),
        a.claimed_alpha,
        a.claimed_lambda,
        a.claimed_holder
    );
    let m = g.node_count();
    for j in 0..m {
        for i in 0..=j {
            let _ = writeln!(out, "{i} {j} {}", t.get(i, j));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a table written by [`write_table`]; every unordered pair must appear
/// exactly once. The grid gets the default half-box support.
pub fn read_table(path: &Path) -> Result<Coefficient> {
    let text = fs::read_to_string(path)?;
    parse_table(&text)
}

pub fn parse_table(text: &str) -> Result<Coefficient> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Format("empty table".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 6 {
        return Err(Error::Format(format!("header needs 6 fields, got {}", h.len())));
    }
    let num = |s: &str, what: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|_| Error::Format(format!("bad {what} '{s}' in header")))
    };
    let dim = h[0].parse::<usize>().map_err(|_| Error::Format(format!("bad n '{}'", h[0])))?;
    let points = h[1].parse::<usize>().map_err(|_| Error::Format(format!("bad N '{}'", h[1])))?;
    let grid = GridSpec::new(dim, points, num(h[2], "L")?, 0.5)?;
    let (alpha, lambda, holder) = (num(h[3], "alpha")?, num(h[4], "lambda")?, num(h[5], "Lambda")?);

    let m = grid.node_count();
    let mut table = PairTable::zeros(grid);
    let mut seen = vec![false; m * (m + 1) / 2];
    for (ln, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Format(format!("line {}: expected 'i j value'", ln + 1));
        if f.len() != 3 {
            return Err(bad());
        }
        let i: usize = f[0].parse().map_err(|_| bad())?;
        let j: usize = f[1].parse().map_err(|_| bad())?;
        let v: f64 = f[2].parse().map_err(|_| bad())?;
        if i >= m || j >= m || !v.is_finite() {
            return Err(Error::Format(format!("line {}: pair ({i},{j}) or value out of range", ln + 1)));
        }
        let k = pair_index(i, j);
        if seen[k] {
            return Err(Error::Format(format!("line {}: pair ({i},{j}) listed twice", ln + 1)));
        }
        seen[k] = true;
        table.set(i, j, v);
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Format(format!("{} pairs missing (first at index {missing})", seen.iter().filter(|s| !**s).count())));
    }
    Coefficient::general(table, alpha, lambda, holder)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_passes_with_zero_quotient() {
        let g = GridSpec::line(32, 1.0).unwrap();
        let a = Coefficient::new(CoefficientKind::Constant(1.0), 0.5, 0.5, 1.0).unwrap();
        let r = validate_coefficient(&a, g, 200, 1).unwrap();
        assert_eq!(r.holder_quotient, 0.0);
        assert_eq!(r.diag_inf, 1.0);
        assert!(r.negative_off_diagonal.is_empty());
    }

    #[test]
    fn diagonal_bound_failure() {
        let g = GridSpec::line(32, 1.0).unwrap();
        let a = Coefficient::new(CoefficientKind::Constant(0.1), 0.5, 0.5, 1.0).unwrap();
        assert!(matches!(validate_coefficient(&a, g, 200, 1), Err(Error::Validation(_))));
        assert!(validate_coefficient(&a, g, 10, 1).is_err());
    }

    #[test]
    fn sign_changing_example_flags_negatives() {
        let g = GridSpec::line(64, 4.0).unwrap();
        let a = sign_changing_example(g, 0.5, 1.0, 1e6).unwrap();
        let r = validate_coefficient(&a, g, 2000, 3).unwrap();
        assert!(!r.negative_off_diagonal.is_empty());
        assert!(r.diag_inf > a.claimed_lambda);
        for (x, y, v) in &r.negative_off_diagonal {
            assert!(x != y && *v < 0.0);
        }
    }

    #[test]
    fn table_round_trip() {
        let g = GridSpec::line(8, 1.0).unwrap();
        let t = PairTable::from_fn(g, |x, y| 1.0 + x[0] * y[0] + 0.1 * x[0]);
        assert_eq!(t.get(2, 5), t.get(5, 2));
        let a = Coefficient::general(t, 0.5, 0.25, 3.0).unwrap();
        let dir = std::env::temp_dir().join(format!("fraclame-table-{}", std::process::id()));
        write_table(&a, &dir).unwrap();
        let b = read_table(&dir).unwrap();
        std::fs::remove_file(&dir).ok();
        assert_eq!(a, b);
        assert!(parse_table("1 8 1 0.5 0.25 3\n0 0 1\n").is_err());
        assert!(parse_table("1 8 1 0.5\n").is_err());
    }
}
