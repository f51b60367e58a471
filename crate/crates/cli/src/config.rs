//! `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Symbols,
    Korn,
    Commutator,
    Solve,
    Weighted,
    Perturbative,
    Regularity,
    LocalLimit,
    Bench,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Symbols => "symbols",
            Experiment::Korn => "korn",
            Experiment::Commutator => "commutator",
            Experiment::Solve => "solve",
            Experiment::Weighted => "weighted",
            Experiment::Perturbative => "perturbative",
            Experiment::Regularity => "regularity",
            Experiment::LocalLimit => "locallimit",
            Experiment::Bench => "bench",
        }
    }

    fn parse(v: &str) -> Option<Self> {
        Some(match v {
            "symbols" => Experiment::Symbols,
            "korn" => Experiment::Korn,
            "commutator" => Experiment::Commutator,
            "solve" => Experiment::Solve,
            "weighted" => Experiment::Weighted,
            "perturbative" => Experiment::Perturbative,
            "regularity" => Experiment::Regularity,
            "locallimit" => Experiment::LocalLimit,
            "bench" => Experiment::Bench,
            _ => return None,
        })
    }

    /// Experiments whose operator has a smoothing order `t`.
    fn uses_t(self) -> bool {
        matches!(self, Experiment::Weighted | Experiment::Perturbative | Experiment::Regularity)
    }
}

/// How the coupling coefficient `A(x, y)` is built on each grid.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSpec {
    /// `kappa`
    Constant,
    /// `kappa (a(x) + a(y)) / 2`, `a = 1 + amplitude sin(2 pi x1)`
    Separable,
    /// `kappa (1 + amplitude sin(2 pi x1) sin(2 pi y1))`
    Smooth,
    /// `kappa (1 + amplitude |x - y|^alpha)`
    Holder,
    /// The sign-changing example with the given `amplitude`.
    SignChanging,
    /// Pair table read from `table`.
    Table(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dim: usize,
    pub points: usize,
    pub length: f64,
    pub support: f64,
    pub s: f64,
    pub t: f64,
    pub c: Option<f64>,
    pub coefficient: CoefficientSpec,
    pub kappa: f64,
    pub amplitude: f64,
    pub alpha: f64,
    pub rhs: String,
    pub tol: f64,
    pub max_iter: usize,
    pub omega: f64,
    pub probe: f64,
    pub q: f64,
    pub frequencies: Vec<f64>,
    pub grids: Vec<usize>,
    pub s_list: Vec<f64>,
    pub trials: usize,
    pub extrapolate: bool,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ConfigError(pub Vec<Violation>);

const KEYS: &[&str] = &[
    "experiment", "n", "N", "L", "support", "s", "t", "c", "coefficient", "kappa", "amplitude", "alpha",
    "table", "rhs", "tol", "max_iter", "omega", "probe", "q", "frequencies", "grids", "s_list", "trials",
    "extrapolate", "out", "seed",
];

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ConfigError(vec![Violation {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        }])
    })?;
    let mut cfg = parse_str(&text)?;
    // relative table paths are relative to the config file
    if let CoefficientSpec::Table(p) = &mut cfg.coefficient {
        if p.is_relative() {
            if let Some(dir) = path.parent() {
                *p = dir.join(&*p);
            }
        }
    }
    Ok(cfg)
}

struct Entries {
    map: BTreeMap<String, (String, usize)>,
    errors: Vec<Violation>,
}

impl Entries {
    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|e| e.1)
    }

    fn fail(&mut self, key: &str, message: String) {
        let line = self.line(key);
        self.errors.push(Violation { line, message });
    }

    fn get<T: FromStr>(&mut self, key: &str, default: Option<T>) -> Option<T> {
        let Some((raw, line)) = self.map.get(key).cloned() else {
            if default.is_none() {
                self.errors.push(Violation {
                    line: None,
                    message: format!("missing required key `{key}`"),
                });
            }
            return default;
        };
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.errors.push(Violation {
                    line: Some(line),
                    message: format!("`{key}`: cannot parse `{raw}`"),
                });
                default
            }
        }
    }

    fn list<T: FromStr>(&mut self, key: &str, default: Vec<T>) -> Vec<T> {
        let Some((raw, line)) = self.map.get(key).cloned() else {
            return default;
        };
        let parsed: Result<Vec<T>, _> = raw.split(',').map(|p| p.trim().parse::<T>()).collect();
        parsed.unwrap_or_else(|_| {
            self.errors.push(Violation {
                line: Some(line),
                message: format!("`{key}`: expected a comma-separated list, got `{raw}`"),
            });
            default
        })
    }
}

pub fn parse_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut e = Entries {
        map: BTreeMap::new(),
        errors: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            e.errors.push(Violation {
                line: Some(line),
                message: format!("expected `key = value`, got `{content}`"),
            });
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            e.errors.push(Violation {
                line: Some(line),
                message: format!("unknown key `{k}`"),
            });
        } else if e.map.insert(k.to_string(), (v.to_string(), line)).is_some() {
            e.errors.push(Violation {
                line: Some(line),
                message: format!("duplicate key `{k}`"),
            });
        }
    }

    let experiment = match e.get::<String>("experiment", None) {
        Some(name) => Experiment::parse(&name).or_else(|| {
            e.fail("experiment", format!("unknown experiment `{name}`"));
            None
        }),
        None => None,
    };
    let dim = e.get("n", Some(1usize)).unwrap();
    let points = e.get::<usize>("N", None).unwrap_or(0);
    let length = e.get("L", Some(1.0)).unwrap();
    let support = e.get("support", Some(0.5)).unwrap();
    let s = e.get::<f64>("s", None).unwrap_or(f64::NAN);
    let t = e.get("t", Some(s)).unwrap();
    let c = e.get::<f64>("c", Some(f64::NAN)).filter(|v| !v.is_nan());
    let kind = e.get("coefficient", Some("constant".to_string())).unwrap();
    let kappa = e.get("kappa", Some(1.0)).unwrap();
    let amplitude = e.get("amplitude", Some(0.0)).unwrap();
    let alpha = e.get("alpha", Some(0.5)).unwrap();
    let table = e.get::<String>("table", Some(String::new())).unwrap();
    let rhs = e.get("rhs", Some("windowed".to_string())).unwrap();
    let tol = e.get("tol", Some(1e-10)).unwrap();
    let max_iter = e.get("max_iter", Some(5000usize)).unwrap();
    let omega = e.get("omega", Some(0.8)).unwrap();
    let probe = e.get("probe", Some(0.4)).unwrap();
    let q = e.get("q", Some(2.0)).unwrap();
    let frequencies = e.list("frequencies", vec![4.0, 8.0, 16.0, 32.0]);
    let grids = e.list("grids", vec![64usize, 128, 256]);
    let s_list = e.list("s_list", vec![0.6, 0.7, 0.8, 0.9, 0.95]);
    let trials = e.get("trials", Some(100usize)).unwrap();
    let extrapolate = e.get("extrapolate", Some(true)).unwrap();
    let out = e.get::<String>("out", Some(String::new())).unwrap();
    let seed = e.get("seed", Some(0u64)).unwrap();

    let coefficient = match kind.as_str() {
        "constant" => CoefficientSpec::Constant,
        "separable" => CoefficientSpec::Separable,
        "smooth" => CoefficientSpec::Smooth,
        "holder" => CoefficientSpec::Holder,
        "sign_changing" => CoefficientSpec::SignChanging,
        "table" if !table.is_empty() => CoefficientSpec::Table(PathBuf::from(&table)),
        "table" => {
            e.fail("coefficient", "coefficient = table requires the `table` key".into());
            CoefficientSpec::Constant
        }
        other => {
            e.fail("coefficient", format!("unknown coefficient kind `{other}`"));
            CoefficientSpec::Constant
        }
    };

    if dim != 1 && dim != 2 {
        e.fail("n", format!("n must be 1 or 2, got {dim}"));
    }
    if e.map.contains_key("N") && (points < 8 || !points.is_power_of_two()) {
        e.fail("N", format!("N must be a power of two >= 8, got {points}"));
    }
    if !(length > 0.0) {
        e.fail("L", format!("L must be positive, got {length}"));
    }
    if !(support > 0.0 && support <= 1.0) {
        e.fail("support", format!("support must lie in (0, 1], got {support}"));
    }
    if e.map.contains_key("s") && !(s > 0.0 && s < 1.0) {
        e.fail("s", format!("s must lie in (0, 1), got {s}"));
    }
    if experiment.is_some_and(Experiment::uses_t) && s > 0.0 && s < 1.0 {
        let upper = (2.0 * s).min(1.0);
        if !(t >= s && t < upper) {
            e.fail("t", format!("t = {t} violates the constraint s <= t < min(2s, 1) = {upper} (s = {s})"));
        }
    }
    if c == Some(1.0) {
        e.fail("c", "c = 1 makes the Lamé symbol singular".into());
    }
    if !(kappa > 0.0) {
        e.fail("kappa", format!("kappa must be positive, got {kappa}"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        e.fail("alpha", format!("alpha must lie in (0, 1), got {alpha}"));
    }
    if !["windowed", "zero", "random", "plane"].contains(&rhs.as_str()) {
        e.fail("rhs", format!("rhs must be windowed, zero, random or plane, got `{rhs}`"));
    }
    if !(tol > 0.0) {
        e.fail("tol", format!("tol must be positive, got {tol}"));
    }
    if !(omega > 0.0 && omega < 1.0) {
        e.fail("omega", format!("omega must lie in (0, 1), got {omega}"));
    }
    if !(probe > 0.0 && probe < omega) {
        e.fail("probe", format!("probe must lie in (0, omega), got {probe}"));
    }
    if !(q >= 1.0) {
        e.fail("q", format!("q must be at least 1, got {q}"));
    }
    if frequencies.len() < 2 || frequencies.windows(2).any(|w| w[1] <= w[0]) || frequencies[0] <= 0.0 {
        e.fail("frequencies", "frequencies must be positive and increasing, at least two".into());
    }
    if grids.iter().any(|n| *n < 8 || !n.is_power_of_two()) || grids.windows(2).any(|w| w[1] <= w[0]) {
        e.fail("grids", "grids must be increasing powers of two >= 8".into());
    }
    if s_list.iter().any(|v| !(*v > 0.5 && *v < 1.0)) || s_list.windows(2).any(|w| w[1] <= w[0]) {
        e.fail("s_list", "s_list must increase within (0.5, 1)".into());
    }
    if trials == 0 {
        e.fail("trials", "trials must be positive".into());
    }

    match (experiment, e.errors.is_empty()) {
        (Some(experiment), true) => Ok(ExperimentConfig {
            experiment,
            dim,
            points,
            length,
            support,
            s,
            t,
            c,
            coefficient,
            kappa,
            amplitude,
            alpha,
            rhs,
            tol,
            max_iter,
            omega,
            probe,
            q,
            frequencies,
            grids,
            s_list,
            trials,
            extrapolate,
            out: (!out.is_empty()).then(|| PathBuf::from(out)),
            seed,
        }),
        _ => {
            e.errors.sort_by_key(|v| v.line.unwrap_or(0));
            Err(ConfigError(e.errors))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = parse_str("experiment = symbols\nn = 1\nN = 256\ns = 0.5\n").unwrap();
        assert_eq!(c.experiment, Experiment::Symbols);
        assert_eq!((c.dim, c.points, c.s, c.t), (1, 256, 0.5, 0.5));
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_str("# header\n\nexperiment = korn # inline\nN = 64\ns = 0.3\n").unwrap();
        assert_eq!(c.experiment, Experiment::Korn);
    }

    #[test]
    fn t_boundary() {
        let base = "experiment = weighted\nN = 64\ns = 0.5\n";
        assert!(parse_str(&format!("{base}t = 0.99\n")).is_ok());
        let err = parse_str(&format!("{base}t = 1.0\n")).unwrap_err();
        assert_eq!(err.0[0].line, Some(4));
        assert!(err.0[0].message.contains("min(2s, 1)"));
    }

    #[test]
    fn missing_s_is_named() {
        let err = parse_str("experiment = symbols\nN = 64\n").unwrap_err();
        assert!(err.0.iter().any(|v| v.message.contains("`s`")));
    }

    #[test]
    fn unknown_key_has_line() {
        let err = parse_str("experiment = symbols\nN = 64\ns = 0.5\nbogus = 1\n").unwrap_err();
        assert_eq!(err.0, vec![Violation { line: Some(4), message: "unknown key `bogus`".into() }]);
    }
}
