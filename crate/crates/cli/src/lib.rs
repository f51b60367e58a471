//! Batch runner for the fraclame experiments: parses a `key = value` config,
//! runs one experiment and writes `report.json`, CSV tables and field dumps.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use config::{CoefficientSpec, ExperimentConfig};
use output::{write_artifacts, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<fraclame_core::Error> for RunError {
    fn from(e: fraclame_core::Error) -> Self {
        match e {
            fraclame_core::Error::Convergence(_) => RunError::Solver(e.to_string()),
            fraclame_core::Error::Io(m) => RunError::Io(std::io::Error::other(m)),
            other => RunError::Config(other.to_string()),
        }
    }
}

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const ASSERTION: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const SOLVER: i32 = 3;
}

#[derive(Debug)]
pub struct RunSummary {
    pub report: PathBuf,
    pub outcome: Outcome,
    pub error: Option<RunError>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(RunError::Solver(_)) => exit::SOLVER,
            Some(_) => exit::CONFIG,
            None if self.outcome.passed() => exit::PASS,
            None => exit::ASSERTION,
        }
    }
}

pub fn parameters(cfg: &ExperimentConfig) -> Value {
    let coefficient = match &cfg.coefficient {
        CoefficientSpec::Constant => "constant".to_string(),
        CoefficientSpec::Separable => "separable".into(),
        CoefficientSpec::Smooth => "smooth".into(),
        CoefficientSpec::Holder => "holder".into(),
        CoefficientSpec::SignChanging => "sign_changing".into(),
        CoefficientSpec::Table(p) => format!("table:{}", p.display()),
    };
    json!({
        "experiment": cfg.experiment.name(),
        "n": cfg.dim,
        "N": cfg.points,
        "L": cfg.length,
        "support": cfg.support,
        "s": cfg.s,
        "t": cfg.t,
        "c": cfg.c,
        "coefficient": coefficient,
        "kappa": cfg.kappa,
        "amplitude": cfg.amplitude,
        "alpha": cfg.alpha,
        "rhs": cfg.rhs,
        "tol": cfg.tol,
        "max_iter": cfg.max_iter,
        "omega": cfg.omega,
        "probe": cfg.probe,
        "q": cfg.q,
        "frequencies": cfg.frequencies,
        "grids": cfg.grids,
        "s_list": cfg.s_list,
        "trials": cfg.trials,
        "extrapolate": cfg.extrapolate,
        "seed": cfg.seed,
    })
}

/// Runs the experiment and writes its artifacts to `dir`, also when it fails.
pub fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<RunSummary, RunError> {
    let mut outcome = Outcome::default();
    let result = experiments::run_experiment(cfg, &mut outcome);
    let error = result.err();
    let status = if error.is_none() && outcome.passed() { "passed" } else { "failed" };
    let msg = error.as_ref().map(|e| e.to_string());
    let report = write_artifacts(dir, parameters(cfg), &outcome, status, msg.as_deref())?;
    Ok(RunSummary { report, outcome, error })
}
