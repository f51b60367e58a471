use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fraclame_cli::{config, exit, run};

/// Runs one fraclame experiment described by a `key = value` config file.
#[derive(Parser, Debug)]
#[command(name = "fraclame", version)]
struct Args {
    /// Experiment configuration.
    config: PathBuf,
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random fields (overrides `seed` in the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; falls back to FRACLAME_THREADS, then all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let threads = args
        .threads
        .or_else(|| std::env::var("FRACLAME_THREADS").ok().and_then(|v| v.trim().parse().ok()));
    if let Some(t) = threads.filter(|t| *t > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("fraclame: cannot configure {t} threads: {e}");
            return code(exit::CONFIG);
        }
    }

    let mut cfg = match config::parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("fraclame: invalid configuration {}:\n{e}", args.config.display());
            return code(exit::CONFIG);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let dir = args
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("fraclame_out").join(cfg.experiment.name()));

    match run(&cfg, &dir) {
        Ok(summary) => {
            for a in &summary.outcome.assertions {
                println!(
                    "[{}] criterion {:>2}: {} (value {:.3e}, threshold {:.3e})",
                    if a.pass { "pass" } else { "FAIL" },
                    a.criterion,
                    a.name,
                    a.value,
                    a.threshold
                );
            }
            if let Some(e) = &summary.error {
                eprintln!("fraclame: {e}");
            }
            println!("report: {}", summary.report.display());
            code(summary.exit_code())
        }
        Err(e) => {
            eprintln!("fraclame: cannot write artifacts: {e}");
            code(exit::CONFIG)
        }
    }
}
