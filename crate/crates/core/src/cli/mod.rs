//! Command-line surface.
//!
//! Exit codes: 0 success, 2 input error, 3 runtime or statistical error.

pub mod output;
pub mod scenario_file;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::interference::DEFAULT_TOL;
use crate::twoslit::{analyze_counts, run_experiment};

use output::{align_counts, analysis_csv, counts_csv, pattern_csv, read_counts, ReportDocument};
use scenario_file::ScenarioFile;

/// Environment variable naming the default output directory of `simulate`.
pub const OUT_DIR_ENV: &str = "CTXPROB_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ctxprob",
    version,
    about = "Contextual probability and two-slit ensemble simulation"
)]
pub struct Cli {
    /// Override the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Half-width of the |lambda| = 1 classification band.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the analytic pattern of a scenario as CSV.
    Pattern {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the three contexts and write a JSON report.
    Simulate {
        scenario: PathBuf,
        /// Report path; defaults to $CTXPROB_OUT_DIR/report.json, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write S.csv, S1.csv and S2.csv count files into this directory.
        #[arg(long)]
        counts_dir: Option<PathBuf>,
    },
    /// Decompose external `bin,count` files for contexts S, S1, S2.
    Analyze {
        counts_s: PathBuf,
        counts_s1: PathBuf,
        counts_s2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cli))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Pattern { scenario, out } => {
            let (_, scenario) = load_scenario(scenario, cli.seed)?;
            emit(out.as_deref(), &pattern_csv(&scenario))
        }
        Command::Simulate {
            scenario,
            out,
            counts_dir,
        } => {
            let (file, scenario) = load_scenario(scenario, cli.seed)?;
            let report = run_experiment(&scenario, cli.tol).map_err(|e| CliError::Runtime(e.to_string()))?;
            if let Some(dir) = counts_dir {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
                for (name, counts) in [
                    ("S.csv", &report.counts_s),
                    ("S1.csv", &report.counts_s1),
                    ("S2.csv", &report.counts_s2),
                ] {
                    write_file(&dir.join(name), &counts_csv(scenario.space(), counts))?;
                }
            }
            let doc = ReportDocument::new(file, report);
            let out = out
                .clone()
                .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join("report.json")));
            emit(out.as_deref(), &doc.to_json())
        }
        Command::Analyze {
            counts_s,
            counts_s1,
            counts_s2,
            out,
        } => {
            let files = [
                (counts_s.as_path(), read_counts(counts_s)?),
                (counts_s1.as_path(), read_counts(counts_s1)?),
                (counts_s2.as_path(), read_counts(counts_s2)?),
            ];
            let (space, [s, s1, s2]) = align_counts(files)?;
            let analysis =
                analyze_counts(&space, &s, &s1, &s2, cli.tol).map_err(|e| CliError::Runtime(e.to_string()))?;
            emit(out.as_deref(), &analysis_csv(&analysis))
        }
    }
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<(ScenarioFile, crate::twoslit::TwoSlitScenario), CliError> {
    let fail = |errors: Vec<scenario_file::FieldError>| {
        let lines: Vec<String> = errors.iter().map(ToString::to_string).collect();
        CliError::Input(format!("{}: {}", path.display(), lines.join("; ")))
    };
    let mut file = ScenarioFile::read(path).map_err(fail)?;
    if let Some(seed) = seed {
        file.sampling.seed = seed;
    }
    let scenario = file.to_scenario().map_err(fail)?;
    Ok((file, scenario))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
            }
            write_file(path, text)
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Runtime(format!("stdout: {e}")))
        }
    }
}
