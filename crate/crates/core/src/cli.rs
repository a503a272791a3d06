//! Command-line front end.
//!
//! Exit codes: `0` success (including a refinement verdict that fails),
//! `1` domain error, `2` usage error, unreadable or unparseable input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Error;
use crate::experiments::{run_experiment, threads_from_env, write_reports, ConfigOverrides};
use crate::kernels::KernelSpec;
use crate::refinement::{check_refinement, default_oracle, RefinementVerdict};
use crate::regnet::{predict, solve, FitModel, SampleSet};

#[derive(Debug, Parser)]
#[command(name = "opkern", version, about = "Operator-valued kernels, refinement checks and regularization networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Block Gram matrix of a kernel over a JSON list of points.
    Gram {
        spec: PathBuf,
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a regularization network to a JSON sample set.
    Fit {
        spec: PathBuf,
        data: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a fitted model at a JSON list of points.
    Predict {
        model: PathBuf,
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether G refines K.
    CheckRefine {
        spec_k: PathBuf,
        spec_g: PathBuf,
        /// Also run the numerical norm oracle (finite-dimensional kernels only).
        #[arg(long)]
        oracle: bool,
        /// Seed for the oracle's random draws.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment and write instances.csv, group_stats.csv and resolved_config.json.
    Exp {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        experiment: u8,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quad_points: Option<usize>,
        #[arg(long)]
        sigma_grid_size: Option<usize>,
    },
    /// Scatter plot of an instances.csv as SVG.
    Plot { instances: PathBuf, out: PathBuf },
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::MalformedCsv(_) | Error::Json(_) => Failure::Usage(e.to_string()),
            e => Failure::Domain(e),
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Failure::Usage(format!("cannot parse {}: {e}", path.display())))
}

fn read_spec(path: &Path) -> Result<KernelSpec, Failure> {
    let spec: KernelSpec = read_json(path)?;
    spec.validate()?;
    Ok(spec)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)? + "\n";
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Domain(e.into())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Domain(e.into())),
    }
}

#[derive(Serialize)]
struct CheckOutput {
    #[serde(flatten)]
    verdict: RefinementVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<bool>,
}

fn check_refine(k: &KernelSpec, g: &KernelSpec, oracle: bool, seed: u64) -> Result<CheckOutput, Failure> {
    if !oracle {
        return Ok(CheckOutput {
            verdict: check_refinement(k, g)?,
            oracle: None,
        });
    }
    let numeric = default_oracle(k, g, seed)?;
    let verdict = match check_refinement(k, g) {
        Ok(v) => v,
        Err(e) => RefinementVerdict {
            holds: Some(numeric),
            nontrivial: None,
            characterization: "norm oracle".into(),
            witness: format!("closed form unavailable ({e}); norms compared on 20 random draws"),
        },
    };
    Ok(CheckOutput {
        verdict,
        oracle: Some(numeric),
    })
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Gram { spec, points, out } => {
            let spec = read_spec(&spec)?;
            let points: Vec<Vec<f64>> = read_json(&points)?;
            let gram = spec.gram(&points)?;
            emit(&gram, out.as_deref())
        }
        Command::Fit { spec, data, sigma, out } => {
            let spec = read_spec(&spec)?;
            let data: SampleSet = read_json(&data)?;
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Failure::Usage(format!("--sigma must be positive, got {sigma}")));
            }
            let model = solve(&spec, &data, sigma)?;
            emit(&model, out.as_deref())
        }
        Command::Predict { model, points, out } => {
            let model: FitModel = read_json(&model)?;
            model.validate()?;
            let points: Vec<Vec<f64>> = read_json(&points)?;
            let values = points
                .iter()
                .map(|x| predict(&model, x))
                .collect::<crate::error::Result<Vec<_>>>()?;
            emit(&values, out.as_deref())
        }
        Command::CheckRefine {
            spec_k,
            spec_g,
            oracle,
            seed,
            out,
        } => {
            let k = read_spec(&spec_k)?;
            let g = read_spec(&spec_g)?;
            emit(&check_refine(&k, &g, oracle, seed)?, out.as_deref())
        }
        Command::Exp {
            experiment,
            config,
            out_dir,
            seed,
            quad_points,
            sigma_grid_size,
        } => {
            let mut overrides: ConfigOverrides = match &config {
                Some(path) => read_json(path)?,
                None => ConfigOverrides::default(),
            };
            overrides.base_seed = seed.or(overrides.base_seed);
            overrides.quad_points = quad_points.or(overrides.quad_points);
            overrides.sigma_grid_size = sigma_grid_size.or(overrides.sigma_grid_size);
            let cfg = overrides.resolve(experiment)?;
            let reports = run_experiment(&cfg, threads_from_env())?;
            write_reports(&out_dir, &reports)?;
            emit(&cfg, Some(&out_dir.join("resolved_config.json")))?;
            for r in &reports {
                eprintln!(
                    "n = {:2}, δ = {}: kept {:2}, outliers {}, mean diff {:.4} ({:.4})",
                    r.n,
                    r.delta,
                    r.kept.len(),
                    r.outliers.len(),
                    r.mean_diff,
                    r.std_diff
                );
            }
            Ok(())
        }
        Command::Plot { instances, out } => {
            if !instances.exists() {
                return Err(Failure::Usage(format!("cannot read {}: no such file", instances.display())));
            }
            crate::plot::plot_scatter(&instances, &out)?;
            Ok(())
        }
    }
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}
