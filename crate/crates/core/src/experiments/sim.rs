//! Simulations, σ selection against the true error, outlier filtering and group statistics.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{simulation_seed, SimRng};
use super::target::{check_experiment, gen_kernels, gen_samples, gen_target, TargetFunction};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::regnet::{predict, FitModel, GramSystem, SampleSet};

/// Evenly log-spaced grid of `count` points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Full parameterization of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: u8,
    pub dims: Vec<usize>,
    pub noise_levels: Vec<f64>,
    pub sims_per_group: usize,
    pub m: usize,
    pub quad_points: usize,
    pub sigma_grid: Vec<f64>,
    pub base_seed: u64,
}

pub const DEFAULT_SEED: u64 = 20_130_101;
pub const DEFAULT_QUAD_POINTS: usize = 201;
pub const DEFAULT_SIGMA_GRID_SIZE: usize = 40;
/// Endpoints of the default log-spaced σ grid.
pub const DEFAULT_SIGMA_RANGE: (f64, f64) = (1e-4, 1.0);

fn default_sigma_grid(count: usize) -> Vec<f64> {
    log_grid(DEFAULT_SIGMA_RANGE.0, DEFAULT_SIGMA_RANGE.1, count)
}

impl ExperimentConfig {
    /// Published protocol: `n ∈ {2, 4, 8, 16}`, `δ ∈ {0.1, 0.3, 0.5}`;
    /// 50 simulations with `m = 30` (experiment 1) or 20 with `m = 20` (experiment 2).
    pub fn defaults(experiment: u8) -> Result<Self> {
        check_experiment(experiment)?;
        let (sims_per_group, m) = if experiment == 1 { (50, 30) } else { (20, 20) };
        Ok(ExperimentConfig {
            experiment,
            dims: vec![2, 4, 8, 16],
            noise_levels: vec![0.1, 0.3, 0.5],
            sims_per_group,
            m,
            quad_points: DEFAULT_QUAD_POINTS,
            sigma_grid: default_sigma_grid(DEFAULT_SIGMA_GRID_SIZE),
            base_seed: DEFAULT_SEED,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_experiment(self.experiment)?;
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.dims.is_empty() || self.dims.contains(&0) {
            return bad("dims must be a nonempty set of positive integers");
        }
        if self.noise_levels.is_empty() || self.noise_levels.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return bad("noise_levels must be a nonempty set of nonnegative reals");
        }
        if self.sims_per_group == 0 {
            return bad("sims_per_group must be at least 1");
        }
        if self.m == 0 {
            return bad("m must be at least 1");
        }
        if self.quad_points < 3 || self.quad_points.is_multiple_of(2) {
            return bad("quad_points must be odd and at least 3");
        }
        if self.sigma_grid.is_empty()
            || self.sigma_grid.iter().any(|s| !(s.is_finite() && *s > 0.0))
            || self.sigma_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return bad("sigma_grid must be nonempty, positive and strictly ascending");
        }
        Ok(())
    }
}

/// Partial configuration as read from a JSON config file; absent fields keep
/// the experiment defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub experiment: Option<u8>,
    pub dims: Option<Vec<usize>>,
    pub noise_levels: Option<Vec<f64>>,
    pub sims_per_group: Option<usize>,
    pub m: Option<usize>,
    pub quad_points: Option<usize>,
    pub sigma_grid: Option<Vec<f64>>,
    /// Replaces the grid with this many log-spaced points on `[1e-4, 1]`.
    pub sigma_grid_size: Option<usize>,
    pub base_seed: Option<u64>,
}

impl ConfigOverrides {
    pub fn resolve(&self, experiment: u8) -> Result<ExperimentConfig> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(Error::InvalidParameter(format!(
                    "config is for experiment {e}, requested {experiment}"
                )));
            }
        }
        let mut cfg = ExperimentConfig::defaults(experiment)?;
        if let Some(v) = &self.dims {
            cfg.dims = v.clone();
        }
        if let Some(v) = &self.noise_levels {
            cfg.noise_levels = v.clone();
        }
        if let Some(v) = self.sims_per_group {
            cfg.sims_per_group = v;
        }
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if let Some(v) = self.quad_points {
            cfg.quad_points = v;
        }
        if let Some(v) = &self.sigma_grid {
            cfg.sigma_grid = v.clone();
        }
        if let Some(count) = self.sigma_grid_size {
            if count == 0 {
                return Err(Error::InvalidParameter("sigma_grid_size must be positive".into()));
            }
            cfg.sigma_grid = default_sigma_grid(count);
        }
        if let Some(v) = self.base_seed {
            cfg.base_seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Composite Simpson nodes and weights on `[-1, 1]`.
pub fn simpson(points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if points < 3 || points.is_multiple_of(2) {
        return Err(Error::InvalidParameter("Simpson needs an odd point count ≥ 3".into()));
    }
    let h = 2.0 / (points - 1) as f64;
    let nodes = (0..points).map(|i| -1.0 + h * i as f64).collect();
    let weights = (0..points)
        .map(|i| {
            let w = if i == 0 || i == points - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect();
    Ok((nodes, weights))
}

const DEGENERATE_TARGET: f64 = 1e-14;

/// `∫‖f − f_0‖² / ∫‖f_0‖²` over `[-1, 1]` by composite Simpson.
pub fn relative_error(model: &FitModel, target: &TargetFunction, quad_points: usize) -> Result<f64> {
    let (nodes, weights) = simpson(quad_points)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        let f = predict(model, &[*x])?;
        let f0 = target.eval(*x);
        if f.len() != f0.len() {
            return Err(Error::DimMismatch { expected: f0.len(), got: f.len() });
        }
        num += w * f.iter().zip(&f0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        den += w * f0.iter().map(|v| v * v).sum::<f64>();
    }
    if den < DEGENERATE_TARGET {
        return Err(Error::DegenerateTarget);
    }
    Ok(num / den)
}

/// Sweeps a σ grid for one kernel using a single eigendecomposition of its
/// Gram: `η(σ) = Q (Λ + mσ)⁻¹ Qᵀ ξ`, and the fit at the quadrature nodes is
/// `C Q (Λ + mσ)⁻¹ Qᵀ ξ` with `C` the cross-Gram to the nodes.
struct SigmaSweep {
    node_basis: DMatrix<f64>,
    projected: DVector<f64>,
    lambda: DVector<f64>,
    m: f64,
}

impl SigmaSweep {
    fn new(spec: &KernelSpec, data: &SampleSet, nodes: &[Vec<f64>]) -> Result<Self> {
        let sys = GramSystem::new(spec, &data.inputs)?;
        let eig = sys.gram().eig();
        let cross = spec.cross_gram(&data.inputs, nodes)?;
        Ok(SigmaSweep {
            node_basis: cross * &eig.eigenvectors,
            projected: eig.eigenvectors.tr_mul(&data.stacked_outputs()),
            lambda: eig.eigenvalues.map(|l| l.max(0.0)),
            m: data.len() as f64,
        })
    }

    fn fit_at_nodes(&self, sigma: f64) -> DVector<f64> {
        let shift = self.m * sigma;
        let w = self.projected.zip_map(&self.lambda, |c, l| c / (l + shift));
        &self.node_basis * w
    }
}

/// Relative errors of the best-σ fits of `base` and `other` to `target` from `data`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BestFit {
    pub err_base: f64,
    pub err_refined: f64,
    pub sigma_base: f64,
    pub sigma_refined: f64,
}

pub fn best_fits(
    cfg: &ExperimentConfig,
    target: &TargetFunction,
    data: &SampleSet,
    base: &KernelSpec,
    other: &KernelSpec,
) -> Result<BestFit> {
    let (nodes, weights) = simpson(cfg.quad_points)?;
    let n = target.dim();
    let truth: Vec<Vec<f64>> = nodes.iter().map(|x| target.eval(*x)).collect();
    let den: f64 = truth
        .iter()
        .zip(&weights)
        .map(|(f, w)| w * f.iter().map(|v| v * v).sum::<f64>())
        .sum();
    if den < DEGENERATE_TARGET {
        return Err(Error::DegenerateTarget);
    }
    let node_points: Vec<Vec<f64>> = nodes.iter().map(|x| vec![*x]).collect();
    let best = |spec: &KernelSpec| -> Result<(f64, f64)> {
        let sweep = SigmaSweep::new(spec, data, &node_points)?;
        let mut best = (f64::INFINITY, cfg.sigma_grid[0]);
        for &sigma in &cfg.sigma_grid {
            let fit = sweep.fit_at_nodes(sigma);
            let num: f64 = truth
                .iter()
                .zip(&weights)
                .enumerate()
                .map(|(i, (f0, w))| {
                    w * f0
                        .iter()
                        .enumerate()
                        .map(|(k, v)| (fit[i * n + k] - v).powi(2))
                        .sum::<f64>()
                })
                .sum();
            let err = num / den;
            if err < best.0 {
                best = (err, sigma);
            }
        }
        if !best.0.is_finite() {
            return Err(Error::SingularSystem);
        }
        Ok(best)
    };
    let (err_base, sigma_base) = best(base)?;
    let (err_refined, sigma_refined) = best(other)?;
    Ok(BestFit {
        err_base,
        err_refined,
        sigma_base,
        sigma_refined,
    })
}

/// Paired best-σ relative errors of one simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstancePair {
    pub sim_index: usize,
    pub seed: u64,
    pub err_base: f64,
    pub err_refined: f64,
    pub outlier: bool,
}

/// One simulation: target, samples, then kernels, all drawn from `seed`.
pub fn run_simulation(cfg: &ExperimentConfig, n: usize, delta: f64, seed: u64) -> Result<BestFit> {
    let mut rng = SimRng::new(seed);
    let target = gen_target(cfg.experiment, n, &mut rng)?;
    let data = gen_samples(&target, cfg.m, delta, &mut rng)?;
    let (base, other) = gen_kernels(cfg.experiment, n, &mut rng)?;
    best_fits(cfg, &target, &data, &base, &other)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0);
    (mean, var.sqrt())
}

/// Three-sigma rule, applied once over the whole group: an instance is an
/// outlier if either error is more than three (sample) standard deviations
/// from that error's group mean.
pub fn three_sigma_filter(instances: &[InstancePair]) -> (Vec<InstancePair>, Vec<InstancePair>) {
    if instances.len() < 2 {
        return (instances.to_vec(), Vec::new());
    }
    let base: Vec<f64> = instances.iter().map(|p| p.err_base).collect();
    let refined: Vec<f64> = instances.iter().map(|p| p.err_refined).collect();
    let (mb, sb) = mean_std(&base);
    let (mr, sr) = mean_std(&refined);
    let mut kept = Vec::new();
    let mut outliers = Vec::new();
    for p in instances {
        let flagged = (p.err_base - mb).abs() > 3.0 * sb || (p.err_refined - mr).abs() > 3.0 * sr;
        let p = InstancePair {
            outlier: flagged,
            ..p.clone()
        };
        if flagged {
            outliers.push(p);
        } else {
            kept.push(p);
        }
    }
    (kept, outliers)
}

/// Statistics of `err_base − err_refined` over the kept instances of one `(n, δ)` group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub experiment: u8,
    pub n: usize,
    pub delta: f64,
    pub kept: Vec<InstancePair>,
    pub outliers: Vec<InstancePair>,
    pub mean_diff: f64,
    pub std_diff: f64,
}

impl GroupReport {
    pub fn from_instances(experiment: u8, n: usize, delta: f64, instances: &[InstancePair]) -> Self {
        let (kept, outliers) = three_sigma_filter(instances);
        let diffs: Vec<f64> = kept.iter().map(|p| p.err_base - p.err_refined).collect();
        let (mean_diff, std_diff) = if diffs.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            mean_std(&diffs)
        };
        GroupReport {
            experiment,
            n,
            delta,
            kept,
            outliers,
            mean_diff,
            std_diff,
        }
    }

    /// All instances in simulation order, with their outlier flags.
    pub fn instances(&self) -> Vec<InstancePair> {
        let mut all: Vec<InstancePair> = self.kept.iter().chain(&self.outliers).cloned().collect();
        all.sort_by_key(|p| p.sim_index);
        all
    }
}

/// Worker count from `OPKERN_THREADS`, defaulting to the machine's parallelism.
pub fn threads_from_env() -> usize {
    std::env::var("OPKERN_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|t| *t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from))
}

/// Runs every `(n, δ)` group (n outer, δ inner) on a pool of `threads`
/// workers. Results are gathered by simulation index, so the output does not
/// depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<GroupReport>> {
    cfg.validate()?;
    let groups: Vec<(usize, f64)> = cfg
        .dims
        .iter()
        .flat_map(|&n| cfg.noise_levels.iter().map(move |&d| (n, d)))
        .collect();
    let jobs: Vec<(usize, usize, u64)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, &(n, delta))| {
            (0..cfg.sims_per_group)
                .map(move |i| (g, i, simulation_seed(cfg.base_seed, cfg.experiment, n, delta, i)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<Result<InstancePair>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(g, i, seed)| {
                let (n, delta) = groups[g];
                let fit = run_simulation(cfg, n, delta, seed)?;
                Ok(InstancePair {
                    sim_index: i,
                    seed,
                    err_base: fit.err_base,
                    err_refined: fit.err_refined,
                    outlier: false,
                })
            })
            .collect()
    });
    let results: Vec<InstancePair> = results.into_iter().collect::<Result<_>>()?;
    Ok(groups
        .iter()
        .enumerate()
        .map(|(g, &(n, delta))| {
            let chunk = &results[g * cfg.sims_per_group..(g + 1) * cfg.sims_per_group];
            GroupReport::from_instances(cfg.experiment, n, delta, chunk)
        })
        .collect())
}

/// One `(n, δ)` group of `cfg`.
pub fn run_group(cfg: &ExperimentConfig, n: usize, delta: f64, threads: usize) -> Result<GroupReport> {
    let single = ExperimentConfig {
        dims: vec![n],
        noise_levels: vec![delta],
        ..cfg.clone()
    };
    Ok(run_experiment(&single, threads)?.remove(0))
}
