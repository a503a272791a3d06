//! Monte-Carlo comparison of a kernel against a refined or coarsened kernel.
//!
//! Each simulation draws a random vector-valued target on `[-1, 1]`, noisy
//! samples of it, and a random kernel pair; both kernels are fitted with the
//! σ that minimizes the true relative error. Groups of simulations are then
//! filtered with the three-sigma rule and summarized.

mod report;
mod rng;
mod sim;
mod target;

pub use report::{
    group_rows, instance_rows, read_group_stats, read_instances, write_group_stats, write_instances,
    write_reports, GroupRow, InstanceRow, GROUP_COLUMNS, INSTANCE_COLUMNS,
};
pub use rng::{simulation_seed, SimRng};
pub use sim::{
    best_fits, log_grid, relative_error, run_experiment, run_group, run_simulation, simpson,
    three_sigma_filter, threads_from_env, BestFit, ConfigOverrides, ExperimentConfig, GroupReport,
    InstancePair, DEFAULT_QUAD_POINTS, DEFAULT_SEED, DEFAULT_SIGMA_GRID_SIZE,
};
pub use target::{coefficient_ranges, gen_kernels, gen_samples, gen_target, TargetFunction};
