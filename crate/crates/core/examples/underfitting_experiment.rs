//! Experiment 1: a Gaussian kernel against its refinement by a cubic
//! polynomial term. Small by default; pass `full` for the whole protocol.
//!
//!     cargo run --release --example underfitting_experiment [full] [out_dir]

use opkern::experiments::{run_experiment, threads_from_env, write_reports, ExperimentConfig};

fn main() -> opkern::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut cfg = ExperimentConfig::defaults(1)?;
    if args.first().map(String::as_str) != Some("full") {
        cfg.dims = vec![2, 4];
        cfg.sims_per_group = 10;
    }
    let reports = run_experiment(&cfg, threads_from_env())?;
    println!("  n     δ   kept  outliers  mean(E_K − E_G)  (std)");
    for r in &reports {
        println!(
            "{:3} {:5}   {:4}  {:8}  {:15.4}  ({:.4})",
            r.n,
            r.delta,
            r.kept.len(),
            r.outliers.len(),
            r.mean_diff,
            r.std_diff
        );
    }
    if let Some(dir) = args.get(1) {
        write_reports(std::path::Path::new(dir), &reports)?;
        println!("wrote {dir}/instances.csv and {dir}/group_stats.csv");
    }
    Ok(())
}
