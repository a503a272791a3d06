//! Experiment 2: a kernel with a degree-18 polynomial part against the
//! coarser kernel truncated at degree 10.
//!
//!     cargo run --release --example overfitting_experiment [full]

use opkern::experiments::{run_experiment, threads_from_env, ExperimentConfig};

fn main() -> opkern::Result<()> {
    let mut cfg = ExperimentConfig::defaults(2)?;
    if std::env::args().nth(1).as_deref() != Some("full") {
        cfg.dims = vec![2, 4];
        cfg.noise_levels = vec![0.1, 0.5];
    }
    for r in run_experiment(&cfg, threads_from_env())? {
        let outliers: Vec<usize> = r.outliers.iter().map(|p| p.sim_index).collect();
        println!(
            "n = {:2}, δ = {}: mean(E_K − E_L) = {:.4} ({:.4}), outliers at {outliers:?}",
            r.n, r.delta, r.mean_diff, r.std_diff
        );
    }
    Ok(())
}
