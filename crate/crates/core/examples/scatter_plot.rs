//! Runs a short experiment and writes its paired errors as an SVG scatter plot.
//!
//!     cargo run --release --example scatter_plot [out.svg]

use opkern::experiments::{instance_rows, run_experiment, ExperimentConfig};
use opkern::plot::render_scatter;

fn main() -> opkern::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "scatter.svg".into());
    let cfg = ExperimentConfig {
        dims: vec![2, 4],
        noise_levels: vec![0.1, 0.3],
        sims_per_group: 10,
        ..ExperimentConfig::defaults(2)?
    };
    let rows = instance_rows(&run_experiment(&cfg, 1)?);
    std::fs::write(&out, render_scatter(&rows))?;
    println!("{} instances plotted to {out}", rows.len());
    Ok(())
}
