//! Fits a two-output regularization network with a coupled Gaussian kernel
//! and reports the training objective and held-out error for a few σ.
//!
//!     cargo run --example multitask_fit

use opkern::experiments::SimRng;
use opkern::kernels::KernelSpec;
use opkern::matcore::SymMatrix;
use opkern::regnet::{objective, predict, rkhs_norm, solve, SampleSet};

fn truth(x: f64) -> Vec<f64> {
    let shared = (3.0 * x).sin();
    vec![shared + 0.3 * x, 0.8 * shared - 0.2]
}

fn main() -> opkern::Result<()> {
    let mut rng = SimRng::new(42);
    let inputs: Vec<Vec<f64>> = (0..25).map(|_| vec![rng.uniform(-1.0, 1.0)]).collect();
    let outputs = inputs
        .iter()
        .map(|x| truth(x[0]).into_iter().map(|v| v + rng.uniform(-0.1, 0.1)).collect())
        .collect();
    let data = SampleSet::new(inputs, outputs)?;

    let s = SymMatrix::from_rows(&[vec![1.0, 0.8], vec![0.8, 1.0]])?;
    let spec = KernelSpec::GaussianPsd { s, width: 0.4 };
    for sigma in [1e-4, 1e-3, 1e-2, 1e-1] {
        let model = solve(&spec, &data, sigma)?;
        let test_err: f64 = (0..=100)
            .map(|i| -1.0 + 0.02 * i as f64)
            .map(|x| -> opkern::Result<f64> {
                let f = predict(&model, &[x])?;
                Ok(f.iter().zip(truth(x)).map(|(a, b)| (a - b) * (a - b)).sum())
            })
            .sum::<opkern::Result<f64>>()?
            / 101.0;
        println!(
            "σ = {sigma:.0e}: objective {:.5}, ‖f‖ = {:.3}, held-out mse {test_err:.5}",
            objective(&model, &data)?,
            rkhs_norm(&model)?
        );
    }
    Ok(())
}
