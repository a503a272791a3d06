//! Random target functions, noisy samples, and the kernel pairs under comparison.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SimRng;
use crate::error::{Error, Result};
use crate::kernels::{binomial, KernelSpec};
use crate::matcore::SymMatrix;
use crate::regnet::SampleSet;

const RESAMPLE_ATTEMPTS: usize = 10;

/// `f_0: [-1, 1] → ℝ^n`, componentwise
/// `a_k |x − b_k| + c_k e^{−d_k x}` (experiment 1) or
/// `a_k / (1 + 25 (x − b_k)²) + c_k e^{−d_k x}` (experiment 2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetFunction {
    pub experiment: u8,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl TargetFunction {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        (0..self.dim())
            .map(|k| {
                let bump = if self.experiment == 1 {
                    self.a[k] * (x - self.b[k]).abs()
                } else {
                    self.a[k] / (1.0 + 25.0 * (x - self.b[k]).powi(2))
                };
                bump + self.c[k] * (-self.d[k] * x).exp()
            })
            .collect()
    }
}

pub(crate) fn check_experiment(experiment: u8) -> Result<()> {
    if experiment == 1 || experiment == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("experiment must be 1 or 2, got {experiment}")))
    }
}

/// Sampling ranges of `(a, b, c, d)` per experiment.
pub fn coefficient_ranges(experiment: u8) -> [(f64, f64); 4] {
    if experiment == 1 {
        [(1.0, 3.0), (-1.0, 1.0), (-2.0, 2.0), (0.0, 3.0)]
    } else {
        [(1.0, 4.0), (0.0, 0.5), (-2.0, 2.0), (0.0, 2.0)]
    }
}

pub fn gen_target(experiment: u8, n: usize, rng: &mut SimRng) -> Result<TargetFunction> {
    check_experiment(experiment)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let [ra, rb, rc, rd] = coefficient_ranges(experiment);
    let mut draw = |(lo, hi): (f64, f64)| -> Vec<f64> { (0..n).map(|_| rng.uniform(lo, hi)).collect() };
    let a = draw(ra);
    let b = draw(rb);
    let c = draw(rc);
    let d = draw(rd);
    Ok(TargetFunction { experiment, a, b, c, d })
}

/// `m` inputs uniform on `[-1, 1]`, outputs `f_0(x_j)` plus componentwise
/// noise uniform on `[-δ, δ]`.
pub fn gen_samples(target: &TargetFunction, m: usize, delta: f64, rng: &mut SimRng) -> Result<SampleSet> {
    if m == 0 || !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("need m ≥ 1 and δ ≥ 0 (m = {m}, δ = {delta})")));
    }
    let mut inputs = Vec::with_capacity(m);
    let mut outputs = Vec::with_capacity(m);
    for _ in 0..m {
        let x = rng.uniform(-1.0, 1.0);
        let mut y = target.eval(x);
        for v in &mut y {
            *v += rng.uniform(-delta, delta);
        }
        inputs.push(vec![x]);
        outputs.push(y);
    }
    SampleSet::new(inputs, outputs)
}

/// `AᵀA` for `A` with entries uniform on `[lo, hi]`, redrawn until strictly
/// positive definite.
fn random_gram(n: usize, lo: f64, hi: f64, rng: &mut SimRng) -> Result<SymMatrix> {
    for _ in 0..RESAMPLE_ATTEMPTS {
        let a = DMatrix::from_fn(n, n, |_, _| rng.uniform(lo, hi));
        let s = SymMatrix::gram_of(&a);
        let e = s.eig();
        if e.min() > 1e-10 * e.max() {
            return Ok(s);
        }
    }
    Err(Error::DegenerateMatrix(RESAMPLE_ATTEMPTS))
}

/// The kernels compared in each experiment, as `(base, other)`.
///
/// Experiment 1: `K = S·gauss` and its refinement `G = K + T(1 + xy)³`.
/// Experiment 2: `K = S·gauss + T(1 + xy)^18` and the coarser
/// `L = S·gauss + T Σ_{k≤10} C(18, k)(xy)^k`.
pub fn gen_kernels(experiment: u8, n: usize, rng: &mut SimRng) -> Result<(KernelSpec, KernelSpec)> {
    check_experiment(experiment)?;
    let (lo, hi) = if experiment == 1 { (1.0, 3.0) } else { (1.0, 2.0) };
    let s = random_gram(n, lo, hi, rng)?;
    let t = random_gram(n, lo, hi, rng)?;
    let gauss = KernelSpec::GaussianPsd { s, width: 1.0 };
    if experiment == 1 {
        let poly = KernelSpec::PolynomialPsd {
            t,
            coeffs: (0..=3).map(|k| binomial(3, k)).collect(),
        };
        Ok((gauss.clone(), KernelSpec::sum(gauss, poly)))
    } else {
        let full: Vec<f64> = (0..=18).map(|k| binomial(18, k)).collect();
        let k = KernelSpec::sum(
            gauss.clone(),
            KernelSpec::PolynomialPsd {
                t: t.clone(),
                coeffs: full.clone(),
            },
        );
        let l = KernelSpec::sum(
            gauss,
            KernelSpec::PolynomialPsd {
                t,
                coeffs: full[..=10].to_vec(),
            },
        );
        Ok((k, l))
    }
}
