//! Square-loss regularization networks over an operator-valued kernel.
//!
//! The minimizer of `(1/m) Σ ‖f(x_j) − ξ_j‖² + σ ‖f‖²_K` over `H_K` is
//! `f = Σ_j K(x_j, ·) η_j` where `(Gram + mσI) η = ξ`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::matcore::SymMatrix;

/// Training data `{(x_j, ξ_j)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
}

impl SampleSet {
    pub fn new(inputs: Vec<Vec<f64>>, outputs: Vec<Vec<f64>>) -> Result<Self> {
        let s = SampleSet { inputs, outputs };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::InvalidParameter("sample set is empty".into()));
        }
        if self.inputs.len() != self.outputs.len() {
            return Err(Error::DimMismatch {
                expected: self.inputs.len(),
                got: self.outputs.len(),
            });
        }
        for (rows, what) in [(&self.inputs, "input"), (&self.outputs, "output")] {
            let d = rows[0].len();
            for r in rows.iter() {
                if r.len() != d {
                    return Err(Error::DimMismatch { expected: d, got: r.len() });
                }
                if r.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter(format!("non-finite {what} value")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn output_dim(&self) -> usize {
        self.outputs.first().map_or(0, Vec::len)
    }

    /// Outputs stacked sample-major into one vector.
    pub fn stacked_outputs(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.len() * self.output_dim(),
            self.outputs.iter().flatten().copied(),
        )
    }
}

/// A fitted model `f = Σ_j K(x_j, ·) η_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitModel {
    pub spec: KernelSpec,
    pub support: Vec<Vec<f64>>,
    pub coeffs: Vec<Vec<f64>>,
    pub sigma: f64,
}

impl FitModel {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.support.len() != self.coeffs.len() {
            return Err(Error::DimMismatch {
                expected: self.support.len(),
                got: self.coeffs.len(),
            });
        }
        let n = self.spec.output_dim();
        if let Some(c) = self.coeffs.iter().find(|c| c.len() != n) {
            return Err(Error::DimMismatch { expected: n, got: c.len() });
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma {} must be nonnegative", self.sigma)));
        }
        Ok(())
    }

    pub fn stacked_coeffs(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.coeffs.len() * self.spec.output_dim(),
            self.coeffs.iter().flatten().copied(),
        )
    }
}

fn unstack(v: &DVector<f64>, n: usize) -> Vec<Vec<f64>> {
    v.as_slice().chunks(n).map(<[f64]>::to_vec).collect()
}

/// A Gram matrix over fixed support points, reusable across many `σ`.
#[derive(Clone, Debug)]
pub struct GramSystem {
    spec: KernelSpec,
    support: Vec<Vec<f64>>,
    gram: SymMatrix,
}

impl GramSystem {
    pub fn new(spec: &KernelSpec, support: &[Vec<f64>]) -> Result<Self> {
        spec.validate()?;
        Ok(GramSystem {
            spec: spec.clone(),
            support: support.to_vec(),
            gram: spec.gram(support)?,
        })
    }

    pub fn gram(&self) -> &SymMatrix {
        &self.gram
    }

    fn shifted(&self, sigma: f64) -> DMatrix<f64> {
        let m = self.support.len() as f64;
        let mut a = self.gram.as_matrix().clone();
        for i in 0..a.nrows() {
            a[(i, i)] += m * sigma;
        }
        a
    }

    /// Solves `(Gram + mσI) η = ξ` by Cholesky with one step of iterative refinement.
    pub fn solve_stacked(&self, xi: &DVector<f64>, sigma: f64) -> Result<DVector<f64>> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma {sigma} must be positive")));
        }
        if xi.len() != self.gram.dim() {
            return Err(Error::DimMismatch {
                expected: self.gram.dim(),
                got: xi.len(),
            });
        }
        let a = self.shifted(sigma);
        let chol = Cholesky::<f64, Dyn>::new(a.clone()).ok_or(Error::SingularSystem)?;
        let mut eta = chol.solve(xi);
        let residual = xi - &a * &eta;
        eta += chol.solve(&residual);
        Ok(eta)
    }

    /// Relative residual `‖(Gram + mσI) η − ξ‖ / max(1, ‖ξ‖)`.
    pub fn residual(&self, eta: &DVector<f64>, xi: &DVector<f64>, sigma: f64) -> f64 {
        (&self.shifted(sigma) * eta - xi).norm() / xi.norm().max(1.0)
    }

    pub fn solve(&self, data: &SampleSet, sigma: f64) -> Result<FitModel> {
        if data.output_dim() != self.spec.output_dim() {
            return Err(Error::DimMismatch {
                expected: self.spec.output_dim(),
                got: data.output_dim(),
            });
        }
        let eta = self.solve_stacked(&data.stacked_outputs(), sigma)?;
        Ok(FitModel {
            spec: self.spec.clone(),
            support: self.support.clone(),
            coeffs: unstack(&eta, self.spec.output_dim()),
            sigma,
        })
    }
}

/// Fits the regularization network with parameter `sigma > 0`.
pub fn solve(spec: &KernelSpec, data: &SampleSet, sigma: f64) -> Result<FitModel> {
    data.validate()?;
    GramSystem::new(spec, &data.inputs)?.solve(data, sigma)
}

/// `f(x) = Σ_j K(x_j, x) η_j`.
pub fn predict(model: &FitModel, x: &[f64]) -> Result<Vec<f64>> {
    let n = model.spec.output_dim();
    let mut out = DVector::zeros(n);
    for (xj, eta) in model.support.iter().zip(&model.coeffs) {
        if eta.len() != n {
            return Err(Error::DimMismatch { expected: n, got: eta.len() });
        }
        out += model.spec.eval(xj, x)? * DVector::from_column_slice(eta);
    }
    Ok(out.as_slice().to_vec())
}

/// `(1/m) Σ ‖f(x_j) − ξ_j‖² + σ ‖f‖²`, with `σ` taken from the model.
pub fn objective(model: &FitModel, data: &SampleSet) -> Result<f64> {
    data.validate()?;
    let n = model.spec.output_dim();
    if data.output_dim() != n {
        return Err(Error::DimMismatch {
            expected: n,
            got: data.output_dim(),
        });
    }
    let mut loss = 0.0;
    for (x, xi) in data.inputs.iter().zip(&data.outputs) {
        let fx = predict(model, x)?;
        loss += fx.iter().zip(xi).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    let norm = rkhs_norm(model)?;
    Ok(loss / data.len() as f64 + model.sigma * norm * norm)
}

/// `‖f‖_K = sqrt(ηᵀ Gram η)`.
pub fn rkhs_norm(model: &FitModel) -> Result<f64> {
    model.validate()?;
    if model.support.is_empty() {
        return Ok(0.0);
    }
    let eta = model.stacked_coeffs();
    let gram = model.spec.gram(&model.support)?;
    quadratic_norm(gram.as_matrix(), &eta)
}

pub(crate) fn quadratic_norm(gram: &DMatrix<f64>, eta: &DVector<f64>) -> Result<f64> {
    let q = eta.dot(&(gram * eta));
    let scale = eta.norm_squared();
    if q < -1e-10 * scale {
        return Err(Error::NegativeNorm(q));
    }
    Ok(q.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::SimRng;

    fn scalar_gauss() -> KernelSpec {
        KernelSpec::GaussianPsd {
            s: SymMatrix::identity(1),
            width: 1.0,
        }
    }

    fn random_data(rng: &mut SimRng, m: usize, n: usize) -> SampleSet {
        SampleSet::new(
            (0..m).map(|_| vec![rng.uniform(-1.0, 1.0)]).collect(),
            (0..m).map(|_| (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()).collect(),
        )
        .unwrap()
    }

    fn spd(rng: &mut SimRng, n: usize) -> SymMatrix {
        let a = DMatrix::from_fn(n, n, |_, _| rng.uniform(1.0, 3.0));
        SymMatrix::gram_of(&a)
    }

    #[test]
    fn one_by_one_system() {
        let s = 2.5;
        let spec = KernelSpec::GaussianPsd {
            s: SymMatrix::from_diagonal(&[s]),
            width: 1.0,
        };
        let data = SampleSet::new(vec![vec![0.3]], vec![vec![1.7]]).unwrap();
        let model = solve(&spec, &data, 0.1).unwrap();
        assert!((model.coeffs[0][0] - 1.7 / (s + 0.1)).abs() < 1e-14);
    }

    #[test]
    fn heavy_regularization_shrinks_to_zero() {
        let mut rng = SimRng::new(1);
        let data = random_data(&mut rng, 10, 1);
        let sigma = 1e6;
        let model = solve(&scalar_gauss(), &data, sigma).unwrap();
        let eta = model.stacked_coeffs();
        assert!(eta.norm() <= data.stacked_outputs().norm() / (10.0 * sigma));
        assert!(predict(&model, &[0.0]).unwrap()[0].abs() < 1e-5);
    }

    #[test]
    fn small_sigma_nearly_interpolates() {
        let mut rng = SimRng::new(2);
        let s = spd(&mut rng, 2).add(&SymMatrix::identity(2)).unwrap();
        let spec = KernelSpec::GaussianPsd { s, width: 0.3 };
        // Jittered grid keeps the nodes separated, so the Gram is well conditioned.
        let inputs = (0..8).map(|i| vec![-0.9 + 0.25 * i as f64 + rng.uniform(-0.03, 0.03)]).collect();
        let outputs = (0..8).map(|_| vec![rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)]).collect();
        let data = SampleSet::new(inputs, outputs).unwrap();
        let model = solve(&spec, &data, 1e-6).unwrap();
        for (x, xi) in data.inputs.iter().zip(&data.outputs) {
            let fx = predict(&model, x).unwrap();
            let err: f64 = fx.iter().zip(xi).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let scale: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(err <= 1e-3 * scale.max(1.0));
        }
    }

    #[test]
    fn residual_and_sigma_validation() {
        let mut rng = SimRng::new(3);
        let spec = KernelSpec::GaussianPsd { s: spd(&mut rng, 3), width: 1.0 };
        let data = random_data(&mut rng, 12, 3);
        let sys = GramSystem::new(&spec, &data.inputs).unwrap();
        let xi = data.stacked_outputs();
        for sigma in [1e-4, 1e-2, 1.0] {
            let eta = sys.solve_stacked(&xi, sigma).unwrap();
            assert!(sys.residual(&eta, &xi, sigma) <= 1e-8);
        }
        assert!(solve(&spec, &data, 0.0).is_err());
        assert!(solve(&spec, &data, -1.0).is_err());
        let wrong = random_data(&mut rng, 12, 2);
        assert!(matches!(solve(&spec, &wrong, 1.0), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn predict_examples() {
        let mut rng = SimRng::new(4);
        let spec = KernelSpec::GaussianPsd { s: spd(&mut rng, 2), width: 1.0 };
        let data = random_data(&mut rng, 6, 2);
        let mut model = solve(&spec, &data, 0.01).unwrap();

        // At the support points the prediction is Gram·η.
        let g = spec.gram(&data.inputs).unwrap();
        let stacked = g.as_matrix() * model.stacked_coeffs();
        for (j, x) in data.inputs.iter().enumerate() {
            let fx = predict(&model, x).unwrap();
            for i in 0..2 {
                assert!((fx[i] - stacked[j * 2 + i]).abs() < 1e-12);
            }
        }

        let single = FitModel {
            spec: spec.clone(),
            support: vec![vec![0.2]],
            coeffs: vec![vec![1.0, -2.0]],
            sigma: 0.1,
        };
        let expected = spec.eval(&[0.2], &[0.2]).unwrap() * DVector::from_vec(vec![1.0, -2.0]);
        assert_eq!(predict(&single, &[0.2]).unwrap(), expected.as_slice());

        for c in &mut model.coeffs {
            c.iter_mut().for_each(|v| *v = 0.0);
        }
        assert_eq!(predict(&model, &[0.4]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(rkhs_norm(&model).unwrap(), 0.0);
        let expected: f64 = data.outputs.iter().flatten().map(|v| v * v).sum::<f64>() / 6.0;
        assert!((objective(&model, &data).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn rkhs_norm_single_term() {
        let mut rng = SimRng::new(5);
        let spec = KernelSpec::GaussianPsd { s: spd(&mut rng, 2), width: 1.0 };
        let xi = [0.7, -0.4];
        let model = FitModel {
            spec: spec.clone(),
            support: vec![vec![0.1]],
            coeffs: vec![xi.to_vec()],
            sigma: 1.0,
        };
        let q = spec.scalarize(&[0.1], &xi, &[0.1], &xi).unwrap();
        assert!((rkhs_norm(&model).unwrap() - q.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn exact_interpolant_zero_objective() {
        let spec = scalar_gauss();
        let data = SampleSet::new(vec![vec![-0.5], vec![0.5]], vec![vec![1.0], vec![2.0]]).unwrap();
        let g = spec.gram(&data.inputs).unwrap().into_matrix();
        let eta = g.try_inverse().unwrap() * data.stacked_outputs();
        let model = FitModel {
            spec,
            support: data.inputs.clone(),
            coeffs: unstack(&eta, 1),
            sigma: 0.0,
        };
        assert!(objective(&model, &data).unwrap() < 1e-24);
    }

    #[test]
    fn negative_norm_is_reported() {
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        let eta = DVector::from_vec(vec![0.0, 1.0]);
        assert!(matches!(quadratic_norm(&g, &eta), Err(Error::NegativeNorm(_))));
    }

    #[test]
    fn norm_decreases_with_sigma() {
        let mut rng = SimRng::new(6);
        let spec = KernelSpec::GaussianPsd { s: spd(&mut rng, 2), width: 0.5 };
        let data = random_data(&mut rng, 10, 2);
        let sys = GramSystem::new(&spec, &data.inputs).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let sigma = 1e-6 * 2f64.powi(k);
            let norm = rkhs_norm(&sys.solve(&data, sigma).unwrap()).unwrap();
            assert!(norm <= prev * (1.0 + 1e-9));
            prev = norm;
        }
    }

    #[test]
    fn model_json_round_trip() {
        let mut rng = SimRng::new(7);
        let data = random_data(&mut rng, 4, 1);
        let model = solve(&scalar_gauss(), &data, 0.5).unwrap();
        let text = serde_json::to_string(&model).unwrap();
        let back: FitModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, model);
    }
}
