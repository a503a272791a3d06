//! Scalar-valued kernels used as building blocks of the operator-valued families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A symbolic scalar function on ℝ^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisFunction {
    /// `x^a = Π_i x_i^{a_i}`.
    Monomial { powers: Vec<u32> },
    /// `cos(t·x)`.
    Cosine { freq: Vec<f64> },
    /// `sin(t·x)`.
    Sine { freq: Vec<f64> },
    /// `exp(−r·x)`.
    Exponential { rate: Vec<f64> },
}

impl BasisFunction {
    pub fn input_dim(&self) -> usize {
        match self {
            BasisFunction::Monomial { powers } => powers.len(),
            BasisFunction::Cosine { freq } | BasisFunction::Sine { freq } => freq.len(),
            BasisFunction::Exponential { rate } => rate.len(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            BasisFunction::Monomial { powers } => powers
                .iter()
                .zip(x)
                .map(|(&p, &xi)| xi.powi(p as i32))
                .product(),
            BasisFunction::Cosine { freq } => dot(freq, x).cos(),
            BasisFunction::Sine { freq } => dot(freq, x).sin(),
            BasisFunction::Exponential { rate } => (-dot(rate, x)).exp(),
        }
    }
}

/// Scalar reproducing kernel `k(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarKernelSpec {
    /// `exp(−‖x−y‖²/(2 width²))`.
    Gaussian { width: f64 },
    /// `Σ_k c_k (x·y)^k`.
    Polynomial { coeffs: Vec<f64> },
    /// `Σ_j w_j ψ_j(x) ψ_j(y)`; `weights` defaults to all ones.
    RankOneSet {
        functions: Vec<BasisFunction>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        weights: Vec<f64>,
    },
}

impl ScalarKernelSpec {
    pub fn rank_one(functions: Vec<BasisFunction>) -> Self {
        ScalarKernelSpec::RankOneSet {
            functions,
            weights: Vec::new(),
        }
    }

    /// Input dimension fixed by the kernel's parameters, if any.
    pub fn input_dim(&self) -> Option<usize> {
        match self {
            ScalarKernelSpec::RankOneSet { functions, .. } => functions.first().map(|f| f.input_dim()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarKernelSpec::Gaussian { width } => {
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::InvalidParameter(format!("gaussian width {width}")));
                }
            }
            ScalarKernelSpec::Polynomial { coeffs } => {
                if coeffs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
                    return Err(Error::InvalidParameter(
                        "polynomial coefficients must be finite and nonnegative".into(),
                    ));
                }
            }
            ScalarKernelSpec::RankOneSet { functions, weights } => {
                if functions.is_empty() {
                    return Err(Error::InvalidParameter("empty rank-one function set".into()));
                }
                let d = functions[0].input_dim();
                if functions.iter().any(|f| f.input_dim() != d) {
                    return Err(Error::InvalidParameter(
                        "rank-one functions disagree on input dimension".into(),
                    ));
                }
                if !weights.is_empty() && weights.len() != functions.len() {
                    return Err(Error::InvalidParameter(
                        "rank-one weights must match the function count".into(),
                    ));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::InvalidParameter("rank-one weights must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn weight(&self, j: usize) -> f64 {
        match self {
            ScalarKernelSpec::RankOneSet { weights, .. } if !weights.is_empty() => weights[j],
            _ => 1.0,
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            ScalarKernelSpec::Gaussian { width } => gaussian(x, y, *width),
            ScalarKernelSpec::Polynomial { coeffs } => horner(coeffs, dot(x, y)),
            ScalarKernelSpec::RankOneSet { functions, .. } => functions
                .iter()
                .enumerate()
                .map(|(j, f)| self.weight(j) * f.eval(x) * f.eval(y))
                .sum(),
        }
    }

    /// Dimension of the RKHS on ℝ^d, when finite.
    pub fn rkhs_dim(&self, d: usize) -> Option<usize> {
        match self {
            ScalarKernelSpec::Gaussian { .. } => None,
            ScalarKernelSpec::Polynomial { coeffs } => Some(
                coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c > 0.0)
                    .map(|(k, _)| homogeneous_monomials(k, d))
                    .sum(),
            ),
            ScalarKernelSpec::RankOneSet { functions, .. } => Some(functions.len()),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn gaussian(x: &[f64], y: &[f64], width: f64) -> f64 {
    (-sq_dist(x, y) / (2.0 * width * width)).exp()
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Number of monomials of total degree `k` in `d` variables: C(k+d−1, d−1).
fn homogeneous_monomials(k: usize, d: usize) -> usize {
    if d == 0 {
        return usize::from(k == 0);
    }
    binomial(k + d - 1, d - 1) as usize
}

/// Binomial coefficient as a float (exact for the small arguments used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}
