//! Deciding `H_K ⪯ H_G`: `H_K ⊆ H_G` with equal norms on `H_K`.
//!
//! Closed-form predicates cover finite Hilbert–Schmidt kernels (including
//! sums of Gaussian and polynomial kernels), finite-dimensional kernels,
//! discrete translation-invariant kernels, Gaussian Hessian kernels through
//! their spectral measures, and transformation kernels. Finite-dimensional
//! pairs can also be checked numerically with [`refinement_oracle`].

mod finite;
mod measure;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

pub use finite::{check_finite_dim, check_finite_hs, check_transformation};
pub use measure::{
    check_discrete_ti, check_hessian_pair, measure_precedes, AtomWeight, ContinuousPart, Density,
    MeasureAtom, SymbolicMeasure,
};
pub use oracle::{default_oracle, refinement_oracle};

/// Outcome of a refinement check. `holds` is absent when the pair falls
/// outside every decidable class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementVerdict {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nontrivial: Option<bool>,
    pub characterization: String,
    pub witness: String,
}

/// Spectral measure of `exp(−‖x−y‖²/(2w²))`: a Gaussian density of width `1/w`.
fn gaussian_spectral_measure(width: f64) -> SymbolicMeasure {
    SymbolicMeasure::gaussian(1.0 / width, 1.0)
}

/// Dispatches to the closed-form predicate matching the pair's families.
pub fn check_refinement(k: &KernelSpec, g: &KernelSpec) -> Result<RefinementVerdict> {
    use KernelSpec as K;
    match (k, g) {
        (K::Transformation { .. }, K::Transformation { .. }) => check_transformation(k, g),
        (K::DiscreteTi { .. }, K::DiscreteTi { .. }) => check_discrete_ti(k, g),
        (K::HessianGaussian { width: a, dim: da }, K::HessianGaussian { width: b, dim: db })
        | (
            K::HessianBlockGaussian { width: a, dim: da },
            K::HessianBlockGaussian { width: b, dim: db },
        ) => {
            if da != db {
                return Err(Error::DimMismatch { expected: *da, got: *db });
            }
            check_hessian_pair(&gaussian_spectral_measure(*a), &gaussian_spectral_measure(*b))
        }
        _ if k.to_finite_hs().is_some() && g.to_finite_hs().is_some() => check_finite_hs(k, g),
        _ => Ok(RefinementVerdict {
            holds: None,
            nontrivial: None,
            characterization: "none".into(),
            witness: "no closed-form characterization covers this pair of families".into(),
        }),
    }
}
