//! Spectral-measure predicates: discrete translation-invariant kernels,
//! symbolic measure precedence, and Hessian kernel pairs.

use serde::{Deserialize, Serialize};

use super::RefinementVerdict;
use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, TiAtom};
use crate::matcore::{is_psd, operator_order, SymMatrix, RANK_TOL};

/// Atom locations closer than this (max-norm) are the same location.
const ATOM_TOL: f64 = 1e-12;
const WEIGHT_TOL: f64 = 1e-12;

fn same_location(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= ATOM_TOL)
}

fn negated(t: &[f64]) -> Vec<f64> {
    t.iter().map(|v| -v).collect()
}

/// `cos((x−y)·t)` is even in `t`, so atoms at `t` and `−t` describe the same
/// kernel term. Folds each mirrored pair into one atom at the representative
/// whose first nonzero coordinate is positive.
fn fold_mirrored(atoms: &[TiAtom]) -> Result<Vec<TiAtom>> {
    let mut out: Vec<TiAtom> = Vec::new();
    for (i, atom) in atoms.iter().enumerate() {
        if atoms[..i].iter().any(|a| same_location(&a.t, &atom.t)) {
            return Err(Error::InvalidParameter(format!(
                "atom location {:?} appears twice",
                atom.t
            )));
        }
        let canon = match atom.t.iter().find(|v| v.abs() > ATOM_TOL) {
            Some(v) if *v < 0.0 => negated(&atom.t),
            _ => atom.t.clone(),
        };
        match out.iter_mut().find(|a| same_location(&a.t, &canon)) {
            Some(existing) => existing.a = existing.a.add(&atom.a)?,
            None => out.push(TiAtom {
                t: canon,
                a: atom.a.clone(),
            }),
        }
    }
    Ok(out)
}

/// `K = Σ cos((x−y)·t_j) A_j ⪯ G = Σ cos((x−y)·s_k) B_k` iff every location of
/// `K` is a location of `G` and `A_j ⪯ B_j` there.
pub fn check_discrete_ti(k: &KernelSpec, g: &KernelSpec) -> Result<RefinementVerdict> {
    let (KernelSpec::DiscreteTi { atoms: ka }, KernelSpec::DiscreteTi { atoms: ga }) = (k, g) else {
        return Err(Error::Unsupported("check_discrete_ti needs two discrete TI kernels".into()));
    };
    k.validate()?;
    g.validate()?;
    if k.output_dim() != g.output_dim() {
        return Err(Error::DimMismatch {
            expected: k.output_dim(),
            got: g.output_dim(),
        });
    }
    let ka = fold_mirrored(ka)?;
    let ga = fold_mirrored(ga)?;
    let characterization = "discrete translation-invariant: support inclusion and A_j ⪯ B_j".to_string();
    let mut strict = ga.len() > ka.len();
    for atom in &ka {
        let Some(partner) = ga.iter().find(|b| same_location(&b.t, &atom.t)) else {
            return Ok(RefinementVerdict {
                holds: Some(false),
                nontrivial: None,
                characterization,
                witness: format!("atom at {:?} is missing from G", atom.t),
            });
        };
        if !operator_order(&atom.a, &partner.a, RANK_TOL)? {
            return Ok(RefinementVerdict {
                holds: Some(false),
                nontrivial: None,
                characterization,
                witness: format!("A_j ⪯ B_j fails at {:?}", atom.t),
            });
        }
        if !atom.a.approx_eq(&partner.a, 1e-10) {
            strict = true;
        }
    }
    Ok(RefinementVerdict {
        holds: Some(true),
        nontrivial: Some(strict),
        characterization,
        witness: format!(
            "all {} atom(s) of K occur in G with A_j ⪯ B_j; G has {} atom(s)",
            ka.len(),
            ga.len()
        ),
    })
}

/// Absolutely continuous part of a symbolic measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    /// `exp(−‖t‖² width² / 2)` up to normalization.
    Gaussian { width: f64 },
    /// Lebesgue measure restricted to a finite union of intervals (one-dimensional).
    LebesgueIndicator { intervals: Vec<(f64, f64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousPart {
    pub density: Density,
    pub scale: f64,
}

/// Atom weight: a nonnegative scalar or a PSD matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AtomWeight {
    Scalar(f64),
    Matrix(SymMatrix),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureAtom {
    pub t: Vec<f64>,
    pub weight: AtomWeight,
}

/// `γ = γ_c + Σ_j w_j δ_{t_j}` with a symbolic continuous part.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SymbolicMeasure {
    #[serde(default)]
    pub continuous: Option<ContinuousPart>,
    #[serde(default)]
    pub atoms: Vec<MeasureAtom>,
}

impl SymbolicMeasure {
    pub fn gaussian(width: f64, scale: f64) -> Self {
        SymbolicMeasure {
            continuous: Some(ContinuousPart {
                density: Density::Gaussian { width },
                scale,
            }),
            atoms: Vec::new(),
        }
    }

    pub fn with_atom(mut self, t: Vec<f64>, weight: AtomWeight) -> Self {
        self.atoms.push(MeasureAtom { t, weight });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = &self.continuous {
            if !(c.scale.is_finite() && c.scale > 0.0) {
                return Err(Error::InvalidParameter("continuous scale must be positive".into()));
            }
            match &c.density {
                Density::Gaussian { width } => {
                    if !(width.is_finite() && *width > 0.0) {
                        return Err(Error::InvalidParameter("density width must be positive".into()));
                    }
                }
                Density::LebesgueIndicator { intervals } => {
                    if intervals.iter().any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
                        return Err(Error::InvalidParameter("intervals must be finite with a < b".into()));
                    }
                }
            }
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if self.atoms[..i].iter().any(|a| same_location(&a.t, &atom.t)) {
                return Err(Error::InvalidParameter(format!("atom {:?} appears twice", atom.t)));
            }
            match &atom.weight {
                AtomWeight::Scalar(w) if !(w.is_finite() && *w >= 0.0) => {
                    return Err(Error::InvalidParameter("atom weights must be nonnegative".into()));
                }
                AtomWeight::Matrix(m) if !is_psd(m, RANK_TOL) => {
                    return Err(Error::InvalidParameter("atom weights must be PSD".into()));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn weight_precedes(a: &AtomWeight, b: &AtomWeight) -> Result<bool> {
    match (a, b) {
        (AtomWeight::Scalar(x), AtomWeight::Scalar(y)) => {
            Ok(*x == 0.0 || (x - y).abs() <= WEIGHT_TOL * x.abs().max(y.abs()))
        }
        (AtomWeight::Matrix(x), AtomWeight::Matrix(y)) => operator_order(x, y, RANK_TOL),
        _ => Err(Error::InvalidParameter("scalar and matrix atom weights mixed".into())),
    }
}

fn is_zero_weight(w: &AtomWeight) -> bool {
    match w {
        AtomWeight::Scalar(x) => *x == 0.0,
        AtomWeight::Matrix(m) => m.frobenius_norm() == 0.0,
    }
}

/// `μ ⪯ ν`: `μ ≪ ν` with `dμ/dν ∈ {0, 1}`.
///
/// Continuous parts are compared structurally. Identical densities must also
/// have identical scales; distinct densities cannot be certified and give
/// [`Error::Undecidable`]. Each atom of `μ` must sit at an atom of `ν` with
/// the same weight (operator order for matrix weights).
pub fn measure_precedes(mu: &SymbolicMeasure, nu: &SymbolicMeasure) -> Result<bool> {
    mu.validate()?;
    nu.validate()?;
    match (&mu.continuous, &nu.continuous) {
        (None, _) => {}
        (Some(_), None) => return Ok(false),
        (Some(a), Some(b)) => {
            if a.density != b.density {
                return Err(Error::Undecidable(format!(
                    "continuous parts {:?} and {:?} overlap without being identical",
                    a.density, b.density
                )));
            }
            if (a.scale - b.scale).abs() > WEIGHT_TOL * a.scale.max(b.scale) {
                return Ok(false);
            }
        }
    }
    for atom in mu.atoms.iter().filter(|a| !is_zero_weight(&a.weight)) {
        match nu.atoms.iter().find(|b| same_location(&b.t, &atom.t)) {
            Some(b) if weight_precedes(&atom.weight, &b.weight)? => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Gaussian-type kernels generated by `μ` and `ν` (the base kernel, its
/// Hessian kernel, and the block kernel) refine each other iff `μ ⪯ ν`.
pub fn check_hessian_pair(mu: &SymbolicMeasure, nu: &SymbolicMeasure) -> Result<RefinementVerdict> {
    let holds = measure_precedes(mu, nu)?;
    let characterization = "spectral measures: μ ⪯ ν, applied to k, ∇²k and the block kernel".to_string();
    if !holds {
        return Ok(RefinementVerdict {
            holds: Some(false),
            nontrivial: None,
            characterization,
            witness: "μ does not precede ν".into(),
        });
    }
    let extra = nu
        .atoms
        .iter()
        .filter(|b| !is_zero_weight(&b.weight))
        .filter(|b| {
            !mu.atoms
                .iter()
                .any(|a| same_location(&a.t, &b.t) && !is_zero_weight(&a.weight))
        })
        .count();
    let strict = extra > 0
        || (mu.continuous.is_none() && nu.continuous.is_some())
        || mu.atoms.iter().any(|a| {
            nu.atoms
                .iter()
                .find(|b| same_location(&a.t, &b.t))
                .is_some_and(|b| match (&a.weight, &b.weight) {
                    (AtomWeight::Matrix(x), AtomWeight::Matrix(y)) => !x.approx_eq(y, 1e-10),
                    _ => false,
                })
        });
    Ok(RefinementVerdict {
        holds: Some(true),
        nontrivial: Some(strict),
        characterization,
        witness: format!("μ ⪯ ν; ν carries {extra} additional atom(s)"),
    })
}
