//! Predicates for finite Hilbert–Schmidt, finite-dimensional, and transformation kernels.

use nalgebra::DMatrix;

use super::RefinementVerdict;
use crate::error::{Error, Result};
use crate::experiments::SimRng;
use crate::kernels::{BasisFunction, HsTerm, KernelSpec, ScalarKernelSpec};
use crate::matcore::SymMatrix;

const EQ_TOL: f64 = 1e-10;
const INVERTIBLE_TOL: f64 = 1e-10;
const INDEPENDENCE_TOL: f64 = 1e-10;

fn ensure_invertible(m: &SymMatrix, label: &str) -> Result<()> {
    let e = m.eig();
    if !(e.max() > 0.0 && e.min() > INVERTIBLE_TOL * e.max()) {
        return Err(Error::NotInvertible(format!(
            "{label}: eigenvalues in [{:e}, {:e}]",
            e.min(),
            e.max()
        )));
    }
    Ok(())
}

fn finite_hs_terms(spec: &KernelSpec, label: &str) -> Result<Vec<HsTerm>> {
    spec.validate()?;
    spec.to_finite_hs()
        .ok_or_else(|| Error::Unsupported(format!("{label} has no finite Hilbert–Schmidt form")))
}

/// Checks that every rank-one basis function among `terms` is linearly
/// independent of the rest, via the numerical rank of their sample matrix on
/// a fixed pseudo-random grid in `[-1, 1]^d`.
fn check_rank_one_independence(terms: &[HsTerm]) -> Result<()> {
    let functions: Vec<&BasisFunction> = terms
        .iter()
        .filter_map(|t| match &t.psi {
            ScalarKernelSpec::RankOneSet { functions, .. } => Some(functions.iter()),
            _ => None,
        })
        .flatten()
        .collect();
    if functions.is_empty() {
        return Ok(());
    }
    let d = functions[0].input_dim();
    let count = functions.len();
    let rows = (8 * count).max(64);
    let mut rng = SimRng::new(0x005e_ed0f_ba5e);
    let grid: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect())
        .collect();
    let phi = DMatrix::from_fn(rows, count, |i, j| functions[j].eval(&grid[i]));
    let sv = phi.singular_values();
    let max = sv.max();
    let rank = sv.iter().filter(|s| **s > INDEPENDENCE_TOL * max).count();
    if rank < count {
        return Err(Error::DependentBasis(format!(
            "{count} rank-one functions span only {rank} dimensions"
        )));
    }
    Ok(())
}

/// `H_K ⪯ H_G` for `K = Σ_{j≤n} B_j Ψ_j`, `G = Σ_{j≤m} C_j Ψ_j`: holds iff
/// `B_j = C_j` for every `j ≤ n`.
///
/// Any spec with a finite Hilbert–Schmidt rewrite is accepted (sums of
/// Gaussian and polynomial kernels included); the scalar parts of `K` must be
/// a prefix of those of `G`.
pub fn check_finite_hs(k: &KernelSpec, g: &KernelSpec) -> Result<RefinementVerdict> {
    let kt = finite_hs_terms(k, "K")?;
    let gt = finite_hs_terms(g, "G")?;
    check_hs_terms(&kt, &gt)
}

pub(crate) fn check_hs_terms(kt: &[HsTerm], gt: &[HsTerm]) -> Result<RefinementVerdict> {
    let (n, m) = (kt.len(), gt.len());
    if m < n {
        return Err(Error::NotPrefix(format!("K has {n} terms but G only {m}")));
    }
    for (j, (a, b)) in kt.iter().zip(gt).enumerate() {
        if a.psi != b.psi {
            return Err(Error::NotPrefix(format!("scalar kernel {} differs", j + 1)));
        }
    }
    if let (Some(a), Some(b)) = (kt.first(), gt.first()) {
        if a.b.dim() != b.b.dim() {
            return Err(Error::DimMismatch {
                expected: a.b.dim(),
                got: b.b.dim(),
            });
        }
    }
    for (j, t) in kt.iter().enumerate() {
        ensure_invertible(&t.b, &format!("B_{}", j + 1))?;
    }
    for (j, t) in gt.iter().enumerate() {
        ensure_invertible(&t.b, &format!("C_{}", j + 1))?;
    }
    check_rank_one_independence(gt)?;

    let characterization = "finite Hilbert–Schmidt: B_j = C_j for every term of K".to_string();
    for (j, (a, b)) in kt.iter().zip(gt).enumerate() {
        let diff = a.b.sub(&b.b)?.frobenius_norm();
        if diff > EQ_TOL * a.b.frobenius_norm().max(1.0) {
            return Ok(RefinementVerdict {
                holds: Some(false),
                nontrivial: None,
                characterization,
                witness: format!("B_{0} != C_{0} (Frobenius distance {diff:e})", j + 1),
            });
        }
    }
    Ok(RefinementVerdict {
        holds: Some(true),
        nontrivial: Some(m > n),
        characterization,
        witness: format!(
            "all {n} coefficient matrices of K match G; G has {} further term(s)",
            m - n
        ),
    })
}

/// Finite-dimensional kernels `K = Φ_nᵀ A Φ_n`, `G = Φ_mᵀ B Φ_m` on shared
/// functions `φ_1..φ_m`: holds iff `B⁻¹` restricted to the leading `n×n`
/// block equals `A⁻¹`.
pub fn check_finite_dim(a: &SymMatrix, b: &SymMatrix) -> Result<RefinementVerdict> {
    let (n, m) = (a.dim(), b.dim());
    if m < n {
        return Err(Error::DimOrder { n, m });
    }
    ensure_invertible(a, "A")?;
    ensure_invertible(b, "B")?;
    let a_inv = a
        .as_matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotInvertible("A".into()))?;
    let b_inv = b
        .as_matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotInvertible("B".into()))?;
    let block = b_inv.view((0, 0), (n, n));
    let diff = (block - &a_inv).amax();
    let holds = diff <= 1e-9 * a_inv.amax().max(1.0);
    Ok(RefinementVerdict {
        holds: Some(holds),
        nontrivial: holds.then_some(m > n),
        characterization: "finite-dimensional: leading block of B⁻¹ equals A⁻¹".into(),
        witness: if holds {
            format!("leading {n}x{n} block of B⁻¹ matches A⁻¹; m = {m}")
        } else {
            format!("leading block of B⁻¹ differs from A⁻¹ by {diff:e}")
        },
    })
}

fn rank_one_as_hs(spec: &ScalarKernelSpec) -> Option<Vec<HsTerm>> {
    match spec {
        ScalarKernelSpec::RankOneSet { functions, .. } => Some(
            functions
                .iter()
                .enumerate()
                .map(|(j, f)| HsTerm {
                    b: SymMatrix::from_diagonal(&[spec.weight(j)]),
                    psi: ScalarKernelSpec::rank_one(vec![f.clone()]),
                })
                .collect(),
        ),
        _ => None,
    }
}

/// Transformation kernels sharing one map sequence refine each other iff the
/// scalar base kernels do. Rank-one-set bases are decided as scalar finite
/// Hilbert–Schmidt kernels; other bases leave the verdict open.
pub fn check_transformation(k: &KernelSpec, g: &KernelSpec) -> Result<RefinementVerdict> {
    let (
        KernelSpec::Transformation { base: kb, maps: km },
        KernelSpec::Transformation { base: gb, maps: gm },
    ) = (k, g)
    else {
        return Err(Error::Unsupported("check_transformation needs two transformation kernels".into()));
    };
    k.validate()?;
    g.validate()?;
    if km != gm {
        return Err(Error::MapMismatch);
    }
    if kb == gb {
        return Ok(RefinementVerdict {
            holds: Some(true),
            nontrivial: Some(false),
            characterization: "transformation: reduced to the scalar base kernels".into(),
            witness: "identical scalar base kernels".into(),
        });
    }
    if let (Some(kt), Some(gt)) = (rank_one_as_hs(kb), rank_one_as_hs(gb)) {
        let mut v = check_hs_terms(&kt, &gt)?;
        v.characterization = "transformation: reduced to scalar rank-one kernels, B_j = C_j".into();
        return Ok(v);
    }
    Ok(RefinementVerdict {
        holds: None,
        nontrivial: None,
        characterization: "transformation: reduced to the scalar base kernels".into(),
        witness: "reduced to scalar refinement of the base kernels, undecided".into(),
    })
}
