//! Operator-valued kernel families, Gram assembly, and scalarization.
//!
//! A kernel `K(x, y)` returns an `n×n` real matrix; it is the transpose of
//! `K(y, x)`. Functions in the RKHS are spanned by `K(x, ·)ξ`, so the value
//! at `y` of `K(x, ·)ξ` is `eval(x, y) · ξ`.
//!
//! Specs serialize to JSON with a `"family"` tag; matrices are row-major
//! nested arrays. See `docs/formats.md` at the workspace root.

mod hessian;
mod scalar;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{is_psd, SymMatrix};

pub use hessian::{block_kernel, hessian_blocks, HessianBlocks};
pub use scalar::{binomial, BasisFunction, ScalarKernelSpec};

/// PSD tolerance applied to matrix parameters when a spec is loaded.
const PARAM_PSD_TOL: f64 = 1e-10;

fn default_width() -> f64 {
    1.0
}

/// One term `B_j Ψ_j(x, y)` of a finite Hilbert–Schmidt kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsTerm {
    pub b: SymMatrix,
    pub psi: ScalarKernelSpec,
}

/// One atom `cos((x−y)·t) A` of a discrete translation-invariant kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiAtom {
    pub t: Vec<f64>,
    pub a: SymMatrix,
}

/// Affine input map `x ↦ M x + b` with `M` of shape `e×d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn identity(d: usize) -> Self {
        AffineMap {
            matrix: (0..d)
                .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            offset: vec![0.0; d],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn output_dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| scalar::dot(row, x) + b)
            .collect()
    }
}

/// The operator-valued kernel families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `S exp(−‖x−y‖²/(2 width²))`.
    GaussianPsd {
        s: SymMatrix,
        #[serde(default = "default_width")]
        width: f64,
    },
    /// `T Σ_k c_k (x·y)^k`.
    PolynomialPsd { t: SymMatrix, coeffs: Vec<f64> },
    /// `Σ_j B_j Ψ_j(x, y)`.
    FiniteHs { terms: Vec<HsTerm> },
    /// `Σ_j cos((x−y)·t_j) A_j`.
    DiscreteTi { atoms: Vec<TiAtom> },
    /// `∇²_{xy}` of the Gaussian; output dimension equals `dim`.
    HessianGaussian {
        #[serde(default = "default_width")]
        width: f64,
        dim: usize,
    },
    /// `[[k, (∇_y k)ᵀ], [∇_x k, ∇²_{xy} k]]` of the Gaussian; output dimension `dim + 1`.
    HessianBlockGaussian {
        #[serde(default = "default_width")]
        width: f64,
        dim: usize,
    },
    /// `[k(T_c x, T_r y)]` at row `r`, column `c`; one output per map.
    Transformation {
        base: ScalarKernelSpec,
        maps: Vec<AffineMap>,
    },
    Sum {
        left: Box<KernelSpec>,
        right: Box<KernelSpec>,
    },
}

impl KernelSpec {
    pub fn sum(left: KernelSpec, right: KernelSpec) -> Self {
        KernelSpec::Sum {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: KernelSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("kernel specs always serialize")
    }

    /// Output dimension `n` (size of each kernel value).
    pub fn output_dim(&self) -> usize {
        match self {
            KernelSpec::GaussianPsd { s, .. } => s.dim(),
            KernelSpec::PolynomialPsd { t, .. } => t.dim(),
            KernelSpec::FiniteHs { terms } => terms.first().map_or(0, |t| t.b.dim()),
            KernelSpec::DiscreteTi { atoms } => atoms.first().map_or(0, |a| a.a.dim()),
            KernelSpec::HessianGaussian { dim, .. } => *dim,
            KernelSpec::HessianBlockGaussian { dim, .. } => dim + 1,
            KernelSpec::Transformation { maps, .. } => maps.len(),
            KernelSpec::Sum { left, .. } => left.output_dim(),
        }
    }

    /// Input dimension `d` if the parameters pin it down.
    pub fn input_dim(&self) -> Option<usize> {
        match self {
            KernelSpec::GaussianPsd { .. } | KernelSpec::PolynomialPsd { .. } => None,
            KernelSpec::FiniteHs { terms } => terms.iter().find_map(|t| t.psi.input_dim()),
            KernelSpec::DiscreteTi { atoms } => atoms.first().map(|a| a.t.len()),
            KernelSpec::HessianGaussian { dim, .. } | KernelSpec::HessianBlockGaussian { dim, .. } => {
                Some(*dim)
            }
            KernelSpec::Transformation { maps, .. } => maps.first().map(AffineMap::input_dim),
            KernelSpec::Sum { left, right } => left.input_dim().or(right.input_dim()),
        }
    }

    /// Structural checks: positive widths, PSD matrix parameters, consistent dimensions.
    pub fn validate(&self) -> Result<()> {
        let psd = |m: &SymMatrix, what: &str| -> Result<()> {
            if !is_psd(m, PARAM_PSD_TOL) {
                return Err(Error::InvalidParameter(format!("{what} is not PSD")));
            }
            Ok(())
        };
        let width_ok = |w: f64| -> Result<()> {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParameter(format!("width {w} must be positive")));
            }
            Ok(())
        };
        match self {
            KernelSpec::GaussianPsd { s, width } => {
                width_ok(*width)?;
                psd(s, "S")?;
            }
            KernelSpec::PolynomialPsd { t, coeffs } => {
                psd(t, "T")?;
                ScalarKernelSpec::Polynomial {
                    coeffs: coeffs.clone(),
                }
                .validate()?;
            }
            KernelSpec::FiniteHs { terms } => {
                let first = terms
                    .first()
                    .ok_or_else(|| Error::InvalidParameter("finite HS kernel has no terms".into()))?;
                let n = first.b.dim();
                let d = self.input_dim();
                for term in terms {
                    if term.b.dim() != n {
                        return Err(Error::DimMismatch {
                            expected: n,
                            got: term.b.dim(),
                        });
                    }
                    psd(&term.b, "B_j")?;
                    term.psi.validate()?;
                    if let (Some(d), Some(dj)) = (d, term.psi.input_dim()) {
                        if d != dj {
                            return Err(Error::DimMismatch { expected: d, got: dj });
                        }
                    }
                }
            }
            KernelSpec::DiscreteTi { atoms } => {
                let first = atoms
                    .first()
                    .ok_or_else(|| Error::InvalidParameter("discrete TI kernel has no atoms".into()))?;
                for atom in atoms {
                    if atom.a.dim() != first.a.dim() {
                        return Err(Error::DimMismatch {
                            expected: first.a.dim(),
                            got: atom.a.dim(),
                        });
                    }
                    if atom.t.len() != first.t.len() {
                        return Err(Error::DimMismatch {
                            expected: first.t.len(),
                            got: atom.t.len(),
                        });
                    }
                    psd(&atom.a, "A_j")?;
                }
            }
            KernelSpec::HessianGaussian { width, dim } | KernelSpec::HessianBlockGaussian { width, dim } => {
                width_ok(*width)?;
                if *dim == 0 {
                    return Err(Error::InvalidParameter("hessian kernel needs dim ≥ 1".into()));
                }
            }
            KernelSpec::Transformation { base, maps } => {
                base.validate()?;
                let first = maps
                    .first()
                    .ok_or_else(|| Error::InvalidParameter("transformation kernel has no maps".into()))?;
                let (d, e) = (first.input_dim(), first.output_dim());
                for map in maps {
                    if map.output_dim() != e || map.offset.len() != e {
                        return Err(Error::DimMismatch {
                            expected: e,
                            got: map.output_dim(),
                        });
                    }
                    if map.matrix.iter().any(|row| row.len() != d) {
                        return Err(Error::InvalidParameter("ragged map matrix".into()));
                    }
                }
                if let Some(be) = base.input_dim() {
                    if be != e {
                        return Err(Error::DimMismatch { expected: be, got: e });
                    }
                }
            }
            KernelSpec::Sum { left, right } => {
                left.validate()?;
                right.validate()?;
                if left.output_dim() != right.output_dim() {
                    return Err(Error::DimMismatch {
                        expected: left.output_dim(),
                        got: right.output_dim(),
                    });
                }
                if let (Some(a), Some(b)) = (left.input_dim(), right.input_dim()) {
                    if a != b {
                        return Err(Error::DimMismatch { expected: a, got: b });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_inputs(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != y.len() {
            return Err(Error::DimMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        if let Some(d) = self.input_dim() {
            if x.len() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
        }
        Ok(())
    }

    /// `K(x, y)` as an `n×n` matrix. Satisfies `eval(x, y) = eval(y, x)ᵀ`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
        self.check_inputs(x, y)?;
        Ok(self.eval_unchecked(x, y))
    }

    fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> DMatrix<f64> {
        match self {
            KernelSpec::GaussianPsd { s, width } => s.as_matrix() * scalar::gaussian(x, y, *width),
            KernelSpec::PolynomialPsd { t, coeffs } => {
                t.as_matrix()
                    * ScalarKernelSpec::Polynomial {
                        coeffs: coeffs.clone(),
                    }
                    .eval(x, y)
            }
            KernelSpec::FiniteHs { terms } => {
                let n = self.output_dim();
                terms.iter().fold(DMatrix::zeros(n, n), |acc, term| {
                    acc + term.b.as_matrix() * term.psi.eval(x, y)
                })
            }
            KernelSpec::DiscreteTi { atoms } => {
                let n = self.output_dim();
                atoms.iter().fold(DMatrix::zeros(n, n), |acc, atom| {
                    let phase: f64 = atom
                        .t
                        .iter()
                        .zip(x.iter().zip(y))
                        .map(|(t, (a, b))| (a - b) * t)
                        .sum();
                    acc + atom.a.as_matrix() * phase.cos()
                })
            }
            KernelSpec::HessianGaussian { width, dim } => hessian_blocks(*width, *dim, x, y).cross,
            KernelSpec::HessianBlockGaussian { width, dim } => block_kernel(*width, *dim, x, y),
            KernelSpec::Transformation { base, maps } => {
                let tx: Vec<Vec<f64>> = maps.iter().map(|m| m.apply(x)).collect();
                let ty: Vec<Vec<f64>> = maps.iter().map(|m| m.apply(y)).collect();
                let p = maps.len();
                DMatrix::from_fn(p, p, |r, c| base.eval(&tx[c], &ty[r]))
            }
            KernelSpec::Sum { left, right } => {
                left.eval_unchecked(x, y) + right.eval_unchecked(x, y)
            }
        }
    }

    /// Block Gram matrix over `points`, sample-major: block `(j, k)` is `K(x_k, x_j)`.
    pub fn gram(&self, points: &[Vec<f64>]) -> Result<SymMatrix> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("gram needs at least one point".into()));
        }
        for p in points {
            self.check_inputs(&points[0], p)?;
        }
        let n = self.output_dim();
        let m = points.len();
        let mut g = DMatrix::zeros(m * n, m * n);
        for j in 0..m {
            for k in j..m {
                let block = self.eval_unchecked(&points[k], &points[j]);
                g.view_mut((j * n, k * n), (n, n)).copy_from(&block);
                if k != j {
                    g.view_mut((k * n, j * n), (n, n)).copy_from(&block.transpose());
                }
            }
        }
        // Diagonal blocks K(x, x) are symmetric analytically; remove rounding asymmetry.
        let sym = (&g + g.transpose()) * 0.5;
        SymMatrix::new(sym)
    }

    /// Cross-Gram with block `(t, j) = K(support_j, targets_t)`; multiplying by the
    /// stacked coefficients gives the stacked values at `targets`.
    pub fn cross_gram(&self, support: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<DMatrix<f64>> {
        let n = self.output_dim();
        let mut c = DMatrix::zeros(targets.len() * n, support.len() * n);
        for (t, z) in targets.iter().enumerate() {
            for (j, x) in support.iter().enumerate() {
                self.check_inputs(x, z)?;
                let block = self.eval_unchecked(x, z);
                c.view_mut((t * n, j * n), (n, n)).copy_from(&block);
            }
        }
        Ok(c)
    }

    /// Scalarization on the extended input space: `(K(x, y) ξ, η)`.
    pub fn scalarize(&self, x: &[f64], xi: &[f64], y: &[f64], eta: &[f64]) -> Result<f64> {
        let n = self.output_dim();
        for v in [xi, eta] {
            if v.len() != n {
                return Err(Error::DimMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        let k = self.eval(x, y)?;
        let kx = k * DVector::from_column_slice(xi);
        Ok(kx.dot(&DVector::from_column_slice(eta)))
    }

    /// Whether the Gram over pairwise distinct `points` is strictly positive definite:
    /// `λ_min > 1e-10 · max(1, λ_max)`.
    pub fn strict_pd_check(&self, points: &[Vec<f64>]) -> Result<bool> {
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(Error::DuplicatePoints(i, j));
                }
            }
        }
        let e = self.gram(points)?.eig();
        Ok(e.min() > 1e-10 * e.max().max(1.0))
    }

    /// Rewrites the spec as finite Hilbert–Schmidt terms `Σ_j B_j Ψ_j`, when the
    /// family admits that form. Polynomial kernels expand into one term per
    /// nonzero coefficient `c_k T (x·y)^k`; translation-invariant atoms become
    /// `A_j (cos t·x cos t·y + sin t·x sin t·y)`.
    pub fn to_finite_hs(&self) -> Option<Vec<HsTerm>> {
        match self {
            KernelSpec::GaussianPsd { s, width } => Some(vec![HsTerm {
                b: s.clone(),
                psi: ScalarKernelSpec::Gaussian { width: *width },
            }]),
            KernelSpec::PolynomialPsd { t, coeffs } => Some(
                coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c > 0.0)
                    .map(|(k, c)| {
                        let mut unit = vec![0.0; k + 1];
                        unit[k] = 1.0;
                        HsTerm {
                            b: t.scaled(*c),
                            psi: ScalarKernelSpec::Polynomial { coeffs: unit },
                        }
                    })
                    .collect(),
            ),
            KernelSpec::FiniteHs { terms } => Some(terms.clone()),
            KernelSpec::DiscreteTi { atoms } => Some(
                atoms
                    .iter()
                    .map(|atom| {
                        let mut functions = vec![BasisFunction::Cosine { freq: atom.t.clone() }];
                        if atom.t.iter().any(|v| *v != 0.0) {
                            functions.push(BasisFunction::Sine { freq: atom.t.clone() });
                        }
                        HsTerm {
                            b: atom.a.clone(),
                            psi: ScalarKernelSpec::rank_one(functions),
                        }
                    })
                    .collect(),
            ),
            KernelSpec::Sum { left, right } => {
                let mut terms = left.to_finite_hs()?;
                terms.extend(right.to_finite_hs()?);
                Some(terms)
            }
            KernelSpec::HessianGaussian { .. }
            | KernelSpec::HessianBlockGaussian { .. }
            | KernelSpec::Transformation { .. } => None,
        }
    }

    /// Upper bound on `dim H_K` for inputs in ℝ^d; `None` when infinite.
    pub fn finite_rkhs_dim(&self, d: usize) -> Option<usize> {
        if let KernelSpec::Transformation { base, maps } = self {
            let e = maps.first().map_or(d, AffineMap::output_dim);
            return base.rkhs_dim(e);
        }
        let terms = self.to_finite_hs()?;
        let mut total = 0;
        for term in &terms {
            let rank = term.b.eig().range_basis(crate::matcore::RANK_TOL).ncols();
            total += rank * term.psi.rkhs_dim(d)?;
        }
        Some(total)
    }
}
