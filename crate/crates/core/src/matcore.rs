//! Symmetric-matrix primitives.
//!
//! [`SymMatrix`] is the carrier for every matrix-valued parameter in the crate
//! (kernel weights, Gram blocks, atom weights). The spectral helpers here all
//! go through a single deterministic eigendecomposition, so ranges, square
//! roots and restricted inverses agree with each other.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative eigenvalue cutoff below which a direction counts as outside the range.
pub const RANK_TOL: f64 = 1e-10;

/// A real symmetric square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

/// Eigendecomposition `M = Q diag(λ) Qᵀ` with eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct EigDecomp {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SymMatrix {
    /// Wraps `m`, rejecting non-square input and asymmetry above
    /// `1e-12 * max|entry|`. Accepted input is symmetrized exactly.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        let scale = m.amax();
        let asymmetry = (&m - m.transpose()).amax();
        if asymmetry > 1e-12 * scale {
            return Err(Error::Asymmetric { asymmetry });
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(SymMatrix(sym))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// `AᵀA` for an arbitrary (possibly rectangular) `A`.
    pub fn gram_of(a: &DMatrix<f64>) -> Self {
        let m = a.transpose() * a;
        SymMatrix((&m + m.transpose()) * 0.5)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SymMatrix(&self.0 * factor)
    }

    pub fn add(&self, other: &SymMatrix) -> Result<Self> {
        check_same_dim(self, other)?;
        Ok(SymMatrix(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<Self> {
        check_same_dim(self, other)?;
        Ok(SymMatrix(&self.0 - &other.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn eig(&self) -> EigDecomp {
        let se = self.0.clone().symmetric_eigen();
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &se.eigenvectors.column(src));
        }
        EigDecomp {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().min()
    }

    /// Relative Frobenius comparison: `‖self − other‖_F ≤ tol · max(1, ‖self‖_F)`.
    pub fn approx_eq(&self, other: &SymMatrix, tol: f64) -> bool {
        self.dim() == other.dim()
            && (&self.0 - &other.0).norm() <= tol * self.frobenius_norm().max(1.0)
    }
}

fn check_same_dim(a: &SymMatrix, b: &SymMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

impl EigDecomp {
    pub fn max(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Columns of `Q` whose eigenvalue is at least `rank_tol · λ_max`.
    pub fn range_basis(&self, rank_tol: f64) -> DMatrix<f64> {
        let cutoff = rank_tol * self.max();
        let cols: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&i| self.max() > 0.0 && self.eigenvalues[i] > cutoff)
            .collect();
        self.eigenvectors.select_columns(&cols)
    }

    /// `Q f(Λ) Qᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[j]);
        }
        let m = scaled * q.transpose();
        (&m + m.transpose()) * 0.5
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        SymMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// True iff `λ_min(M) ≥ −tol · max(1, λ_max(M))`.
pub fn is_psd(m: &SymMatrix, tol: f64) -> bool {
    if m.dim() == 0 {
        return true;
    }
    let e = m.eig();
    e.min() >= -tol * e.max().max(1.0)
}

/// The unique PSD square root. Slightly negative eigenvalues (within the PSD
/// tolerance) are clamped to zero.
pub fn psd_sqrt(m: &SymMatrix) -> Result<SymMatrix> {
    let e = m.eig();
    if m.dim() > 0 && e.min() < -RANK_TOL * e.max().max(1.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: e.min(),
        });
    }
    Ok(SymMatrix(e.reconstruct_with(|l| l.max(0.0).sqrt())))
}

/// Moore–Penrose pseudo-inverse of a PSD matrix; eigenvalues below
/// `rank_tol · λ_max` are treated as zero.
pub fn pinv_on_range(m: &SymMatrix, rank_tol: f64) -> SymMatrix {
    let e = m.eig();
    let lmax = e.max();
    if m.dim() == 0 || lmax <= 0.0 {
        return SymMatrix::zeros(m.dim());
    }
    let cutoff = rank_tol * lmax;
    SymMatrix(e.reconstruct_with(|l| if l > cutoff { 1.0 / l } else { 0.0 }))
}

/// Orthogonal projector onto `ran(M)`.
pub fn range_projector(m: &SymMatrix, rank_tol: f64) -> SymMatrix {
    let u = m.eig().range_basis(rank_tol);
    let p = &u * u.transpose();
    SymMatrix((&p + p.transpose()) * 0.5)
}

/// Decides `A ⪯ B`: `ran(A) ⊆ ran(B)` and `P_{B,A} B⁻¹ = A⁻¹` on `ran(A)`.
///
/// Both conditions are checked in an orthonormal basis `U` of `ran(A)`:
/// the range residual `‖(I − P_B) U‖` and the restricted inverses
/// `Uᵀ B⁺ U` vs `Uᵀ A⁺ U`, each relative to the scale of the quantity
/// compared. `tol` is both the rank cutoff and the comparison tolerance.
pub fn operator_order(a: &SymMatrix, b: &SymMatrix, tol: f64) -> Result<bool> {
    check_same_dim(a, b)?;
    let ea = a.eig();
    let eb = b.eig();
    let ua = ea.range_basis(tol);
    if ua.ncols() == 0 {
        // A = 0 precedes everything.
        return Ok(true);
    }
    let ub = eb.range_basis(tol);
    // Range inclusion: every column of U_A lies in span(U_B).
    let proj = &ub * (ub.transpose() * &ua);
    let range_residual = (&ua - proj).norm();
    if range_residual > tol.sqrt() {
        return Ok(false);
    }
    let a_inv = restricted_inverse(&ea, tol);
    let b_inv = restricted_inverse(&eb, tol);
    let lhs = ua.transpose() * &b_inv * &ua;
    let rhs = ua.transpose() * &a_inv * &ua;
    let scale = rhs.norm().max(lhs.norm()).max(1.0);
    Ok((lhs - rhs).norm() <= tol.sqrt() * scale)
}

fn restricted_inverse(e: &EigDecomp, tol: f64) -> DMatrix<f64> {
    let cutoff = tol * e.max();
    e.reconstruct_with(|l| if l > cutoff { 1.0 / l } else { 0.0 })
}
