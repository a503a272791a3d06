//! Numerical refinement oracle by norm-preserving minimal-norm interpolation.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::experiments::SimRng;
use crate::kernels::KernelSpec;
use crate::matcore::{pinv_on_range, RANK_TOL};

const DRAWS: usize = 20;
const NORM_TOL: f64 = 1e-6;

/// Draws `f = Σ_j K(x_j, ·) c_j` over `probe` and compares `‖f‖_K` with the
/// `H_G`-norm of the minimal-norm `H_G` interpolant of `f` on `dense`.
///
/// When `dense` pins down `H_G` (evaluation there is injective), that
/// interpolant is `f` itself whenever `f ∈ H_G`; so `H_K ⪯ H_G` exactly when
/// every draw interpolates consistently and the two norms agree to `1e-6`
/// relative.
pub fn refinement_oracle(
    k: &KernelSpec,
    g: &KernelSpec,
    probe: &[Vec<f64>],
    dense: &[Vec<f64>],
    rng: &mut SimRng,
) -> Result<bool> {
    k.validate()?;
    g.validate()?;
    let n = k.output_dim();
    if g.output_dim() != n {
        return Err(Error::DimMismatch {
            expected: n,
            got: g.output_dim(),
        });
    }
    let d = dense
        .first()
        .or(probe.first())
        .map_or(0, Vec::len);
    if k.finite_rkhs_dim(d).is_none() {
        return Err(Error::NotFiniteDimensional("K".into()));
    }
    let dim_g = g
        .finite_rkhs_dim(d)
        .ok_or_else(|| Error::NotFiniteDimensional("G".into()))?;
    if dense.len() * n < dim_g {
        return Err(Error::InsufficientPoints {
            needed: dim_g,
            got: dense.len() * n,
        });
    }
    if probe.is_empty() {
        return Err(Error::InsufficientPoints { needed: 1, got: 0 });
    }

    let gram_k = k.gram(probe)?;
    let cross = k.cross_gram(probe, dense)?;
    let gram_g = g.gram(dense)?;
    let g_pinv = pinv_on_range(&gram_g, RANK_TOL);

    for _ in 0..DRAWS {
        let c = DVector::from_fn(probe.len() * n, |_, _| rng.uniform(-1.0, 1.0));
        let norm_k = c.dot(&(gram_k.as_matrix() * &c));
        let values = &cross * &c;
        let coeffs = g_pinv.as_matrix() * &values;
        let reproduced = gram_g.as_matrix() * &coeffs;
        if (&reproduced - &values).norm() > NORM_TOL * values.norm().max(f64::MIN_POSITIVE) {
            return Ok(false);
        }
        let norm_g = values.dot(&coeffs);
        if (norm_k - norm_g).abs() > NORM_TOL * norm_k.abs().max(norm_g.abs()).max(f64::MIN_POSITIVE) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs [`refinement_oracle`] on pseudo-random probe and dense point sets in
/// `[-1, 1]^d` sized from `dim H_G`.
pub fn default_oracle(k: &KernelSpec, g: &KernelSpec, seed: u64) -> Result<bool> {
    let d = k.input_dim().or(g.input_dim()).unwrap_or(1);
    let n = g.output_dim().max(1);
    let dim_g = g
        .finite_rkhs_dim(d)
        .ok_or_else(|| Error::NotFiniteDimensional("G".into()))?;
    let mut rng = SimRng::new(seed);
    let mut points = |count: usize| -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect())
            .collect()
    };
    let probe = points(6);
    let dense = points(dim_g.div_ceil(n) + 10);
    refinement_oracle(k, g, &probe, &dense, &mut rng)
}
