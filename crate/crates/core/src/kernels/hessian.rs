//! Closed-form derivatives of the Gaussian kernel.

use nalgebra::{DMatrix, DVector};

use super::scalar::gaussian;

/// `k`, `∇_x k` and `∇²_{xy} k` of `k(x,y) = exp(−‖x−y‖²/(2w²))` at one pair.
#[derive(Clone, Debug)]
pub struct HessianBlocks {
    pub value: f64,
    pub grad_x: DVector<f64>,
    pub cross: DMatrix<f64>,
}

/// With `u = (x−y)/w²`: `∇_x k = −u k`, `∇_y k = u k`, `∇²_{xy} k = (I/w² − uuᵀ) k`.
pub fn hessian_blocks(width: f64, d: usize, x: &[f64], y: &[f64]) -> HessianBlocks {
    let w2 = width * width;
    let k = gaussian(x, y, width);
    let u = DVector::from_iterator(d, x.iter().zip(y).map(|(a, b)| (a - b) / w2));
    let cross = (DMatrix::identity(d, d) / w2 - &u * u.transpose()) * k;
    HessianBlocks {
        value: k,
        grad_x: -u * k,
        cross,
    }
}

/// The `(d+1)×(d+1)` block kernel `[[k, (∇_y k)ᵀ], [∇_x k, ∇²_{xy} k]]`.
pub fn block_kernel(width: f64, d: usize, x: &[f64], y: &[f64]) -> DMatrix<f64> {
    let h = hessian_blocks(width, d, x, y);
    let mut out = DMatrix::zeros(d + 1, d + 1);
    out[(0, 0)] = h.value;
    for i in 0..d {
        // ∇_y k = −∇_x k for a translation-invariant kernel.
        out[(0, i + 1)] = -h.grad_x[i];
        out[(i + 1, 0)] = h.grad_x[i];
    }
    out.view_mut((1, 1), (d, d)).copy_from(&h.cross);
    out
}
