//! Builds one kernel of each family, prints its value at a point pair and the
//! smallest Gram eigenvalue over a few points, and shows the JSON form.
//!
//!     cargo run --example kernel_families

use opkern::kernels::{AffineMap, BasisFunction, HsTerm, KernelSpec, ScalarKernelSpec, TiAtom};
use opkern::matcore::SymMatrix;

fn main() -> opkern::Result<()> {
    let s = SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]])?;
    let families = vec![
        ("gaussian_psd", KernelSpec::GaussianPsd { s: s.clone(), width: 0.8 }),
        (
            "polynomial_psd",
            KernelSpec::PolynomialPsd {
                t: s.clone(),
                coeffs: vec![1.0, 3.0, 3.0, 1.0],
            },
        ),
        (
            "finite_hs",
            KernelSpec::FiniteHs {
                terms: vec![
                    HsTerm {
                        b: s.clone(),
                        psi: ScalarKernelSpec::Gaussian { width: 0.5 },
                    },
                    HsTerm {
                        b: SymMatrix::identity(2),
                        psi: ScalarKernelSpec::rank_one(vec![BasisFunction::Cosine { freq: vec![2.0, 0.0] }]),
                    },
                ],
            },
        ),
        (
            "discrete_ti",
            KernelSpec::DiscreteTi {
                atoms: vec![
                    TiAtom {
                        t: vec![1.0, 0.0],
                        a: s.clone(),
                    },
                    TiAtom {
                        t: vec![0.0, 2.0],
                        a: SymMatrix::identity(2),
                    },
                ],
            },
        ),
        ("hessian_gaussian", KernelSpec::HessianGaussian { width: 0.7, dim: 2 }),
        (
            "hessian_block_gaussian",
            KernelSpec::HessianBlockGaussian { width: 0.7, dim: 2 },
        ),
        (
            "transformation",
            KernelSpec::Transformation {
                base: ScalarKernelSpec::Gaussian { width: 1.0 },
                maps: vec![
                    AffineMap::identity(2),
                    AffineMap {
                        matrix: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
                        offset: vec![0.5, 0.0],
                    },
                ],
            },
        ),
    ];

    let (x, y) = ([0.2, -0.4], [0.5, 0.1]);
    let points: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![0.3, -0.2], vec![-0.7, 0.5], vec![0.9, 0.9]];
    for (name, spec) in &families {
        let k = spec.eval(&x, &y)?;
        let lmin = spec.gram(&points)?.min_eigenvalue();
        println!("{name} ({}×{}), λ_min(Gram) = {lmin:.3e}", k.nrows(), k.ncols());
        println!("{k:.4}");
    }
    let sum = KernelSpec::sum(families[0].1.clone(), families[1].1.clone());
    println!("sum kernel as JSON:\n{}", sum.to_json());
    Ok(())
}
