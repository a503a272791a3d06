//! Random instance generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use opkern::experiments::SimRng;
use opkern::kernels::{AffineMap, BasisFunction, HsTerm, KernelSpec, ScalarKernelSpec, TiAtom};
use opkern::matcore::SymMatrix;

pub fn spd(rng: &mut SimRng, n: usize) -> SymMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| rng.uniform(-1.0, 1.0));
    SymMatrix::gram_of(&a).add(&SymMatrix::identity(n).scaled(0.1)).unwrap()
}

/// `Σ v_i v_iᵀ` over `rank` random vectors.
pub fn psd_of_rank(rng: &mut SimRng, dim: usize, rank: usize) -> SymMatrix {
    let r = DMatrix::from_fn(dim, rank, |_, _| rng.uniform(-1.0, 1.0));
    SymMatrix::new(&r * r.transpose()).unwrap()
}

pub fn points(rng: &mut SimRng, m: usize, d: usize, half_width: f64) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| (0..d).map(|_| rng.uniform(-half_width, half_width)).collect())
        .collect()
}

pub fn log_uniform(rng: &mut SimRng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.uniform(lo.log10(), hi.log10()))
}

pub const FAMILY_NAMES: [&str; 8] = [
    "gaussian_psd",
    "polynomial_psd",
    "finite_hs",
    "discrete_ti",
    "hessian_gaussian",
    "hessian_block_gaussian",
    "transformation",
    "sum",
];

/// One kernel of every family with output dimension `n` (`d` for the plain
/// Hessian kernel, `d + 1` for the block one) on `ℝ^d`.
pub fn all_families(rng: &mut SimRng, n: usize, d: usize) -> Vec<KernelSpec> {
    let gauss = KernelSpec::GaussianPsd {
        s: spd(rng, n),
        width: rng.uniform(0.4, 1.5),
    };
    let poly = KernelSpec::PolynomialPsd {
        t: spd(rng, n),
        coeffs: vec![1.0, 3.0, 3.0, 1.0],
    };
    let hs = KernelSpec::FiniteHs {
        terms: vec![
            HsTerm {
                b: spd(rng, n),
                psi: ScalarKernelSpec::Gaussian { width: 0.5 },
            },
            HsTerm {
                b: psd_of_rank(rng, n, 1),
                psi: ScalarKernelSpec::rank_one(vec![
                    BasisFunction::Monomial { powers: vec![1; d] },
                    BasisFunction::Cosine { freq: vec![1.3; d] },
                ]),
            },
        ],
    };
    let ti = KernelSpec::DiscreteTi {
        atoms: (0..3)
            .map(|_| TiAtom {
                t: (0..d).map(|_| rng.uniform(-2.0, 2.0)).collect(),
                a: spd(rng, n),
            })
            .collect(),
    };
    let transformation = KernelSpec::Transformation {
        base: ScalarKernelSpec::Gaussian { width: 1.0 },
        maps: (0..n)
            .map(|_| AffineMap {
                matrix: (0..d).map(|_| (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect()).collect(),
                offset: (0..d).map(|_| rng.uniform(-0.5, 0.5)).collect(),
            })
            .collect(),
    };
    let width = rng.uniform(0.5, 1.5);
    vec![
        gauss.clone(),
        poly.clone(),
        hs,
        ti,
        KernelSpec::HessianGaussian { width, dim: d },
        KernelSpec::HessianBlockGaussian { width, dim: d },
        transformation,
        KernelSpec::sum(gauss, poly),
    ]
}

/// Brute-force `A ⪯ B` straight from the definition: for each `ξ` find `η`
/// with `Bη = Aξ` (least squares through an SVD) and compare `(Aξ, ξ)` with
/// `(Bη, η)`. Both sides are quadratic in `ξ`, so checking `e_i` and
/// `e_i + e_j` covers every `ξ` by polarization.
pub fn brute_force_order(a: &SymMatrix, b: &SymMatrix) -> bool {
    let n = a.dim();
    let (am, bm) = (a.as_matrix(), b.as_matrix());
    let svd = bm.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-10 * smax.max(f64::MIN_POSITIVE);
    let mut probes = Vec::new();
    for i in 0..n {
        probes.push(DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 }));
        for j in i + 1..n {
            probes.push(DVector::from_fn(n, |k, _| if k == i || k == j { 1.0 } else { 0.0 }));
        }
    }
    let scale = am.norm().max(1.0);
    for xi in probes {
        let target = am * &xi;
        let eta = svd.solve(&target, eps).unwrap();
        if (bm * &eta - &target).norm() > 1e-6 * scale {
            return false;
        }
        let lhs = target.dot(&xi);
        let rhs = (bm * &eta).dot(&eta);
        if (lhs - rhs).abs() > 1e-6 * scale.max(rhs.abs()) {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Reflexive,
    Augmented,
    InvertibleUnequal,
    OverlappingAugmentation,
    RangeEscapes,
}

/// A random 4×4 PSD pair of the given construction.
pub fn order_pair(rng: &mut SimRng, kind: PairKind) -> (SymMatrix, SymMatrix) {
    const N: usize = 4;
    match kind {
        PairKind::Reflexive => {
            let r = 1 + (rng.next_u64() % 4) as usize;
            let a = psd_of_rank(rng, N, r);
            (a.clone(), a)
        }
        PairKind::Augmented => {
            // Generic ranges of total rank ≤ 4 meet only at zero.
            let r = 1 + (rng.next_u64() % 3) as usize;
            let s = 1 + (rng.next_u64() % (N - r) as u64) as usize;
            let a = psd_of_rank(rng, N, r);
            let c = psd_of_rank(rng, N, s);
            let b = a.add(&c).unwrap();
            (a, b)
        }
        PairKind::InvertibleUnequal => {
            let a = spd(rng, N);
            let mut b = spd(rng, N);
            if b.approx_eq(&a, 1e-12) {
                b = b.add(&SymMatrix::identity(N)).unwrap();
            }
            (a, b)
        }
        PairKind::OverlappingAugmentation => {
            let r = 2 + (rng.next_u64() % 2) as usize;
            let basis = DMatrix::from_fn(N, r, |_, _| rng.uniform(-1.0, 1.0));
            let a = SymMatrix::new(&basis * basis.transpose()).unwrap();
            let coef = DVector::from_fn(r, |_, _| rng.uniform(-1.0, 1.0));
            let v = &basis * coef;
            let b = a.add(&SymMatrix::new(&v * v.transpose()).unwrap()).unwrap();
            (a, b)
        }
        PairKind::RangeEscapes => {
            let r = 1 + (rng.next_u64() % 2) as usize;
            let a = psd_of_rank(rng, N, r);
            let b = psd_of_rank(rng, N, 2);
            (a, b)
        }
    }
}

/// Pool of scalar functions on `ℝ` used for random finite HS kernels.
pub fn function_pool() -> Vec<BasisFunction> {
    vec![
        BasisFunction::Monomial { powers: vec![0] },
        BasisFunction::Monomial { powers: vec![1] },
        BasisFunction::Cosine { freq: vec![2.0] },
        BasisFunction::Sine { freq: vec![3.0] },
        BasisFunction::Exponential { rate: vec![1.5] },
        BasisFunction::Monomial { powers: vec![3] },
    ]
}

/// A random nested pair of finite HS kernels on `ℝ` with rank-one `Ψ_j`.
/// `G` extends `K` by zero or more terms; when `satisfying` is false one
/// shared coefficient matrix is changed.
pub fn finite_hs_pair(rng: &mut SimRng, satisfying: bool) -> (KernelSpec, KernelSpec) {
    let n = 1 + (rng.next_u64() % 3) as usize;
    let mut pool = function_pool();
    // Fisher–Yates on the pool.
    for i in (1..pool.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        pool.swap(i, j);
    }
    let k_terms = 1 + (rng.next_u64() % 2) as usize;
    let extra = (rng.next_u64() % 3) as usize;
    let mut funcs = pool.into_iter();
    let terms: Vec<HsTerm> = (0..k_terms + extra)
        .map(|_| HsTerm {
            b: spd(rng, n),
            psi: ScalarKernelSpec::rank_one(vec![funcs.next().unwrap()]),
        })
        .collect();
    let k = KernelSpec::FiniteHs {
        terms: terms[..k_terms].to_vec(),
    };
    let mut g_terms = terms;
    if !satisfying {
        let j = (rng.next_u64() % k_terms as u64) as usize;
        let b = &g_terms[j].b;
        g_terms[j].b = match rng.next_u64() % 3 {
            0 => b.scaled(2.0),
            1 => b.scaled(0.5),
            _ => b.add(&psd_of_rank(rng, n, 1)).unwrap(),
        };
    }
    (k, KernelSpec::FiniteHs { terms: g_terms })
}

pub fn scalar_gaussian(width: f64, x: &[f64], y: &[f64]) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-d2 / (2.0 * width * width)).exp()
}

/// `[[k, (∇_y k)ᵀ], [∇_x k, ∇²_{xy} k]]` by central differences of the scalar Gaussian.
pub fn block_kernel_by_differences(width: f64, x: &[f64], y: &[f64], h: f64) -> DMatrix<f64> {
    let d = x.len();
    let k = |x: &[f64], y: &[f64]| scalar_gaussian(width, x, y);
    let shift = |v: &[f64], i: usize, s: f64| {
        let mut w = v.to_vec();
        w[i] += s;
        w
    };
    let mut out = DMatrix::zeros(d + 1, d + 1);
    out[(0, 0)] = k(x, y);
    for i in 0..d {
        out[(i + 1, 0)] = (k(&shift(x, i, h), y) - k(&shift(x, i, -h), y)) / (2.0 * h);
        out[(0, i + 1)] = (k(x, &shift(y, i, h)) - k(x, &shift(y, i, -h))) / (2.0 * h);
        for j in 0..d {
            let (xp, xm) = (shift(x, i, h), shift(x, i, -h));
            let (yp, ym) = (shift(y, j, h), shift(y, j, -h));
            out[(i + 1, j + 1)] = (k(&xp, &yp) - k(&xp, &ym) - k(&xm, &yp) + k(&xm, &ym)) / (4.0 * h * h);
        }
    }
    out
}
