//! Refinement verdicts for nested kernel pairs across the supported families,
//! with the numerical norm oracle alongside where it applies.
//!
//!     cargo run --example refinement_checks

use opkern::kernels::{BasisFunction, HsTerm, KernelSpec, ScalarKernelSpec, TiAtom};
use opkern::matcore::SymMatrix;
use opkern::refinement::{check_refinement, default_oracle, measure_precedes, SymbolicMeasure};

fn report(label: &str, k: &KernelSpec, g: &KernelSpec) -> opkern::Result<()> {
    let v = check_refinement(k, g)?;
    let oracle = default_oracle(k, g, 7).map_or_else(|e| format!("n/a ({e})"), |o| o.to_string());
    println!("{label}");
    println!("  holds {:?}, nontrivial {:?}, oracle {oracle}", v.holds, v.nontrivial);
    println!("  {}: {}", v.characterization, v.witness);
    Ok(())
}

fn main() -> opkern::Result<()> {
    let b = SymMatrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 0.6]])?;
    let c = SymMatrix::from_rows(&[vec![0.4, 0.0], vec![0.0, 0.9]])?;
    let term = |b: &SymMatrix, f: BasisFunction| HsTerm {
        b: b.clone(),
        psi: ScalarKernelSpec::rank_one(vec![f]),
    };
    let x = BasisFunction::Monomial { powers: vec![1] };
    let cos = BasisFunction::Cosine { freq: vec![2.0] };
    let k = KernelSpec::FiniteHs {
        terms: vec![term(&b, x.clone())],
    };
    let g = KernelSpec::FiniteHs {
        terms: vec![term(&b, x.clone()), term(&c, cos)],
    };
    report("finite HS, extra term", &k, &g)?;
    let changed = KernelSpec::FiniteHs {
        terms: vec![term(&c, x)],
    };
    report("finite HS, coefficient changed", &k, &changed)?;

    let cubic = KernelSpec::PolynomialPsd {
        t: b.clone(),
        coeffs: vec![1.0, 3.0, 3.0, 1.0],
    };
    let gauss = KernelSpec::GaussianPsd { s: b.clone(), width: 1.0 };
    report("gaussian vs gaussian + cubic", &gauss, &KernelSpec::sum(gauss.clone(), cubic))?;

    let atom = |t: f64, a: &SymMatrix| TiAtom { t: vec![t], a: a.clone() };
    let ti_k = KernelSpec::DiscreteTi {
        atoms: vec![atom(1.0, &b)],
    };
    let ti_g = KernelSpec::DiscreteTi {
        atoms: vec![atom(1.0, &b), atom(2.5, &c)],
    };
    report("discrete translation invariant, extra atom", &ti_k, &ti_g)?;

    report(
        "hessian kernels, same width",
        &KernelSpec::HessianGaussian { width: 1.0, dim: 2 },
        &KernelSpec::HessianGaussian { width: 1.0, dim: 2 },
    )?;

    let mu = SymbolicMeasure::gaussian(1.0, 1.0);
    let nu = SymbolicMeasure::gaussian(1.0, 1.0).with_atom(vec![0.5], opkern::refinement::AtomWeight::Scalar(0.2));
    println!("gaussian measure ⪯ same plus an atom: {}", measure_precedes(&mu, &nu)?);
    Ok(())
}
