//! The operator order `A ⪯ B` on a few hand-picked PSD matrices.
//!
//!     cargo run --example operator_order

use nalgebra::DMatrix;
use opkern::matcore::{operator_order, SymMatrix};

fn outer(v: &[f64]) -> SymMatrix {
    let v = DMatrix::from_column_slice(v.len(), 1, v);
    SymMatrix::new(&v * v.transpose()).unwrap()
}

fn main() -> opkern::Result<()> {
    let a = outer(&[1.0, 0.0, 0.0]);
    let c = outer(&[0.0, 1.0, 1.0]);
    let b = a.add(&c)?;
    let overlapping = a.add(&outer(&[2.0, 0.0, 0.0]))?;
    let invertible = SymMatrix::identity(3);

    let cases = [
        ("A ⪯ A", &a, &a),
        ("A ⪯ A + C, ranges meet at 0", &a, &b),
        ("A + C ⪯ A", &b, &a),
        ("A ⪯ A + 4A (same range)", &a, &overlapping),
        ("I ⪯ 2I", &invertible, &invertible.scaled(2.0)),
    ];
    for (label, lhs, rhs) in cases {
        println!("{label:32} {}", operator_order(lhs, rhs, 1e-10)?);
    }
    Ok(())
}
