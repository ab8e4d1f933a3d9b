//! Smith normal form over the integers, with the full transformation
//! certificate U · A · V = S.
//!
//! The decomposition is what turns "finite-index sublattice" into numbers:
//! the invariant factors of a basis matrix multiply to the index, and each
//! quotient Z^n / A·Z^n splits as a product of cyclic groups of those
//! orders.

use finquot::matrix::{smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

fn check(a: &IntMatrix) -> finquot::Result<Vec<BigInt>> {
    let dec = smith_normal_form(a);
    // The certificate: exact matrix identity, both transforms unimodular,
    // and the diagonal entries divide in sequence.
    let lhs = dec.u.mul(a)?.mul(&dec.v)?;
    assert_eq!(lhs, dec.s, "U·A·V must equal S exactly");
    assert!(dec.u.determinant()?.abs().is_one(), "U must be unimodular");
    assert!(dec.v.determinant()?.abs().is_one(), "V must be unimodular");
    let diag = dec.diagonal();
    for w in diag.windows(2) {
        if w[0].is_zero() {
            assert!(w[1].is_zero(), "zeros may only trail");
        } else {
            assert!((&w[1] % &w[0]).is_zero(), "each entry divides the next");
        }
    }
    Ok(diag)
}

fn main() -> finquot::Result<()> {
    // A full-rank lattice basis. Its invariant factors are 2, 2, 156, so
    // Z^3 / A·Z^3 is Z/2 x Z/2 x Z/156 of order 624 = |det A|.
    let a = IntMatrix::from_i64_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
    let diag = check(&a)?;
    println!("invariant factors of the lattice basis: {:?}", diag);
    assert_eq!(
        diag,
        vec![BigInt::from(2), BigInt::from(2), BigInt::from(156)]
    );
    let det = a.determinant()?.abs();
    let product: BigInt = diag.iter().product();
    println!("product {} = |det| {}", product, det);
    assert_eq!(product, det);

    // A rank-deficient rectangular matrix: trailing zeros record the
    // infinite part of the cokernel.
    let b = IntMatrix::from_i64_rows(&[&[2, 4, 6], &[4, 8, 12]]);
    let diag = check(&b)?;
    println!("rank-1 rectangular matrix: {:?}", diag);
    assert_eq!(diag, vec![BigInt::from(2), BigInt::zero()]);

    // Large entries stay exact: scale the lattice by 10^12 and the factors
    // scale with it.
    let scale = BigInt::from(1_000_000_000_000i64);
    let mut big = IntMatrix::zero(3, 3);
    for r in 0..3 {
        for c in 0..3 {
            big.set(r, c, a.get(r, c) * &scale);
        }
    }
    let diag = check(&big)?;
    println!("scaled by 10^12: {:?}", diag);
    assert_eq!(diag[2], BigInt::from(156) * &scale);

    println!("\nall decompositions verified: U·A·V = S, U,V unimodular, divisibility chain holds");
    Ok(())
}
