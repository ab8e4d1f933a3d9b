//! Arbitrary-precision integer matrices, determinants, and the Smith normal
//! form with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major, `BigInt` entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "matrix data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for literals in tests and examples.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        IntMatrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .expect("literal rows are rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.get(i, j).is_one()
                    } else {
                        self.get(i, j).is_zero()
                    }
                })
            })
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Mismatch(format!(
                "matrix product {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix power for non-negative exponents, square matrices only.
    pub fn pow(&self, mut e: u64) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::Mismatch("power of non-square matrix".into()));
        }
        let mut acc = IntMatrix::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Apply to a column vector: `M * v`.
    pub fn apply(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::Mismatch(format!(
                "matrix {}x{} applied to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * &v[j])
                    .sum::<BigInt>()
            })
            .collect())
    }

    /// Row vector times matrix: `x * M`.
    pub fn apply_row(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.rows {
            return Err(Error::Mismatch(format!(
                "row vector of length {} times matrix {}x{}",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| &x[i] * self.get(i, j))
                    .sum::<BigInt>()
            })
            .collect())
    }

    /// Entry-wise Euclidean reduction into `[0, m)`; `m` must be positive.
    pub fn reduce_mod(&self, m: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mod_floor(m)).collect(),
        }
    }

    /// Exact integer determinant via fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Mismatch("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if sign < 0 { -det } else { det })
    }
}

/// Result of a Smith normal form computation: `u * a * v = s` with `u`, `v`
/// unimodular and `s` diagonal with a divisibility chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries of `s` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Smith normal form over the integers.
///
/// Deterministic: the pivot is always the first entry of minimal absolute
/// value in the remaining submatrix (row-major scan). Diagonal entries come
/// out non-negative and each divides the next.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let rows = a.rows();
    let cols = a.cols();
    let mut s = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    let n = rows.min(cols);
    for k in 0..n {
        loop {
            // Deterministic pivot: first minimal |nonzero| in the submatrix.
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if !s.get(i, j).is_zero() {
                        let better = match pivot {
                            None => true,
                            Some((pi, pj)) => s.get(i, j).abs() < s.get(pi, pj).abs(),
                        };
                        if better {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
            let (pi, pj) = match pivot {
                Some(p) => p,
                None => {
                    // Remaining submatrix is all zero; done at this k.
                    return finish(u, s, v, k);
                }
            };
            if pi != k {
                swap_rows(&mut s, &mut u, k, pi);
            }
            if pj != k {
                swap_cols(&mut s, &mut v, k, pj);
            }

            // Clear the pivot column and row by division with remainder.
            let mut dirty = false;
            for i in k + 1..rows {
                if !s.get(i, k).is_zero() {
                    let q = div_round(s.get(i, k), s.get(k, k));
                    if !q.is_zero() {
                        add_row_multiple(&mut s, &mut u, i, k, &-q);
                    }
                    if !s.get(i, k).is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in k + 1..cols {
                if !s.get(k, j).is_zero() {
                    let q = div_round(s.get(k, j), s.get(k, k));
                    if !q.is_zero() {
                        add_col_multiple(&mut s, &mut v, j, k, &-q);
                    }
                    if !s.get(k, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            let clean = (k + 1..rows).all(|i| s.get(i, k).is_zero())
                && (k + 1..cols).all(|j| s.get(k, j).is_zero());
            if !clean {
                continue;
            }
            // Enforce divisibility: the pivot must divide the rest of the
            // submatrix; if not, fold the offending row in and restart.
            let mut offender = None;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(s.get(i, j) % s.get(k, k)).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    add_row_multiple(&mut s, &mut u, k, i, &BigInt::one());
                }
                None => break,
            }
        }
    }
    finish(u, s, v, n)
}

fn finish(mut u: IntMatrix, mut s: IntMatrix, v: IntMatrix, upto: usize) -> SmithDecomposition {
    // Normalize diagonal signs.
    for k in 0..upto {
        if s.get(k, k).is_negative() {
            negate_row(&mut s, &mut u, k);
        }
    }
    SmithDecomposition { u, s, v }
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // Truncated division is enough for the reduction loop to terminate
    // (|remainder| < |pivot| strictly once pivots are minimal).
    a / b
}

fn swap_rows(s: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize) {
    for j in 0..s.cols() {
        let x = s.get(a, j).clone();
        let y = s.get(b, j).clone();
        s.set(a, j, y);
        s.set(b, j, x);
    }
    for j in 0..u.cols() {
        let x = u.get(a, j).clone();
        let y = u.get(b, j).clone();
        u.set(a, j, y);
        u.set(b, j, x);
    }
}

fn swap_cols(s: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize) {
    for i in 0..s.rows() {
        let x = s.get(i, a).clone();
        let y = s.get(i, b).clone();
        s.set(i, a, y);
        s.set(i, b, x);
    }
    for i in 0..v.rows() {
        let x = v.get(i, a).clone();
        let y = v.get(i, b).clone();
        v.set(i, a, y);
        v.set(i, b, x);
    }
}

/// Row `dst` += `c` * row `src`, mirrored on `u`.
fn add_row_multiple(s: &mut IntMatrix, u: &mut IntMatrix, dst: usize, src: usize, c: &BigInt) {
    for j in 0..s.cols() {
        let v = s.get(dst, j) + c * s.get(src, j);
        s.set(dst, j, v);
    }
    for j in 0..u.cols() {
        let v = u.get(dst, j) + c * u.get(src, j);
        u.set(dst, j, v);
    }
}

/// Column `dst` += `c` * column `src`, mirrored on `v`.
fn add_col_multiple(s: &mut IntMatrix, v: &mut IntMatrix, dst: usize, src: usize, c: &BigInt) {
    for i in 0..s.rows() {
        let val = s.get(i, dst) + c * s.get(i, src);
        s.set(i, dst, val);
    }
    for i in 0..v.rows() {
        let val = v.get(i, dst) + c * v.get(i, src);
        v.set(i, dst, val);
    }
}

fn negate_row(s: &mut IntMatrix, u: &mut IntMatrix, r: usize) {
    for j in 0..s.cols() {
        let v = -s.get(r, j).clone();
        s.set(r, j, v);
    }
    for j in 0..u.cols() {
        let v = -u.get(r, j).clone();
        u.set(r, j, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_snf(a: &IntMatrix) {
        let d = smith_normal_form(a);
        // u * a * v == s
        let prod = d.u.mul(a).unwrap().mul(&d.v).unwrap();
        assert_eq!(prod, d.s, "u*a*v != s for {:?}", a);
        // unimodular transforms
        assert_eq!(d.u.determinant().unwrap().abs(), BigInt::one());
        assert_eq!(d.v.determinant().unwrap().abs(), BigInt::one());
        // diagonal shape, non-negative, divisibility chain
        for i in 0..d.s.rows() {
            for j in 0..d.s.cols() {
                if i != j {
                    assert!(d.s.get(i, j).is_zero(), "off-diagonal in {:?}", d.s);
                }
            }
        }
        let diag = d.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if !w[0].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility broken: {:?}", diag);
            } else {
                assert!(w[1].is_zero(), "nonzero after zero: {:?}", diag);
            }
        }
    }

    #[test]
    fn snf_identity_is_identity() {
        let a = IntMatrix::identity(3);
        let d = smith_normal_form(&a);
        assert_eq!(d.s, IntMatrix::identity(3));
        assert_eq!(d.u, IntMatrix::identity(3));
        assert_eq!(d.v, IntMatrix::identity(3));
    }

    #[test]
    fn snf_zero_matrix() {
        let a = IntMatrix::zero(2, 3);
        let d = smith_normal_form(&a);
        assert_eq!(d.s, IntMatrix::zero(2, 3));
        check_snf(&a);
    }

    #[test]
    fn snf_reference_example() {
        let a = IntMatrix::from_i64_rows(&[&[2, 4], &[6, 8]]);
        check_snf(&a);
        let d = smith_normal_form(&a);
        let diag = d.diagonal();
        // |det| = 8 must equal the product of the invariants.
        assert_eq!(&diag[0] * &diag[1], BigInt::from(8));
    }

    #[test]
    fn snf_rectangular_shapes() {
        check_snf(&IntMatrix::from_i64_rows(&[&[3, 0, -6]]));
        check_snf(&IntMatrix::from_i64_rows(&[&[4], &[6], &[0]]));
    }

    #[test]
    fn snf_random_batch() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let r = rng.gen_range(1..=4);
            let c = rng.gen_range(1..=4);
            let data: Vec<BigInt> = (0..r * c)
                .map(|_| BigInt::from(rng.gen_range(-20i64..=20)))
                .collect();
            let a = IntMatrix::new(r, c, data).unwrap();
            check_snf(&a);
        }
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.determinant().unwrap(), BigInt::one());
        let b = IntMatrix::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(b.determinant().unwrap(), BigInt::zero());
        let c = IntMatrix::from_i64_rows(&[&[0, 2], &[3, 0]]);
        assert_eq!(c.determinant().unwrap(), BigInt::from(-6));
    }

    #[test]
    fn pow_and_apply() {
        let a = IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        let sq = a.pow(2).unwrap();
        assert_eq!(sq, IntMatrix::from_i64_rows(&[&[5, 3], &[3, 2]]));
        let v = vec![BigInt::from(1), BigInt::from(0)];
        assert_eq!(
            a.apply(&v).unwrap(),
            vec![BigInt::from(2), BigInt::from(1)]
        );
    }
}
