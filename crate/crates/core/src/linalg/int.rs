use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{LinalgError, ScalarMatrix};
use crate::scalar::Scalar;

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        IntMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let r = rows.len();
        assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
        IntMatrix {
            rows: r,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix with the given integer vectors as columns.
    pub fn from_columns(dim: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = IntMatrix::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), dim);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Permutation matrix with column `i` equal to `e_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, &p) in perm.iter().enumerate() {
            m.set(p, i, BigInt::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn select_columns(&self, idx: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m.set(i, k, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(k, j, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let x = m.get(i, j) + a * other.get(k, j);
                    m.set(i, j, x);
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn to_scalar(&self) -> ScalarMatrix {
        let rows = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(Scalar::from_bigint).collect())
            .collect();
        if self.rows == 0 {
            return ScalarMatrix::zeros(0, self.cols);
        }
        ScalarMatrix::from_rows(rows).expect("rectangular")
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap_rows(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let x = (a.get(k, k) * a.get(i, j) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, x);
                }
                a.set(i, k, BigInt::zero());
            }
            prev = a.get(k, k).clone();
        }
        if n == 0 {
            return BigInt::one();
        }
        sign * a.get(n - 1, n - 1)
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }

    pub fn rank(&self) -> usize {
        let (h, _) = self.hnf();
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }

    /// Row Hermite normal form: `(h, u)` with `u · self = h`, `u` unimodular,
    /// `h` in echelon form with positive pivots, entries above each pivot in
    /// `[0, pivot)`, and zero rows at the bottom.
    pub fn hnf(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut r = 0;
        for c in 0..h.cols {
            if r == h.rows {
                break;
            }
            loop {
                // smallest nonzero entry in column c at or below row r
                let best = (r..h.rows)
                    .filter(|&i| !h.get(i, c).is_zero())
                    .min_by_key(|&i| h.get(i, c).abs());
                let Some(best) = best else { break };
                h.swap_rows(r, best);
                u.swap_rows(r, best);
                let mut done = true;
                for i in r + 1..h.rows {
                    if h.get(i, c).is_zero() {
                        continue;
                    }
                    let q = h.get(i, c).div_floor(h.get(r, c));
                    h.add_row_multiple(i, r, &-q.clone());
                    u.add_row_multiple(i, r, &-q);
                    if !h.get(i, c).is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if h.get(r, c).is_zero() {
                continue;
            }
            if h.get(r, c).is_negative() {
                h.negate_row(r);
                u.negate_row(r);
            }
            for i in 0..r {
                let q = h.get(i, c).div_floor(h.get(r, c));
                if !q.is_zero() {
                    h.add_row_multiple(i, r, &-q.clone());
                    u.add_row_multiple(i, r, &-q);
                }
            }
            r += 1;
        }
        (h, u)
    }

    /// Smith normal form: `(d, u, v)` with `u · self · v = d`, `u` and `v`
    /// unimodular, `d` diagonal with nonnegative entries `d₁ | d₂ | …`.
    pub fn snf(&self) -> (IntMatrix, IntMatrix, IntMatrix) {
        let mut d = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let n = self.rows.min(self.cols);
        for t in 0..n {
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..d.rows {
                    for j in t..d.cols {
                        let x = d.get(i, j);
                        if x.is_zero() {
                            continue;
                        }
                        if best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    return (d, u, v);
                };
                d.swap_rows(t, bi);
                u.swap_rows(t, bi);
                d.swap_cols(t, bj);
                v.swap_cols(t, bj);
                let mut clean = true;
                for i in t + 1..d.rows {
                    let q = d.get(i, t).div_floor(d.get(t, t));
                    if !q.is_zero() {
                        d.add_row_multiple(i, t, &-q.clone());
                        u.add_row_multiple(i, t, &-q);
                    }
                    if !d.get(i, t).is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..d.cols {
                    let q = d.get(t, j).div_floor(d.get(t, t));
                    if !q.is_zero() {
                        d.add_col_multiple(j, t, &-q.clone());
                        v.add_col_multiple(j, t, &-q);
                    }
                    if !d.get(t, j).is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    continue;
                }
                // divisibility: fold an offending row into row t and retry
                let p = d.get(t, t).clone();
                let bad = (t + 1..d.rows).find(|&i| (t + 1..d.cols).any(|j| !d.get(i, j).is_multiple_of(&p)));
                match bad {
                    Some(i) => {
                        d.add_row_multiple(t, i, &BigInt::one());
                        u.add_row_multiple(t, i, &BigInt::one());
                    }
                    None => break,
                }
            }
            if d.get(t, t).is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
        }
        (d, u, v)
    }

    /// Diagonal of the Smith form, including zeros, of length `min(rows, cols)`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let (d, _, _) = self.snf();
        (0..self.rows.min(self.cols)).map(|i| d.get(i, i).clone()).collect()
    }

    /// Z-basis of `{x ∈ Z^cols : self · x = 0}`, as rows of a matrix in HNF.
    pub fn int_kernel(&self) -> Vec<Vec<BigInt>> {
        let (h, u) = self.transpose().hnf();
        let rows: Vec<Vec<BigInt>> = (0..h.rows)
            .filter(|&i| h.row(i).iter().all(Zero::is_zero))
            .map(|i| u.row(i))
            .collect();
        if rows.is_empty() {
            return rows;
        }
        let k = rows.len();
        let (hk, _) = IntMatrix::from_big_rows(rows, self.cols).hnf();
        (0..k).map(|i| hk.row(i)).collect()
    }

    /// Some integer `x` with `self · x = b`, or `Inconsistent`.
    pub fn solve_int(&self, b: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch("right-hand side length".into()));
        }
        // u · selfᵀ = h, so self · (uᵀ y) = hᵀ y
        let (h, u) = self.transpose().hnf();
        let mut y = vec![BigInt::zero(); h.rows];
        let mut residual: Vec<BigInt> = b.to_vec();
        for i in 0..h.rows {
            let Some(p) = (0..h.cols).find(|&j| !h.get(i, j).is_zero()) else {
                break;
            };
            let (q, rem) = residual[p].div_rem(h.get(i, p));
            if !rem.is_zero() {
                return Err(LinalgError::Inconsistent);
            }
            for (j, r) in residual.iter_mut().enumerate() {
                *r -= &q * h.get(i, j);
            }
            y[i] = q;
        }
        if residual.iter().any(|r| !r.is_zero()) {
            return Err(LinalgError::Inconsistent);
        }
        Ok(u.transpose().mul_vec(&y))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k · row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let x = self.get(dst, j) + k * self.get(src, j);
            self.set(dst, j, x);
        }
    }

    /// col[dst] += k · col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let x = self.get(i, dst) + k * self.get(i, src);
            self.set(i, dst, x);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let x = -self.get(r, j);
            self.set(r, j, x);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

pub fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
