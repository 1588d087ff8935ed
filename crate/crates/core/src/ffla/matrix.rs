use super::{count_ops, Fp};
use crate::error::{check_dim, Result};

/// Dense row-major matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// `dst -= c * src` on the tail starting at `from`.
#[inline]
pub(crate) fn axpy(f: Fp, dst: &mut [u32], src: &[u32], c: u32, from: usize) {
    if c == 0 {
        return;
    }
    let p = f.p() as u64;
    let m = p - c as u64;
    count_ops((dst.len() - from) as u64);
    for (d, &s) in dst[from..].iter_mut().zip(&src[from..]) {
        if s != 0 {
            *d = ((*d as u64 + m * s as u64) % p) as u32;
        }
    }
}

#[inline]
pub(crate) fn scale(f: Fp, v: &mut [u32], c: u32) {
    count_ops(v.len() as u64);
    for x in v.iter_mut() {
        *x = f.mul(*x, c);
    }
}

impl FpMatrix {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p();
        }
        m
    }

    /// Builds a matrix from rows, reducing every entry mod p.
    pub fn from_rows(field: Fp, cols: usize, rows: &[Vec<u32>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_dim("row length", cols, r.len())?;
            data.extend(r.iter().map(|&x| x % field.p()));
        }
        Ok(FpMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(field: Fp, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % field.p());
            }
        }
        FpMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub(crate) fn from_raw(field: Fp, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        FpMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn field(&self) -> Fp {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p();
    }
    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn row_iter(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.rows).map(move |i| self.row(i))
    }
    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> FpMatrix {
        FpMatrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        check_dim("matrix product inner dimension", self.cols, other.rows)?;
        let f = self.field;
        let p = f.p() as u64;
        let mut out = vec![0u32; self.rows * other.cols];
        count_ops((self.rows * self.cols * other.cols) as u64);
        for i in 0..self.rows {
            let acc = &mut out[i * other.cols..(i + 1) * other.cols];
            let mut wide = vec![0u64; other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for (w, &b) in wide.iter_mut().zip(other.row(k)) {
                    *w = (*w + a * b as u64) % p;
                }
            }
            for (o, w) in acc.iter_mut().zip(wide) {
                *o = w as u32;
            }
        }
        Ok(FpMatrix::from_raw(f, self.rows, other.cols, out))
    }

    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>> {
        check_dim("matrix-vector length", self.cols, v.len())?;
        let p = self.field.p() as u64;
        count_ops((self.rows * self.cols) as u64);
        Ok(self
            .row_iter()
            .map(|r| {
                r.iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p) as u32
            })
            .collect())
    }

    /// Row vector times matrix: `v^T M`.
    pub fn vec_mul(&self, v: &[u32]) -> Result<Vec<u32>> {
        check_dim("vector-matrix length", self.rows, v.len())?;
        let p = self.field.p() as u64;
        let mut wide = vec![0u64; self.cols];
        count_ops((self.rows * self.cols) as u64);
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (w, &a) in wide.iter_mut().zip(self.row(i)) {
                *w = (*w + c as u64 * a as u64) % p;
            }
        }
        Ok(wide.into_iter().map(|w| w as u32).collect())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &FpMatrix) -> Result<FpMatrix> {
        check_dim("stacked column count", self.cols, other.cols)?;
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FpMatrix::from_raw(self.field, self.rows + other.rows, self.cols, data))
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &FpMatrix) -> Result<FpMatrix> {
        check_dim("joined row count", self.rows, other.rows)?;
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(FpMatrix::from_raw(self.field, self.rows, cols, data))
    }

    pub fn add(&self, other: &FpMatrix) -> Result<FpMatrix> {
        check_dim("summand rows", self.rows, other.rows)?;
        check_dim("summand cols", self.cols, other.cols)?;
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(FpMatrix::from_raw(f, self.rows, self.cols, data))
    }

    pub fn scaled(&self, c: u32) -> FpMatrix {
        let mut m = self.clone();
        scale(self.field, &mut m.data, c % self.field.p());
        m
    }

    /// In-place Gauss-Jordan elimination; returns pivot columns.
    fn eliminate(&mut self) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]);
            scale(f, &mut self.data[r * cols..(r + 1) * cols], inv);
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.data[i * cols + c];
                if factor == 0 {
                    continue;
                }
                let (lo, hi) = self.data.split_at_mut(i.max(r) * cols);
                let (dst, src) = if i < r {
                    (&mut lo[i * cols..(i + 1) * cols], &hi[..cols])
                } else {
                    (&mut hi[..cols], &lo[r * cols..(r + 1) * cols])
                };
                axpy(f, dst, src, factor, c);
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row-echelon form, its rank and pivot columns. Zero rows are dropped.
    pub fn rref_with_pivots(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate();
        m.data.truncate(pivots.len() * m.cols);
        m.rows = pivots.len();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&FpMatrix::identity(self.field, n)).ok()?;
        let (r, pivots) = aug.rref_with_pivots();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(FpMatrix::from_fn(self.field, n, n, |i, j| r.get(i, n + j)))
    }
}

/// Reduced row-echelon form with zero rows removed, and the rank.
pub fn rref(m: &FpMatrix) -> (FpMatrix, usize) {
    let (r, piv) = m.rref_with_pivots();
    (r, piv.len())
}

/// A solution of `m x = rhs`, or `None` when `rhs` is outside the column space.
pub fn solve(m: &FpMatrix, rhs: &[u32]) -> Result<Option<Vec<u32>>> {
    check_dim("right-hand side length", m.rows(), rhs.len())?;
    let col = FpMatrix::from_fn(m.field(), m.rows(), 1, |i, _| rhs[i]);
    let (r, pivots) = m.hstack(&col)?.rref_with_pivots();
    let n = m.cols();
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = vec![0u32; n];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = r.get(i, n);
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn identity_is_its_own_rref() {
        let i3 = FpMatrix::identity(f(2), 3);
        let (r, rank) = rref(&i3);
        assert_eq!(r, i3);
        assert_eq!(rank, 3);
    }

    #[test]
    fn dependent_rows_collapse() {
        let m = FpMatrix::from_rows(f(2), 2, &[vec![1, 1], vec![1, 1]]).unwrap();
        let (r, rank) = rref(&m);
        assert_eq!(rank, 1);
        assert_eq!(r.to_rows(), vec![vec![1, 1]]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let fld = f(5);
        let m = FpMatrix::from_rows(fld, 2, &[vec![1, 2], vec![2, 4]]).unwrap();
        let x = solve(&m, &[3, 1]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![3, 1]);
        assert!(solve(&m, &[1, 1]).unwrap().is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let fld = f(7);
        let m = FpMatrix::from_rows(fld, 2, &[vec![2, 1], vec![1, 1]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), FpMatrix::identity(fld, 2));
        let sing = FpMatrix::from_rows(fld, 2, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(sing.inverse().is_none());
    }
}
