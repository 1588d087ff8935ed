use super::matrix::{axpy, scale};
use super::{sparse, Fp, FpMatrix};
use crate::error::{check_dim, Result};

/// A subspace of F_p^n stored as its canonical RREF basis, so equality of
/// subspaces is equality of values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpSubspace {
    basis: FpMatrix,
    pivots: Vec<usize>,
}

impl FpSubspace {
    pub fn zero(field: Fp, ambient: usize) -> Self {
        FpSubspace {
            basis: FpMatrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Fp, ambient: usize) -> Self {
        FpSubspace {
            basis: FpMatrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Row space of `m`. Sparse inputs go through the sparse eliminator.
    pub fn row_space(m: &FpMatrix) -> Self {
        if m.rows() > 0 && sparse::density(m) < sparse::SPARSE_THRESHOLD {
            let (basis, pivots) = sparse::rref_sparse(m);
            return FpSubspace { basis, pivots };
        }
        let (basis, pivots) = m.rref_with_pivots();
        FpSubspace { basis, pivots }
    }

    pub fn span(field: Fp, ambient: usize, vectors: &[Vec<u32>]) -> Result<Self> {
        Ok(Self::row_space(&FpMatrix::from_rows(field, ambient, vectors)?))
    }

    pub fn field(&self) -> Fp {
        self.basis.field()
    }
    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }
    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }
    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn vectors(&self) -> Vec<Vec<u32>> {
        self.basis.to_rows()
    }

    /// Subtracts the component along the basis; the result vanishes on every
    /// pivot column and is zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &[u32]) -> Result<Vec<u32>> {
        check_dim("vector length", self.ambient(), v.len())?;
        let f = self.field();
        let mut out = v.iter().map(|&x| x % f.p()).collect::<Vec<_>>();
        for (i, &pc) in self.pivots.iter().enumerate() {
            let c = out[pc];
            axpy(f, &mut out, self.basis.row(i), c, 0);
        }
        Ok(out)
    }

    pub fn contains(&self, v: &[u32]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(|&x| x == 0))
    }

    /// Coefficients of `v` in the RREF basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[u32]) -> Result<Option<Vec<u32>>> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&pc| v[pc] % self.field().p()).collect()))
    }

    /// Linear combination of the basis rows.
    pub fn combine(&self, coeffs: &[u32]) -> Result<Vec<u32>> {
        self.basis.vec_mul(coeffs)
    }

    pub fn is_subspace_of(&self, other: &FpSubspace) -> Result<bool> {
        check_dim("ambient dimension", other.ambient(), self.ambient())?;
        for r in self.basis.row_iter() {
            if !other.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &FpSubspace) -> Result<FpSubspace> {
        check_dim("ambient dimension", self.ambient(), other.ambient())?;
        Ok(Self::row_space(&self.basis.vstack(&other.basis)?))
    }

    /// `{f : f(v) = 0 for all v}` under the standard pairing.
    pub fn annihilator(&self) -> FpSubspace {
        let f = self.field();
        let n = self.ambient();
        let mut is_pivot = vec![false; n];
        for &pc in &self.pivots {
            is_pivot[pc] = true;
        }
        let mut rows = Vec::new();
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; n];
            v[free] = 1;
            for (i, &pc) in self.pivots.iter().enumerate() {
                v[pc] = f.neg(self.basis.get(i, free));
            }
            rows.push(v);
        }
        Self::span(f, n, &rows).expect("rows have ambient length")
    }

    pub fn intersect(&self, other: &FpSubspace) -> Result<FpSubspace> {
        check_dim("ambient dimension", self.ambient(), other.ambient())?;
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// Image of the subspace under `v -> m v`.
    pub fn image(&self, m: &FpMatrix) -> Result<FpSubspace> {
        check_dim("map source dimension", m.cols(), self.ambient())?;
        let rows = self
            .basis
            .row_iter()
            .map(|r| m.mul_vec(r))
            .collect::<Result<Vec<_>>>()?;
        FpSubspace::span(self.field(), m.rows(), &rows)
    }
}

/// Null space `{x : m x = 0}`.
pub fn kernel(m: &FpMatrix) -> FpSubspace {
    FpSubspace::row_space(m).annihilator()
}

/// Incrementally built echelon basis. Rows are normalised at their pivot and
/// vanish before it; reduction sweeps columns left to right.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Fp,
    cols: usize,
    rows: Vec<Vec<u32>>,
    row_of_pivot: Vec<usize>,
}

impl Echelon {
    const NONE: usize = usize::MAX;

    pub fn new(field: Fp, cols: usize) -> Self {
        Echelon {
            field,
            cols,
            rows: Vec::new(),
            row_of_pivot: vec![Self::NONE; cols],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Pivot column of each row, in insertion order.
    pub fn pivot_of_rows(&self) -> Vec<usize> {
        let mut out = vec![0; self.rows.len()];
        for (c, &r) in self.row_of_pivot.iter().enumerate() {
            if r != Self::NONE {
                out[r] = c;
            }
        }
        out
    }

    /// Reduces `v` in place; returns the first surviving column, if any.
    pub fn reduce(&self, v: &mut [u32]) -> Option<usize> {
        debug_assert_eq!(v.len(), self.cols);
        for c in 0..self.cols {
            if v[c] == 0 {
                continue;
            }
            let r = self.row_of_pivot[c];
            if r == Self::NONE {
                return Some(c);
            }
            let factor = v[c];
            axpy(self.field, v, &self.rows[r], factor, c);
        }
        None
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w).is_none()
    }

    /// Adds `v` if independent; returns its pivot column.
    pub fn insert(&mut self, mut v: Vec<u32>) -> Option<usize> {
        let c = self.reduce(&mut v)?;
        let inv = self.field.inv(v[c]);
        scale(self.field, &mut v[c..], inv);
        self.row_of_pivot[c] = self.rows.len();
        self.rows.push(v);
        Some(c)
    }

    pub fn to_subspace(&self) -> FpSubspace {
        if self.rows.is_empty() {
            return FpSubspace::zero(self.field, self.cols);
        }
        let m = FpMatrix::from_rows(self.field, self.cols, &self.rows).expect("row lengths");
        FpSubspace::row_space(&m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        let fld = f(3);
        assert!(kernel(&FpMatrix::identity(fld, 3)).is_zero());
        assert_eq!(kernel(&FpMatrix::zeros(fld, 2, 3)).dim(), 3);
    }

    #[test]
    fn kernel_of_single_row_matches_enumeration() {
        let fld = f(2);
        let m = FpMatrix::from_rows(fld, 3, &[vec![1, 1, 0]]).unwrap();
        let k = kernel(&m);
        assert_eq!(k.dim(), 2);
        assert!(k.contains(&[1, 1, 0]).unwrap());
        let mut members = 0;
        for bits in 0..8u32 {
            let v = vec![bits & 1, (bits >> 1) & 1, (bits >> 2) & 1];
            if k.contains(&v).unwrap() {
                members += 1;
                assert_eq!(m.mul_vec(&v).unwrap(), vec![0]);
            }
        }
        assert_eq!(members, 4);
    }

    #[test]
    fn annihilator_and_intersection_examples() {
        let fld = f(3);
        let a = FpSubspace::span(fld, 2, &[vec![1, 0]]).unwrap();
        assert_eq!(a.annihilator().vectors(), vec![vec![0, 1]]);
        let full = FpSubspace::full(fld, 2);
        let diag = FpSubspace::span(fld, 2, &[vec![1, 1]]).unwrap();
        assert_eq!(full.intersect(&diag).unwrap(), diag);
    }

    #[test]
    fn echelon_matches_rref() {
        let fld = f(5);
        let vs = vec![vec![1, 2, 3, 4], vec![2, 4, 1, 0], vec![3, 1, 4, 4], vec![0, 0, 0, 1]];
        let mut e = Echelon::new(fld, 4);
        for v in &vs {
            e.insert(v.clone());
        }
        assert_eq!(e.to_subspace(), FpSubspace::span(fld, 4, &vs).unwrap());
    }
}
