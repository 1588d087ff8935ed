//! Row reduction for matrices with few nonzeros. Produces exactly the same
//! RREF as the dense eliminator.

use std::collections::BTreeMap;

use super::{count_ops, FpMatrix};

/// Matrices below this nonzero density are eliminated sparsely.
pub const SPARSE_THRESHOLD: f64 = 0.05;

pub type SparseRow = Vec<(usize, u32)>;

pub fn density(m: &FpMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let nnz = m.data().iter().filter(|&&x| x != 0).count();
    nnz as f64 / (m.rows() * m.cols()) as f64
}

pub fn to_sparse(m: &FpMatrix) -> Vec<SparseRow> {
    m.row_iter()
        .map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, &x)| (j, x)).collect())
        .collect()
}

/// Sparse Gauss-Jordan elimination; returns the RREF without zero rows and
/// its pivot columns.
pub fn rref_sparse(m: &FpMatrix) -> (FpMatrix, Vec<usize>) {
    let f = m.field();
    let p = f.p() as u64;
    let mut pivot_rows: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for row in to_sparse(m) {
        let mut acc: BTreeMap<usize, u32> = row.into_iter().collect();
        loop {
            let Some((&c, &v)) = acc.iter().find(|(c, _)| pivot_rows.contains_key(c)) else {
                break;
            };
            let prow = &pivot_rows[&c];
            count_ops(prow.len() as u64);
            let mfac = p - v as u64;
            for &(j, x) in prow {
                let e = acc.entry(j).or_insert(0);
                *e = ((*e as u64 + mfac * x as u64) % p) as u32;
                if *e == 0 {
                    acc.remove(&j);
                }
            }
        }
        let Some((&lead, &lv)) = acc.iter().next() else {
            continue;
        };
        let inv = f.inv(lv);
        let normalized: SparseRow = acc.into_iter().map(|(j, x)| (j, f.mul(x, inv))).collect();
        // keep every stored row free of the new pivot column
        let mut updates = Vec::new();
        for (&pc, prow) in pivot_rows.iter() {
            if let Some(&(_, v)) = prow.iter().find(|&&(j, _)| j == lead) {
                let mut acc: BTreeMap<usize, u32> = prow.iter().copied().collect();
                let mfac = p - v as u64;
                count_ops(normalized.len() as u64);
                for &(j, x) in &normalized {
                    let e = acc.entry(j).or_insert(0);
                    *e = ((*e as u64 + mfac * x as u64) % p) as u32;
                    if *e == 0 {
                        acc.remove(&j);
                    }
                }
                updates.push((pc, acc.into_iter().collect::<SparseRow>()));
            }
        }
        for (pc, r) in updates {
            pivot_rows.insert(pc, r);
        }
        pivot_rows.insert(lead, normalized);
    }
    let pivots: Vec<usize> = pivot_rows.keys().copied().collect();
    let mut dense = FpMatrix::zeros(f, pivots.len(), m.cols());
    for (i, row) in pivot_rows.values().enumerate() {
        for &(j, x) in row {
            dense.set(i, j, x);
        }
    }
    (dense, pivots)
}
