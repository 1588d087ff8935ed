//! Rational representations given by their coaction coefficients, and the
//! symbolic shapes (`RepExpr`) used to type functor and equivariant trees.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::ffla::{Fp, FpMatrix};
use crate::hopf::{antipode_matrix, densify, RingModel, SparseVec};

/// A comodule V with `mu(e_c) = sum_a e_a (x) r[a][c]`, each coefficient an
/// element of R_ell stored sparsely in canonical ring coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    dim: usize,
    ell: usize,
    ring_dim: usize,
    /// `columns[c]` lists the nonzero `(a, r[a][c])`.
    columns: Vec<Vec<(usize, SparseVec)>>,
}

fn sparse(v: &[u32]) -> SparseVec {
    v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect()
}

impl Representation {
    /// Builds from dense coefficients `coeff(a, c)` in ring coordinates.
    pub fn from_fn<M: RingModel + ?Sized>(
        m: &M,
        dim: usize,
        ell: usize,
        mut coeff: impl FnMut(usize, usize) -> Vec<u32>,
    ) -> Result<Self> {
        if ell > m.d() {
            return Err(Error::Budget(format!(
                "representation needs degree {ell} but the ring is truncated at {}",
                m.d()
            )));
        }
        let columns = (0..dim)
            .map(|c| {
                (0..dim)
                    .filter_map(|a| {
                        let r = sparse(&coeff(a, c));
                        (!r.is_empty()).then_some((a, r))
                    })
                    .collect()
            })
            .collect();
        Ok(Representation {
            dim,
            ell,
            ring_dim: m.dim(),
            columns,
        })
    }

    pub fn trivial<M: RingModel + ?Sized>(m: &M) -> Self {
        Representation {
            dim: 1,
            ell: 0,
            ring_dim: m.dim(),
            columns: vec![vec![(0, sparse(&m.one()))]],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn ell(&self) -> usize {
        self.ell
    }
    pub fn ring_dim(&self) -> usize {
        self.ring_dim
    }

    pub fn coefficient(&self, f: Fp, a: usize, c: usize) -> Vec<u32> {
        self.columns[c]
            .iter()
            .find(|(row, _)| *row == a)
            .map(|(_, r)| densify(self.ring_dim, f, r))
            .unwrap_or_else(|| vec![0; self.ring_dim])
    }

    pub fn column(&self, c: usize) -> &[(usize, SparseVec)] {
        &self.columns[c]
    }

    /// `mu(v)` as one ring element per output coordinate.
    pub fn coaction(&self, f: Fp, v: &[u32]) -> Result<Vec<Vec<u32>>> {
        check_dim("vector length", self.dim, v.len())?;
        let p = f.p() as u64;
        let mut out = vec![vec![0u64; self.ring_dim]; self.dim];
        for (c, &vc) in v.iter().enumerate() {
            if vc == 0 {
                continue;
            }
            for (a, r) in &self.columns[c] {
                for &(i, x) in r {
                    out[*a][i] = (out[*a][i] + vc as u64 * x as u64) % p;
                }
            }
        }
        Ok(out.into_iter().map(|r| r.into_iter().map(|x| x as u32).collect()).collect())
    }

    /// The matrix `rho(phi)[a][c] = phi(r[a][c])`; for an evaluation
    /// functional this is the action of that group element.
    pub fn matrix_at(&self, f: Fp, phi: &[u32]) -> FpMatrix {
        let p = f.p() as u64;
        let mut m = FpMatrix::zeros(f, self.dim, self.dim);
        for (c, col) in self.columns.iter().enumerate() {
            for (a, r) in col {
                let val = r.iter().fold(0u64, |acc, &(i, x)| (acc + x as u64 * phi[i] as u64) % p);
                m.set(*a, c, val as u32);
            }
        }
        m
    }

    /// `phi . w = (id (x) phi)(mu(w))`.
    pub fn act(&self, f: Fp, phi: &[u32], w: &[u32]) -> Result<Vec<u32>> {
        self.matrix_at(f, phi).mul_vec(w)
    }

    pub fn direct_sum(&self, other: &Representation) -> Result<Representation> {
        check_dim("ring dimension", self.ring_dim, other.ring_dim)?;
        let mut columns = self.columns.clone();
        for col in &other.columns {
            columns.push(col.iter().map(|(a, r)| (a + self.dim, r.clone())).collect());
        }
        Ok(Representation {
            dim: self.dim + other.dim,
            ell: self.ell.max(other.ell),
            ring_dim: self.ring_dim,
            columns,
        })
    }

    /// `V (x) V'` with index `(a, a') -> a * dim' + a'`.
    pub fn tensor<M: RingModel + ?Sized>(&self, other: &Representation, m: &M) -> Result<Representation> {
        let ell = self.ell + other.ell;
        if ell > m.d() {
            return Err(Error::Budget(format!(
                "tensor product needs degree {ell} but the ring is truncated at {}",
                m.d()
            )));
        }
        let f = m.field();
        let n = m.dim();
        let d2 = other.dim;
        let mut columns = Vec::with_capacity(self.dim * d2);
        for c in 0..self.dim {
            for c2 in 0..d2 {
                let mut col = Vec::new();
                for (a, r) in &self.columns[c] {
                    let rd = densify(n, f, r);
                    for (a2, r2) in &other.columns[c2] {
                        let prod = m.mul(&rd, &densify(n, f, r2));
                        let sp = sparse(&prod);
                        if !sp.is_empty() {
                            col.push((a * d2 + a2, sp));
                        }
                    }
                }
                col.sort_by_key(|(a, _)| *a);
                columns.push(col);
            }
        }
        Ok(Representation {
            dim: self.dim * d2,
            ell,
            ring_dim: n,
            columns,
        })
    }

    /// Contragredient V*: `r*[c][a] = iota(r[a][c])`.
    pub fn dual<M: RingModel + ?Sized>(&self, m: &M) -> Representation {
        let f = m.field();
        let iota = antipode_matrix(m);
        let mut columns: Vec<Vec<(usize, SparseVec)>> = vec![Vec::new(); self.dim];
        for (c, col) in self.columns.iter().enumerate() {
            for (a, r) in col {
                let img = iota.vec_mul(&densify(self.ring_dim, f, r)).expect("ring dim");
                let sp = sparse(&img);
                if !sp.is_empty() {
                    // coefficient at row c, column a of the dual
                    columns[*a].push((c, sp));
                }
            }
        }
        for col in columns.iter_mut() {
            col.sort_by_key(|(a, _)| *a);
        }
        Representation {
            dim: self.dim,
            ell: self.ell,
            ring_dim: self.ring_dim,
            columns,
        }
    }
}

/// Symbolic shape of a representation: enough to know its dimension and
/// complexity, and to instantiate it against a concrete ring model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepExpr {
    /// The one-dimensional trivial representation k.
    Trivial,
    /// The permutation representation U = k^n of the symmetric group.
    Std(usize),
    /// A one-dimensional torus character t^w.
    Weight(i64),
    Sum(Vec<RepExpr>),
    Tensor(Box<RepExpr>, Box<RepExpr>),
    Dual(Box<RepExpr>),
}

impl RepExpr {
    pub fn tensor_power(n: usize, m: usize) -> RepExpr {
        if m == 0 {
            return RepExpr::Trivial;
        }
        let mut r = RepExpr::Std(n);
        for _ in 1..m {
            r = RepExpr::Tensor(Box::new(r), Box::new(RepExpr::Std(n)));
        }
        r
    }

    pub fn dim(&self) -> usize {
        match self {
            RepExpr::Trivial | RepExpr::Weight(_) => 1,
            RepExpr::Std(n) => *n,
            RepExpr::Sum(parts) => parts.iter().map(RepExpr::dim).sum(),
            RepExpr::Tensor(a, b) => a.dim() * b.dim(),
            RepExpr::Dual(a) => a.dim(),
        }
    }

    /// Complexity: the smallest degree containing every coaction coefficient.
    pub fn ell(&self) -> usize {
        match self {
            RepExpr::Trivial => 0,
            RepExpr::Std(_) => 1,
            RepExpr::Weight(w) => w.unsigned_abs() as usize,
            RepExpr::Sum(parts) => parts.iter().map(RepExpr::ell).max().unwrap_or(0),
            RepExpr::Tensor(a, b) => a.ell() + b.ell(),
            RepExpr::Dual(a) => a.ell(),
        }
    }

    /// Coordinate permutation by which a permutation `g` acts, for shapes
    /// built from `Std` and `Trivial` (all are permutation representations).
    pub fn coordinate_action(&self, g: &[usize]) -> Result<Vec<usize>> {
        match self {
            RepExpr::Trivial => Ok(vec![0]),
            RepExpr::Std(n) => {
                check_dim("permutation degree", *n, g.len())?;
                Ok(g.to_vec())
            }
            RepExpr::Weight(_) => Err(Error::Capability("torus characters carry no permutation action".into())),
            RepExpr::Sum(parts) => {
                let mut out = Vec::new();
                let mut off = 0;
                for part in parts {
                    out.extend(part.coordinate_action(g)?.into_iter().map(|i| i + off));
                    off += part.dim();
                }
                Ok(out)
            }
            RepExpr::Tensor(a, b) => {
                let pa = a.coordinate_action(g)?;
                let pb = b.coordinate_action(g)?;
                let db = b.dim();
                let mut out = vec![0; a.dim() * db];
                for (i, &gi) in pa.iter().enumerate() {
                    for (j, &gj) in pb.iter().enumerate() {
                        out[i * db + j] = gi * db + gj;
                    }
                }
                Ok(out)
            }
            // permutation matrices are orthogonal, so the dual action agrees
            RepExpr::Dual(a) => a.coordinate_action(g),
        }
    }

    /// `g . v` for permutation shapes: coordinate i moves to `perm[i]`.
    pub fn act_permutation(&self, g: &[usize], v: &[u32]) -> Result<Vec<u32>> {
        let perm = self.coordinate_action(g)?;
        check_dim("vector length", perm.len(), v.len())?;
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[perm[i]] = x;
        }
        Ok(out)
    }
}

impl fmt::Display for RepExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepExpr::Trivial => write!(f, "k"),
            RepExpr::Std(n) => write!(f, "U{n}"),
            RepExpr::Weight(w) => write!(f, "t^{w}"),
            RepExpr::Sum(parts) => {
                write!(f, "(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            RepExpr::Tensor(a, b) => write!(f, "({a} x {b})"),
            RepExpr::Dual(a) => write!(f, "{a}*"),
        }
    }
}

/// Ring models that know how to build the atomic shapes.
pub trait RepSource: RingModel {
    fn atomic(&self, shape: &RepExpr) -> Result<Representation>;
}

/// Instantiates a shape as a concrete representation over `m`.
pub fn instantiate<M: RepSource + ?Sized>(m: &M, shape: &RepExpr) -> Result<Representation> {
    match shape {
        RepExpr::Trivial => Ok(Representation::trivial(m)),
        RepExpr::Sum(parts) => {
            let mut it = parts.iter();
            let first = it
                .next()
                .ok_or_else(|| Error::Input("empty direct sum".into()))?;
            let mut acc = instantiate(m, first)?;
            for p in it {
                acc = acc.direct_sum(&instantiate(m, p)?)?;
            }
            Ok(acc)
        }
        RepExpr::Tensor(a, b) => instantiate(m, a)?.tensor(&instantiate(m, b)?, m),
        RepExpr::Dual(a) => Ok(instantiate(m, a)?.dual(m)),
        atomic => m.atomic(atomic),
    }
}
