//! The symmetric group Σn: its coordinate ring filtered by products of
//! matrix-entry functions, spanned by partial-injection indicators χ_π.
//!
//! Elements of R_d are stored in a canonical basis chosen greedily among the
//! χ_π. Products are computed through values at an interpolation set of
//! permutations on which the basis functions are linearly independent.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::ffla::{Echelon, Fp, FpMatrix};
use crate::hopf::{RingModel, SparseVec};
use crate::rep::{instantiate, RepExpr, RepSource, Representation};

/// Largest n for which all of Σn is enumerated.
pub const EXACT_LIMIT: usize = 8;

/// `g[i]` is the image of i; products compose right to left.
pub type Perm = Vec<usize>;

pub fn compose_perm(g: &[usize], h: &[usize]) -> Perm {
    h.iter().map(|&x| g[x]).collect()
}

pub fn inverse_perm(g: &[usize]) -> Perm {
    let mut out = vec![0; g.len()];
    for (i, &x) in g.iter().enumerate() {
        out[x] = i;
    }
    out
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Perm> {
    let mut cur: Perm = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// A partial injection `{s_1 -> t_1, ...}`, sorted by source.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartialInjection {
    pairs: Vec<(usize, usize)>,
}

impl PartialInjection {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        for (i, a) in pairs.iter().enumerate() {
            for b in &pairs[i + 1..] {
                if a.0 == b.0 || a.1 == b.1 {
                    return Err(Error::Input(format!("{pairs:?} is not a partial injection")));
                }
            }
        }
        Ok(PartialInjection { pairs })
    }

    pub fn empty() -> Self {
        PartialInjection { pairs: Vec::new() }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    /// χ_π(g) = 1 iff g sends every source to its target.
    pub fn eval(&self, g: &[usize]) -> bool {
        self.pairs.iter().all(|&(s, t)| g[s] == t)
    }

    pub fn inverse(&self) -> Self {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(s, t)| (t, s)).collect();
        pairs.sort_unstable();
        PartialInjection { pairs }
    }

    pub fn is_identity_part(&self) -> bool {
        self.pairs.iter().all(|&(s, t)| s == t)
    }

    /// `π ∪ σ` when it is again a partial injection.
    pub fn union(&self, other: &Self) -> Option<Self> {
        let mut pairs = self.pairs.clone();
        for &pr in &other.pairs {
            if !pairs.contains(&pr) {
                pairs.push(pr);
            }
        }
        PartialInjection::new(pairs).ok()
    }
}

impl fmt::Display for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (s, t)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}->{t}")?;
        }
        write!(f, "}}")
    }
}

/// All partial injections on `0..n` with at most `d` pairs, in (size, lex)
/// order.
pub fn partial_injections(n: usize, d: usize) -> Vec<PartialInjection> {
    let mut out = vec![PartialInjection::empty()];
    let mut layer = vec![PartialInjection::empty()];
    for _ in 0..d.min(n) {
        let mut next = Vec::new();
        for pi in &layer {
            let start = pi.pairs.last().map_or(0, |&(s, _)| s + 1);
            for s in start..n {
                for t in 0..n {
                    if pi.pairs.iter().all(|&(_, u)| u != t) {
                        let mut pairs = pi.pairs.clone();
                        pairs.push((s, t));
                        next.push(PartialInjection { pairs });
                    }
                }
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    /// Evaluate on every permutation (n ≤ 8).
    Exact,
    /// Evaluate on random permutations, adding batches until the rank has
    /// not moved for `stable_rounds` consecutive batches.
    Sampled { seed: u64, stable_rounds: usize },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Sampled { .. } => "sampled",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SymRingModel {
    n: usize,
    d: usize,
    field: Fp,
    backend: Backend,
    spans: Vec<PartialInjection>,
    span_index: HashMap<PartialInjection, usize>,
    basis: Vec<usize>,
    /// Interpolation permutations; `values` row i holds b_i at these points.
    points: Vec<Perm>,
    values: FpMatrix,
    values_inv: FpMatrix,
    reduced: Vec<SparseVec>,
    coproduct: Vec<Vec<(usize, usize)>>,
    antipode: Vec<usize>,
}

impl SymRingModel {
    pub fn build(n: usize, d: usize, p: u64, backend: Backend) -> Result<Self> {
        let field = Fp::new(p)?;
        if n == 0 {
            return Err(Error::Input("the symmetric group needs n >= 1".into()));
        }
        let spans = partial_injections(n, d);
        let span_index: HashMap<_, _> = spans.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let (basis, points) = match backend {
            Backend::Exact => {
                if n > EXACT_LIMIT {
                    return Err(Error::Capability(format!(
                        "exact backend enumerates Σn only for n <= {EXACT_LIMIT}, got n = {n}"
                    )));
                }
                greedy_basis(field, &spans, &all_permutations(n))
            }
            Backend::Sampled { seed, stable_rounds } => sampled_basis(field, n, &spans, seed, stable_rounds),
        };
        let values = FpMatrix::from_fn(field, basis.len(), points.len(), |i, j| {
            spans[basis[i]].eval(&points[j]) as u32
        });
        let values_inv = values
            .inverse()
            .ok_or_else(|| Error::Capability("interpolation matrix is singular".into()))?;
        let p64 = field.p() as u64;
        let reduced = spans
            .iter()
            .map(|s| {
                let mut acc = vec![0u64; basis.len()];
                for (j, pt) in points.iter().enumerate() {
                    if s.eval(pt) {
                        for (a, &x) in acc.iter_mut().zip(values_inv.row(j)) {
                            *a += x as u64;
                        }
                    }
                }
                acc.into_iter()
                    .enumerate()
                    .filter_map(|(i, x)| {
                        let x = (x % p64) as u32;
                        (x != 0).then_some((i, x))
                    })
                    .collect()
            })
            .collect();
        let coproduct = basis
            .iter()
            .map(|&s| coproduct_of(n, &spans[s], &span_index))
            .collect();
        let antipode = spans.iter().map(|s| span_index[&s.inverse()]).collect();
        Ok(SymRingModel {
            n,
            d,
            field,
            backend,
            spans,
            span_index,
            basis,
            points,
            values,
            values_inv,
            reduced,
            coproduct,
            antipode,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn backend(&self) -> Backend {
        self.backend
    }
    pub fn spans(&self) -> &[PartialInjection] {
        &self.spans
    }
    pub fn basis_injection(&self, i: usize) -> &PartialInjection {
        &self.spans[self.basis[i]]
    }
    pub fn span_of(&self, pi: &PartialInjection) -> Option<usize> {
        self.span_index.get(pi).copied()
    }
    pub fn interpolation_points(&self) -> &[Perm] {
        &self.points
    }

    /// Canonical coordinates of χ_π.
    pub fn chi(&self, pi: &PartialInjection) -> Result<Vec<u32>> {
        let s = self
            .span_of(pi)
            .ok_or_else(|| Error::Budget(format!("{pi} has more than {} pairs", self.d)))?;
        Ok(crate::hopf::densify(self.dim(), self.field, &self.reduced[s]))
    }

    /// Values of an element at the interpolation points.
    fn to_values(&self, v: &[u32]) -> Vec<u32> {
        self.values.vec_mul(v).expect("ring dimension")
    }

    fn from_values(&self, w: &[u32]) -> Vec<u32> {
        self.values_inv.vec_mul(w).expect("ring dimension")
    }

    /// Evaluation at a permutation: the functional σ_g.
    pub fn eval_functional(&self, g: &[usize]) -> Vec<u32> {
        self.basis.iter().map(|&s| self.spans[s].eval(g) as u32).collect()
    }

    /// Value of an element at a permutation.
    pub fn eval_at(&self, v: &[u32], g: &[usize]) -> u32 {
        let f = self.field;
        self.eval_functional(g)
            .iter()
            .zip(v)
            .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    /// U = k^n with `g . e_c = e_{g(c)}`, so `r[a][c] = χ_{c->a}`.
    pub fn standard_rep(&self) -> Result<Representation> {
        if self.d == 0 {
            return Err(Error::Budget("U needs degree 1 but the ring is truncated at 0".into()));
        }
        let n = self.n;
        Representation::from_fn(self, n, 1, |a, c| {
            self.chi(&PartialInjection { pairs: vec![(c, a)] }).expect("degree one")
        })
    }

    /// Mat_{n,n} under `g . A = g A g^T`, indexed `a * n + b`.
    pub fn conjugation_rep(&self) -> Result<Representation> {
        self.tensor_rep(2)
    }

    /// U^{(x) m}.
    pub fn tensor_rep(&self, m: usize) -> Result<Representation> {
        instantiate(self, &RepExpr::tensor_power(self.n, m))
    }
}

fn greedy_basis(f: Fp, spans: &[PartialInjection], points: &[Perm]) -> (Vec<usize>, Vec<Perm>) {
    let mut ech = Echelon::new(f, points.len());
    let mut basis = Vec::new();
    for (i, s) in spans.iter().enumerate() {
        if ech.is_full() {
            break;
        }
        let row: Vec<u32> = points.iter().map(|g| s.eval(g) as u32).collect();
        if ech.insert(row).is_some() {
            basis.push(i);
        }
    }
    let mut pivots = ech.pivot_of_rows();
    pivots.sort_unstable();
    (basis, pivots.into_iter().map(|j| points[j].clone()).collect())
}

fn sampled_basis(
    f: Fp,
    n: usize,
    spans: &[PartialInjection],
    seed: u64,
    stable_rounds: usize,
) -> (Vec<usize>, Vec<Perm>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batch = spans.len().max(8);
    let mut points: Vec<Perm> = vec![(0..n).collect()];
    let mut best = greedy_basis(f, spans, &points);
    let mut quiet = 0;
    while quiet < stable_rounds.max(1) {
        for _ in 0..batch {
            let mut g: Perm = (0..n).collect();
            g.shuffle(&mut rng);
            points.push(g);
        }
        let next = greedy_basis(f, spans, &points);
        if next.0.len() > best.0.len() {
            quiet = 0;
        } else {
            quiet += 1;
        }
        best = next;
        if best.0.len() == spans.len() {
            break;
        }
        // only the interpolation points matter for the next round
        points = best.1.clone();
    }
    best
}

/// `Δ(χ_π)(g, h) = χ_π(gh) = Σ_k χ_{k->tgt}(g) χ_{src->k}(h)` over injective
/// intermediate assignments k.
fn coproduct_of(
    n: usize,
    pi: &PartialInjection,
    index: &HashMap<PartialInjection, usize>,
) -> Vec<(usize, usize)> {
    let size = pi.size();
    let mut out = Vec::new();
    let mut mids = vec![0usize; size];
    let mut used = vec![false; n];
    fn rec(
        pos: usize,
        pi: &PartialInjection,
        mids: &mut Vec<usize>,
        used: &mut Vec<bool>,
        index: &HashMap<PartialInjection, usize>,
        out: &mut Vec<(usize, usize)>,
    ) {
        if pos == mids.len() {
            let left = PartialInjection::new(pi.pairs.iter().zip(mids.iter()).map(|(&(_, t), &k)| (k, t)).collect())
                .expect("injective");
            let right = PartialInjection::new(pi.pairs.iter().zip(mids.iter()).map(|(&(s, _), &k)| (s, k)).collect())
                .expect("injective");
            out.push((index[&left], index[&right]));
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                mids[pos] = k;
                rec(pos + 1, pi, mids, used, index, out);
                used[k] = false;
            }
        }
    }
    rec(0, pi, &mut mids, &mut used, index, &mut out);
    out
}

impl RingModel for SymRingModel {
    fn field(&self) -> Fp {
        self.field
    }
    fn d(&self) -> usize {
        self.d
    }
    fn dim(&self) -> usize {
        self.basis.len()
    }
    fn degree(&self, i: usize) -> usize {
        self.spans[self.basis[i]].size()
    }
    fn one(&self) -> Vec<u32> {
        crate::hopf::unit_vector(self.dim(), 0)
    }

    fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let f = self.field;
        let va = self.to_values(a);
        let vb = self.to_values(b);
        let prod: Vec<u32> = va.iter().zip(&vb).map(|(&x, &y)| f.mul(x, y)).collect();
        self.from_values(&prod)
    }

    fn span_len(&self) -> usize {
        self.spans.len()
    }
    fn basis_span(&self, i: usize) -> usize {
        self.basis[i]
    }
    fn reduce_span(&self, s: usize) -> &[(usize, u32)] {
        &self.reduced[s]
    }
    fn coproduct_terms(&self, i: usize) -> &[(usize, usize)] {
        &self.coproduct[i]
    }
    fn antipode_span(&self, s: usize) -> usize {
        self.antipode[s]
    }
    fn counit_span(&self, s: usize) -> u32 {
        self.spans[s].is_identity_part() as u32
    }

    /// Multiplying by a degree-one basis element masks the values.
    fn apply_shifts(&self, v: &[u32], ids: &[usize]) -> Vec<Vec<u32>> {
        let vals = self.to_values(v);
        ids.iter()
            .map(|&j| {
                let masked: Vec<u32> = vals
                    .iter()
                    .zip(self.values.row(j))
                    .map(|(&x, &y)| self.field.mul(x, y))
                    .collect();
                self.from_values(&masked)
            })
            .collect()
    }
}

impl RepSource for SymRingModel {
    fn atomic(&self, shape: &RepExpr) -> Result<Representation> {
        match shape {
            RepExpr::Std(n) if *n == self.n => self.standard_rep(),
            other => Err(Error::Capability(format!("{other} is not a Σ{} representation", self.n))),
        }
    }
}

/// A finite structure encoded as `A_Γ = (tensor(Y_1), ..., tensor(Y_s), 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureEncoding {
    pub n: usize,
    pub arities: Vec<usize>,
    pub shape: RepExpr,
    pub vector: Vec<u32>,
}

impl StructureEncoding {
    /// Offset of relation block i in the vector.
    pub fn block_offset(&self, i: usize) -> usize {
        self.arities[..i].iter().map(|&m| self.n.pow(m as u32)).sum()
    }
}

/// Index of a tuple in U^{(x) m}, first coordinate most significant.
pub fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * n + x)
}

/// Indicator tensors of the relations followed by the constant 1.
pub fn encode_structure(n: usize, relations: &[(usize, Vec<Vec<usize>>)]) -> Result<StructureEncoding> {
    let mut vector = Vec::new();
    let mut parts = Vec::new();
    for (arity, tuples) in relations {
        let mut block = vec![0u32; n.pow(*arity as u32)];
        for t in tuples {
            check_dim("tuple arity", *arity, t.len())?;
            if let Some(&x) = t.iter().find(|&&x| x >= n) {
                return Err(Error::Input(format!("tuple entry {x} out of range 0..{n}")));
            }
            block[tuple_index(n, t)] = 1;
        }
        vector.extend(block);
        parts.push(RepExpr::tensor_power(n, *arity));
    }
    vector.push(1);
    parts.push(RepExpr::Trivial);
    Ok(StructureEncoding {
        n,
        arities: relations.iter().map(|r| r.0).collect(),
        shape: RepExpr::Sum(parts),
        vector,
    })
}
