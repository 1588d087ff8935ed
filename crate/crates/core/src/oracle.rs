//! Brute-force references: the symmetric group as a table, R_d as a space of
//! functions on it, orbit search, and backtracking graph isomorphism.

use std::collections::HashMap;

use crate::affcat::AffineSubspace;
use crate::error::{check_dim, Error, Result};
use crate::ffla::{Fp, FpMatrix, FpSubspace};
use crate::graph::ColoredGraph;
use crate::modiso::MatrixTupleModule;
use crate::rep::RepExpr;
use crate::sym_model::{all_permutations, compose_perm, inverse_perm, partial_injections, Perm, SymRingModel, EXACT_LIMIT};
use crate::wl::color_refinement;

/// All of Σₙ in lexicographic order.
#[derive(Clone, Debug)]
pub struct GroupTable {
    n: usize,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl GroupTable {
    pub fn new(n: usize) -> Result<Self> {
        if n > EXACT_LIMIT {
            return Err(Error::Capability(format!("enumerating Σ_{n} is limited to n ≤ {EXACT_LIMIT}")));
        }
        let elements = all_permutations(n);
        let index = elements.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        Ok(GroupTable { n, elements, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }
    pub fn index_of(&self, g: &[usize]) -> Option<usize> {
        self.index.get(g).copied()
    }
    /// Index of `g_i ∘ g_j`.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.index[&compose_perm(&self.elements[i], &self.elements[j])]
    }
    pub fn inverse(&self, i: usize) -> usize {
        self.index[&inverse_perm(&self.elements[i])]
    }
    pub fn identity(&self) -> usize {
        0
    }
}

/// `R_0 ⊆ ... ⊆ R_d` as spans of the functions χ_π, |π| ≤ e, tabulated on
/// every group element.
#[derive(Clone, Debug)]
pub struct FunctionSpaceModel {
    pub group: GroupTable,
    pub d: usize,
    pub field: Fp,
    pub levels: Vec<FpSubspace>,
}

impl FunctionSpaceModel {
    pub fn build(n: usize, d: usize, p: u64) -> Result<Self> {
        let group = GroupTable::new(n)?;
        let field = Fp::new(p)?;
        let mut levels = Vec::new();
        let injections = partial_injections(n, d);
        for e in 0..=d {
            let funcs: Vec<Vec<u32>> = injections
                .iter()
                .filter(|pi| pi.size() <= e)
                .map(|pi| group.elements.iter().map(|g| pi.eval(g) as u32).collect())
                .collect();
            levels.push(FpSubspace::span(field, group.len(), &funcs)?);
        }
        Ok(FunctionSpaceModel { group, d, field, levels })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(FpSubspace::dim).collect()
    }

    pub fn top(&self) -> &FpSubspace {
        &self.levels[self.d]
    }

    fn product(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.field.mul(x, y)).collect()
    }

    /// Fixpoint of `S -> S + Σ_e (S ∩ R_e) R_{d-e}` with pointwise products.
    pub fn closure(&self, s: &FpSubspace) -> Result<FpSubspace> {
        let mut cur = s.clone();
        loop {
            let mut gens = cur.vectors();
            for e in 0..=self.d {
                let part = cur.intersect(&self.levels[e])?;
                let others = self.levels[self.d - e].vectors();
                for a in part.vectors() {
                    for b in &others {
                        gens.push(self.product(&a, b));
                    }
                }
            }
            let next = FpSubspace::span(self.field, self.group.len(), &gens)?;
            if next.dim() == cur.dim() {
                return Ok(next);
            }
            cur = next;
        }
    }

    /// The functions of an element given in a model's basis coordinates.
    pub fn functions_of(&self, model: &SymRingModel, span: &FpSubspace) -> Result<FpSubspace> {
        let funcs: Vec<Vec<u32>> = span
            .vectors()
            .iter()
            .map(|v| self.group.elements.iter().map(|g| model.eval_at(v, g)).collect())
            .collect();
        FpSubspace::span(self.field, self.group.len(), &funcs)
    }
}

/// Ideal and Hom dimension computed entirely in the function space.
#[derive(Clone, Debug)]
pub struct BruteHom {
    pub generating: FpSubspace,
    pub ideal: FpSubspace,
    pub dim: usize,
}

impl BruteHom {
    /// Whether evaluation at `g` annihilates the ideal.
    pub fn contains_sigma(&self, fs: &FunctionSpaceModel, g: &[usize]) -> bool {
        match fs.group.index_of(g) {
            Some(i) => self.ideal.vectors().iter().all(|v| v[i] == 0),
            None => false,
        }
    }
}

/// `Hom_d(X₁, X₂)` with the generating space built from the permutation
/// action directly: `g -> λ(g·v₁) - λ(v₂)` and `g -> λ(g·z)` for
/// `λ ⊥ Z₂`, `z ∈ Z₁`.
pub fn hom_space_bruteforce(
    fs: &FunctionSpaceModel,
    shape: &RepExpr,
    x1: &AffineSubspace,
    x2: &AffineSubspace,
) -> Result<BruteHom> {
    if fs.group.n() > 5 {
        return Err(Error::Capability("brute-force Hom spaces are limited to n ≤ 5".into()));
    }
    if shape.ell() > fs.d {
        return Err(Error::Budget(format!("{shape} needs degree {} > {}", shape.ell(), fs.d)));
    }
    check_dim("source ambient", shape.dim(), x1.ambient())?;
    check_dim("target ambient", shape.dim(), x2.ambient())?;
    let f = fs.field;
    let size = fs.group.len();
    let generating = match (x1.parts(), x2.parts()) {
        (None, _) => FpSubspace::zero(f, size),
        (Some(_), None) => FpSubspace::span(f, size, &[vec![1; size]])?,
        (Some((v1, z1)), Some((v2, z2))) => {
            let dot = |a: &[u32], b: &[u32]| a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)));
            let mut gens = Vec::new();
            let dirs = z1.vectors();
            for lam in z2.annihilator().vectors() {
                let base = dot(&lam, v2);
                let mut g1 = Vec::with_capacity(size);
                for g in fs.group.elements() {
                    g1.push(f.sub(dot(&lam, &shape.act_permutation(g, v1)?), base));
                }
                gens.push(g1);
                for z in &dirs {
                    let mut gz = Vec::with_capacity(size);
                    for g in fs.group.elements() {
                        gz.push(dot(&lam, &shape.act_permutation(g, z)?));
                    }
                    gens.push(gz);
                }
            }
            FpSubspace::span(f, size, &gens)?
        }
    };
    let ideal = fs.closure(&generating)?;
    let dim = fs.top().dim() - ideal.dim();
    Ok(BruteHom { generating, ideal, dim })
}

/// A permutation with `g·v₁ = v₂`, by enumeration.
pub fn orbit_equal(n: usize, shape: &RepExpr, v1: &[u32], v2: &[u32]) -> Result<Option<Perm>> {
    if n > EXACT_LIMIT {
        return Err(Error::Capability(format!("orbit enumeration is limited to n ≤ {EXACT_LIMIT}")));
    }
    check_dim("orbit vectors", v1.len(), v2.len())?;
    for g in all_permutations(n) {
        if shape.act_permutation(&g, v1)? == v2 {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// Individualization-refinement search; returns `perm` with
/// `g1.is_isomorphism(g2, perm)`.
pub fn graph_iso_search(g1: &ColoredGraph, g2: &ColoredGraph) -> Option<Perm> {
    if g1.n() != g2.n() {
        return None;
    }
    let init = vec![g1.colors().to_vec(), g2.colors().to_vec()];
    search(g1, g2, init)
}

fn histogram(colors: &[usize]) -> Vec<usize> {
    let mut h = colors.to_vec();
    h.sort_unstable();
    h
}

fn search(g1: &ColoredGraph, g2: &ColoredGraph, initial: Vec<Vec<usize>>) -> Option<Perm> {
    let (colors, _) = color_refinement(&[g1, g2], &initial);
    let (c1, c2) = (&colors[0], &colors[1]);
    if histogram(c1) != histogram(c2) {
        return None;
    }
    let n = g1.n();
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &c in c1 {
        *counts.entry(c).or_insert(0) += 1;
    }
    let target = (0..n)
        .filter(|&v| counts[&c1[v]] > 1)
        .min_by_key(|&v| (counts[&c1[v]], c1[v]));
    let Some(v) = target else {
        let mut perm = vec![0; n];
        for a in 0..n {
            perm[a] = (0..n).find(|&b| c2[b] == c1[a]).expect("equal histograms");
        }
        return g1.is_isomorphism(g2, &perm).then_some(perm);
    };
    let fresh = c1.iter().chain(c2).max().map_or(0, |m| m + 1);
    for w in (0..n).filter(|&w| c2[w] == c1[v]) {
        let mut a = c1.clone();
        let mut b = c2.clone();
        a[v] = fresh;
        b[w] = fresh;
        if let Some(p) = search(g1, g2, vec![a, b]) {
            return Some(p);
        }
    }
    None
}

/// An invertible `C` with `C A_i = B_i C`, by enumerating every matrix.
pub fn module_iso_bruteforce(m: &MatrixTupleModule, nmod: &MatrixTupleModule) -> Result<Option<FpMatrix>> {
    let n = m.n();
    check_dim("module dimension", n, nmod.n())?;
    check_dim("tuple length", m.mats().len(), nmod.mats().len())?;
    let f = m.mats().first().map(FpMatrix::field).ok_or_else(|| Error::Input("empty tuple".into()))?;
    let p = f.p() as u64;
    let total = p.checked_pow((n * n) as u32).filter(|&t| t <= 1 << 22);
    let Some(total) = total else {
        return Err(Error::Capability(format!("{p}^{} matrices is too many to enumerate", n * n)));
    };
    for code in 0..total {
        let mut c = code;
        let mat = FpMatrix::from_fn(f, n, n, |_, _| {
            let x = (c % p) as u32;
            c /= p;
            x
        });
        if mat.rank() < n {
            continue;
        }
        let ok = m
            .mats()
            .iter()
            .zip(nmod.mats())
            .all(|(a, b)| mat.mul(a).ok() == b.mul(&mat).ok());
        if ok {
            return Ok(Some(mat));
        }
    }
    Ok(None)
}
