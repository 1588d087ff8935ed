//! CFI gadget graphs Γ(Q), Γ′(Q), their F₂ rank invariant, and the
//! 3-constructible functor that detects it.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::affcat::AffineSubspace;
use crate::error::{Error, Result};
use crate::ffla::{Fp, FpMatrix};
use crate::functors::{maps, FunctorExpr};
use crate::graph::{self, CfiMeta, ColoredGraph, GraphDocument};
use crate::rep::RepExpr;

/// A connected base graph with at least one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGraph {
    name: String,
    graph: ColoredGraph,
}

impl BaseGraph {
    pub fn new(name: &str, graph: ColoredGraph) -> Result<Self> {
        if graph.n() < 2 || !graph.is_connected() {
            return Err(Error::Input(format!("base graph {name} must be connected with at least 2 vertices")));
        }
        Ok(BaseGraph {
            name: name.to_string(),
            graph,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }
    pub fn vertex_count(&self) -> usize {
        self.graph.n()
    }
    pub fn edge_count(&self) -> usize {
        self.graph.edges().len()
    }

    pub fn k4() -> Self {
        Self::new("K4", graph::complete(4)).expect("connected")
    }
    pub fn k33() -> Self {
        Self::new("K3,3", graph::complete_bipartite(3, 3)).expect("connected")
    }
    pub fn cube() -> Self {
        Self::new("cube", graph::cube()).expect("connected")
    }
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Input(format!("cycle needs 3 vertices, got {n}")));
        }
        Self::new(&format!("C{n}"), graph::cycle(n))
    }

    /// Random spanning tree plus each remaining pair with probability
    /// `extra`.
    pub fn random_connected(n: usize, extra: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input(format!("random base graph needs 2 vertices, got {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = BTreeSet::new();
        for v in 1..n {
            let u = rng.gen_range(0..v);
            edges.insert((u, v));
        }
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(extra.clamp(0.0, 1.0)) {
                    edges.insert((a, b));
                }
            }
        }
        let edges: Vec<_> = edges.into_iter().collect();
        Self::new(&format!("random-{n}-{seed}"), ColoredGraph::uncolored(n, &edges)?)
    }

    /// `k4`, `k33`, `cube`, `cN` or `random:N:SEED`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "k4" => Ok(Self::k4()),
            "k33" | "k3,3" => Ok(Self::k33()),
            "cube" => Ok(Self::cube()),
            other => {
                if let Some(rest) = other.strip_prefix("random:") {
                    let mut it = rest.split(':');
                    let n = it.next().and_then(|s| s.parse().ok());
                    let seed = it.next().and_then(|s| s.parse().ok()).unwrap_or(0);
                    return match n {
                        Some(n) => Self::random_connected(n, 0.3, seed),
                        None => Err(Error::Input(format!("bad random base graph {name:?}"))),
                    };
                }
                if let Some(n) = other.strip_prefix('c').and_then(|s| s.parse().ok()) {
                    return Self::cycle(n);
                }
                Err(Error::Input(format!("unknown base graph {name:?}")))
            }
        }
    }
}

/// Untwisted and twisted gadget graphs on one vertex numbering: all
/// `c_{x,Y}` (color 0) then all `a_{x,e}, b_{x,e}` pairs (color 1).
#[derive(Clone, Debug)]
pub struct CfiPair {
    pub base: BaseGraph,
    pub special_edge: (usize, usize),
    pub untwisted: ColoredGraph,
    pub twisted: ColoredGraph,
    pub x1_count: usize,
    pub x2_count: usize,
    pub labels: Vec<String>,
}

impl CfiPair {
    pub fn document(&self, twisted: bool) -> GraphDocument {
        let g = if twisted { &self.twisted } else { &self.untwisted };
        let mut doc = GraphDocument::from_graph(g);
        doc.cfi = Some(CfiMeta {
            base: self.base.name.clone(),
            twisted,
            special_edge: [self.special_edge.0, self.special_edge.1],
        });
        doc
    }

    pub fn n(&self) -> usize {
        self.x1_count + self.x2_count
    }
}

pub fn build_cfi(q: &BaseGraph, special_edge: (usize, usize)) -> Result<CfiPair> {
    let g = &q.graph;
    let (sx, sy) = special_edge;
    if sx >= g.n() || sy >= g.n() || !g.has_edge(sx, sy) {
        return Err(Error::Input(format!("special edge ({sx}, {sy}) is not an edge of {}", q.name)));
    }
    let edges = g.edges();
    let incident: Vec<Vec<usize>> = (0..g.n())
        .map(|x| (0..edges.len()).filter(|&e| edges[e].0 == x || edges[e].1 == x).collect())
        .collect();
    let mut labels = Vec::new();
    // c_{x,Y}: Y as a bitmask over incident[x], even subsets in Gray-code order
    let mut gadgets: Vec<(usize, u64)> = Vec::new();
    for x in 0..g.n() {
        let deg = incident[x].len();
        for i in 0u64..1 << deg {
            let y = i ^ (i >> 1);
            if y.count_ones() % 2 == 0 {
                gadgets.push((x, y));
                let members: Vec<String> = (0..deg).filter(|&j| y >> j & 1 == 1).map(|j| incident[x][j].to_string()).collect();
                labels.push(format!("c[{x};{{{}}}]", members.join(",")));
            }
        }
    }
    let x1_count = gadgets.len();
    let mut a_id = vec![Vec::new(); g.n()];
    for x in 0..g.n() {
        for &e in &incident[x] {
            a_id[x].push((e, labels.len()));
            labels.push(format!("a[{x};{e}]"));
            labels.push(format!("b[{x};{e}]"));
        }
    }
    let a_of = |x: usize, e: usize| a_id[x].iter().find(|&&(f, _)| f == e).expect("incident").1;
    let b_of = |x: usize, e: usize| a_of(x, e) + 1;
    let n = labels.len();

    let mut base_edges = Vec::new();
    for (c, &(x, y)) in gadgets.iter().enumerate() {
        for (j, &e) in incident[x].iter().enumerate() {
            let end = if y >> j & 1 == 1 { a_of(x, e) } else { b_of(x, e) };
            base_edges.push((c, end));
        }
    }
    let special = edges
        .iter()
        .position(|&(u, v)| (u, v) == (sx.min(sy), sx.max(sy)))
        .expect("checked above");
    let mut plain = base_edges.clone();
    let mut twisted = base_edges;
    for (e, &(u, v)) in edges.iter().enumerate() {
        let (au, av, bu, bv) = (a_of(u, e), a_of(v, e), b_of(u, e), b_of(v, e));
        plain.push((au, av));
        plain.push((bu, bv));
        if e == special {
            twisted.push((a_of(sx, e), b_of(sy, e)));
            twisted.push((a_of(sy, e), b_of(sx, e)));
        } else {
            twisted.push((au, av));
            twisted.push((bu, bv));
        }
    }
    let colors: Vec<usize> = (0..n).map(|v| (v >= x1_count) as usize).collect();
    Ok(CfiPair {
        base: q.clone(),
        special_edge: (sx, sy),
        untwisted: ColoredGraph::new(n, &plain, Some(colors.clone()))?,
        twisted: ColoredGraph::new(n, &twisted, Some(colors))?,
        x1_count,
        x2_count: n - x1_count,
        labels,
    })
}

/// Pair twisted at the first edge of the base graph.
pub fn build_cfi_default(q: &BaseGraph) -> Result<CfiPair> {
    let e = q.graph.edges()[0];
    build_cfi(q, e)
}

/// Rank over F₂ of the rows indexed by `X₂` of the adjacency matrix with a
/// loop at every `X₂` vertex: the edge family `{a_{x,e}, a_{y,e}}` ranges
/// over all `x, y` sharing `e`, including `x = y`. The graphs themselves
/// stay loop-free since the loops are determined by the coloring.
pub fn lower_block_rank(pair: &CfiPair, g: &ColoredGraph) -> usize {
    let f = Fp::new(2).expect("prime");
    let mut rows = g.adjacency_rows().split_off(pair.x1_count);
    for (i, row) in rows.iter_mut().enumerate() {
        row[pair.x1_count + i] = 1;
    }
    FpMatrix::from_rows(f, g.n(), &rows).expect("square adjacency").rank()
}

/// `(rank B, rank B′)`.
pub fn rank_distinguisher(pair: &CfiPair) -> (usize, usize) {
    (lower_block_rank(pair, &pair.untwisted), lower_block_rank(pair, &pair.twisted))
}

/// `3|E| + |X| - 2` and `3|E| + |X| - 1`.
pub fn predicted_ranks(q: &BaseGraph) -> (usize, usize) {
    let r = 3 * q.edge_count() + q.vertex_count();
    (r - 2, r - 1)
}

/// Shape `U⊗U ⊕ U ⊕ U ⊕ k` of a two-colored encoding.
pub fn cfi_shape(n: usize) -> RepExpr {
    RepExpr::Sum(vec![
        RepExpr::tensor_power(n, 2),
        RepExpr::Std(n),
        RepExpr::Std(n),
        RepExpr::Trivial,
    ])
}

/// `𝒢 = F₃ ∘ (F₄ ⊗ (F₃ ∘ F₂ ∘ F₁))` with `F₁ = δ∘p₂`, `F₂(Z) = Z ⊗ U`,
/// `F₃` the contraction `(x⊗y)⊗z -> <y,z> x` and `F₄ = q + δ∘p₂`, the
/// adjacency block with the `X₂` loops restored. On an encoding it returns
/// the span of the columns indexed by `X₂`.
pub fn cfi_functor(n: usize) -> Result<FunctorExpr> {
    let d = 3;
    let v = cfi_shape(n);
    let u = RepExpr::Std(n);
    let uu = RepExpr::tensor_power(n, 2);
    let sizes = [n * n, n, n, 1];
    let p2 = FunctorExpr::linear(v.clone(), u.clone(), "color:1", maps::project(&sizes, 2), d)?;
    let delta = FunctorExpr::linear(u.clone(), uu.clone(), "diag", maps::diagonal(n), d)?;
    let f1 = FunctorExpr::compose(delta, p2)?;
    let f2 = FunctorExpr::tensor(f1, FunctorExpr::const_full(v.clone(), u.clone(), d)?)?;
    let contract = |shape: RepExpr| FunctorExpr::linear(shape, u.clone(), "contract", maps::contract(n), d);
    let inner = FunctorExpr::compose(contract(f2.target.clone())?, f2)?;
    let q = maps::project(&sizes, 0);
    let loops = maps::diagonal(n).after(&maps::project(&sizes, 2));
    let f4 = FunctorExpr::linear(v, uu, "adj+loops", q.plus(&loops)?, d)?;
    let t = FunctorExpr::tensor(f4, inner)?;
    FunctorExpr::compose(contract(t.target.clone())?, t)
}

/// Dimensions of `𝒢(A_Γ)` and `𝒢(A_Γ′)` computed by the functor engine.
pub fn functor_dims(pair: &CfiPair, f: Fp) -> Result<(Option<usize>, Option<usize>)> {
    if f.p() != 2 {
        return Err(Error::Input(format!("the CFI functor runs over F_2, got F_{}", f.p())));
    }
    let g = cfi_functor(pair.n())?;
    let classes: BTreeSet<usize> = [0, 1].into();
    let mut dims = [None, None];
    for (slot, graph) in dims.iter_mut().zip([&pair.untwisted, &pair.twisted]) {
        let enc = graph.encode(&classes)?;
        *slot = g.eval(f, &AffineSubspace::point(f, enc.vector))?.dim();
    }
    Ok((dims[0], dims[1]))
}
