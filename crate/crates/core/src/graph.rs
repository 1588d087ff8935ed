//! Vertex-colored simple graphs and their JSON / edge-list documents.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sym_model::{encode_structure, StructureEncoding};

/// Undirected, loop-free graph with one color per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    n: usize,
    adj: Vec<Vec<bool>>,
    colors: Vec<usize>,
}

impl ColoredGraph {
    pub fn new(n: usize, edges: &[(usize, usize)], colors: Option<Vec<usize>>) -> Result<Self> {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Input(format!("edge ({a}, {b}) leaves 0..{n}")));
            }
            if a == b {
                return Err(Error::Input(format!("loop at vertex {a}")));
            }
            adj[a][b] = true;
            adj[b][a] = true;
        }
        let colors = colors.unwrap_or_else(|| vec![0; n]);
        if colors.len() != n {
            return Err(Error::Input(format!("{} colors for {n} vertices", colors.len())));
        }
        Ok(ColoredGraph { n, adj, colors })
    }

    pub fn uncolored(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, edges, None)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn colors(&self) -> &[usize] {
        &self.colors
    }
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }
    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&b| self.adj[a][b])
    }
    pub fn degree(&self, a: usize) -> usize {
        self.adj[a].iter().filter(|&&x| x).count()
    }

    /// Edges as sorted pairs `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.adj[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in self.neighbors(a) {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Image under the relabelling `i -> perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let edges: Vec<_> = self.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let mut colors = vec![0; self.n];
        for (i, &c) in self.colors.iter().enumerate() {
            colors[perm[i]] = c;
        }
        ColoredGraph::new(self.n, &edges, Some(colors))
    }

    /// Whether `perm` maps self onto other, colors included.
    pub fn is_isomorphism(&self, other: &ColoredGraph, perm: &[usize]) -> bool {
        if self.n != other.n || perm.len() != self.n {
            return false;
        }
        let mut hit = vec![false; self.n];
        for &x in perm {
            if x >= self.n || hit[x] {
                return false;
            }
            hit[x] = true;
        }
        (0..self.n).all(|a| {
            self.colors[a] == other.colors[perm[a]]
                && (0..self.n).all(|b| self.adj[a][b] == other.adj[perm[a]][perm[b]])
        })
    }

    pub fn color_classes(&self) -> BTreeSet<usize> {
        self.colors.iter().copied().collect()
    }

    pub fn adjacency_rows(&self) -> Vec<Vec<u32>> {
        self.adj.iter().map(|r| r.iter().map(|&x| x as u32).collect()).collect()
    }

    /// `A_Γ = (adjacency, indicator of each class in `classes`, 1)` in
    /// `U⊗U ⊕ U ⊕ ... ⊕ k`.
    pub fn encode(&self, classes: &BTreeSet<usize>) -> Result<StructureEncoding> {
        let mut rels = vec![(2, self.edges().iter().flat_map(|&(a, b)| [vec![a, b], vec![b, a]]).collect())];
        if classes.len() > 1 {
            for &c in classes {
                let members = (0..self.n).filter(|&v| self.colors[v] == c).map(|v| vec![v]).collect();
                rels.push((1, members));
            }
        }
        encode_structure(self.n, &rels)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfiMeta {
    pub base: String,
    pub twisted: bool,
    pub special_edge: [usize; 2],
}

/// On-disk graph: 0-based sorted edges, optional colors and CFI metadata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfi: Option<CfiMeta>,
}

impl GraphDocument {
    pub fn from_graph(g: &ColoredGraph) -> Self {
        let colored = g.colors.iter().any(|&c| c != 0);
        GraphDocument {
            n: g.n,
            edges: g.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            colors: colored.then(|| g.colors.clone()),
            cfi: None,
        }
    }

    /// Checks `u < v`, no duplicates and the color count.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &[a, b] in &self.edges {
            if a >= b {
                return Err(Error::Input(format!("edge [{a}, {b}] must satisfy u < v")));
            }
            if b >= self.n {
                return Err(Error::Input(format!("edge [{a}, {b}] leaves 0..{}", self.n)));
            }
            if !seen.insert((a, b)) {
                return Err(Error::Input(format!("duplicate edge [{a}, {b}]")));
            }
        }
        if let Some(c) = &self.colors {
            if c.len() != self.n {
                return Err(Error::Input(format!("{} colors for {} vertices", c.len(), self.n)));
            }
        }
        Ok(())
    }

    pub fn to_graph(&self) -> Result<ColoredGraph> {
        self.validate()?;
        let edges: Vec<_> = self.edges.iter().map(|&[a, b]| (a, b)).collect();
        ColoredGraph::new(self.n, &edges, self.colors.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }

    /// Parses JSON (if the text starts with `{`) or an edge list with an
    /// `n m` header followed by m lines `u v`. Edges in the list may come in
    /// either orientation.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
                line: e.line(),
                col: e.column(),
                msg: e.to_string(),
            })?;
            doc.validate()?;
            return Ok(doc);
        }
        parse_edge_list(text)
    }
}

fn parse_edge_list(text: &str) -> Result<GraphDocument> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let parse_pair = |lineno: usize, line: &str| -> Result<(usize, usize)> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                col: 1,
                msg: format!("expected two integers, found {}", fields.len()),
            });
        }
        let mut nums = [0usize; 2];
        for (k, field) in fields.iter().enumerate() {
            let col = line.find(field).unwrap_or(0) + 1;
            nums[k] = field.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                col,
                msg: format!("`{field}` is not a nonnegative integer"),
            })?;
        }
        Ok((nums[0], nums[1]))
    };
    let (hl, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        col: 1,
        msg: "missing `n m` header".into(),
    })?;
    let (n, m) = parse_pair(hl, header)?;
    let mut edges = Vec::with_capacity(m);
    for (ln, line) in lines.by_ref().take(m) {
        let (a, b) = parse_pair(ln, line)?;
        if a == b || a >= n || b >= n {
            return Err(Error::Parse {
                line: ln + 1,
                col: 1,
                msg: format!("edge {a} {b} is a loop or leaves 0..{n}"),
            });
        }
        edges.push([a.min(b), a.max(b)]);
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: text.lines().count() + 1,
            col: 1,
            msg: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse {
            line: ln + 1,
            col: 1,
            msg: "trailing content after the announced edges".into(),
        });
    }
    edges.sort_unstable();
    let doc = GraphDocument {
        n,
        edges,
        colors: None,
        cfi: None,
    };
    doc.validate()?;
    Ok(doc)
}

/// Named small graphs.
pub fn path(n: usize) -> ColoredGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    ColoredGraph::uncolored(n, &edges).expect("path")
}

pub fn cycle(n: usize) -> ColoredGraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    ColoredGraph::uncolored(n, &edges).expect("cycle")
}

pub fn complete(n: usize) -> ColoredGraph {
    let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    ColoredGraph::uncolored(n, &edges).expect("complete")
}

pub fn complete_bipartite(a: usize, b: usize) -> ColoredGraph {
    let edges: Vec<_> = (0..a).flat_map(|x| (0..b).map(move |y| (x, a + y))).collect();
    ColoredGraph::uncolored(a + b, &edges).expect("bipartite")
}

pub fn cube() -> ColoredGraph {
    let edges: Vec<_> = (0..8usize)
        .flat_map(|v| (0..3).map(move |bit| (v, v ^ (1 << bit))))
        .filter(|&(a, b)| a < b)
        .collect();
    ColoredGraph::uncolored(8, &edges).expect("cube")
}

/// Disjoint union.
pub fn union(a: &ColoredGraph, b: &ColoredGraph) -> ColoredGraph {
    let mut edges = a.edges();
    edges.extend(b.edges().iter().map(|&(x, y)| (x + a.n, y + a.n)));
    let mut colors = a.colors.clone();
    colors.extend_from_slice(&b.colors);
    ColoredGraph::new(a.n + b.n, &edges, Some(colors)).expect("union")
}

/// Every simple graph on n vertices, as edge subsets in bitmask order.
pub fn all_graphs(n: usize) -> Vec<ColoredGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            ColoredGraph::uncolored(n, &edges).expect("graph")
        })
        .collect()
}
