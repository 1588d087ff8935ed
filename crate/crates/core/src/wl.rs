//! Weisfeiler-Lehman refinement: color refinement for k = 1 and folklore
//! k-WL for k = 2, 3. Graphs refined together share one signature table, so
//! color ids and histograms are comparable across them.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::ColoredGraph;
use crate::sym_model::tuple_index;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableColoring {
    pub k: usize,
    /// Color of each k-tuple, indexed like `U^{(x) k}`.
    pub colors: Vec<usize>,
    pub histogram: BTreeMap<usize, usize>,
    pub rounds: usize,
}

impl StableColoring {
    pub fn class_count(&self) -> usize {
        self.histogram.len()
    }
}

/// Replaces signatures by their rank among all distinct signatures.
fn canonicalize<S: Ord + Clone + std::hash::Hash>(sigs: &[Vec<S>]) -> (Vec<Vec<usize>>, usize) {
    let mut all: Vec<&S> = sigs.iter().flatten().collect();
    all.sort();
    all.dedup();
    let index: HashMap<&S, usize> = all.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let ids = sigs.iter().map(|v| v.iter().map(|s| index[s]).collect()).collect();
    (ids, all.len())
}

fn tuple_of(n: usize, k: usize, mut idx: usize) -> Vec<usize> {
    let mut t = vec![0; k];
    for slot in t.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    t
}

/// Colors of k-tuples: vertex colors plus the equality/adjacency pattern.
fn atomic_types(g: &ColoredGraph, k: usize) -> Vec<Vec<u64>> {
    let n = g.n();
    (0..n.pow(k as u32))
        .map(|idx| {
            let t = tuple_of(n, k, idx);
            let mut sig: Vec<u64> = t.iter().map(|&v| g.colors()[v] as u64).collect();
            for i in 0..k {
                for j in i + 1..k {
                    sig.push((t[i] == t[j]) as u64 * 2 + g.has_edge(t[i], t[j]) as u64);
                }
            }
            sig
        })
        .collect()
}

/// Color refinement from given initial vertex colors, run jointly.
pub fn color_refinement(graphs: &[&ColoredGraph], initial: &[Vec<usize>]) -> (Vec<Vec<usize>>, usize) {
    let (mut colors, mut count) = canonicalize(initial);
    let mut rounds = 0;
    loop {
        let sigs: Vec<Vec<(usize, Vec<usize>)>> = graphs
            .iter()
            .zip(&colors)
            .map(|(g, col)| {
                (0..g.n())
                    .map(|v| {
                        let mut nb: Vec<usize> = g.neighbors(v).map(|w| col[w]).collect();
                        nb.sort_unstable();
                        (col[v], nb)
                    })
                    .collect()
            })
            .collect();
        let (next, next_count) = canonicalize(&sigs);
        rounds += 1;
        colors = next;
        if next_count == count {
            return (colors, rounds);
        }
        count = next_count;
    }
}

fn folklore_round(n: usize, k: usize, col: &[usize]) -> Vec<(usize, Vec<Vec<usize>>)> {
    (0..col.len())
        .map(|idx| {
            let t = tuple_of(n, k, idx);
            let mut multiset: Vec<Vec<usize>> = (0..n)
                .map(|w| {
                    (0..k)
                        .map(|pos| {
                            let mut s = t.clone();
                            s[pos] = w;
                            col[tuple_index(n, &s)]
                        })
                        .collect()
                })
                .collect();
            multiset.sort_unstable();
            (col[idx], multiset)
        })
        .collect()
}

/// Stable colorings of several graphs refined with a shared color table.
pub fn wl_refine_joint(graphs: &[&ColoredGraph], k: usize) -> Result<Vec<StableColoring>> {
    if !(1..=3).contains(&k) {
        return Err(Error::Input(format!("k-WL is supported for k in 1..=3, got {k}")));
    }
    let (colors, rounds) = if k == 1 {
        let init: Vec<Vec<usize>> = graphs.iter().map(|g| g.colors().to_vec()).collect();
        color_refinement(graphs, &init)
    } else {
        let init: Vec<Vec<Vec<u64>>> = graphs.iter().map(|g| atomic_types(g, k)).collect();
        let (mut colors, mut count) = canonicalize(&init);
        let mut rounds = 0;
        loop {
            let sigs: Vec<_> = graphs
                .iter()
                .zip(&colors)
                .map(|(g, col)| folklore_round(g.n(), k, col))
                .collect();
            let (next, next_count) = canonicalize(&sigs);
            rounds += 1;
            colors = next;
            if next_count == count {
                break;
            }
            count = next_count;
        }
        (colors, rounds)
    };
    Ok(colors
        .into_iter()
        .map(|c| {
            let mut histogram = BTreeMap::new();
            for &x in &c {
                *histogram.entry(x).or_insert(0) += 1;
            }
            StableColoring {
                k,
                colors: c,
                histogram,
                rounds,
            }
        })
        .collect())
}

pub fn wl_refine(g: &ColoredGraph, k: usize) -> Result<StableColoring> {
    Ok(wl_refine_joint(&[g], k)?.remove(0))
}

/// True iff the stable histograms differ.
pub fn wl_distinguishes(g1: &ColoredGraph, g2: &ColoredGraph, k: usize) -> Result<bool> {
    if g1.n() != g2.n() {
        return Err(Error::DimensionMismatch {
            what: "vertex count",
            expected: g1.n(),
            got: g2.n(),
        });
    }
    let st = wl_refine_joint(&[g1, g2], k)?;
    Ok(st[0].histogram != st[1].histogram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, path, union};

    #[test]
    fn vertex_transitive_graph_has_one_class() {
        assert_eq!(wl_refine(&cycle(5), 1).unwrap().class_count(), 1);
    }

    #[test]
    fn path_on_three_vertices_has_two_classes() {
        assert_eq!(wl_refine(&path(3), 1).unwrap().class_count(), 2);
    }

    #[test]
    fn regular_graphs_fool_color_refinement_but_not_2wl() {
        let c6 = cycle(6);
        let two_triangles = union(&cycle(3), &cycle(3));
        assert!(!wl_distinguishes(&c6, &two_triangles, 1).unwrap());
        assert!(wl_distinguishes(&c6, &two_triangles, 2).unwrap());
    }

    #[test]
    fn degree_sequences_are_seen() {
        let k3k1 = union(&complete(3), &path(1));
        assert!(wl_distinguishes(&path(4), &k3k1, 1).unwrap());
        assert!(wl_distinguishes(&path(4), &path(3), 1).is_err());
        assert!(wl_refine(&path(3), 4).is_err());
    }
}
