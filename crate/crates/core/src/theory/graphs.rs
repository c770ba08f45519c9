//! Graph encodings of a reference clustering and the non-uniform sparsity
//! `Psi_{G,H}(S) = (e_G(S) / vol_G(X)) / (e_H(S) / vol_H(X))`.

use crate::error::{Result, SpexError};
use crate::graph::{cut_measures_of_mask, CliqueWeights, GraphHandle, SparseGraph};

/// Anything that can report the weight of a cut and its total volume.
pub trait CutWeights {
    fn n(&self) -> usize;
    fn cut_weight(&self, member: &[bool]) -> f64;
    fn volume(&self) -> f64;
}

impl CutWeights for GraphHandle {
    fn n(&self) -> usize {
        GraphHandle::n(self)
    }
    fn cut_weight(&self, member: &[bool]) -> f64 {
        cut_measures_of_mask(self, member).e
    }
    fn volume(&self) -> f64 {
        self.total_volume()
    }
}

impl CutWeights for SparseGraph {
    fn n(&self) -> usize {
        SparseGraph::n(self)
    }
    fn cut_weight(&self, member: &[bool]) -> f64 {
        (0..self.n())
            .filter(|&x| member[x])
            .flat_map(|x| self.neighbors(x))
            .filter(|&(y, _)| !member[y])
            .map(|(_, w)| w)
            .sum()
    }
    fn volume(&self) -> f64 {
        self.total_volume()
    }
}

/// The complete graph with `w(x, y) = a_x a_y` for every ordered pair,
/// diagonal included, so `vol(S) = a(S) a(X)` and `e(S, T) = a(S) a(T)`.
#[derive(Debug, Clone)]
pub struct ProductClique {
    weights: Vec<f64>,
}

impl ProductClique {
    pub fn new(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl CutWeights for ProductClique {
    fn n(&self) -> usize {
        self.weights.len()
    }
    fn cut_weight(&self, member: &[bool]) -> f64 {
        let a: f64 = self
            .weights
            .iter()
            .zip(member)
            .filter(|(_, &m)| m)
            .map(|(w, _)| w)
            .sum();
        let b: f64 = self
            .weights
            .iter()
            .zip(member)
            .filter(|(_, &m)| !m)
            .map(|(w, _)| w)
            .sum();
        a * b
    }
    fn volume(&self) -> f64 {
        let total: f64 = self.weights.iter().sum();
        total * total
    }
}

/// `Psi_{G,H}(S)`; `+inf` when `e_H(S) = 0`. A zero `e_G` gives 0 even when
/// `vol_G(X) = 0`.
pub fn nonuniform_sparsity(g: &dyn CutWeights, h: &dyn CutWeights, s: &[usize]) -> Result<f64> {
    if g.n() != h.n() {
        return Err(SpexError::DimensionMismatch {
            expected: g.n(),
            actual: h.n(),
        });
    }
    let mut member = vec![false; g.n()];
    for &x in s {
        if x >= g.n() {
            return Err(SpexError::IndexOutOfRange {
                index: x,
                len: g.n(),
            });
        }
        member[x] = true;
    }
    let e_h = h.cut_weight(&member);
    if e_h <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let e_g = g.cut_weight(&member);
    let num = if e_g == 0.0 { 0.0 } else { e_g / g.volume() };
    Ok(num / (e_h / h.volume()))
}

/// Unit-weight complete graph.
pub fn complete_graph(n: usize) -> SparseGraph {
    let edges = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y, 1.0)));
    SparseGraph::from_edges(n, edges).expect("valid by construction")
}

/// `w(x, y) = d_G(x) d_G(y)` for every pair of distinct, positive-degree
/// nodes (the diagonal is dropped; see [`ProductClique`] for the version
/// with it).
pub fn degree_weighted_clique(g: &GraphHandle) -> SparseGraph {
    let n = g.n();
    let edges = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y, g.degree(x) * g.degree(y))))
        .filter(|e| e.2 > 0.0);
    SparseGraph::from_edges(n, edges.collect::<Vec<_>>()).expect("valid by construction")
}

pub fn degree_product_clique(g: &GraphHandle) -> ProductClique {
    ProductClique::new((0..g.n()).map(|x| g.degree(x)).collect())
}

pub fn single_edge(n: usize, s: usize, t: usize) -> Result<SparseGraph> {
    SparseGraph::from_edges(n, [(s, t, 1.0)])
}

/// Star graph over `X ++ M` (`n + k` nodes): every point `x` in `nodes` is
/// joined to its centroid `n + labels[x]` when that centroid is in `nodes`.
/// With `nodes = None` the whole set is used.
pub fn star_graph(labels: &[usize], k: usize, nodes: Option<&[usize]>) -> SparseGraph {
    let n = labels.len();
    let mut present = vec![nodes.is_none(); n + k];
    if let Some(nodes) = nodes {
        nodes.iter().for_each(|&x| present[x] = true);
    }
    let edges = (0..n)
        .filter(|&x| present[x] && present[n + labels[x]])
        .map(|x| (x, n + labels[x], 1.0));
    SparseGraph::from_edges(n + k, edges.collect::<Vec<_>>()).expect("valid by construction")
}

/// Unit edges between every pair of points in different clusters.
pub fn independent_set_graph(labels: &[usize]) -> SparseGraph {
    let n = labels.len();
    let edges = (0..n).flat_map(|x| {
        (x + 1..n)
            .filter(move |&y| labels[x] != labels[y])
            .map(move |y| (x, y, 1.0))
    });
    SparseGraph::from_edges(n, edges.collect::<Vec<_>>()).expect("valid by construction")
}

/// Clique on every cluster, edge by edge.
pub fn explicit_clique(labels: &[usize], mode: CliqueWeights) -> SparseGraph {
    let n = labels.len();
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k];
    labels.iter().for_each(|&l| sizes[l] += 1);
    let weight = |c: usize| match mode {
        CliqueWeights::Unit => 1.0,
        CliqueWeights::Corollary => 1.0 / (sizes[c] - 1) as f64,
    };
    let edges = (0..n).flat_map(|x| {
        (x + 1..n)
            .filter(move |&y| labels[x] == labels[y])
            .map(move |y| (x, y, weight(labels[x])))
    });
    SparseGraph::from_edges(n, edges.collect::<Vec<_>>()).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cut_measures;

    fn path4() -> GraphHandle {
        SparseGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0)])
            .unwrap()
            .into()
    }

    #[test]
    fn complete_graph_gives_scaled_ratio_cut() {
        let g = path4();
        let k4 = complete_graph(4);
        let s = [0, 1];
        let psi = nonuniform_sparsity(&g, &k4, &s).unwrap();
        let m = cut_measures(&g, &s).unwrap();
        // e_K = |S||T|, vol_K = n(n-1)
        let expected = m.ratio_cut * 3.0 / g.total_volume();
        assert!((psi - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn degree_product_clique_gives_normalized_cut() {
        let g = path4();
        let h = degree_product_clique(&g);
        for s in [vec![0], vec![0, 1], vec![1, 3], vec![0, 2, 3]] {
            let a = nonuniform_sparsity(&g, &h, &s).unwrap();
            let b = cut_measures(&g, &s).unwrap().normalized_cut;
            assert!((a - b).abs() <= 1e-12 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn single_edge_is_min_st_cut_scaling() {
        let g = path4();
        let h = single_edge(4, 0, 3).unwrap();
        let v = nonuniform_sparsity(&g, &h, &[0, 1]).unwrap();
        assert_eq!(v, 2.0 / g.total_volume() * 2.0);
        assert_eq!(nonuniform_sparsity(&g, &h, &[1, 2]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn encodings_of_a_clustering() {
        let labels = [0, 0, 1, 2, 1];
        let is = independent_set_graph(&labels);
        assert_eq!(is.edge_count(), 10 - 2);
        let star = star_graph(&labels, 3, None);
        assert_eq!(star.n(), 8);
        assert_eq!(star.degree(5), 2.0);
        let sub = star_graph(&labels, 3, Some(&[0, 2, 5]));
        assert_eq!(sub.edge_count(), 1);
        let c = explicit_clique(&labels, CliqueWeights::Corollary);
        assert_eq!(c.degree(0), 1.0);
        assert_eq!(c.degree(3), 0.0);
    }
}
