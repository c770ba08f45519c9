use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Result, SpexError};

/// Undirected weighted graph in compressed adjacency form. Neighbor lists are
/// sorted by index; every edge appears in both endpoint lists.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    total_volume: f64,
}

impl SparseGraph {
    /// Builds from undirected edges. Repeated pairs (in either orientation)
    /// are merged by summing their weights.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(SpexError::IndexOutOfRange {
                    index: u.max(v),
                    len: n,
                });
            }
            if u == v {
                return Err(SpexError::invalid(format!("self-loop on node {u}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(SpexError::invalid(format!(
                    "edge {u}-{v} has non-positive weight {w}"
                )));
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let mut counts = vec![0usize; n];
        for &(u, v) in merged.keys() {
            counts[u] += 1;
            counts[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + counts[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        // keys are sorted by (u, v), so each list ends up sorted
        for (&(u, v), &w) in &merged {
            targets[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
        }
        for (&(u, v), &w) in &merged {
            targets[fill[v]] = u;
            weights[fill[v]] = w;
            fill[v] += 1;
        }
        for i in 0..n {
            let range = offsets[i]..offsets[i + 1];
            let mut pairs: Vec<(usize, f64)> = targets[range.clone()]
                .iter()
                .copied()
                .zip(weights[range.clone()].iter().copied())
                .collect();
            pairs.sort_by_key(|p| p.0);
            for (slot, (t, w)) in range.zip(pairs) {
                targets[slot] = t;
                weights[slot] = w;
            }
        }
        let degrees: Vec<f64> = (0..n)
            .map(|i| weights[offsets[i]..offsets[i + 1]].iter().sum())
            .collect();
        let total_volume = degrees.iter().sum();
        Ok(Self {
            n,
            offsets,
            targets,
            weights,
            degrees,
            total_volume,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[x]..self.offsets[x + 1];
        self.targets[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }

    pub fn degree(&self, x: usize) -> f64 {
        self.degrees[x]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Undirected edges `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| v > u)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Edge weight between `u` and `v`, 0 when absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let r = self.offsets[u]..self.offsets[u + 1];
        match self.targets[r.clone()].binary_search(&v) {
            Ok(p) => self.weights[r.start + p],
            Err(_) => 0.0,
        }
    }

    /// Rebuilds degrees from the adjacency lists and checks them, together
    /// with edge symmetry, against the stored values.
    pub fn audit(&self) -> bool {
        let symmetric = (0..self.n).all(|u| {
            self.neighbors(u)
                .all(|(v, w)| v != u && w > 0.0 && self.weight(v, u) == w)
        });
        let degrees_ok =
            (0..self.n).all(|u| self.neighbors(u).map(|(_, w)| w).sum::<f64>() == self.degrees[u]);
        symmetric && degrees_ok && self.degrees.iter().sum::<f64>() == self.total_volume
    }

    /// Subgraph induced on `nodes`, relabelled to `0..nodes.len()` in the
    /// given order.
    pub fn induced(&self, nodes: &[usize]) -> Result<SparseGraph> {
        let mut local = vec![usize::MAX; self.n];
        for (i, &x) in nodes.iter().enumerate() {
            if x >= self.n {
                return Err(SpexError::IndexOutOfRange {
                    index: x,
                    len: self.n,
                });
            }
            local[x] = i;
        }
        let edges = self
            .edges()
            .filter(|&(u, v, _)| local[u] != usize::MAX && local[v] != usize::MAX)
            .map(|(u, v, w)| (local[u], local[v], w));
        SparseGraph::from_edges(nodes.len(), edges)
    }

    /// `u v w` per line, each undirected edge once with `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (u, v, w) in self.edges() {
            writeln!(s, "{u} {v} {w}").unwrap();
        }
        s
    }

    pub fn from_edge_list(n: usize, text: &str) -> Result<SparseGraph> {
        let mut edges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || SpexError::Parse {
                path: "<edge list>".into(),
                line: i + 1,
                message: format!("expected `u v w`, got {line:?}"),
            };
            let mut it = line.split_whitespace();
            let u: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            let v: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            let w: f64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            edges.push((u, v, w));
        }
        SparseGraph::from_edges(n, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_with_row_sum_degrees() {
        let g = SparseGraph::from_edges(4, [(2, 0, 0.5), (0, 1, 1.0), (1, 0, 1.0), (3, 2, 2.0)])
            .unwrap();
        assert!(g.audit());
        assert_eq!(g.weight(0, 1), 2.0);
        assert_eq!(g.degree(2), 2.5);
        assert_eq!(g.total_volume(), 9.0);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn rejects_loops_and_bad_weights() {
        assert!(SparseGraph::from_edges(2, [(0, 0, 1.0)]).is_err());
        assert!(SparseGraph::from_edges(2, [(0, 1, 0.0)]).is_err());
        assert!(SparseGraph::from_edges(2, [(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = SparseGraph::from_edges(5, [(0, 4, 0.1), (1, 3, 1.0 / 3.0), (3, 4, 2.0)]).unwrap();
        let text = g.to_edge_list();
        assert!(text.lines().all(|l| {
            let mut it = l.split(' ');
            it.next().unwrap().parse::<usize>().unwrap()
                < it.next().unwrap().parse::<usize>().unwrap()
        }));
        assert_eq!(SparseGraph::from_edge_list(5, &text).unwrap(), g);
    }

    #[test]
    fn induced_subgraph() {
        let g = SparseGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let h = g.induced(&[2, 1, 3]).unwrap();
        assert_eq!(h.weight(0, 1), 1.0);
        assert_eq!(h.weight(0, 2), 1.0);
        assert_eq!(h.weight(1, 2), 0.0);
    }
}
