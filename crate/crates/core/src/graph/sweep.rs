//! Incremental prefix/suffix cut accounting for the sweep line.
//!
//! A node's points start in the suffix and move to the prefix one at a time.
//! Both sides are measured against the full vertex set. The clique graph
//! keeps per-cluster prefix and suffix counts (`O(1)` per move); an explicit
//! graph keeps running cut weights and volumes (`O(deg)` per move).

use super::{CliqueClusterGraph, CutMeasures, GraphHandle, SparseGraph};
use crate::error::{Result, SpexError};

const OUTSIDE: u8 = 0;
const SUFFIX: u8 = 1;
const PREFIX: u8 = 2;

#[derive(Debug, Clone)]
pub struct SweepState<'g> {
    n: usize,
    total_volume: f64,
    prefix_len: usize,
    suffix_len: usize,
    e_prefix: f64,
    vol_prefix: f64,
    e_suffix: f64,
    vol_suffix: f64,
    kind: Kind<'g>,
}

#[derive(Debug, Clone)]
enum Kind<'g> {
    Clique {
        g: &'g CliqueClusterGraph,
        weight: Vec<f64>,
        degree: Vec<f64>,
        prefix: Vec<usize>,
        suffix: Vec<usize>,
    },
    Sparse {
        g: &'g SparseGraph,
        state: Vec<u8>,
        node: Vec<usize>,
        /// Points of positive degree on each side; a side with none has
        /// exactly zero cut and volume.
        live_prefix: usize,
        live_suffix: usize,
    },
}

impl<'g> SweepState<'g> {
    pub fn new(graph: &'g GraphHandle) -> Self {
        let kind = match graph {
            GraphHandle::Clique(g) => Kind::Clique {
                g,
                weight: (0..g.k()).map(|c| g.edge_weight(c)).collect(),
                degree: (0..g.k()).map(|c| g.cluster_degree(c)).collect(),
                prefix: vec![0; g.k()],
                suffix: vec![0; g.k()],
            },
            GraphHandle::Sparse(g) => Kind::Sparse {
                g,
                state: vec![OUTSIDE; g.n()],
                node: Vec::new(),
                live_prefix: 0,
                live_suffix: 0,
            },
        };
        Self {
            n: graph.n(),
            total_volume: graph.total_volume(),
            prefix_len: 0,
            suffix_len: 0,
            e_prefix: 0.0,
            vol_prefix: 0.0,
            e_suffix: 0.0,
            vol_suffix: 0.0,
            kind,
        }
    }

    /// Empties the prefix and places all of `node_points` in the suffix.
    pub fn reset(&mut self, node_points: &[usize]) {
        self.prefix_len = 0;
        self.suffix_len = node_points.len();
        self.e_prefix = 0.0;
        self.vol_prefix = 0.0;
        match &mut self.kind {
            Kind::Clique {
                g,
                weight,
                degree,
                prefix,
                suffix,
            } => {
                prefix.iter_mut().for_each(|c| *c = 0);
                suffix.iter_mut().for_each(|c| *c = 0);
                for &x in node_points {
                    suffix[g.label(x)] += 1;
                }
                let (mut e, mut vol) = (0.0, 0.0);
                for (c, &t) in suffix.iter().enumerate() {
                    e += weight[c] * (t * (g.sizes()[c] - t)) as f64;
                    vol += t as f64 * degree[c];
                }
                self.e_suffix = e;
                self.vol_suffix = vol;
            }
            Kind::Sparse {
                g,
                state,
                node,
                live_prefix,
                live_suffix,
            } => {
                for &x in node.iter() {
                    state[x] = OUTSIDE;
                }
                node.clear();
                node.extend_from_slice(node_points);
                for &x in node_points {
                    state[x] = SUFFIX;
                }
                *live_prefix = 0;
                *live_suffix = node_points.iter().filter(|&&x| g.degree(x) > 0.0).count();
                let (mut e, mut vol) = (0.0, 0.0);
                for &x in node_points {
                    vol += g.degree(x);
                    e += g
                        .neighbors(x)
                        .filter(|&(y, _)| state[y] != SUFFIX)
                        .map(|(_, w)| w)
                        .sum::<f64>();
                }
                self.e_suffix = e;
                self.vol_suffix = vol;
            }
        }
    }

    /// Moves `x` from the suffix to the prefix.
    pub fn advance(&mut self, x: usize) {
        debug_assert!(self.suffix_len > 0);
        self.prefix_len += 1;
        self.suffix_len -= 1;
        match &mut self.kind {
            Kind::Clique {
                g,
                weight,
                degree,
                prefix,
                suffix,
            } => {
                let c = g.label(x);
                let n = g.sizes()[c] as f64;
                let (s, t) = (prefix[c] as f64, suffix[c] as f64);
                debug_assert!(suffix[c] > 0);
                // s(n - s) -> (s + 1)(n - s - 1) and t(n - t) -> (t - 1)(n - t + 1)
                self.e_prefix += weight[c] * (n - 2.0 * s - 1.0);
                self.e_suffix += weight[c] * (2.0 * t - n - 1.0);
                self.vol_prefix += degree[c];
                self.vol_suffix -= degree[c];
                prefix[c] += 1;
                suffix[c] -= 1;
            }
            Kind::Sparse {
                g,
                state,
                live_prefix,
                live_suffix,
                ..
            } => {
                debug_assert_eq!(state[x], SUFFIX, "point {x} is not in the suffix");
                state[x] = PREFIX;
                for (y, w) in g.neighbors(x) {
                    match state[y] {
                        PREFIX => self.e_prefix -= w,
                        _ => self.e_prefix += w,
                    }
                    match state[y] {
                        SUFFIX => self.e_suffix += w,
                        _ => self.e_suffix -= w,
                    }
                }
                let d = g.degree(x);
                self.vol_prefix += d;
                self.vol_suffix -= d;
                if d > 0.0 {
                    *live_prefix += 1;
                    *live_suffix -= 1;
                    if *live_suffix == 0 {
                        self.e_suffix = 0.0;
                        self.vol_suffix = 0.0;
                    }
                }
            }
        }
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    pub fn suffix_len(&self) -> usize {
        self.suffix_len
    }

    pub fn prefix_measures(&self) -> CutMeasures {
        CutMeasures::from_parts(
            self.e_prefix,
            self.vol_prefix,
            self.total_volume - self.vol_prefix,
            self.prefix_len,
            self.n - self.prefix_len,
        )
    }

    pub fn suffix_measures(&self) -> CutMeasures {
        CutMeasures::from_parts(
            self.e_suffix,
            self.vol_suffix,
            self.total_volume - self.vol_suffix,
            self.suffix_len,
            self.n - self.suffix_len,
        )
    }

    /// `psi(prefix) + psi(suffix)`, the conductance split score of the
    /// current sweep position.
    #[inline]
    pub fn conductance_split_score(&self) -> f64 {
        let psi = |e: f64, vol: f64| if vol > 0.0 { e.max(0.0) / vol } else { 0.0 };
        psi(self.e_prefix, self.vol_prefix) + psi(self.e_suffix, self.vol_suffix)
    }
}

/// Measures of every proper prefix of `node_points` and of its complementary
/// suffix, in order.
pub fn sweep(g: &GraphHandle, node_points: &[usize]) -> Result<Vec<(CutMeasures, CutMeasures)>> {
    let mut seen = vec![false; g.n()];
    for &x in node_points {
        if x >= g.n() {
            return Err(SpexError::IndexOutOfRange {
                index: x,
                len: g.n(),
            });
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(SpexError::invalid(format!(
                "point {x} appears twice in the node"
            )));
        }
    }
    let mut state = SweepState::new(g);
    state.reset(node_points);
    let mut out = Vec::with_capacity(node_points.len().saturating_sub(1));
    for &x in node_points.iter().take(node_points.len().saturating_sub(1)) {
        state.advance(x);
        out.push((state.prefix_measures(), state.suffix_measures()));
    }
    Ok(out)
}
