//! Weighted graphs over a point set and the cut measures defined on them.
//!
//! For a node subset `S` of the vertex set `X`, with cut weight
//! `e = e(S, X \ S)` and volumes `vol(S)`, `vol(X \ S)`:
//!
//! | measure              | value                                     |
//! |----------------------|-------------------------------------------|
//! | sparsity `phi`       | `e / |S|`                                 |
//! | conductance `psi`    | `e / vol(S)`                              |
//! | ratio cut `Phi`      | `e / (|S| |X \ S| / |X|)`                 |
//! | normalized cut `Psi` | `e / (vol(S) vol(X \ S) / vol(X))`        |
//! | `theta`              | `e / min(vol(S), vol(X \ S))`             |
//!
//! Conventions: a zero-volume (or empty) side has conductance 0, and the
//! two-way measures of a trivial cut (`S` empty or all of `X`) are `+inf`.

mod clique;
mod knn;
mod sparse;
mod sweep;

pub use clique::{CliqueClusterGraph, CliqueWeights};
pub use knn::{build_knn_graph, KnnWeightMode};
pub use sparse::SparseGraph;
pub use sweep::{sweep, SweepState};

use crate::error::{Result, SpexError};

/// A graph over points `0..n`: either stored explicitly or described
/// implicitly by cluster labels.
#[derive(Debug, Clone)]
pub enum GraphHandle {
    Sparse(SparseGraph),
    Clique(CliqueClusterGraph),
}

impl GraphHandle {
    pub fn n(&self) -> usize {
        match self {
            GraphHandle::Sparse(g) => g.n(),
            GraphHandle::Clique(g) => g.n(),
        }
    }

    pub fn degree(&self, x: usize) -> f64 {
        match self {
            GraphHandle::Sparse(g) => g.degree(x),
            GraphHandle::Clique(g) => g.degree(x),
        }
    }

    pub fn total_volume(&self) -> f64 {
        match self {
            GraphHandle::Sparse(g) => g.total_volume(),
            GraphHandle::Clique(g) => g.total_volume(),
        }
    }
}

impl From<SparseGraph> for GraphHandle {
    fn from(g: SparseGraph) -> Self {
        GraphHandle::Sparse(g)
    }
}

impl From<CliqueClusterGraph> for GraphHandle {
    fn from(g: CliqueClusterGraph) -> Self {
        GraphHandle::Clique(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutMeasures {
    /// Cut weight `e(S, X \ S)`.
    pub e: f64,
    pub vol_s: f64,
    pub vol_rest: f64,
    pub size_s: usize,
    pub size_rest: usize,
    /// Sparsity `e / |S|`.
    pub phi: f64,
    /// Conductance `e / vol(S)`.
    pub psi: f64,
    /// Conductance of the complement, `e / vol(X \ S)`.
    pub psi_rest: f64,
    /// Ratio cut.
    pub ratio_cut: f64,
    /// Normalized cut, `psi + psi_rest`.
    pub normalized_cut: f64,
    /// Min-volume conductance.
    pub theta: f64,
}

impl CutMeasures {
    pub fn from_parts(e: f64, vol_s: f64, vol_rest: f64, size_s: usize, size_rest: usize) -> Self {
        let e = e.max(0.0);
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        let psi = ratio(e, vol_s);
        let psi_rest = ratio(e, vol_rest);
        let trivial = size_s == 0 || size_rest == 0;
        let (ratio_cut, normalized_cut, theta) = if trivial {
            (f64::INFINITY, f64::INFINITY, f64::INFINITY)
        } else {
            let n = (size_s + size_rest) as f64;
            (
                e * n / (size_s as f64 * size_rest as f64),
                psi + psi_rest,
                ratio(e, vol_s.min(vol_rest)),
            )
        };
        Self {
            e,
            vol_s,
            vol_rest,
            size_s,
            size_rest,
            phi: ratio(e, size_s as f64),
            psi,
            psi_rest,
            ratio_cut,
            normalized_cut,
            theta,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.size_s == 0 || self.size_rest == 0
    }
}

/// Cut measures of `s` against the whole vertex set. Duplicate indices in `s`
/// are ignored.
pub fn cut_measures(g: &GraphHandle, s: &[usize]) -> Result<CutMeasures> {
    let n = g.n();
    let mut member = vec![false; n];
    for &x in s {
        if x >= n {
            return Err(SpexError::IndexOutOfRange { index: x, len: n });
        }
        member[x] = true;
    }
    Ok(cut_measures_of_mask(g, &member))
}

pub(crate) fn cut_measures_of_mask(g: &GraphHandle, member: &[bool]) -> CutMeasures {
    let size_s = member.iter().filter(|&&m| m).count();
    let size_rest = member.len() - size_s;
    match g {
        GraphHandle::Sparse(g) => {
            let (mut e, mut vol_s, mut vol_rest) = (0.0, 0.0, 0.0);
            for x in 0..g.n() {
                if member[x] {
                    vol_s += g.degree(x);
                    e += g
                        .neighbors(x)
                        .filter(|&(y, _)| !member[y])
                        .map(|(_, w)| w)
                        .sum::<f64>();
                } else {
                    vol_rest += g.degree(x);
                }
            }
            CutMeasures::from_parts(e, vol_s, vol_rest, size_s, size_rest)
        }
        GraphHandle::Clique(g) => {
            let mut counts = vec![0usize; g.k()];
            for (x, &m) in member.iter().enumerate() {
                if m {
                    counts[g.label(x)] += 1;
                }
            }
            let (e, vol_s, vol_rest) = g.measures_from_counts(&counts);
            CutMeasures::from_parts(e, vol_s, vol_rest, size_s, size_rest)
        }
    }
}
