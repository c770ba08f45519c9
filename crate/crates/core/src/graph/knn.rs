use std::str::FromStr;

use rayon::prelude::*;

use super::SparseGraph;
use crate::data::{sq_dist, Dataset};
use crate::error::{Result, SpexError};

/// How the directed neighbor relation is symmetrized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KnnWeightMode {
    /// `w(x, y) = [y in N(x)] + [x in N(y)]`, so mutual neighbors weigh 2.
    #[default]
    IndicatorSum,
    /// `w(x, y) = 1` if either is a neighbor of the other.
    Union,
}

impl FromStr for KnnWeightMode {
    type Err = SpexError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indicator_sum" | "indicator-sum" | "sum" => Ok(Self::IndicatorSum),
            "union" => Ok(Self::Union),
            other => Err(SpexError::invalid(format!("unknown weight mode {other:?}"))),
        }
    }
}

/// Exact `kappa`-nearest-neighbor graph under the Euclidean metric, by brute
/// force. Distance ties go to the lower point index.
pub fn build_knn_graph(ds: &Dataset, kappa: usize, mode: KnnWeightMode) -> Result<SparseGraph> {
    let n = ds.n();
    if kappa == 0 || kappa >= n {
        return Err(SpexError::invalid(format!(
            "kappa must be in 1..{n}, got {kappa}"
        )));
    }
    let neighbors: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let row = ds.row(x);
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&y| y != x)
                .map(|y| (sq_dist(row, ds.row(y)), y))
                .collect();
            let by_dist =
                |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            cand.select_nth_unstable_by(kappa - 1, by_dist);
            cand.truncate(kappa);
            cand.into_iter().map(|(_, y)| y).collect()
        })
        .collect();

    let edges = neighbors
        .iter()
        .enumerate()
        .flat_map(|(x, ys)| ys.iter().map(move |&y| (x, y)));
    let graph = match mode {
        KnnWeightMode::IndicatorSum => SparseGraph::from_edges(n, edges.map(|(x, y)| (x, y, 1.0)))?,
        KnnWeightMode::Union => {
            let mut pairs: Vec<(usize, usize)> = edges.map(|(x, y)| (x.min(y), x.max(y))).collect();
            pairs.sort_unstable();
            pairs.dedup();
            SparseGraph::from_edges(n, pairs.into_iter().map(|(x, y)| (x, y, 1.0)))?
        }
    };
    Ok(graph)
}
