use serde::Serialize;

use super::graphs::explicit_clique;
use crate::cuts::{midpoint, sorted_along};
use crate::data::{cluster_means, kmeans_cost, sq_dist, Dataset, ReferenceClustering};
use crate::error::{Result, SpexError};
use crate::graph::{CliqueClusterGraph, CliqueWeights, GraphHandle, SweepState};

/// Absolute slack on every asserted inequality.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutValue {
    pub j: usize,
    pub tau: f64,
    pub value: f64,
}

fn better(candidate: CutValue, best: Option<CutValue>) -> bool {
    best.is_none_or(|b| candidate.value < b.value)
}

/// Minimum of `theta` and of the normalized cut over every valid coordinate
/// cut, ties to smaller `j` then smaller `tau`.
pub fn coordinate_cut_minima(
    ds: &Dataset,
    g: &GraphHandle,
) -> (Option<CutValue>, Option<CutValue>) {
    let all: Vec<usize> = (0..ds.n()).collect();
    let mut state = SweepState::new(g);
    let (mut theta, mut psi) = (None, None);
    for j in 0..ds.d() {
        let order = sorted_along(ds, &all, j);
        state.reset(&order);
        let mut start = 0;
        while start < order.len() {
            let v = ds.value(order[start], j);
            let mut end = start + 1;
            while end < order.len() && ds.value(order[end], j) == v {
                end += 1;
            }
            if end == order.len() {
                break;
            }
            order[start..end].iter().for_each(|&x| state.advance(x));
            let m = state.prefix_measures();
            let tau = midpoint(v, ds.value(order[end], j));
            let t = CutValue {
                j,
                tau,
                value: m.theta,
            };
            if better(t, theta) {
                theta = Some(t);
            }
            let p = CutValue {
                j,
                tau,
                value: m.normalized_cut,
            };
            if better(p, psi) {
                psi = Some(p);
            }
            start = end;
        }
    }
    (theta, psi)
}

/// Coordinate-cut conductance against the geometric bound.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// The denominator vanishes (all positive-degree points coincide) or no
    /// valid cut exists; no bound is asserted.
    pub degenerate: bool,
    pub e_adj: f64,
    pub e_all: f64,
    /// `E_adj / E_all`.
    pub ratio: f64,
    /// `sqrt(ratio)`.
    pub bound_tight: f64,
    /// `sqrt(2 ratio)`.
    pub bound_safe: f64,
    pub best_theta: Option<CutValue>,
    pub best_psi: Option<CutValue>,
    pub holds_tight_theta: bool,
    pub holds_tight_psi: bool,
    pub holds_safe_theta: bool,
}

fn edges_of(g: &GraphHandle) -> Vec<(usize, usize, f64)> {
    match g {
        GraphHandle::Sparse(s) => s.edges().collect(),
        GraphHandle::Clique(c) => explicit_clique(c.labels(), c.mode()).edges().collect(),
    }
}

/// Evaluates both sides of the geometric Cheeger bound on `(ds, g)`.
///
/// With `Delta` the total (unordered) edge weight,
/// `E_adj = sum_{edges} (w / Delta) |x - y|^2` and
/// `E_all = sum_{x, y} d(x) d(y) / (2 Delta)^2 |x - y|^2` over ordered pairs,
/// the latter evaluated as `sum_x d(x) |x - m|^2 / Delta` around the
/// degree-weighted mean `m`.
pub fn theorem1_report(ds: &Dataset, g: &GraphHandle) -> Result<BoundReport> {
    if g.n() != ds.n() {
        return Err(SpexError::DimensionMismatch {
            expected: ds.n(),
            actual: g.n(),
        });
    }
    let edges = edges_of(g);
    let delta: f64 = edges.iter().map(|e| e.2).sum();
    if delta <= 0.0 {
        return Err(SpexError::invalid(
            "the bound needs a graph with at least one edge",
        ));
    }
    let e_adj = edges
        .iter()
        .map(|&(x, y, w)| w / delta * sq_dist(ds.row(x), ds.row(y)))
        .sum::<f64>();
    let d = ds.d();
    let mut mean = vec![0.0; d];
    for x in 0..ds.n() {
        for (m, v) in mean.iter_mut().zip(ds.row(x)) {
            *m += g.degree(x) * v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= 2.0 * delta);
    let e_all = (0..ds.n())
        .map(|x| g.degree(x) * sq_dist(ds.row(x), &mean))
        .sum::<f64>()
        / delta;

    let (best_theta, best_psi) = coordinate_cut_minima(ds, g);
    let degenerate = e_all <= 0.0 || best_theta.is_none();
    let ratio = if e_all > 0.0 { e_adj / e_all } else { f64::NAN };
    let (bound_tight, bound_safe) = (ratio.sqrt(), (2.0 * ratio).sqrt());
    let le =
        |v: Option<CutValue>, b: f64| !degenerate && v.is_some_and(|c| c.value <= b + BOUND_SLACK);
    Ok(BoundReport {
        degenerate,
        e_adj,
        e_all,
        ratio,
        bound_tight,
        bound_safe,
        best_theta,
        best_psi,
        holds_tight_theta: le(best_theta, bound_tight),
        holds_tight_psi: le(best_psi, bound_tight),
        holds_safe_theta: le(best_theta, bound_safe),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryReport {
    pub k: usize,
    /// k-means cost against the cluster means.
    pub cost: f64,
    /// `(1/|X|) sum_{x, y} |x - y|^2` over ordered pairs.
    pub mean_pair_distance: f64,
    /// `sqrt(2 cost / mean_pair_distance)`.
    pub bound_tight: f64,
    pub best_theta: Option<CutValue>,
    pub best_psi: Option<CutValue>,
    /// Whether the bound is meaningful: two or more clusters and a
    /// non-degenerate instance.
    pub asserted: bool,
    pub holds_tight: bool,
    /// `theta_min <= sqrt(2) * bound_tight`.
    pub holds_sqrt2: bool,
    /// Largest relative gap, over clusters, between `sum |x - mu|^2` and
    /// `(1/|C|) sum_{x != y} |x - y|^2` (unordered pairs).
    pub fact_max_rel_error: f64,
    pub fact_holds: bool,
    /// The same instance through the general bound.
    pub theorem: BoundReport,
}

pub fn corollary_report(ds: &Dataset, reference: &ReferenceClustering) -> Result<CorollaryReport> {
    let labels = reference.labels();
    if labels.len() != ds.n() {
        return Err(SpexError::LabelCountMismatch {
            labels: labels.len(),
            points: ds.n(),
        });
    }
    let sizes = reference.cluster_sizes();
    if sizes.iter().all(|&s| s < 2) {
        return Err(SpexError::invalid(
            "every cluster is a singleton; the weighted clique has no edges",
        ));
    }
    let k = reference.k();
    let g: GraphHandle = CliqueClusterGraph::new(reference, CliqueWeights::Corollary).into();
    let means = cluster_means(ds, labels, k);
    let cost = kmeans_cost(ds, labels, &means);

    let n = ds.n() as f64;
    let all_mean = cluster_means(ds, &vec![0; ds.n()], 1);
    let tss: f64 = ds.rows().map(|x| sq_dist(x, &all_mean)).sum();
    let mean_pair_distance = 2.0 * n * tss / n;
    let bound_tight = (2.0 * cost / mean_pair_distance).sqrt();

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    labels
        .iter()
        .enumerate()
        .for_each(|(x, &l)| members[l].push(x));
    let d = ds.d();
    let mut fact_max_rel_error: f64 = 0.0;
    for (c, m) in members.iter().enumerate() {
        let mu = &means[c * d..(c + 1) * d];
        let lhs: f64 = m.iter().map(|&x| sq_dist(ds.row(x), mu)).sum();
        let mut pairs = 0.0;
        for (p, &x) in m.iter().enumerate() {
            for &y in &m[p + 1..] {
                pairs += sq_dist(ds.row(x), ds.row(y));
            }
        }
        let rhs = pairs / m.len() as f64;
        let scale = lhs.abs().max(rhs.abs());
        if scale > 0.0 {
            fact_max_rel_error = fact_max_rel_error.max((lhs - rhs).abs() / scale);
        }
    }

    let theorem = theorem1_report(ds, &g)?;
    let asserted = k >= 2 && !theorem.degenerate && mean_pair_distance > 0.0;
    let theta = theorem.best_theta.map(|c| c.value);
    Ok(CorollaryReport {
        k,
        cost,
        mean_pair_distance,
        bound_tight,
        best_theta: theorem.best_theta,
        best_psi: theorem.best_psi,
        asserted,
        holds_tight: asserted && theta.is_some_and(|t| t <= bound_tight + BOUND_SLACK),
        holds_sqrt2: asserted
            && theta.is_some_and(|t| t <= std::f64::consts::SQRT_2 * bound_tight + BOUND_SLACK),
        fact_max_rel_error,
        fact_holds: fact_max_rel_error <= 1e-9,
        theorem,
    })
}
