//! Brute-force cut search shared by the integration tests. Every score here
//! is recomputed from its definition on an explicit edge list or explicit
//! counts; nothing is reused from the incremental scorers.

#![allow(dead_code)]

use rand::Rng;
use spex::algorithms::{
    CartCriterion, CentroidNorm, MistakeCriterion, MistakeObjective, SpexCriterion,
};
use spex::cuts::{best_cut, CutScorer, SplitCriterion};
use spex::data::ReferenceClustering;
use spex::data::{cluster_means, Dataset};
use spex::graph::{build_knn_graph, CliqueClusterGraph, CliqueWeights, GraphHandle, KnnWeightMode};
use spex::theory::random::{grid_points, random_labels, trial_rng, uniform_points};

pub const REL_TOL: f64 = 1e-10;
/// Scores closer than this are ties, broken by `(j, tau)`.
pub const TIE_TOL: f64 = 1e-12;

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// One candidate cut: coordinate and the points at or below the threshold.
pub struct Cut {
    pub j: usize,
    pub left: Vec<usize>,
}

/// All valid cuts of `points`, coordinate by coordinate, thresholds in
/// increasing order.
pub fn enumerate_cuts(ds: &Dataset, points: &[usize]) -> Vec<Cut> {
    let mut out = Vec::new();
    for j in 0..ds.d() {
        let mut values: Vec<f64> = points.iter().map(|&x| ds.value(x, j)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for &v in &values[..values.len().saturating_sub(1)] {
            out.push(Cut {
                j,
                left: points
                    .iter()
                    .copied()
                    .filter(|&x| ds.value(x, j) <= v)
                    .collect(),
            });
        }
    }
    out
}

/// `psi(S) + psi(X' \ S)` with `psi(A) = w(A, V \ A) / vol(A)` on an
/// explicit edge list over all `n` vertices; `psi = 0` on zero volume.
pub fn conductance_pair(
    n: usize,
    edges: &[(usize, usize, f64)],
    node: &[usize],
    left: &[usize],
) -> f64 {
    let mut side = vec![0u8; n];
    node.iter().for_each(|&x| side[x] = 2);
    left.iter().for_each(|&x| side[x] = 1);
    let psi = |s: u8| {
        let (mut cut, mut vol) = (0.0, 0.0);
        for &(u, v, w) in edges {
            let (a, b) = (side[u] == s, side[v] == s);
            if a {
                vol += w;
            }
            if b {
                vol += w;
            }
            if a != b {
                cut += w;
            }
        }
        if vol > 0.0 {
            cut / vol
        } else {
            0.0
        }
    };
    psi(1) + psi(2)
}

pub fn clique_edges(labels: &[usize]) -> Vec<(usize, usize, f64)> {
    let n = labels.len();
    let mut e = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if labels[x] == labels[y] {
                e.push((x, y, 1.0));
            }
        }
    }
    e
}

pub fn gini_score(labels: &[usize], k: usize, node: &[usize], left: &[usize]) -> f64 {
    let mut inside = vec![false; labels.len()];
    left.iter().for_each(|&x| inside[x] = true);
    let weighted = |pts: &mut dyn Iterator<Item = usize>| {
        let mut counts = vec![0f64; k];
        let mut size = 0f64;
        for x in pts {
            counts[labels[x]] += 1.0;
            size += 1.0;
        }
        if size == 0.0 {
            0.0
        } else {
            size - counts.iter().map(|c| c * c).sum::<f64>() / size
        }
    };
    let s = weighted(&mut left.iter().copied());
    let t = weighted(&mut node.iter().copied().filter(|&x| !inside[x]));
    (s + t) / labels.len() as f64
}

/// Mistakes of a cut on the augmented set: points of the node whose own
/// centroid is in the node but on the other side.
pub fn mistakes(labels: &[usize], node: &[usize], left: &[usize]) -> f64 {
    let n = labels.len();
    let total = n + labels.iter().max().map_or(0, |m| m + 1);
    let mut side = vec![0u8; total.max(node.iter().max().map_or(0, |m| m + 1))];
    node.iter().for_each(|&x| side[x] = 2);
    left.iter().for_each(|&x| side[x] = 1);
    node.iter()
        .filter(|&&x| x < n)
        .filter(|&&x| {
            let c = n + labels[x];
            c < side.len() && side[c] != 0 && side[c] != side[x]
        })
        .count() as f64
}

fn l2sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn imm_score(aug: &Dataset, labels: &[usize], node: &[usize], left: &[usize]) -> f64 {
    let n = labels.len();
    let mut present: Vec<usize> = node.iter().filter(|&&x| x >= n).map(|&x| x - n).collect();
    present.sort_unstable();
    let mut pair = None;
    let mut far = -1.0;
    for (i, &a) in present.iter().enumerate() {
        for &b in &present[i + 1..] {
            let d = l2sq(aug.row(n + a), aug.row(n + b));
            if d > far {
                far = d;
                pair = Some((a, b));
            }
        }
    }
    let Some((a, b)) = pair else {
        return f64::INFINITY;
    };
    let on_left = |c: usize| left.contains(&(n + c));
    if on_left(a) == on_left(b) {
        return f64::INFINITY;
    }
    mistakes(labels, node, left)
}

pub fn emn_score(labels: &[usize], node: &[usize], left: &[usize]) -> f64 {
    let n = labels.len();
    let m = node.iter().filter(|&&x| x >= n).count();
    let a = left.iter().filter(|&&x| x >= n).count();
    let f = a.min(m - a);
    if f == 0 {
        f64::INFINITY
    } else {
        mistakes(labels, node, left) / f as f64
    }
}

#[derive(Debug, Default, Clone)]
pub struct OracleSummary {
    pub nodes: usize,
    pub argmin_agree: usize,
    pub max_rel_err: f64,
    pub failures: Vec<String>,
}

impl OracleSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.argmin_agree == self.nodes
    }
}

/// Replays the production scorer group by group against `brute`, then checks
/// that `best_cut` lands on the first cut whose brute-force score ties the
/// minimum.
fn check_scorer<C: SplitCriterion>(
    name: &str,
    crit: &C,
    ds: &Dataset,
    node: &[usize],
    brute: &dyn Fn(&[usize]) -> f64,
    summary: &mut OracleSummary,
) {
    summary.nodes += 1;
    let cuts = enumerate_cuts(ds, node);
    let scores: Vec<f64> = cuts.iter().map(|c| brute(&c.left)).collect();

    let mut k = 0;
    for j in 0..ds.d() {
        let mut sorted = node.to_vec();
        sorted.sort_by(|&a, &b| ds.value(a, j).total_cmp(&ds.value(b, j)).then(a.cmp(&b)));
        let mut scorer = crit.scorer();
        scorer.reset(&sorted);
        let mut start = 0;
        while start < sorted.len() {
            let v = ds.value(sorted[start], j);
            let end = start
                + sorted[start..]
                    .iter()
                    .take_while(|&&x| ds.value(x, j) == v)
                    .count();
            if end == sorted.len() {
                break;
            }
            scorer.advance(&sorted[start..end]);
            let got = scorer.score();
            let got = if got.is_nan() { f64::INFINITY } else { got };
            let want = scores[k];
            if !rel_close(got, want, REL_TOL) {
                summary.failures.push(format!(
                    "{name}: node {node:?} j {j} prefix {end}: {got} vs {want}"
                ));
            } else if got.is_finite() {
                summary.max_rel_err = summary
                    .max_rel_err
                    .max((got - want).abs() / got.abs().max(want.abs()).max(1.0));
            }
            k += 1;
            start = end;
        }
    }

    let min = scores
        .iter()
        .copied()
        .filter(|s| s.is_finite())
        .fold(f64::INFINITY, f64::min);
    let expected = scores
        .iter()
        .position(|&s| s.is_finite() && rel_close(s, min, TIE_TOL))
        .map(|i| (cuts[i].j, cuts[i].left.len()));
    let got = best_cut(crit, ds, node).map(|c| (c.cut.j, c.prefix_size));
    if got == expected {
        summary.argmin_agree += 1;
    } else {
        summary.failures.push(format!(
            "{name}: node {node:?}: best_cut {got:?} vs brute force {expected:?}"
        ));
    }
}

/// `trials` random nodes of at most 12 points for each of the five scorers.
pub fn oracle_suite(seed: u64, trials: usize) -> OracleSummary {
    let mut summary = OracleSummary::default();
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let n = rng.random_range(4..=24);
        let d = rng.random_range(1..=3);
        let k = rng.random_range(1..=4usize).min(n);
        let ds = if rng.random_bool(0.5) {
            uniform_points(&mut rng, n, d)
        } else {
            grid_points(&mut rng, n, d, 4)
        };
        let labels = random_labels(&mut rng, n, k, 1);
        let size = rng.random_range(2..=12usize.min(n));
        let mut all: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(all.as_mut_slice(), &mut rng);
        let mut node: Vec<usize> = all[..size].to_vec();
        node.sort_unstable();

        let r = ReferenceClustering::new(labels.clone(), k).unwrap();
        let clique: GraphHandle = CliqueClusterGraph::new(&r, CliqueWeights::Unit).into();
        let ce = clique_edges(&labels);
        check_scorer(
            "spex-clique",
            &SpexCriterion::new(&clique),
            &ds,
            &node,
            &|l| conductance_pair(n, &ce, &node, l),
            &mut summary,
        );

        let knn = build_knn_graph(&ds, 3.min(n - 1), KnnWeightMode::IndicatorSum).unwrap();
        let ke: Vec<(usize, usize, f64)> = knn.edges().collect();
        let knn: GraphHandle = knn.into();
        check_scorer(
            "spex-knn",
            &SpexCriterion::new(&knn),
            &ds,
            &node,
            &|l| conductance_pair(n, &ke, &node, l),
            &mut summary,
        );

        check_scorer(
            "cart",
            &CartCriterion::new(&labels, k),
            &ds,
            &node,
            &|l| gini_score(&labels, k, &node, l),
            &mut summary,
        );

        let aug = ds
            .with_appended_rows(&cluster_means(&ds, &labels, k))
            .unwrap();
        let points = rng.random_range(0..=size.min(12 - k));
        let mut centroids: Vec<usize> = (0..k)
            .filter(|_| rng.random_bool(0.8))
            .map(|c| n + c)
            .collect();
        if centroids.is_empty() {
            centroids.push(n);
        }
        let mut aug_node: Vec<usize> = node[..points].to_vec();
        aug_node.extend(centroids);
        if aug_node.len() < 2 {
            aug_node.push(node[node.len() - 1]);
        }
        aug_node.sort_unstable();
        aug_node.dedup();
        let imm = MistakeCriterion::new(&aug, &labels, k, MistakeObjective::Imm(CentroidNorm::L2));
        check_scorer(
            "imm",
            &imm,
            &aug,
            &aug_node,
            &|l| imm_score(&aug, &labels, &aug_node, l),
            &mut summary,
        );
        let emn = MistakeCriterion::new(&aug, &labels, k, MistakeObjective::Emn);
        check_scorer(
            "emn",
            &emn,
            &aug,
            &aug_node,
            &|l| emn_score(&labels, &aug_node, l),
            &mut summary,
        );
    }
    summary
}
