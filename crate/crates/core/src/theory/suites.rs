//! Seeded random suites. Trials run in parallel and are merged by index.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bounds::{corollary_report, theorem1_report};
use super::graphs::{
    complete_graph, degree_product_clique, independent_set_graph, nonuniform_sparsity, single_edge,
    star_graph, CutWeights,
};
use super::price::price_check;
use super::random::{
    gaussian_mixture, grid_points, random_graph, random_labels, trial_rng, uniform_points,
};
use crate::algorithms::{impurity, CentroidNorm, MistakeCriterion, MistakeObjective};
use crate::cuts::{best_cut, strictly_better, thresholds, CoordinateCut};
use crate::data::{cluster_means, sq_dist, Dataset, ReferenceClustering};
use crate::graph::{cut_measures, GraphHandle, SparseGraph};

/// A failing instance, complete enough to replay.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub trial: usize,
    pub check: String,
    pub detail: String,
    pub points: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<usize>>,
    /// `u v w` lines.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckTally {
    pub applicable: usize,
    pub passed: usize,
    /// Informational checks are reported but never fail the suite.
    pub asserted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub checks: BTreeMap<String, CheckTally>,
    pub failures: Vec<Witness>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks
            .values()
            .all(|c| !c.asserted || c.passed == c.applicable)
    }
}

/// Outcome of one check in one trial: `None` when not applicable.
struct Outcome {
    check: &'static str,
    asserted: bool,
    result: Option<std::result::Result<(), String>>,
}

fn asserted(check: &'static str, result: std::result::Result<(), String>) -> Outcome {
    Outcome {
        check,
        asserted: true,
        result: Some(result),
    }
}

fn info(check: &'static str, ok: bool) -> Outcome {
    Outcome {
        check,
        asserted: false,
        result: Some(if ok { Ok(()) } else { Err(String::new()) }),
    }
}

fn skipped(check: &'static str, is_asserted: bool) -> Outcome {
    Outcome {
        check,
        asserted: is_asserted,
        result: None,
    }
}

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

struct Instance {
    ds: Dataset,
    labels: Option<Vec<usize>>,
    graph: Option<String>,
}

fn run<F>(suite: &str, seed: u64, trials: usize, trial: F) -> SuiteReport
where
    F: Fn(usize) -> (Instance, Vec<Outcome>) + Sync,
{
    let results: Vec<(Instance, Vec<Outcome>)> = (0..trials).into_par_iter().map(&trial).collect();
    let mut checks: BTreeMap<String, CheckTally> = BTreeMap::new();
    let mut failures = Vec::new();
    for (t, (inst, outcomes)) in results.into_iter().enumerate() {
        for o in outcomes {
            let tally = checks.entry(o.check.to_string()).or_insert(CheckTally {
                applicable: 0,
                passed: 0,
                asserted: o.asserted,
            });
            let Some(result) = o.result else { continue };
            tally.applicable += 1;
            match result {
                Ok(()) => tally.passed += 1,
                Err(detail) if o.asserted => failures.push(Witness {
                    trial: t,
                    check: o.check.to_string(),
                    detail,
                    points: inst.ds.rows().map(<[f64]>::to_vec).collect(),
                    labels: inst.labels.clone(),
                    graph: inst.graph.clone(),
                }),
                Err(_) => {}
            }
        }
    }
    SuiteReport {
        suite: suite.to_string(),
        seed,
        trials,
        checks,
        failures,
    }
}

/// Geometric bound on random sparse graphs: `n <= 40`, `d <= 6`.
pub fn theorem1_suite(seed: u64, trials: usize) -> SuiteReport {
    run("theorem1", seed, trials, |t| {
        let mut rng = trial_rng(seed, t as u64);
        let n = rng.random_range(2..=40);
        let d = rng.random_range(1..=6);
        let ds = uniform_points(&mut rng, n, d);
        let p = rng.random_range(0.05..0.6);
        let sparse = random_graph(&mut rng, n, p);
        let edges = sparse.to_edge_list();
        let g: GraphHandle = sparse.into();
        let outcomes = match theorem1_report(&ds, &g) {
            Err(e) => vec![asserted("safe_theta", Err(e.to_string()))],
            Ok(r) if r.degenerate => vec![
                skipped("safe_theta", true),
                skipped("tight_theta", false),
                skipped("tight_psi", false),
            ],
            Ok(r) => vec![
                asserted(
                    "safe_theta",
                    ensure(r.holds_safe_theta, || {
                        format!(
                            "theta {:?} > sqrt(2 ratio) = {}",
                            r.best_theta, r.bound_safe
                        )
                    }),
                ),
                info("tight_theta", r.holds_tight_theta),
                info("tight_psi", r.holds_tight_psi),
            ],
        };
        (
            Instance {
                ds,
                labels: None,
                graph: Some(edges),
            },
            outcomes,
        )
    })
}

/// Weighted-clique bound on gaussian mixtures: `2 <= k <= 4`, `n <= 80`.
pub fn corollary_suite(seed: u64, trials: usize) -> SuiteReport {
    run("corollary", seed, trials, |t| {
        let mut rng = trial_rng(seed, t as u64);
        let k = rng.random_range(2..=4);
        let n = rng.random_range((4 * k).max(6)..=80);
        let d = rng.random_range(1..=4);
        let spread = rng.random_range(2.0..12.0);
        let (ds, labels) = gaussian_mixture(&mut rng, n, k, d, spread, 1.0);
        let r = ReferenceClustering::new(labels.clone(), k).expect("labels in range");
        let outcomes = match corollary_report(&ds, &r) {
            Err(e) => vec![asserted("sqrt2_bound", Err(e.to_string()))],
            Ok(c) => vec![
                if c.asserted {
                    asserted(
                        "sqrt2_bound",
                        ensure(c.holds_sqrt2, || {
                            format!("theta {:?} > sqrt(2) * {}", c.best_theta, c.bound_tight)
                        }),
                    )
                } else {
                    skipped("sqrt2_bound", true)
                },
                if c.asserted {
                    info("tight_bound", c.holds_tight)
                } else {
                    skipped("tight_bound", false)
                },
                asserted(
                    "mean_identity",
                    ensure(c.fact_holds, || {
                        format!("relative error {}", c.fact_max_rel_error)
                    }),
                ),
                if c.theorem.degenerate {
                    skipped("safe_theta", true)
                } else {
                    asserted(
                        "safe_theta",
                        ensure(c.theorem.holds_safe_theta, || format!("{:?}", c.theorem)),
                    )
                },
            ],
        };
        (
            Instance {
                ds,
                labels: Some(labels),
                graph: None,
            },
            outcomes,
        )
    })
}

fn mask(n: usize, s: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    s.iter().for_each(|&x| m[x] = true);
    m
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Every valid coordinate cut of `points` as `(j, tau, left side)`.
fn all_cuts(ds: &Dataset, points: &[usize]) -> Vec<(CoordinateCut, Vec<usize>)> {
    (0..ds.d())
        .flat_map(|j| {
            thresholds(ds, points, j)
                .into_iter()
                .map(move |tau| CoordinateCut { j, tau })
        })
        .map(|cut| {
            let left = points
                .iter()
                .copied()
                .filter(|&x| cut.goes_left(ds.row(x)))
                .collect();
            (cut, left)
        })
        .collect()
}

fn farthest_pair(aug: &Dataset, n: usize, clusters: &[usize]) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), f64)> = None;
    for &a in clusters {
        for &b in clusters {
            if a < b {
                let d = sq_dist(aug.row(n + a), aug.row(n + b));
                let better = match best {
                    None => true,
                    Some((p, bd)) => d > bd || (d == bd && (a, b) < p),
                };
                if better {
                    best = Some(((a, b), d));
                }
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Smallest value, ties to the earliest cut in `(j, tau)` order.
fn argmin(
    cuts: &[(CoordinateCut, Vec<usize>)],
    value: impl Fn(&[usize]) -> f64,
) -> Option<(CoordinateCut, f64)> {
    let mut best: Option<(CoordinateCut, f64)> = None;
    for (cut, left) in cuts {
        let v = value(left);
        if v.is_finite() && best.is_none_or(|(_, b)| strictly_better(v, b)) {
            best = Some((*cut, v));
        }
    }
    best
}

fn same_cut(a: Option<CoordinateCut>, b: Option<CoordinateCut>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => a.j == b.j && a.tau.to_bits() == b.tau.to_bits(),
        _ => false,
    }
}

/// Graph-theoretic readings of IMM, EMN and CART, each checked against an
/// explicitly materialized graph: `n <= 30`, `d <= 4`, `2 <= k <= 5`.
pub fn equivalence_suite(seed: u64, trials: usize) -> SuiteReport {
    run("equivalence", seed, trials, |t| {
        let mut rng = trial_rng(seed, t as u64);
        let k = rng.random_range(2..=5);
        let n = rng.random_range((k + 1).max(4)..=30);
        let d = rng.random_range(1..=4);
        let ds = if rng.random_bool(0.5) {
            uniform_points(&mut rng, n, d)
        } else {
            grid_points(&mut rng, n, d, 5)
        };
        let labels = random_labels(&mut rng, n, k, 1);
        let reference = ReferenceClustering::new(labels.clone(), k).expect("labels in range");
        let means = cluster_means(&ds, &labels, k);
        let aug = ds.with_appended_rows(&means).expect("same dimension");

        let mut node: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.7)).collect();
        let mut order: Vec<usize> = (0..k).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        node.extend(
            order
                .iter()
                .enumerate()
                .filter(|&(i, _)| i < 2 || rng.random_bool(0.6))
                .map(|(_, &c)| n + c),
        );
        node.sort_unstable();
        let present: Vec<usize> = node.iter().filter(|&&x| x >= n).map(|&x| x - n).collect();
        let cuts = all_cuts(&aug, &node);

        let mut outcomes = Vec::new();

        // (a) modified IMM against the star / single-edge sparsest cut.
        let imm = MistakeCriterion::new(&aug, &labels, k, MistakeObjective::Imm(CentroidNorm::L2));
        let got = best_cut(&imm, &aug, &node).map(|c| c.cut);
        let expected = farthest_pair(&aug, n, &present).and_then(|(a, b)| {
            let g = star_graph(&labels, k, Some(&node));
            let h = single_edge(n + k, n + a, n + b).expect("distinct nodes");
            argmin(&cuts, |left| {
                nonuniform_sparsity(&g, &h, left).expect("indices in range")
            })
            .map(|(c, _)| c)
        });
        outcomes.push(asserted(
            "imm_star_single_edge",
            ensure(same_cut(got, expected), || {
                format!("node {node:?}: imm {got:?} vs sparsest {expected:?}")
            }),
        ));

        // (b) EMN: f/2 <= e_H / |M cap X_u| <= f on the clique over the
        // node's centroids, and the EMN choice is the argmin of mistakes / f.
        let clique_edges: Vec<(usize, usize, f64)> = present
            .iter()
            .flat_map(|&a| {
                present
                    .iter()
                    .filter(move |&&b| a < b)
                    .map(move |&b| (n + a, n + b, 1.0))
            })
            .collect();
        let h = SparseGraph::from_edges(n + k, clique_edges).expect("valid");
        let star = star_graph(&labels, k, Some(&node));
        let m = present.len() as f64;
        let mut sandwich = Ok(());
        for (cut, left) in &cuts {
            let member = mask(n + k, left);
            let a = left.iter().filter(|&&x| x >= n).count() as f64;
            let f = a.min(m - a);
            if f >= 1.0 {
                let ratio = h.cut_weight(&member) / m;
                if !(0.5 * f <= ratio + 1e-12 && ratio <= f + 1e-12) {
                    sandwich = Err(format!("cut {cut:?}: e_H / |M| = {ratio}, f = {f}"));
                    break;
                }
            }
        }
        outcomes.push(asserted("emn_sandwich", sandwich));
        let emn = MistakeCriterion::new(&aug, &labels, k, MistakeObjective::Emn);
        let got = best_cut(&emn, &aug, &node).map(|c| c.cut);
        let expected = argmin(&cuts, |left| {
            let a = left.iter().filter(|&&x| x >= n).count() as f64;
            let f = a.min(m - a);
            if f == 0.0 {
                f64::INFINITY
            } else {
                star.cut_weight(&mask(n + k, left)) / f
            }
        })
        .map(|(c, _)| c);
        outcomes.push(asserted(
            "emn_argmin",
            ensure(same_cut(got, expected), || {
                format!("node {node:?}: emn {got:?} vs brute force {expected:?}")
            }),
        ));

        // (c), (d) CART on the independent-set graph over all of X.
        let is = independent_set_graph(&labels);
        let is_handle: GraphHandle = is.clone().into();
        let vol_h = is.total_volume();
        let all: Vec<usize> = (0..n).collect();
        let mut subsets: Vec<Vec<usize>> =
            all_cuts(&ds, &all).into_iter().map(|(_, l)| l).collect();
        for _ in 0..8 {
            let s: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
            if !s.is_empty() && s.len() < n {
                subsets.push(s);
            }
        }
        let mut identity = Ok(());
        let mut gini = Ok(());
        for s in &subsets {
            let member = mask(n, s);
            let rest: Vec<usize> = (0..n).filter(|&x| !member[x]).collect();
            let imp = impurity(&reference, s, &rest).expect("disjoint cover");
            let psi_h = cut_measures(&is_handle, s).expect("valid").normalized_cut;
            let rhs = 2.0 - vol_h / 2.0 * imp.modified_cut_impurity;
            if identity.is_ok() && !close(psi_h, rhs, 1e-12) {
                identity = Err(format!(
                    "S = {s:?}: Psi_H = {psi_h}, 2 - vol/2 * modified = {rhs}"
                ));
            }
            let alpha = is
                .edges()
                .filter(|&(x, y, _)| member[x] && member[y])
                .count() as f64;
            let expected = 2.0 * alpha / (s.len() * s.len()) as f64;
            if gini.is_ok() && !close(imp.gini, expected, 1e-12) {
                gini = Err(format!(
                    "S = {s:?}: gini {} vs 2 alpha / |S|^2 = {expected}",
                    imp.gini
                ));
            }
        }
        outcomes.push(asserted("cart_identity", identity));
        outcomes.push(asserted("gini_alpha", gini));

        // Classical special cases of the non-uniform sparsity.
        let gs = random_graph(&mut rng, n, 0.3);
        let g: GraphHandle = gs.clone().into();
        let kn = complete_graph(n);
        let product = degree_product_clique(&g);
        let mut reductions = Ok(());
        for s in &subsets {
            let m = cut_measures(&g, s).expect("valid");
            let uniform = nonuniform_sparsity(&g, &kn, s).expect("valid");
            let scaled = m.ratio_cut * (n - 1) as f64 / g.total_volume();
            let normalized = nonuniform_sparsity(&g, &product, s).expect("valid");
            if !close(uniform, scaled, 1e-12) || !close(normalized, m.normalized_cut, 1e-12) {
                reductions = Err(format!(
                    "S = {s:?}: {uniform} vs {scaled}, {normalized} vs {}",
                    m.normalized_cut
                ));
                break;
            }
        }
        outcomes.push(asserted("classical_reductions", reductions));

        (
            Instance {
                ds,
                labels: Some(labels),
                graph: None,
            },
            outcomes,
        )
    })
}

/// Price of explainability on random k-medians instances: `k <= 6`,
/// `n <= 200`, `d <= 5`.
pub fn price_suite(seed: u64, trials: usize) -> SuiteReport {
    run("price", seed, trials, |t| {
        let mut rng = trial_rng(seed, t as u64);
        let k = rng.random_range(1..=6);
        let n = rng.random_range((2 * k).max(4)..=200);
        let d = rng.random_range(1..=5);
        let spread = rng.random_range(1.0..10.0);
        let (ds, labels) = gaussian_mixture(&mut rng, n, k, d, spread, 1.0);
        let r = ReferenceClustering::new(labels.clone(), k).expect("labels in range");
        let outcomes = match price_check(&ds, &r) {
            Err(e) => vec![asserted("height_bound", Err(e.to_string()))],
            Ok(p) => vec![
                asserted(
                    "height_bound",
                    ensure(p.holds, || {
                        format!(
                            "tree {} vs (1 + {}) * {} (k = {})",
                            p.tree_cost, p.height, p.ref_cost, p.k
                        )
                    }),
                ),
                asserted(
                    "per_level",
                    ensure(p.levels.iter().all(|l| l.holds), || {
                        format!("levels {:?} vs {}", p.levels, p.ref_cost)
                    }),
                ),
                asserted(
                    "lemma",
                    ensure(p.lemma_holds, || {
                        format!("tree {} vs {}", p.tree_cost, p.lemma_rhs)
                    }),
                ),
            ],
        };
        (
            Instance {
                ds,
                labels: Some(labels),
                graph: None,
            },
            outcomes,
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_a_few_trials() {
        for r in [
            theorem1_suite(3, 10),
            corollary_suite(3, 10),
            equivalence_suite(3, 10),
            price_suite(3, 10),
        ] {
            assert!(r.passed(), "{}", serde_json::to_string_pretty(&r).unwrap());
            assert!(r.failures.is_empty());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&equivalence_suite(9, 6)).unwrap();
        let b = serde_json::to_string(&equivalence_suite(9, 6)).unwrap();
        assert_eq!(a, b);
    }
}
