//! Seeded random instances for the property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::Dataset;
use crate::graph::SparseGraph;

/// Deterministic generator for trial `trial` of a suite seeded by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform points in `[0, 1]^d`.
pub fn uniform_points(rng: &mut impl Rng, n: usize, d: usize) -> Dataset {
    let values = (0..n * d).map(|_| rng.random::<f64>()).collect();
    Dataset::new(values, n, d).expect("n, d >= 1")
}

/// Uniform points on a coarse grid, so coordinate ties are common.
pub fn grid_points(rng: &mut impl Rng, n: usize, d: usize, levels: u32) -> Dataset {
    let values = (0..n * d)
        .map(|_| f64::from(rng.random_range(0..levels)))
        .collect();
    Dataset::new(values, n, d).expect("n, d >= 1")
}

/// Labels in `0..k`, every cluster holding at least `min_size` points.
pub fn random_labels(rng: &mut impl Rng, n: usize, k: usize, min_size: usize) -> Vec<usize> {
    assert!(
        k * min_size <= n,
        "cannot fit {k} clusters of {min_size} into {n}"
    );
    let mut labels: Vec<usize> = (0..k)
        .flat_map(|c| std::iter::repeat_n(c, min_size))
        .collect();
    labels.extend((labels.len()..n).map(|_| rng.random_range(0..k)));
    labels.shuffle(rng);
    labels
}

/// Erdos-Renyi graph with edge probability `p` and weights uniform in
/// `(0, 1]`; at least one edge is always present.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> SparseGraph {
    let mut edges = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if rng.random::<f64>() < p {
                edges.push((x, y, 1.0 - rng.random::<f64>()));
            }
        }
    }
    if edges.is_empty() {
        let x = rng.random_range(0..n - 1);
        edges.push((x, x + 1, 1.0 - rng.random::<f64>()));
    }
    SparseGraph::from_edges(n, edges).expect("valid by construction")
}

/// `k` spherical gaussians with centers uniform in `[0, spread]^d`, every
/// cluster holding at least two points. Returns points and component labels.
pub fn gaussian_mixture(
    rng: &mut impl Rng,
    n: usize,
    k: usize,
    d: usize,
    spread: f64,
    std: f64,
) -> (Dataset, Vec<usize>) {
    let labels = random_labels(rng, n, k, 2);
    let centers: Vec<f64> = (0..k * d).map(|_| rng.random::<f64>() * spread).collect();
    let noise = Normal::new(0.0, std).expect("std >= 0");
    let mut values = Vec::with_capacity(n * d);
    for &l in &labels {
        for j in 0..d {
            values.push(centers[l * d + j] + noise.sample(rng));
        }
    }
    (Dataset::new(values, n, d).expect("finite"), labels)
}
