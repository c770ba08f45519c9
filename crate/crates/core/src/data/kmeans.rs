//! Lloyd's algorithm with k-means++ seeding and seeded restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{cluster_means, kmeans_cost, sq_dist, Dataset, ReferenceClustering};
use crate::error::{Result, SpexError};

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub reference: ReferenceClustering,
    pub cost: f64,
    /// Cost after seeding and after every Lloyd iteration of the winning
    /// restart. Non-increasing.
    pub cost_history: Vec<f64>,
    pub restart: usize,
}

pub fn kmeans_fit(
    ds: &Dataset,
    k: usize,
    restarts: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ReferenceClustering> {
    kmeans_fit_detailed(ds, k, restarts, seed, max_iter).map(|f| f.reference)
}

pub fn kmeans_fit_detailed(
    ds: &Dataset,
    k: usize,
    restarts: usize,
    seed: u64,
    max_iter: usize,
) -> Result<KMeansFit> {
    if k == 0 || k > ds.n() {
        return Err(SpexError::invalid(format!(
            "k must be in 1..={}, got {k}",
            ds.n()
        )));
    }
    if restarts == 0 {
        return Err(SpexError::invalid("restarts must be at least 1"));
    }
    let runs: Vec<Run> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            lloyd(ds, k, max_iter, &mut rng)
        })
        .collect();
    // min cost, ties to the lowest restart index
    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.cost < a.1.cost { b } else { a })
        .expect("at least one restart");
    let reference =
        ReferenceClustering::new(best.labels, k)?.with_centroids(best.centroids, ds.d())?;
    Ok(KMeansFit {
        reference,
        cost: best.cost,
        cost_history: best.history,
        restart,
    })
}

struct Run {
    labels: Vec<usize>,
    centroids: Vec<f64>,
    cost: f64,
    history: Vec<f64>,
}

fn lloyd(ds: &Dataset, k: usize, max_iter: usize, rng: &mut ChaCha8Rng) -> Run {
    let d = ds.d();
    let mut centroids = seed_plus_plus(ds, k, rng);
    let mut labels = vec![0usize; ds.n()];
    assign(ds, &centroids, &mut labels);
    repair_empty(ds, &mut centroids, &mut labels, k);
    let mut history = vec![kmeans_cost(ds, &labels, &centroids)];

    for _ in 0..max_iter {
        centroids = cluster_means(ds, &labels, k);
        let before = labels.clone();
        assign(ds, &centroids, &mut labels);
        repair_empty(ds, &mut centroids, &mut labels, k);
        let cost = kmeans_cost(ds, &labels, &centroids);
        let prev = *history.last().unwrap();
        debug_assert!(
            cost <= prev * (1.0 + 1e-9) + 1e-12,
            "k-means cost increased: {prev} -> {cost}"
        );
        history.push(cost);
        if labels == before {
            break;
        }
    }
    let centroids = cluster_means(ds, &labels, k);
    let cost = kmeans_cost(ds, &labels, &centroids);
    debug_assert_eq!(centroids.len(), k * d);
    Run {
        labels,
        centroids,
        cost,
        history,
    }
}

fn seed_plus_plus(ds: &Dataset, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = ds.n();
    let mut centroids = Vec::with_capacity(k * ds.d());
    let first = rng.random_range(0..n);
    centroids.extend_from_slice(ds.row(first));
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(ds.row(i), ds.row(first))).collect();
    for _ in 1..k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, &w) in dist.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        let c = ds.row(pick).to_vec();
        for (i, di) in dist.iter_mut().enumerate() {
            *di = di.min(sq_dist(ds.row(i), &c));
        }
        centroids.extend_from_slice(&c);
    }
    centroids
}

/// Nearest centroid, ties to the lower centroid index.
fn assign(ds: &Dataset, centroids: &[f64], labels: &mut [usize]) {
    let d = ds.d();
    labels.par_iter_mut().enumerate().for_each(|(i, l)| {
        let row = ds.row(i);
        let mut best = (f64::INFINITY, 0);
        for (c, cen) in centroids.chunks_exact(d).enumerate() {
            let dist = sq_dist(row, cen);
            if dist < best.0 {
                best = (dist, c);
            }
        }
        *l = best.1;
    });
}

/// Every empty cluster takes the point farthest from its centroid among
/// clusters that can spare one.
fn repair_empty(ds: &Dataset, centroids: &mut [f64], labels: &mut [usize], k: usize) {
    let d = ds.d();
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for (i, &l) in labels.iter().enumerate() {
            if sizes[l] < 2 {
                continue;
            }
            let dist = sq_dist(ds.row(i), &centroids[l * d..(l + 1) * d]);
            if best.is_none_or(|(bd, _)| dist > bd) {
                best = Some((dist, i));
            }
        }
        let (_, i) = best.expect("k <= n leaves a donor cluster");
        sizes[labels[i]] -= 1;
        labels[i] = empty;
        sizes[empty] = 1;
        centroids[empty * d..(empty + 1) * d].copy_from_slice(ds.row(i));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::costs;

    fn line(xs: &[f64]) -> Dataset {
        Dataset::new(xs.to_vec(), xs.len(), 1).unwrap()
    }

    #[test]
    fn k_equals_n_is_exact() {
        let ds = line(&[0.0, 10.0]);
        let fit = kmeans_fit_detailed(&ds, 2, 3, 0, 50).unwrap();
        let mut c = fit.reference.centroids().unwrap().to_vec();
        c.sort_by(f64::total_cmp);
        assert_eq!(c, vec![0.0, 10.0]);
        assert_eq!(fit.cost, 0.0);
    }

    /// Optimal 2-partition by exhaustive enumeration of all labelings.
    fn best_two_partition_cost(xs: &[f64]) -> f64 {
        let n = xs.len();
        let mut best = f64::INFINITY;
        for mask in 1..(1u32 << n) - 1 {
            let mut cost = 0.0;
            for side in [true, false] {
                let pts: Vec<f64> = (0..n)
                    .filter(|&i| ((mask >> i) & 1 == 1) == side)
                    .map(|i| xs[i])
                    .collect();
                let m = pts.iter().sum::<f64>() / pts.len() as f64;
                cost += pts.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
            }
            best = best.min(cost);
        }
        best
    }

    #[test]
    fn finds_the_optimal_two_partition() {
        let xs = [0.0, 1.0, 10.0, 11.0];
        assert_eq!(best_two_partition_cost(&xs), 1.0);
        for seed in 0..10 {
            let fit = kmeans_fit_detailed(&line(&xs), 2, 1, seed, 100).unwrap();
            assert_eq!(fit.cost, 1.0);
            let l = fit.reference.labels();
            assert_eq!(l[0], l[1]);
            assert_eq!(l[2], l[3]);
            assert_ne!(l[0], l[2]);
            let mut c = fit.reference.centroids().unwrap().to_vec();
            c.sort_by(f64::total_cmp);
            assert_eq!(c, vec![0.5, 10.5]);
        }
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let ds = Dataset::from_rows(&[[0.0, 1.0], [2.0, 3.0], [4.0, 8.0]]).unwrap();
        let r = kmeans_fit(&ds, 1, 2, 9, 10).unwrap();
        assert_eq!(r.centroids().unwrap(), &[2.0, 4.0]);
    }

    #[test]
    fn k_larger_than_n_fails() {
        assert!(kmeans_fit(&line(&[1.0]), 2, 1, 0, 10).is_err());
    }

    #[test]
    fn duplicates_still_give_nonempty_clusters() {
        let ds = line(&[3.0, 3.0, 3.0, 3.0]);
        let r = kmeans_fit(&ds, 3, 2, 1, 10).unwrap();
        assert_eq!(r.cluster_sizes().iter().filter(|&&s| s > 0).count(), 3);
    }

    #[test]
    fn deterministic_and_monotone() {
        let (ds, _) =
            crate::data::synth(crate::data::SynthKind::ThreeGaussians, 150, 1.5, 3).unwrap();
        let a = kmeans_fit_detailed(&ds, 4, 5, 11, 100).unwrap();
        let b = kmeans_fit_detailed(&ds, 4, 5, 11, 100).unwrap();
        assert_eq!(a.reference, b.reference);
        for w in a.cost_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", a.cost_history);
        }
        let c = costs(&ds, &a.reference).unwrap();
        assert!((c.kmeans_cost - a.cost).abs() <= 1e-9 * a.cost);
    }
}
