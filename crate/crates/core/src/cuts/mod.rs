//! Coordinate cuts and the best-cut search over a tree node.
//!
//! A node's points are sorted along each coordinate and swept from left to
//! right. Points sharing a coordinate value move together, so every candidate
//! prefix is exactly `{x : x_j <= tau}` for the midpoint `tau` between two
//! consecutive distinct values.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinateCut {
    pub j: usize,
    pub tau: f64,
}

impl CoordinateCut {
    /// Whether `x` falls on the left (`x_j <= tau`) side.
    #[inline]
    pub fn goes_left(&self, x: &[f64]) -> bool {
        x[self.j] <= self.tau
    }

    /// Splits `points` into `(left, right)`, preserving order.
    pub fn partition(&self, ds: &Dataset, points: &[usize]) -> (Vec<usize>, Vec<usize>) {
        points
            .iter()
            .partition(|&&x| ds.value(x, self.j) <= self.tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredCut {
    pub cut: CoordinateCut,
    /// Lower is better; finite for every returned cut.
    pub score: f64,
    pub prefix_size: usize,
}

/// Relative gap below which two scores count as equal.
pub const SCORE_TIE_TOLERANCE: f64 = 1e-12;

/// `a` beats `b` by more than rounding noise.
#[inline]
pub fn strictly_better(a: f64, b: f64) -> bool {
    a < b - SCORE_TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

impl ScoredCut {
    /// Lexicographic order on `(score, j, tau)`, scores within
    /// [`SCORE_TIE_TOLERANCE`] counting as equal.
    pub fn tie_break(&self, other: &ScoredCut) -> Ordering {
        let by_score = if strictly_better(self.score, other.score) {
            Ordering::Less
        } else if strictly_better(other.score, self.score) {
            Ordering::Greater
        } else {
            Ordering::Equal
        };
        by_score
            .then(self.cut.j.cmp(&other.cut.j))
            .then(self.cut.tau.total_cmp(&other.cut.tau))
    }
}

/// The threshold placed between consecutive distinct values `a < b`.
#[inline]
pub fn midpoint(a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    if m >= a && m < b {
        m
    } else {
        a
    }
}

/// `node_points` sorted by `(x_j, index)`.
pub fn sorted_along(ds: &Dataset, node_points: &[usize], j: usize) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = node_points.iter().map(|&x| (ds.value(x, j), x)).collect();
    keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, x)| x).collect()
}

/// Candidate thresholds on coordinate `j`: one midpoint per gap between
/// consecutive distinct values, ascending.
pub fn thresholds(ds: &Dataset, node_points: &[usize], j: usize) -> Vec<f64> {
    let mut vals: Vec<f64> = node_points.iter().map(|&x| ds.value(x, j)).collect();
    vals.sort_unstable_by(f64::total_cmp);
    vals.dedup();
    vals.windows(2).map(|w| midpoint(w[0], w[1])).collect()
}

/// Incremental scorer driven by the sweep.
///
/// `reset` receives the node's points in coordinate-sorted order with all of
/// them in the suffix; each `advance` moves one group of equal-valued points
/// to the prefix, after which `score` reports the cut between prefix and
/// suffix. `+inf` (or NaN) marks a cut the scorer rejects.
pub trait CutScorer: Send {
    fn reset(&mut self, sorted_points: &[usize]);
    fn advance(&mut self, group: &[usize]);
    fn score(&self) -> f64;
}

/// A cut objective together with the leaf value the greedy builder needs.
pub trait SplitCriterion: Sync {
    type Scorer: CutScorer;

    fn scorer(&self) -> Self::Scorer;

    /// Objective contribution of a leaf holding `points`.
    fn leaf_quality(&self, points: &[usize]) -> f64;

    /// Gain of splitting a leaf along its best cut; `-inf` when it has none.
    fn priority(&self, points: &[usize], best: Option<&ScoredCut>) -> f64 {
        match best {
            Some(c) => self.leaf_quality(points) - c.score,
            None => f64::NEG_INFINITY,
        }
    }
}

/// Best cut of a single coordinate under the `(score, tau)` order; a later
/// threshold wins only by more than [`SCORE_TIE_TOLERANCE`].
pub fn best_cut_on<C: SplitCriterion + ?Sized>(
    criterion: &C,
    ds: &Dataset,
    node_points: &[usize],
    j: usize,
) -> Option<ScoredCut> {
    let order = sorted_along(ds, node_points, j);
    let mut scorer = criterion.scorer();
    scorer.reset(&order);
    let mut best: Option<ScoredCut> = None;
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
        scorer.advance(&order[start..end]);
        let score = scorer.score();
        if score.is_finite() && best.is_none_or(|b| strictly_better(score, b.score)) {
            let tau = midpoint(v, ds.value(order[end], j));
            best = Some(ScoredCut {
                cut: CoordinateCut { j, tau },
                score,
                prefix_size: end,
            });
        }
        start = end;
    }
    best
}

/// Global minimum over all coordinates and thresholds, ties (within
/// [`SCORE_TIE_TOLERANCE`]) to smaller `j` then smaller `tau`. Absent when no
/// coordinate has a cut the scorer accepts.
pub fn best_cut<C: SplitCriterion + ?Sized>(
    criterion: &C,
    ds: &Dataset,
    node_points: &[usize],
) -> Option<ScoredCut> {
    if node_points.len() < 2 {
        return None;
    }
    let per_coordinate: Vec<Option<ScoredCut>> = (0..ds.d())
        .into_par_iter()
        .map(|j| best_cut_on(criterion, ds, node_points, j))
        .collect();
    per_coordinate.into_iter().flatten().reduce(|best, c| {
        if strictly_better(c.score, best.score) {
            c
        } else {
            best
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scores a prefix by how far its size is from `target`.
    struct SizeCriterion {
        target: usize,
    }

    struct SizeScorer {
        target: usize,
        len: usize,
    }

    impl CutScorer for SizeScorer {
        fn reset(&mut self, _: &[usize]) {
            self.len = 0;
        }
        fn advance(&mut self, group: &[usize]) {
            self.len += group.len();
        }
        fn score(&self) -> f64 {
            self.len.abs_diff(self.target) as f64
        }
    }

    impl SplitCriterion for SizeCriterion {
        type Scorer = SizeScorer;
        fn scorer(&self) -> SizeScorer {
            SizeScorer {
                target: self.target,
                len: 0,
            }
        }
        fn leaf_quality(&self, _: &[usize]) -> f64 {
            0.0
        }
    }

    fn line(xs: &[f64]) -> Dataset {
        Dataset::new(xs.to_vec(), xs.len(), 1).unwrap()
    }

    #[test]
    fn midpoint_thresholds() {
        assert_eq!(
            thresholds(&line(&[10.0, 0.0, 11.0, 1.0]), &[0, 1, 2, 3], 0),
            vec![0.5, 5.5, 10.5]
        );
        assert!(thresholds(&line(&[3.0, 3.0, 3.0]), &[0, 1, 2], 0).is_empty());
        assert_eq!(
            thresholds(&line(&[1.0, 1.0, 2.0]), &[0, 1, 2], 0),
            vec![1.5]
        );
    }

    #[test]
    fn adjacent_floats_keep_threshold_below_upper_value() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let t = midpoint(a, b);
        assert!(a <= t && t < b);
        let big = midpoint(f64::MAX / 2.0 * 1.5, f64::MAX);
        assert!(big.is_finite() && big < f64::MAX);
    }

    #[test]
    fn equal_values_travel_together() {
        let ds = line(&[1.0, 1.0, 2.0]);
        let c = best_cut(&SizeCriterion { target: 1 }, &ds, &[0, 1, 2]).unwrap();
        assert_eq!(c.prefix_size, 2);
        assert_eq!(c.cut.tau, 1.5);
    }

    #[test]
    fn identical_points_have_no_cut() {
        let ds = Dataset::from_rows(&[[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]]).unwrap();
        assert!(best_cut(&SizeCriterion { target: 1 }, &ds, &[0, 1, 2]).is_none());
    }

    #[test]
    fn lower_coordinate_wins_ties() {
        let ds = Dataset::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let c = best_cut(&SizeCriterion { target: 1 }, &ds, &[0, 1]).unwrap();
        assert_eq!((c.cut.j, c.cut.tau, c.score), (0, 0.5, 0.0));
    }

    #[test]
    fn permutation_invariant() {
        let ds = Dataset::from_rows(&[[3.0, 1.0], [1.0, 4.0], [2.0, 2.0], [5.0, 0.0], [4.0, 3.0]])
            .unwrap();
        let crit = SizeCriterion { target: 2 };
        let a = best_cut(&crit, &ds, &[0, 1, 2, 3, 4]).unwrap();
        let b = best_cut(&crit, &ds, &[4, 2, 0, 3, 1]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn boundary_point_goes_left() {
        let c = CoordinateCut { j: 0, tau: 1.0 };
        assert!(c.goes_left(&[1.0]));
        assert!(!c.goes_left(&[1.0000001]));
    }
}
