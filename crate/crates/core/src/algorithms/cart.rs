use crate::cuts::{CutScorer, ScoredCut, SplitCriterion};

/// `|S| * gini(S)` from the size and the sum of squared class counts.
#[inline]
pub(crate) fn weighted_gini(size: u64, sum_sq: u64) -> f64 {
    if size == 0 {
        0.0
    } else {
        size as f64 - sum_sq as f64 / size as f64
    }
}

/// Gini impurity with each node weighted by its share of the `total` points:
/// `CutScore = (|S| gini(S) + |T| gini(T)) / |X|`.
#[derive(Debug, Clone, Copy)]
pub struct CartCriterion<'r> {
    labels: &'r [usize],
    k: usize,
    total: usize,
}

impl<'r> CartCriterion<'r> {
    pub fn new(labels: &'r [usize], k: usize) -> Self {
        Self {
            labels,
            k,
            total: labels.len(),
        }
    }
}

pub struct CartScorer<'r> {
    labels: &'r [usize],
    total: f64,
    prefix: Vec<u64>,
    suffix: Vec<u64>,
    prefix_len: u64,
    suffix_len: u64,
    prefix_sq: u64,
    suffix_sq: u64,
}

impl CutScorer for CartScorer<'_> {
    fn reset(&mut self, sorted_points: &[usize]) {
        self.prefix.iter_mut().for_each(|c| *c = 0);
        self.suffix.iter_mut().for_each(|c| *c = 0);
        for &x in sorted_points {
            self.suffix[self.labels[x]] += 1;
        }
        self.prefix_len = 0;
        self.suffix_len = sorted_points.len() as u64;
        self.prefix_sq = 0;
        self.suffix_sq = self.suffix.iter().map(|c| c * c).sum();
    }

    fn advance(&mut self, group: &[usize]) {
        for &x in group {
            let c = self.labels[x];
            self.prefix_sq += 2 * self.prefix[c] + 1;
            self.suffix_sq -= 2 * self.suffix[c] - 1;
            self.prefix[c] += 1;
            self.suffix[c] -= 1;
        }
        self.prefix_len += group.len() as u64;
        self.suffix_len -= group.len() as u64;
    }

    fn score(&self) -> f64 {
        (weighted_gini(self.prefix_len, self.prefix_sq)
            + weighted_gini(self.suffix_len, self.suffix_sq))
            / self.total
    }
}

impl<'r> SplitCriterion for CartCriterion<'r> {
    type Scorer = CartScorer<'r>;

    fn scorer(&self) -> CartScorer<'r> {
        CartScorer {
            labels: self.labels,
            total: self.total as f64,
            prefix: vec![0; self.k],
            suffix: vec![0; self.k],
            prefix_len: 0,
            suffix_len: 0,
            prefix_sq: 0,
            suffix_sq: 0,
        }
    }

    /// `(|X'| / |X|) gini(X')`.
    fn leaf_quality(&self, points: &[usize]) -> f64 {
        let mut counts = vec![0u64; self.k];
        for &x in points {
            counts[self.labels[x]] += 1;
        }
        weighted_gini(points.len() as u64, counts.iter().map(|c| c * c).sum()) / self.total as f64
    }

    /// Impurity reduction, never negative.
    fn priority(&self, points: &[usize], best: Option<&ScoredCut>) -> f64 {
        match best {
            Some(c) => (self.leaf_quality(points) - c.score).max(0.0),
            None => f64::NEG_INFINITY,
        }
    }
}
