use std::str::FromStr;

use crate::cuts::{CutScorer, SplitCriterion};
use crate::data::{l1_dist, sq_dist, Dataset};
use crate::error::SpexError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CentroidNorm {
    L1,
    #[default]
    L2,
}

impl CentroidNorm {
    /// A distance that orders pairs like the norm (squared for l2).
    #[inline]
    pub fn key(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            CentroidNorm::L1 => l1_dist(a, b),
            CentroidNorm::L2 => sq_dist(a, b),
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            CentroidNorm::L1 => l1_dist(a, b),
            CentroidNorm::L2 => sq_dist(a, b).sqrt(),
        }
    }
}

impl FromStr for CentroidNorm {
    type Err = SpexError;

    fn from_str(s: &str) -> Result<Self, SpexError> {
        match s {
            "l1" | "L1" => Ok(Self::L1),
            "l2" | "L2" => Ok(Self::L2),
            other => Err(SpexError::invalid(format!("unknown norm {other:?}"))),
        }
    }
}

/// The pair `(a, b)`, `a < b`, of clusters among `clusters` whose centroids
/// are farthest apart; ties go to the lexicographically smallest pair.
pub fn diametrical_pair<'c>(
    clusters: &[usize],
    centroid: impl Fn(usize) -> &'c [f64],
    norm: CentroidNorm,
) -> Option<(usize, usize)> {
    let mut sorted = clusters.to_vec();
    sorted.sort_unstable();
    let mut best: Option<((usize, usize), f64)> = None;
    for (p, &a) in sorted.iter().enumerate() {
        for &b in &sorted[p + 1..] {
            let dist = norm.key(centroid(a), centroid(b));
            if best.is_none_or(|(_, d)| dist > d) {
                best = Some(((a, b), dist));
            }
        }
    }
    best.map(|(pair, _)| pair)
}

/// Which centroid-based objective a [`MistakeCriterion`] scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MistakeObjective {
    /// Mistakes, over cuts separating the node's diametrical centroid pair.
    Imm(CentroidNorm),
    /// Mistakes divided by the smaller number of centroids on either side.
    Emn,
}

/// Cut scoring over the augmented set `Y = X ++ M`: rows `0..n` are data
/// points, row `n + i` is the centroid of cluster `i`.
#[derive(Debug, Clone, Copy)]
pub struct MistakeCriterion<'a> {
    augmented: &'a Dataset,
    labels: &'a [usize],
    k: usize,
    objective: MistakeObjective,
}

impl<'a> MistakeCriterion<'a> {
    pub fn new(
        augmented: &'a Dataset,
        labels: &'a [usize],
        k: usize,
        objective: MistakeObjective,
    ) -> Self {
        debug_assert_eq!(augmented.n(), labels.len() + k);
        Self {
            augmented,
            labels,
            k,
            objective,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Clusters whose centroid row is among `points`.
    pub fn centroids_in(&self, points: &[usize]) -> Vec<usize> {
        let n = self.n();
        points.iter().filter(|&&x| x >= n).map(|&x| x - n).collect()
    }

    pub fn centroid(&self, cluster: usize) -> &'a [f64] {
        self.augmented.row(self.n() + cluster)
    }
}

pub struct MistakeScorer<'a> {
    crit: MistakeCriterion<'a>,
    in_node: Vec<bool>,
    centroid_left: Vec<bool>,
    members: Vec<i64>,
    left: Vec<i64>,
    pair: Option<(usize, usize)>,
    mistakes: i64,
    centroids: usize,
    centroids_left: usize,
}

impl CutScorer for MistakeScorer<'_> {
    fn reset(&mut self, sorted_points: &[usize]) {
        let n = self.crit.n();
        self.in_node.iter_mut().for_each(|v| *v = false);
        self.centroid_left.iter_mut().for_each(|v| *v = false);
        self.members.iter_mut().for_each(|v| *v = 0);
        self.left.iter_mut().for_each(|v| *v = 0);
        let present = self.crit.centroids_in(sorted_points);
        for &c in &present {
            self.in_node[c] = true;
        }
        for &x in sorted_points.iter().filter(|&&x| x < n) {
            self.members[self.crit.labels[x]] += 1;
        }
        self.pair = match self.crit.objective {
            MistakeObjective::Imm(norm) => {
                diametrical_pair(&present, |c| self.crit.centroid(c), norm)
            }
            MistakeObjective::Emn => None,
        };
        self.mistakes = 0;
        self.centroids = present.len();
        self.centroids_left = 0;
    }

    fn advance(&mut self, group: &[usize]) {
        let n = self.crit.n();
        for &x in group {
            if x >= n {
                let c = x - n;
                self.mistakes += self.members[c] - 2 * self.left[c];
                self.centroid_left[c] = true;
                self.centroids_left += 1;
            } else {
                let c = self.crit.labels[x];
                if self.in_node[c] {
                    self.mistakes += if self.centroid_left[c] { -1 } else { 1 };
                }
                self.left[c] += 1;
            }
        }
    }

    fn score(&self) -> f64 {
        match self.crit.objective {
            MistakeObjective::Imm(_) => match self.pair {
                Some((a, b)) if self.centroid_left[a] != self.centroid_left[b] => {
                    self.mistakes as f64
                }
                _ => f64::INFINITY,
            },
            MistakeObjective::Emn => {
                let f = self
                    .centroids_left
                    .min(self.centroids - self.centroids_left);
                if f == 0 {
                    f64::INFINITY
                } else {
                    self.mistakes as f64 / f as f64
                }
            }
        }
    }
}

impl<'a> SplitCriterion for MistakeCriterion<'a> {
    type Scorer = MistakeScorer<'a>;

    fn scorer(&self) -> MistakeScorer<'a> {
        MistakeScorer {
            crit: *self,
            in_node: vec![false; self.k],
            centroid_left: vec![false; self.k],
            members: vec![0; self.k],
            left: vec![0; self.k],
            pair: None,
            mistakes: 0,
            centroids: 0,
            centroids_left: 0,
        }
    }

    /// Unused: these trees split every leaf holding two or more centroids.
    fn leaf_quality(&self, _: &[usize]) -> f64 {
        0.0
    }
}

/// Points of `points` whose centroid is also in `points` but on the other
/// side of the `left` mask.
pub(crate) fn count_mistakes(
    crit: &MistakeCriterion<'_>,
    points: &[usize],
    left: impl Fn(usize) -> bool,
) -> usize {
    let n = crit.n();
    let mut centroid_side = vec![None; crit.k];
    for c in crit.centroids_in(points) {
        centroid_side[c] = Some(left(n + c));
    }
    points
        .iter()
        .filter(|&&x| x < n)
        .filter(|&&x| centroid_side[crit.labels[x]].is_some_and(|side| side != left(x)))
        .count()
}
