use serde::Serialize;

use super::bounds::BOUND_SLACK;
use crate::algorithms::{imm_fit, CentroidNorm};
use crate::data::{kmedians_cost, Dataset, ReferenceClustering};
use crate::error::{Result, SpexError};

#[derive(Debug, Clone, Serialize)]
pub struct LevelCheck {
    pub depth: usize,
    /// Sum over the splits at this depth of mistakes times the l1 distance
    /// of the split's diametrical centroid pair.
    pub charge: f64,
    pub holds: bool,
}

/// k-medians cost of the modified IMM tree against its reference.
#[derive(Debug, Clone, Serialize)]
pub struct PriceReport {
    pub k: usize,
    /// l1 cost of the tree clustering, medians recomputed per leaf.
    pub tree_cost: f64,
    /// l1 cost of the reference against its coordinate-wise medians.
    pub ref_cost: f64,
    /// `tree_cost / ref_cost`, 1 when both vanish.
    pub ratio: f64,
    pub height: usize,
    /// `1 + k`.
    pub bound: f64,
    /// `tree_cost <= (1 + height) ref_cost` and `height <= k`.
    pub holds: bool,
    pub levels: Vec<LevelCheck>,
    /// `ref_cost + sum of every level charge`.
    pub lemma_rhs: f64,
    pub lemma_holds: bool,
}

fn le(a: f64, b: f64) -> bool {
    a <= b + BOUND_SLACK * b.abs().max(1.0)
}

/// Builds the modified IMM tree with l1 diametrical pairs over median
/// centroids (recomputed from the labels) and checks the price bound.
pub fn price_check(ds: &Dataset, reference: &ReferenceClustering) -> Result<PriceReport> {
    if reference.labels().len() != ds.n() {
        return Err(SpexError::LabelCountMismatch {
            labels: reference.labels().len(),
            points: ds.n(),
        });
    }
    let k = reference.k();
    let medians =
        ReferenceClustering::new(reference.labels().to_vec(), k)?.with_median_centroids(ds)?;
    let fit = imm_fit(ds, &medians, CentroidNorm::L1)?;
    let labels = fit.fit.labels(ds.n());
    let tree_cost = kmedians_cost(ds, &labels, k);
    let ref_cost = kmedians_cost(ds, medians.labels(), k);
    let ratio = if ref_cost > 0.0 {
        tree_cost / ref_cost
    } else if tree_cost == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let height = fit.fit.tree.height();

    let mut charges = vec![0.0; height];
    for s in &fit.splits {
        charges[s.depth] += s.mistakes as f64 * s.pair_distance;
    }
    let levels: Vec<LevelCheck> = charges
        .iter()
        .enumerate()
        .map(|(depth, &charge)| LevelCheck {
            depth,
            charge,
            holds: le(charge, ref_cost),
        })
        .collect();
    let lemma_rhs = ref_cost + charges.iter().sum::<f64>();
    Ok(PriceReport {
        k,
        tree_cost,
        ref_cost,
        ratio,
        height,
        bound: 1.0 + k as f64,
        holds: height <= k && le(tree_cost, (1 + height) as f64 * ref_cost),
        levels,
        lemma_rhs,
        lemma_holds: le(tree_cost, lemma_rhs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_clusters_cost_nothing_extra() {
        let ds = Dataset::from_rows(&[
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [10.0, 10.0],
            [11.0, 10.0],
            [20.0, 0.0],
            [21.0, 1.0],
        ])
        .unwrap();
        let r = ReferenceClustering::new(vec![0, 0, 0, 1, 1, 2, 2], 3).unwrap();
        let p = price_check(&ds, &r).unwrap();
        assert_eq!(p.ratio, 1.0);
        assert!(p.holds && p.lemma_holds);
        assert!(p.levels.iter().all(|l| l.charge == 0.0));
    }

    #[test]
    fn one_cluster_is_a_single_leaf() {
        let ds = Dataset::from_rows(&[[0.0], [3.0], [4.0]]).unwrap();
        let p = price_check(&ds, &ReferenceClustering::new(vec![0; 3], 1).unwrap()).unwrap();
        assert_eq!((p.height, p.ratio), (0, 1.0));
        assert!(p.levels.is_empty() && p.holds);
    }

    #[test]
    fn overlapping_clusters_pay_for_mistakes() {
        let ds =
            Dataset::from_rows(&[[0.0], [1.0], [2.0], [6.0], [3.0], [4.0], [5.0], [-1.0]]).unwrap();
        let r = ReferenceClustering::new(vec![0, 0, 0, 0, 1, 1, 1, 1], 2).unwrap();
        let p = price_check(&ds, &r).unwrap();
        assert!(p.levels[0].charge > 0.0);
        assert!(p.holds && p.lemma_holds, "{p:?}");
        assert!(p.levels.iter().all(|l| l.holds));
    }
}
