//! The concrete tree builders: SpEx on a clique or kNN graph, CART, and the
//! centroid-based IMM (modified) and EMN.

mod cart;
mod imm;
mod spex;

pub use cart::{CartCriterion, CartScorer};
pub use imm::{diametrical_pair, CentroidNorm, MistakeCriterion, MistakeObjective, MistakeScorer};
pub use spex::{SpexCriterion, SpexScorer};

use std::str::FromStr;

use crate::data::{Dataset, ReferenceClustering};
use crate::error::{Result, SpexError};
use crate::graph::{
    build_knn_graph, CliqueClusterGraph, CliqueWeights, GraphHandle, KnnWeightMode,
};
use crate::tree::{build_fifo, build_tree, TreeFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    SpexClique,
    SpexKnn,
    Cart,
    Imm,
    Emn,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SpexClique => "spex-clique",
            Algorithm::SpexKnn => "spex-knn",
            Algorithm::Cart => "cart",
            Algorithm::Imm => "imm",
            Algorithm::Emn => "emn",
        }
    }
}

impl FromStr for Algorithm {
    type Err = SpexError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spex-clique" | "spex_clique" => Ok(Self::SpexClique),
            "spex-knn" | "spex_knn" => Ok(Self::SpexKnn),
            "cart" => Ok(Self::Cart),
            "imm" => Ok(Self::Imm),
            "emn" => Ok(Self::Emn),
            other => Err(SpexError::invalid(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Where the SpEx graph comes from.
#[derive(Debug, Clone, Copy)]
pub enum GraphSource<'a> {
    /// Unit-weight clique on every reference cluster.
    Clique(&'a ReferenceClustering),
    Knn {
        kappa: usize,
        mode: KnnWeightMode,
    },
}

pub fn build_graph(ds: &Dataset, source: GraphSource<'_>) -> Result<GraphHandle> {
    match source {
        GraphSource::Clique(r) => {
            check_labels(ds, r)?;
            Ok(CliqueClusterGraph::new(r, CliqueWeights::Unit).into())
        }
        GraphSource::Knn { kappa, mode } => Ok(build_knn_graph(ds, kappa, mode)?.into()),
    }
}

fn check_labels(ds: &Dataset, r: &ReferenceClustering) -> Result<()> {
    if r.labels().len() != ds.n() {
        return Err(SpexError::LabelCountMismatch {
            labels: r.labels().len(),
            points: ds.n(),
        });
    }
    Ok(())
}

pub fn spex_fit(ds: &Dataset, source: GraphSource<'_>, leaves: usize) -> Result<TreeFit> {
    let g = build_graph(ds, source)?;
    spex_fit_graph(ds, &g, leaves)
}

/// SpEx on an already built graph over the rows of `ds`.
pub fn spex_fit_graph(ds: &Dataset, g: &GraphHandle, leaves: usize) -> Result<TreeFit> {
    if g.n() != ds.n() {
        return Err(SpexError::DimensionMismatch {
            expected: ds.n(),
            actual: g.n(),
        });
    }
    let all: Vec<usize> = (0..ds.n()).collect();
    build_tree(ds, &SpexCriterion::new(g), &all, leaves)
}

pub fn cart_fit(ds: &Dataset, reference: &ReferenceClustering, leaves: usize) -> Result<TreeFit> {
    check_labels(ds, reference)?;
    let all: Vec<usize> = (0..ds.n()).collect();
    build_tree(
        ds,
        &CartCriterion::new(reference.labels(), reference.k()),
        &all,
        leaves,
    )
}

/// One split of a centroid tree with the quantities of the price bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSplit {
    pub node: usize,
    pub depth: usize,
    /// Points separated from their own centroid by this cut.
    pub mistakes: usize,
    /// Diametrical centroid pair of the node.
    pub pair: (usize, usize),
    pub pair_distance: f64,
}

#[derive(Debug, Clone)]
pub struct CentroidTreeFit {
    /// Leaf point sets hold data rows only; leaf cluster ids are the cluster
    /// of the leaf's centroid.
    pub fit: TreeFit,
    pub splits: Vec<CentroidSplit>,
}

/// Modified IMM: every node holding two or more centroids is cut by the
/// fewest-mistakes cut among those separating its diametrical pair.
pub fn imm_fit(
    ds: &Dataset,
    reference: &ReferenceClustering,
    norm: CentroidNorm,
) -> Result<CentroidTreeFit> {
    centroid_fit(ds, reference, MistakeObjective::Imm(norm), "IMM")
}

/// EMN: every node holding two or more centroids is cut by the cut of least
/// mistakes per centroid on its lighter side.
pub fn emn_fit(ds: &Dataset, reference: &ReferenceClustering) -> Result<CentroidTreeFit> {
    centroid_fit(ds, reference, MistakeObjective::Emn, "EMN")
}

fn centroid_fit(
    ds: &Dataset,
    reference: &ReferenceClustering,
    objective: MistakeObjective,
    name: &str,
) -> Result<CentroidTreeFit> {
    check_labels(ds, reference)?;
    let centroids = reference.centroids().ok_or_else(|| {
        SpexError::MissingCentroids(format!("{name} requires a centroid-bearing reference"))
    })?;
    let (n, k) = (ds.n(), reference.k());
    let aug = ds.with_appended_rows(centroids)?;
    let crit = MistakeCriterion::new(&aug, reference.labels(), k, objective);
    let all: Vec<usize> = (0..n + k).collect();
    let mut fit = build_fifo(&aug, &crit, &all, |pts| {
        pts.iter().filter(|&&x| x >= n).count() >= 2
    })?;

    let norm = match objective {
        MistakeObjective::Imm(norm) => norm,
        MistakeObjective::Emn => CentroidNorm::L2,
    };
    let mut node_points: Vec<Option<Vec<usize>>> = vec![None; fit.tree.nodes().len()];
    node_points[0] = Some(all);
    let mut splits = Vec::with_capacity(fit.splits.len());
    for s in &fit.splits {
        let pts = node_points[s.node]
            .take()
            .expect("parents are split before children");
        let present = crit.centroids_in(&pts);
        let pair = diametrical_pair(&present, |c| crit.centroid(c), norm)
            .expect("split nodes hold two centroids");
        let mistakes = imm::count_mistakes(&crit, &pts, |x| s.cut.cut.goes_left(aug.row(x)));
        splits.push(CentroidSplit {
            node: s.node,
            depth: s.depth,
            mistakes,
            pair,
            pair_distance: norm.distance(crit.centroid(pair.0), crit.centroid(pair.1)),
        });
        let (l, r) = s.cut.cut.partition(&aug, &pts);
        node_points[s.left] = Some(l);
        node_points[s.right] = Some(r);
    }

    for leaf in &fit.leaves {
        let shared = crit.centroids_in(&leaf.points);
        if shared.len() > 1 {
            fit.warnings.push(format!(
                "clusters {shared:?} share a leaf (coincident centroids)"
            ));
        }
    }
    fit.relabel_leaves(|leaf| {
        let cluster = crit
            .centroids_in(&leaf.points)
            .into_iter()
            .min()
            .expect("every leaf holds a centroid");
        (cluster, leaf.points.iter().filter(|&&x| x < n).count())
    });
    for leaf in &mut fit.leaves {
        leaf.points.retain(|&x| x < n);
    }
    Ok(CentroidTreeFit { fit, splits })
}

/// Gini impurity of `S`, the size-weighted two-way impurity of
/// `(S, complement)`, and its volume-weighted variant in the
/// independent-set graph over `S ∪ complement`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpurityMeasures {
    pub gini: f64,
    pub cut_impurity: f64,
    pub modified_cut_impurity: f64,
}

/// Impurities of the cut `(s, complement)` of the set `s ∪ complement`.
///
/// In the independent-set graph `H` (all pairs from different clusters,
/// unit weight) the modified impurity is
/// `2 / vol_H(X) * (assoc(S, S) / vol_H(S) + assoc(T, T) / vol_H(T))` with
/// `assoc` counting ordered pairs. Terms with zero volume count as 0.
pub fn impurity(
    reference: &ReferenceClustering,
    s: &[usize],
    complement: &[usize],
) -> Result<ImpurityMeasures> {
    let k = reference.k();
    let n = reference.labels().len();
    let mut side = vec![0u8; n];
    let mut cs = vec![0u64; k];
    let mut ct = vec![0u64; k];
    for (pts, mark, counts) in [(s, 1u8, &mut cs), (complement, 2u8, &mut ct)] {
        for &x in pts {
            if x >= n {
                return Err(SpexError::IndexOutOfRange { index: x, len: n });
            }
            if side[x] != 0 {
                return Err(SpexError::invalid(format!(
                    "point {x} appears twice in the cut"
                )));
            }
            side[x] = mark;
            counts[reference.labels()[x]] += 1;
        }
    }
    let size_s = s.len() as u64;
    let size_t = complement.len() as u64;
    let total = size_s + size_t;
    let sq = |c: &[u64]| c.iter().map(|v| v * v).sum::<u64>();
    let gini = if size_s == 0 {
        0.0
    } else {
        1.0 - sq(&cs) as f64 / (size_s * size_s) as f64
    };
    let cut_impurity = if total == 0 {
        0.0
    } else {
        (cart::weighted_gini(size_s, sq(&cs)) + cart::weighted_gini(size_t, sq(&ct))) / total as f64
    };
    let vol = |c: &[u64]| (0..k).map(|i| c[i] * (total - cs[i] - ct[i])).sum::<u64>();
    let (vol_s, vol_t, vol_x) = (
        vol(&cs),
        vol(&ct),
        (0..k)
            .map(|i| (cs[i] + ct[i]) * (total - cs[i] - ct[i]))
            .sum::<u64>(),
    );
    let term = |size: u64, c: &[u64], v: u64| {
        if v == 0 {
            0.0
        } else {
            (size * size - sq(c)) as f64 / v as f64
        }
    };
    let modified_cut_impurity = if vol_x == 0 {
        0.0
    } else {
        2.0 / vol_x as f64 * (term(size_s, &cs, vol_s) + term(size_t, &ct, vol_t))
    };
    Ok(ImpurityMeasures {
        gini,
        cut_impurity,
        modified_cut_impurity,
    })
}
