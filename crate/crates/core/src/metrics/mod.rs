//! Agreement between labelings and the multi-way tree objective.

use std::fmt;

use serde::Serialize;

use crate::error::{Result, SpexError};
use crate::graph::{GraphHandle, SweepState};

/// Dense contingency table with relabelled rows and columns.
struct Contingency {
    cells: Vec<Vec<u64>>,
    rows: Vec<u64>,
    cols: Vec<u64>,
    n: u64,
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let ids = labels
        .iter()
        .map(|l| distinct.binary_search(l).expect("present"))
        .collect();
    (ids, distinct.len())
}

impl Contingency {
    fn new(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(SpexError::LabelCountMismatch {
                labels: b.len(),
                points: a.len(),
            });
        }
        if a.len() < 2 {
            return Err(SpexError::invalid(
                "agreement indices need at least two points",
            ));
        }
        let (a, ka) = compact(a);
        let (b, kb) = compact(b);
        let mut cells = vec![vec![0u64; kb]; ka];
        for (&i, &j) in a.iter().zip(&b) {
            cells[i][j] += 1;
        }
        let rows = cells.iter().map(|r| r.iter().sum()).collect();
        let cols = (0..kb).map(|j| cells.iter().map(|r| r[j]).sum()).collect();
        Ok(Self {
            cells,
            rows,
            cols,
            n: a.len() as u64,
        })
    }
}

fn pairs(m: u64) -> i128 {
    let m = m as i128;
    m * (m - 1) / 2
}

/// Adjusted Rand index, evaluated exactly in integers up to the final
/// division.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    let t = Contingency::new(a, b)?;
    let sum_cells: i128 = t.cells.iter().flatten().map(|&c| pairs(c)).sum();
    let sum_a: i128 = t.rows.iter().map(|&c| pairs(c)).sum();
    let sum_b: i128 = t.cols.iter().map(|&c| pairs(c)).sum();
    let total = pairs(t.n);
    // (index - expected) / (max - expected), scaled by 2 C(n,2)
    let num = 2 * (sum_cells * total - sum_a * sum_b);
    let den = (sum_a + sum_b) * total - 2 * sum_a * sum_b;
    if den == 0 {
        return Ok(1.0);
    }
    Ok(num as f64 / den as f64)
}

fn entropy(counts: &[u64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `ln(m!)` for `m` in `0..=n`.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for m in 1..=n {
        out[m] = out[m - 1] + (m as f64).ln();
    }
    out
}

/// Expected mutual information of two labelings with the given marginals
/// under the permutation model.
fn expected_mutual_information(rows: &[u64], cols: &[u64], n: u64) -> f64 {
    let lf = log_factorials(n as usize);
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in rows {
        for &b in cols {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            for nij in lo..=hi {
                let x = nij as f64;
                let log_p =
                    lf[a as usize] + lf[b as usize] + lf[(n - a) as usize] + lf[(n - b) as usize]
                        - lf[n as usize]
                        - lf[nij as usize]
                        - lf[(a - nij) as usize]
                        - lf[(b - nij) as usize]
                        - lf[(n + nij - a - b) as usize];
                emi += x / nf * (nf * x / (a as f64 * b as f64)).ln() * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information with arithmetic-mean normalization and
/// natural logarithms. Identical partitions (both constant included) score 1;
/// exactly one constant labeling scores 0.
pub fn ami(a: &[usize], b: &[usize]) -> Result<f64> {
    let t = Contingency::new(a, b)?;
    let (ka, kb) = (t.rows.len(), t.cols.len());
    if ka == 1 && kb == 1 {
        return Ok(1.0);
    }
    if ka == 1 || kb == 1 {
        return Ok(0.0);
    }
    if same_partition(&t) {
        return Ok(1.0);
    }
    let nf = t.n as f64;
    let mut mi = 0.0;
    for (i, row) in t.cells.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                mi += c / nf * (nf * c / (t.rows[i] as f64 * t.cols[j] as f64)).ln();
            }
        }
    }
    let emi = expected_mutual_information(&t.rows, &t.cols, t.n);
    let mean_h = 0.5 * (entropy(&t.rows, nf) + entropy(&t.cols, nf));
    let den = mean_h - emi;
    let den = if den < 0.0 {
        den.min(-f64::EPSILON)
    } else {
        den.max(f64::EPSILON)
    };
    Ok((mi - emi) / den)
}

fn same_partition(t: &Contingency) -> bool {
    t.rows.len() == t.cols.len()
        && t.cells
            .iter()
            .all(|r| r.iter().filter(|&&c| c > 0).count() == 1)
}

/// Sum over the parts of their conductance against the whole graph.
pub fn tree_objective(g: &GraphHandle, partition: &[Vec<usize>]) -> Result<f64> {
    let mut seen = vec![false; g.n()];
    for part in partition {
        for &x in part {
            if x >= g.n() {
                return Err(SpexError::IndexOutOfRange {
                    index: x,
                    len: g.n(),
                });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(SpexError::invalid(format!("point {x} lies in two parts")));
            }
        }
    }
    if let Some(x) = seen.iter().position(|s| !s) {
        return Err(SpexError::invalid(format!("point {x} lies in no part")));
    }
    let mut state = SweepState::new(g);
    Ok(partition
        .iter()
        .map(|part| {
            state.reset(part);
            state.suffix_measures().psi
        })
        .sum())
}

/// Agreement of a tree clustering with the ground truth (`ari`, `ami`) and
/// with the reference it was fitted to (`ref_ari`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgreementReport {
    pub ari: Option<f64>,
    pub ami: Option<f64>,
    pub ref_ari: Option<f64>,
}

impl AgreementReport {
    pub fn compute(
        predicted: &[usize],
        truth: Option<&[usize]>,
        reference: Option<&[usize]>,
    ) -> Result<Self> {
        Ok(Self {
            ari: truth.map(|t| ari(t, predicted)).transpose()?,
            ami: truth.map(|t| ami(t, predicted)).transpose()?,
            ref_ari: reference.map(|r| ari(r, predicted)).transpose()?,
        })
    }
}

impl fmt::Display for AgreementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
        writeln!(f, "{:>8} {:>8} {:>8}", "ARI", "AMI", "REF")?;
        writeln!(
            f,
            "{:>8} {:>8} {:>8}",
            cell(self.ari),
            cell(self.ami),
            cell(self.ref_ari)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ReferenceClustering;
    use crate::graph::{cut_measures, CliqueClusterGraph, CliqueWeights, SparseGraph};
    use proptest::prelude::*;

    #[test]
    fn ari_examples() {
        assert_eq!(ari(&[0, 0, 1, 2], &[0, 0, 1, 2]).unwrap(), 1.0);
        assert_eq!(ari(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), -0.5);
        assert_eq!(ari(&[0, 0, 1, 1, 2], &[5, 5, 3, 3, 9]).unwrap(), 1.0);
        assert_eq!(ari(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
        assert!(ari(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn ami_conventions() {
        assert_eq!(ami(&[0, 1, 1, 2], &[0, 1, 1, 2]).unwrap(), 1.0);
        assert_eq!(ami(&[4, 4, 4], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(ami(&[0, 0, 0, 0], &[0, 1, 0, 1]).unwrap(), 0.0);
        assert_eq!(ami(&[0, 1, 0, 1], &[3, 3, 3, 3]).unwrap(), 0.0);
    }

    /// Direct evaluation on the 2x2 all-ones table: every margin is 2 of
    /// n = 4, so P(n_ij = 1) = 4/6, P(n_ij = 2) = 1/6.
    #[test]
    fn ami_on_balanced_table() {
        let ln2 = 2f64.ln();
        let emi_cell =
            1.0 / 4.0 * (1.0f64).ln() * 4.0 / 6.0 + 2.0 / 4.0 * (2.0f64).ln() * 1.0 / 6.0;
        let emi = 4.0 * emi_cell;
        let expected = (0.0 - emi) / (ln2 - emi);
        let got = ami(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    proptest! {
        #[test]
        fn indices_symmetric_and_label_invariant(
            a in prop::collection::vec(0usize..4, 2..40),
            seed in prop::collection::vec(0usize..4, 40),
            perm in Just([2usize, 0, 3, 1]),
        ) {
            let b: Vec<usize> = a.iter().zip(&seed).map(|(&x, &s)| if s == 0 { s } else { x }).collect();
            let renamed: Vec<usize> = b.iter().map(|&x| perm[x] + 10).collect();
            let (x, y) = (ari(&a, &b).unwrap(), ari(&b, &a).unwrap());
            prop_assert_eq!(x, y);
            prop_assert_eq!(ari(&a, &renamed).unwrap(), x);
            prop_assert!((-1.0..=1.0).contains(&x));
            let (p, q) = (ami(&a, &b).unwrap(), ami(&b, &a).unwrap());
            prop_assert!((p - q).abs() < 1e-12);
            prop_assert!((ami(&a, &renamed).unwrap() - p).abs() < 1e-12);
            prop_assert!(p <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn tree_objective_cases() {
        let g: GraphHandle = SparseGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
            .unwrap()
            .into();
        assert_eq!(tree_objective(&g, &[vec![0, 1, 2, 3]]).unwrap(), 0.0);
        let two = tree_objective(&g, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(two, cut_measures(&g, &[0, 1]).unwrap().normalized_cut);
        assert!(tree_objective(&g, &[vec![0, 1], vec![1, 2, 3]]).is_err());
        assert!(tree_objective(&g, &[vec![0, 1]]).is_err());
        let r = ReferenceClustering::new(vec![0, 1, 0, 1], 2).unwrap();
        let c: GraphHandle = CliqueClusterGraph::new(&r, CliqueWeights::Unit).into();
        assert_eq!(tree_objective(&c, &[vec![0, 2], vec![1, 3]]).unwrap(), 0.0);
    }
}
