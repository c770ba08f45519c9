//! Point sets, reference clusterings and clustering costs.

mod io;
mod kmeans;
mod synth;

pub use io::{ingest, read_labels, read_points, write_atomic, write_labels, write_points};
pub use kmeans::{kmeans_fit, kmeans_fit_detailed, KMeansFit};
pub use synth::{synth, SynthKind};

use crate::error::{Result, SpexError};

/// An immutable `n x d` matrix of finite coordinates, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n: usize,
    d: usize,
}

impl Dataset {
    pub fn new(values: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(SpexError::Empty(format!(
                "dataset must have n >= 1 and d >= 1, got {n}x{d}"
            )));
        }
        if values.len() != n * d {
            return Err(SpexError::DimensionMismatch {
                expected: n * d,
                actual: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpexError::invalid(format!(
                "non-finite coordinate at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(Self { values, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * d);
        for r in rows {
            let r = r.as_ref();
            if r.len() != d {
                return Err(SpexError::DimensionMismatch {
                    expected: d,
                    actual: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(values, rows.len(), d)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    /// A new dataset with `extra` (row-major, same width) appended after the
    /// existing rows.
    pub fn with_appended_rows(&self, extra: &[f64]) -> Result<Self> {
        if !extra.len().is_multiple_of(self.d) {
            return Err(SpexError::DimensionMismatch {
                expected: self.d,
                actual: extra.len() % self.d,
            });
        }
        let mut values = self.values.clone();
        values.extend_from_slice(extra);
        Self::new(values, self.n + extra.len() / self.d, self.d)
    }

    /// Rows selected by `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            if i >= self.n {
                return Err(SpexError::IndexOutOfRange {
                    index: i,
                    len: self.n,
                });
            }
            values.extend_from_slice(self.row(i));
        }
        Self::new(values, indices.len(), self.d)
    }
}

/// Labels in `0..k` (each value used at least once) with optional `k x d`
/// centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceClustering {
    labels: Vec<usize>,
    k: usize,
    centroids: Option<Vec<f64>>,
}

impl ReferenceClustering {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(SpexError::Empty(
                "reference clustering has no labels".into(),
            ));
        }
        let mut seen = vec![false; k];
        for &l in &labels {
            if l >= k {
                return Err(SpexError::invalid(format!("label {l} outside 0..{k}")));
            }
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(SpexError::invalid(format!(
                "cluster {missing} has no members"
            )));
        }
        Ok(Self {
            labels,
            k,
            centroids: None,
        })
    }

    /// Relabels arbitrary integer ids onto `0..k`, preserving their sorted
    /// order.
    pub fn from_raw_labels(raw: &[i64]) -> Result<Self> {
        let mut distinct: Vec<i64> = raw.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let labels = raw
            .iter()
            .map(|v| distinct.binary_search(v).expect("value is present"))
            .collect();
        Self::new(labels, distinct.len())
    }

    pub fn with_centroids(mut self, centroids: Vec<f64>, d: usize) -> Result<Self> {
        if centroids.len() != self.k * d {
            return Err(SpexError::DimensionMismatch {
                expected: self.k * d,
                actual: centroids.len(),
            });
        }
        if centroids.iter().any(|v| !v.is_finite()) {
            return Err(SpexError::invalid("non-finite centroid coordinate"));
        }
        self.centroids = Some(centroids);
        Ok(self)
    }

    /// Attaches the cluster means as centroids.
    pub fn with_mean_centroids(self, ds: &Dataset) -> Result<Self> {
        self.check_len(ds)?;
        let c = cluster_means(ds, &self.labels, self.k);
        self.with_centroids(c, ds.d())
    }

    /// Attaches coordinate-wise (lower) medians as centroids.
    pub fn with_median_centroids(self, ds: &Dataset) -> Result<Self> {
        self.check_len(ds)?;
        let c = cluster_medians(ds, &self.labels, self.k);
        self.with_centroids(c, ds.d())
    }

    fn check_len(&self, ds: &Dataset) -> Result<()> {
        if self.labels.len() != ds.n() {
            return Err(SpexError::LabelCountMismatch {
                labels: self.labels.len(),
                points: ds.n(),
            });
        }
        Ok(())
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn centroids(&self) -> Option<&[f64]> {
        self.centroids.as_deref()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostReport {
    pub kmeans_cost: f64,
    pub kmedians_l1_cost: f64,
}

/// k-means cost against the stored centroids and k-medians (l1) cost against
/// freshly computed coordinate-wise medians.
pub fn costs(ds: &Dataset, reference: &ReferenceClustering) -> Result<CostReport> {
    reference.check_len(ds)?;
    let centroids = reference.centroids().ok_or_else(|| {
        SpexError::MissingCentroids(
            "k-means cost needs centroids on the reference clustering".into(),
        )
    })?;
    Ok(CostReport {
        kmeans_cost: kmeans_cost(ds, reference.labels(), centroids),
        kmedians_l1_cost: kmedians_cost(ds, reference.labels(), reference.k()),
    })
}

pub fn kmeans_cost(ds: &Dataset, labels: &[usize], centroids: &[f64]) -> f64 {
    let d = ds.d();
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(ds.row(i), &centroids[l * d..(l + 1) * d]))
        .sum()
}

/// Sum of l1 distances to each cluster's coordinate-wise lower median.
pub fn kmedians_cost(ds: &Dataset, labels: &[usize], k: usize) -> f64 {
    let d = ds.d();
    let med = cluster_medians(ds, labels, k);
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| l1_dist(ds.row(i), &med[l * d..(l + 1) * d]))
        .sum()
}

pub fn cluster_means(ds: &Dataset, labels: &[usize], k: usize) -> Vec<f64> {
    let d = ds.d();
    let mut sums = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, v) in sums[l * d..(l + 1) * d].iter_mut().zip(ds.row(i)) {
            *s += v;
        }
    }
    for (c, chunk) in counts.iter().zip(sums.chunks_exact_mut(d)) {
        if *c > 0 {
            chunk.iter_mut().for_each(|v| *v /= *c as f64);
        }
    }
    sums
}

/// Coordinate-wise medians; even counts take the lower middle element.
/// Empty clusters get a zero row.
pub fn cluster_medians(ds: &Dataset, labels: &[usize], k: usize) -> Vec<f64> {
    let d = ds.d();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    let mut out = vec![0.0; k * d];
    let mut buf = Vec::new();
    for (c, idx) in members.iter().enumerate() {
        if idx.is_empty() {
            continue;
        }
        for j in 0..d {
            buf.clear();
            buf.extend(idx.iter().map(|&i| ds.value(i, j)));
            buf.sort_by(f64::total_cmp);
            out[c * d + j] = buf[(buf.len() - 1) / 2];
        }
    }
    out
}

#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn l1_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> Dataset {
        Dataset::new(xs.to_vec(), xs.len(), 1).unwrap()
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(Dataset::new(vec![0.0, f64::NAN], 1, 2).is_err());
        assert!(Dataset::new(vec![], 0, 2).is_err());
        assert!(Dataset::new(vec![1.0, 2.0, 3.0], 2, 2).is_err());
    }

    #[test]
    fn relabels_to_contiguous_range() {
        let r = ReferenceClustering::from_raw_labels(&[7, 3, 3, 7]).unwrap();
        assert_eq!(r.labels(), &[1, 0, 0, 1]);
        assert_eq!(r.k(), 2);
    }

    #[test]
    fn every_label_must_occur() {
        assert!(ReferenceClustering::new(vec![0, 2], 3).is_err());
        assert!(ReferenceClustering::new(vec![0, 3], 3).is_err());
    }

    #[test]
    fn zero_cost_when_points_sit_on_centroids() {
        let ds = line(&[1.0, 1.0, 4.0]);
        let r = ReferenceClustering::new(vec![0, 0, 1], 2)
            .unwrap()
            .with_mean_centroids(&ds)
            .unwrap();
        let c = costs(&ds, &r).unwrap();
        assert_eq!(c.kmeans_cost, 0.0);
        assert_eq!(c.kmedians_l1_cost, 0.0);
    }

    #[test]
    fn kmeans_cost_of_two_point_cluster() {
        let ds = line(&[0.0, 2.0]);
        let r = ReferenceClustering::new(vec![0, 0], 1)
            .unwrap()
            .with_mean_centroids(&ds)
            .unwrap();
        assert_eq!(r.centroids().unwrap(), &[1.0]);
        assert_eq!(costs(&ds, &r).unwrap().kmeans_cost, 2.0);
    }

    #[test]
    fn kmedians_uses_median_not_mean() {
        let ds = line(&[0.0, 2.0, 10.0]);
        let r = ReferenceClustering::new(vec![0, 0, 0], 1)
            .unwrap()
            .with_mean_centroids(&ds)
            .unwrap();
        assert_eq!(costs(&ds, &r).unwrap().kmedians_l1_cost, 10.0);
    }

    #[test]
    fn lower_median_on_even_counts() {
        let ds = line(&[0.0, 1.0, 5.0, 9.0]);
        assert_eq!(cluster_medians(&ds, &[0, 0, 0, 0], 1), vec![1.0]);
    }

    #[test]
    fn kmeans_cost_needs_centroids() {
        let ds = line(&[0.0, 1.0]);
        let r = ReferenceClustering::new(vec![0, 1], 2).unwrap();
        assert!(matches!(
            costs(&ds, &r),
            Err(SpexError::MissingCentroids(_))
        ));
    }
}
