use crate::data::ReferenceClustering;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliqueWeights {
    /// Every intra-cluster edge has weight 1.
    Unit,
    /// Intra-cluster edges of cluster `i` weigh `1 / (n_i - 1)`, so every
    /// point of a non-singleton cluster has degree 1.
    Corollary,
}

/// The graph in which two distinct points are adjacent iff they share a
/// cluster. Only labels and cluster sizes are stored.
#[derive(Debug, Clone)]
pub struct CliqueClusterGraph {
    labels: Vec<usize>,
    sizes: Vec<usize>,
    mode: CliqueWeights,
}

impl CliqueClusterGraph {
    pub fn new(reference: &ReferenceClustering, mode: CliqueWeights) -> Self {
        Self {
            labels: reference.labels().to_vec(),
            sizes: reference.cluster_sizes(),
            mode,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn mode(&self) -> CliqueWeights {
        self.mode
    }

    pub fn label(&self, x: usize) -> usize {
        self.labels[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Weight of an edge inside cluster `c`.
    pub fn edge_weight(&self, c: usize) -> f64 {
        match self.mode {
            CliqueWeights::Unit => 1.0,
            CliqueWeights::Corollary if self.sizes[c] >= 2 => 1.0 / (self.sizes[c] - 1) as f64,
            CliqueWeights::Corollary => 0.0,
        }
    }

    /// Degree of any point in cluster `c`.
    pub fn cluster_degree(&self, c: usize) -> f64 {
        let n = self.sizes[c];
        match self.mode {
            CliqueWeights::Unit => (n - 1) as f64,
            CliqueWeights::Corollary => f64::from(u8::from(n >= 2)),
        }
    }

    pub fn degree(&self, x: usize) -> f64 {
        self.cluster_degree(self.labels[x])
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.k())
            .map(|c| self.sizes[c] as f64 * self.cluster_degree(c))
            .sum()
    }

    /// `(e(S, X \ S), vol(S), vol(X \ S))` from per-cluster counts of `S`:
    /// `e = sum_i w_i s_i (n_i - s_i)`, `vol(S) = sum_i s_i deg_i`.
    pub fn measures_from_counts(&self, counts: &[usize]) -> (f64, f64, f64) {
        let (mut e, mut vol_s, mut vol_rest) = (0.0, 0.0, 0.0);
        for (c, &s) in counts.iter().enumerate() {
            let n = self.sizes[c];
            e += self.edge_weight(c) * (s * (n - s)) as f64;
            vol_s += s as f64 * self.cluster_degree(c);
            vol_rest += (n - s) as f64 * self.cluster_degree(c);
        }
        (e, vol_s, vol_rest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_per_mode() {
        let r = ReferenceClustering::new(vec![0, 0, 0, 1, 2, 2], 3).unwrap();
        let unit = CliqueClusterGraph::new(&r, CliqueWeights::Unit);
        assert_eq!(
            (unit.degree(0), unit.degree(3), unit.degree(4)),
            (2.0, 0.0, 1.0)
        );
        assert_eq!(unit.total_volume(), 8.0);
        let cor = CliqueClusterGraph::new(&r, CliqueWeights::Corollary);
        assert_eq!(
            (cor.degree(0), cor.degree(3), cor.degree(5)),
            (1.0, 0.0, 1.0)
        );
        assert_eq!(cor.total_volume(), 5.0);
        assert_eq!(cor.edge_weight(0), 0.5);
    }
}
