//! Threshold decision trees and their construction.

mod build;
mod json;

pub use build::{build_fifo, build_tree, LeafRecord, SplitRecord, TreeFit};

use crate::data::Dataset;
use crate::error::{Result, SpexError};

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    /// Points with `x_j <= tau` go to `left`.
    Internal {
        j: usize,
        tau: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        cluster: usize,
        count: usize,
    },
}

/// A binary tree of coordinate cuts whose leaves carry cluster ids.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplainTree {
    d: usize,
    root: usize,
    nodes: Vec<TreeNode>,
}

impl ExplainTree {
    /// Validates that `nodes` form a single tree rooted at `root`: child ids
    /// exist, no node is reached twice, every node is reachable, and every
    /// coordinate is below `d`.
    pub fn new(d: usize, root: usize, nodes: Vec<TreeNode>) -> Result<Self> {
        if d == 0 {
            return Err(SpexError::MalformedTree(
                "dimension must be at least 1".into(),
            ));
        }
        if root >= nodes.len() {
            return Err(SpexError::MalformedTree(format!(
                "root {root} does not exist"
            )));
        }
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id], true) {
                return Err(SpexError::MalformedTree(format!(
                    "node {id} is reached twice (cycle or shared child)"
                )));
            }
            if let TreeNode::Internal {
                j,
                tau,
                left,
                right,
            } = nodes[id]
            {
                if j >= d {
                    return Err(SpexError::MalformedTree(format!(
                        "node {id} cuts coordinate {j} of {d}"
                    )));
                }
                if !tau.is_finite() {
                    return Err(SpexError::MalformedTree(format!(
                        "node {id} has non-finite threshold"
                    )));
                }
                for child in [right, left] {
                    if child >= nodes.len() {
                        return Err(SpexError::MalformedTree(format!(
                            "node {id} points to missing child {child}"
                        )));
                    }
                    stack.push(child);
                }
            }
        }
        if let Some(id) = seen.iter().position(|&s| !s) {
            return Err(SpexError::MalformedTree(format!(
                "node {id} is unreachable from the root"
            )));
        }
        Ok(Self { d, root, nodes })
    }

    /// The one-leaf tree.
    pub fn single_leaf(d: usize, count: usize) -> Self {
        Self {
            d,
            root: 0,
            nodes: vec![TreeNode::Leaf { cluster: 0, count }],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    /// Leaf node ids, left to right.
    pub fn leaves_in_order(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            match self.nodes[id] {
                TreeNode::Internal { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
                TreeNode::Leaf { .. } => out.push(id),
            }
        }
        out
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(self.root, 0)];
        while let Some((id, depth)) = stack.pop() {
            match self.nodes[id] {
                TreeNode::Internal { left, right, .. } => {
                    stack.push((left, depth + 1));
                    stack.push((right, depth + 1));
                }
                TreeNode::Leaf { .. } => best = best.max(depth),
            }
        }
        best
    }

    /// Leaf node id reached by `x`.
    pub fn route(&self, x: &[f64]) -> usize {
        let mut id = self.root;
        loop {
            match self.nodes[id] {
                TreeNode::Internal {
                    j,
                    tau,
                    left,
                    right,
                } => id = if x[j] <= tau { left } else { right },
                TreeNode::Leaf { .. } => return id,
            }
        }
    }

    pub fn cluster_of(&self, x: &[f64]) -> usize {
        match self.nodes[self.route(x)] {
            TreeNode::Leaf { cluster, .. } => cluster,
            TreeNode::Internal { .. } => unreachable!("route always ends at a leaf"),
        }
    }

    /// Cluster id of every row of `ds`.
    pub fn assign(&self, ds: &Dataset) -> Result<Vec<usize>> {
        if ds.d() < self.d {
            return Err(SpexError::DimensionMismatch {
                expected: self.d,
                actual: ds.d(),
            });
        }
        Ok(ds.rows().map(|x| self.cluster_of(x)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stump() -> ExplainTree {
        ExplainTree::new(
            1,
            0,
            vec![
                TreeNode::Internal {
                    j: 0,
                    tau: 1.0,
                    left: 1,
                    right: 2,
                },
                TreeNode::Leaf {
                    cluster: 0,
                    count: 1,
                },
                TreeNode::Leaf {
                    cluster: 1,
                    count: 1,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_leaf_assigns_zero() {
        let ds = Dataset::new(vec![1.0, -3.0, 7.0], 3, 1).unwrap();
        assert_eq!(
            ExplainTree::single_leaf(1, 3).assign(&ds).unwrap(),
            vec![0, 0, 0]
        );
    }

    #[test]
    fn threshold_is_inclusive() {
        let ds = Dataset::new(vec![1.0, 1.5, 0.0], 3, 1).unwrap();
        assert_eq!(stump().assign(&ds).unwrap(), vec![0, 1, 0]);
    }

    #[test]
    fn rejects_cycles_dangling_and_bad_coordinates() {
        let cyc = vec![
            TreeNode::Internal {
                j: 0,
                tau: 0.0,
                left: 1,
                right: 0,
            },
            TreeNode::Leaf {
                cluster: 0,
                count: 0,
            },
        ];
        assert!(ExplainTree::new(1, 0, cyc).is_err());
        let dangling = vec![
            TreeNode::Internal {
                j: 0,
                tau: 0.0,
                left: 1,
                right: 5,
            },
            TreeNode::Leaf {
                cluster: 0,
                count: 0,
            },
        ];
        assert!(ExplainTree::new(1, 0, dangling).is_err());
        let coord = vec![
            TreeNode::Internal {
                j: 3,
                tau: 0.0,
                left: 1,
                right: 2,
            },
            TreeNode::Leaf {
                cluster: 0,
                count: 0,
            },
            TreeNode::Leaf {
                cluster: 1,
                count: 0,
            },
        ];
        assert!(ExplainTree::new(2, 0, coord).is_err());
        let orphan = vec![
            TreeNode::Leaf {
                cluster: 0,
                count: 0,
            },
            TreeNode::Leaf {
                cluster: 1,
                count: 0,
            },
        ];
        assert!(ExplainTree::new(1, 0, orphan).is_err());
    }

    #[test]
    fn shape_queries() {
        let t = stump();
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.height(), 1);
        assert_eq!(t.leaves_in_order(), vec![1, 2]);
    }
}
