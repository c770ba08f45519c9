use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use super::{ExplainTree, TreeNode};
use crate::cuts::{best_cut, ScoredCut, SplitCriterion};
use crate::data::Dataset;
use crate::error::{Result, SpexError};

#[derive(Debug, Clone, PartialEq)]
pub struct LeafRecord {
    pub node: usize,
    pub cluster: usize,
    pub depth: usize,
    /// Row indices routed to this leaf during construction.
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitRecord {
    pub node: usize,
    pub depth: usize,
    pub cut: ScoredCut,
    /// Priority the leaf had when it was split (`NaN` for FIFO builds).
    pub priority: f64,
    pub left: usize,
    pub right: usize,
    pub size: usize,
}

/// A fitted tree together with the construction trace.
#[derive(Debug, Clone)]
pub struct TreeFit {
    pub tree: ExplainTree,
    /// Leaves left to right.
    pub leaves: Vec<LeafRecord>,
    /// Splits in the order they were made.
    pub splits: Vec<SplitRecord>,
    pub warnings: Vec<String>,
}

impl TreeFit {
    /// Cluster id of every row index `< n` recorded in the leaves.
    pub fn labels(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for leaf in &self.leaves {
            for &x in leaf.points.iter().filter(|&&x| x < n) {
                out[x] = leaf.cluster;
            }
        }
        out
    }

    /// Point sets of the leaves, left to right.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        self.leaves.iter().map(|l| l.points.clone()).collect()
    }

    /// Replaces each leaf's `(cluster, count)` in both the trace and the tree.
    pub fn relabel_leaves(&mut self, f: impl Fn(&LeafRecord) -> (usize, usize)) {
        let mut nodes = self.tree.nodes.clone();
        for leaf in &mut self.leaves {
            let (cluster, count) = f(leaf);
            leaf.cluster = cluster;
            nodes[leaf.node] = TreeNode::Leaf { cluster, count };
        }
        self.tree.nodes = nodes;
    }
}

enum Growing {
    Leaf { points: Vec<usize>, depth: usize },
    Internal { split: usize },
}

struct Grower<'a> {
    ds: &'a Dataset,
    nodes: Vec<Growing>,
    splits: Vec<SplitRecord>,
}

impl<'a> Grower<'a> {
    fn new(ds: &'a Dataset, points: Vec<usize>) -> Self {
        Self {
            ds,
            nodes: vec![Growing::Leaf { points, depth: 0 }],
            splits: Vec::new(),
        }
    }

    fn points(&self, id: usize) -> &[usize] {
        match &self.nodes[id] {
            Growing::Leaf { points, .. } => points,
            Growing::Internal { .. } => unreachable!("node {id} was already split"),
        }
    }

    /// Splits leaf `id`; returns the child ids.
    fn split(&mut self, id: usize, cut: ScoredCut, priority: f64) -> (usize, usize) {
        let (left, right) = (self.nodes.len(), self.nodes.len() + 1);
        let old = std::mem::replace(
            &mut self.nodes[id],
            Growing::Internal {
                split: self.splits.len(),
            },
        );
        let Growing::Leaf { points, depth } = old else {
            unreachable!()
        };
        let (l, r) = cut.cut.partition(self.ds, &points);
        debug_assert!(!l.is_empty() && !r.is_empty(), "accepted cuts are valid");
        self.splits.push(SplitRecord {
            node: id,
            depth,
            cut,
            priority,
            left,
            right,
            size: points.len(),
        });
        self.nodes.push(Growing::Leaf {
            points: l,
            depth: depth + 1,
        });
        self.nodes.push(Growing::Leaf {
            points: r,
            depth: depth + 1,
        });
        (left, right)
    }

    /// Freezes the tree, numbering leaves left to right.
    fn finish(self, warnings: Vec<String>) -> TreeFit {
        let Grower {
            ds,
            nodes: grown,
            splits,
        } = self;
        let nodes = grown
            .iter()
            .map(|g| match g {
                Growing::Internal { split } => {
                    let s = &splits[*split];
                    TreeNode::Internal {
                        j: s.cut.cut.j,
                        tau: s.cut.cut.tau,
                        left: s.left,
                        right: s.right,
                    }
                }
                Growing::Leaf { points, .. } => TreeNode::Leaf {
                    cluster: 0,
                    count: points.len(),
                },
            })
            .collect();
        let mut tree = ExplainTree {
            d: ds.d(),
            root: 0,
            nodes,
        };
        let mut grown: Vec<Option<Growing>> = grown.into_iter().map(Some).collect();
        let mut leaves = Vec::new();
        for (cluster, id) in tree.leaves_in_order().into_iter().enumerate() {
            let Some(Growing::Leaf { points, depth }) = grown[id].take() else {
                unreachable!("leaf {id}")
            };
            tree.nodes[id] = TreeNode::Leaf {
                cluster,
                count: points.len(),
            };
            leaves.push(LeafRecord {
                node: id,
                cluster,
                depth,
                points,
            });
        }
        TreeFit {
            tree,
            leaves,
            splits,
            warnings,
        }
    }
}

struct Task {
    priority: f64,
    count: usize,
    node: usize,
    cut: Option<ScoredCut>,
}

impl PartialEq for Task {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Task {}

impl PartialOrd for Task {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Task {
    /// Max-heap order: higher priority, then more points, then lower id.
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then(self.count.cmp(&other.count))
            .then(other.node.cmp(&self.node))
    }
}

fn task<C: SplitCriterion>(criterion: &C, ds: &Dataset, node: usize, points: &[usize]) -> Task {
    let cut = best_cut(criterion, ds, points);
    let mut priority = criterion.priority(points, cut.as_ref());
    if priority.is_nan() {
        priority = f64::NEG_INFINITY;
    }
    Task {
        priority,
        count: points.len(),
        node,
        cut,
    }
}

/// Greedy best-first growth: repeatedly split the leaf of largest priority
/// until the tree has `leaves` leaves or no leaf has a valid cut.
pub fn build_tree<C: SplitCriterion>(
    ds: &Dataset,
    criterion: &C,
    points: &[usize],
    leaves: usize,
) -> Result<TreeFit> {
    if leaves < 1 {
        return Err(SpexError::invalid("leaf target must be at least 1"));
    }
    if points.is_empty() {
        return Err(SpexError::Empty("tree over an empty point set".into()));
    }
    let mut grower = Grower::new(ds, points.to_vec());
    let mut heap = BinaryHeap::new();
    let mut warnings = Vec::new();
    if leaves > 1 {
        heap.push(task(criterion, ds, 0, grower.points(0)));
    }
    let mut count = 1;
    while count < leaves {
        match heap.peek() {
            Some(t) if t.priority > f64::NEG_INFINITY => {}
            _ => {
                warnings.push(format!("unreachable leaf target: stopped at {count} of {leaves} leaves, no leaf has a valid cut"));
                break;
            }
        }
        let t = heap.pop().expect("peeked");
        let cut = t.cut.expect("finite priority implies a cut");
        let (l, r) = grower.split(t.node, cut, t.priority);
        let (tl, tr) = rayon::join(
            || task(criterion, ds, l, grower.points(l)),
            || task(criterion, ds, r, grower.points(r)),
        );
        heap.push(tl);
        heap.push(tr);
        count += 1;
    }
    Ok(grower.finish(warnings))
}

/// Splits every leaf that `eligible` accepts, in node-id order, until none
/// remains. Leaves that are eligible but have no valid cut are kept with a
/// warning.
pub fn build_fifo<C, E>(
    ds: &Dataset,
    criterion: &C,
    points: &[usize],
    eligible: E,
) -> Result<TreeFit>
where
    C: SplitCriterion,
    E: Fn(&[usize]) -> bool,
{
    if points.is_empty() {
        return Err(SpexError::Empty("tree over an empty point set".into()));
    }
    let mut grower = Grower::new(ds, points.to_vec());
    let mut queue = VecDeque::from([0usize]);
    let mut warnings = Vec::new();
    while let Some(id) = queue.pop_front() {
        let pts = grower.points(id);
        if !eligible(pts) {
            continue;
        }
        match best_cut(criterion, ds, pts) {
            Some(cut) => {
                let (l, r) = grower.split(id, cut, f64::NAN);
                queue.push_back(l);
                queue.push_back(r);
            }
            None => warnings.push(format!("node {id} has no valid cut and stays a leaf")),
        }
    }
    Ok(grower.finish(warnings))
}
