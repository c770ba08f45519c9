use std::fmt::Write as _;

use serde::Deserialize;

use super::{ExplainTree, TreeNode};
use crate::error::{Result, SpexError};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    d: usize,
    root: usize,
    nodes: Vec<NodeDoc>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum NodeDoc {
    Internal {
        id: usize,
        j: usize,
        tau: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        id: usize,
        cluster: usize,
        count: usize,
    },
}

impl NodeDoc {
    fn id(&self) -> usize {
        match *self {
            NodeDoc::Internal { id, .. } | NodeDoc::Leaf { id, .. } => id,
        }
    }
}

impl ExplainTree {
    /// Canonical JSON: nodes in id order, thresholds with 17 significant
    /// digits so they parse back to the same bits.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{{\"d\": {}, \"root\": {}, \"nodes\": [",
            self.d, self.root
        )
        .unwrap();
        for (id, node) in self.nodes.iter().enumerate() {
            s.push_str(if id == 0 { "\n  " } else { ",\n  " });
            match *node {
                TreeNode::Internal { j, tau, left, right } => write!(
                    s,
                    "{{\"id\": {id}, \"kind\": \"internal\", \"j\": {j}, \"tau\": {tau:.16e}, \"left\": {left}, \"right\": {right}}}"
                ),
                TreeNode::Leaf { cluster, count } => {
                    write!(s, "{{\"id\": {id}, \"kind\": \"leaf\", \"cluster\": {cluster}, \"count\": {count}}}")
                }
            }
            .unwrap();
        }
        s.push_str("\n]}\n");
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document =
            serde_json::from_str(text).map_err(|e| SpexError::MalformedTree(e.to_string()))?;
        let mut slots: Vec<Option<TreeNode>> = vec![None; doc.nodes.len()];
        for node in doc.nodes {
            let id = node.id();
            let len = slots.len();
            let slot = slots.get_mut(id).ok_or_else(|| {
                SpexError::MalformedTree(format!("node id {id} outside 0..{len}"))
            })?;
            if slot.is_some() {
                return Err(SpexError::MalformedTree(format!("duplicate node id {id}")));
            }
            *slot = Some(match node {
                NodeDoc::Internal {
                    j,
                    tau,
                    left,
                    right,
                    ..
                } => TreeNode::Internal {
                    j,
                    tau,
                    left,
                    right,
                },
                NodeDoc::Leaf { cluster, count, .. } => TreeNode::Leaf { cluster, count },
            });
        }
        let nodes = slots
            .into_iter()
            .map(|n| n.expect("ids are a permutation of 0..len"))
            .collect();
        ExplainTree::new(doc.d, doc.root, nodes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn leaf_only_document() {
        let t = ExplainTree::from_json(r#"{"d": 3, "root": 0, "nodes": [{"id": 0, "kind": "leaf", "cluster": 0, "count": 5}]}"#).unwrap();
        assert_eq!(t, ExplainTree::single_leaf(3, 5));
    }

    #[test]
    fn missing_child_field_is_an_error() {
        let text = r#"{"d": 1, "root": 0, "nodes": [{"id": 0, "kind": "internal", "j": 0, "tau": 1.0, "left": 1},
            {"id": 1, "kind": "leaf", "cluster": 0, "count": 1}]}"#;
        assert!(matches!(
            ExplainTree::from_json(text),
            Err(SpexError::MalformedTree(_))
        ));
    }

    #[test]
    fn dangling_and_duplicate_ids() {
        let dangling = r#"{"d": 1, "root": 0, "nodes": [{"id": 0, "kind": "internal", "j": 0, "tau": 1.0, "left": 1, "right": 2},
            {"id": 1, "kind": "leaf", "cluster": 0, "count": 1}]}"#;
        assert!(ExplainTree::from_json(dangling).is_err());
        let dup = r#"{"d": 1, "root": 0, "nodes": [{"id": 0, "kind": "leaf", "cluster": 0, "count": 1},
            {"id": 0, "kind": "leaf", "cluster": 0, "count": 1}]}"#;
        assert!(ExplainTree::from_json(dup).is_err());
    }

    #[test]
    fn nodes_may_appear_in_any_order() {
        let text = r#"{"d": 1, "root": 2, "nodes": [{"id": 1, "kind": "leaf", "cluster": 1, "count": 1},
            {"id": 2, "kind": "internal", "j": 0, "tau": -0.25, "left": 0, "right": 1},
            {"id": 0, "kind": "leaf", "cluster": 0, "count": 2}]}"#;
        let t = ExplainTree::from_json(text).unwrap();
        assert_eq!(t.route(&[-0.25]), 0);
        assert_eq!(ExplainTree::from_json(&t.to_json()).unwrap(), t);
    }

    proptest! {
        #[test]
        fn thresholds_round_trip_bitwise(taus in prop::collection::vec(any::<f64>().prop_filter("finite", |t| t.is_finite()), 1..8)) {
            // a right-leaning caterpillar with one cut per threshold
            let mut nodes = Vec::new();
            for (i, &tau) in taus.iter().enumerate() {
                let id = nodes.len();
                nodes.push(TreeNode::Internal { j: i % 2, tau, left: id + 1, right: id + 2 });
                nodes.push(TreeNode::Leaf { cluster: i, count: i });
            }
            nodes.push(TreeNode::Leaf { cluster: taus.len(), count: 0 });
            let t = ExplainTree::new(2, 0, nodes).unwrap();
            let back = ExplainTree::from_json(&t.to_json()).unwrap();
            for (a, b) in t.nodes().iter().zip(back.nodes()) {
                if let (TreeNode::Internal { tau: x, .. }, TreeNode::Internal { tau: y, .. }) = (a, b) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
            prop_assert_eq!(back, t);
        }
    }
}
