//! Explainable clustering with axis-aligned decision trees.
//!
//! A tree is grown greedily: every leaf holds its best coordinate cut, and the
//! leaf whose split reduces the tree objective the most is split next. The cut
//! objective is pluggable. The graph-conductance objectives (clique graph over
//! a reference clustering, or a k-nearest-neighbor graph) live next to the
//! classic baselines (CART, IMM, EMN) behind the same [`cuts::CutScorer`]
//! contract, so all of them share one sweep-line search.
//!
//! The [`theory`] module checks the inequalities that justify the approach
//! numerically on random instances.

pub mod algorithms;
pub mod cli;

pub mod cuts;
pub mod data;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod theory;
pub mod tree;

pub use error::{Result, SpexError};
