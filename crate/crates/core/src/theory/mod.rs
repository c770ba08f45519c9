//! Numerical checks of the bounds and equivalences behind the tree builders.

pub mod bounds;
pub mod graphs;
pub mod price;
pub mod random;
pub mod suites;

pub use bounds::{
    coordinate_cut_minima, corollary_report, theorem1_report, BoundReport, CorollaryReport,
    CutValue,
};
pub use graphs::{
    complete_graph, degree_product_clique, degree_weighted_clique, explicit_clique,
    independent_set_graph, nonuniform_sparsity, single_edge, star_graph, CutWeights, ProductClique,
};
pub use price::{price_check, LevelCheck, PriceReport};
pub use suites::{
    corollary_suite, equivalence_suite, price_suite, theorem1_suite, SuiteReport, Witness,
};
