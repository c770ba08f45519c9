mod common;

use common::oracle_suite;

#[test]
fn every_scorer_matches_brute_force() {
    let s = oracle_suite(11, 120);
    assert!(s.passed(), "{:#?}", &s.failures[..s.failures.len().min(10)]);
    assert_eq!(s.nodes, 600);
    assert!(s.max_rel_err <= 1e-10);
}
