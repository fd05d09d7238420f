mod common;

fn assert_suite(result: Result<(), String>) {
    if let Err(e) = result {
        panic!("{e}");
    }
}

#[test]
fn polyhedron_is_invariant_under_units_and_representation() {
    assert_suite(common::unit_invariance());
}

#[test]
fn hull_is_idempotent_and_membership_matches_oracle() {
    assert_suite(common::hull_membership());
}

#[test]
fn monomial_valuations_are_additive() {
    assert_suite(common::valuation_additivity());
}

#[test]
fn facet_valuations_equal_m_times_l() {
    assert_suite(common::facet_values());
}

#[test]
fn face_first_traces_descend_with_verified_witnesses() {
    assert_suite(common::trace_face());
}

#[test]
fn vertex_only_traces_descend_with_verified_witnesses() {
    assert_suite(common::trace_vertex());
}

#[test]
fn modes_agree_when_both_terminate() {
    assert_suite(common::cross_mode());
}

#[test]
fn brute_force_oracle_sanity() {
    use polyprep::exactnum::rat;
    let pts = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(2, 1)]];
    assert!(common::brute_contains(&pts, &vec![rat(1, 2), rat(1, 1)]));
    assert!(!common::brute_contains(&pts, &vec![rat(1, 3), rat(1, 1)]));
    assert!(common::brute_contains(&pts, &vec![rat(5, 1), rat(0, 1)]));
}
