use mtk_core::multicat::{
    discrete, m1, m3, m4, m4_collapsed, monoid_multicat, monoid_operad, nonpromonoidal, random_multicat, semigroup_operad, Multicat,
    MulticatSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Composites that an oracle computes by brute force: every way of
/// substituting a configuration and checking that each result has the
/// right type.
fn oracle_composite_count(mc: &Multicat) -> usize {
    let mut count = 0;
    for outer in 0..mc.ops().len() {
        for inners in mc.configurations(outer, mc.arity_bound()) {
            let r = mc.subst(outer, &inners).expect("closed");
            let src: Vec<usize> = inners.iter().flat_map(|&i| mc.op(i).src.clone()).collect();
            assert_eq!(mc.op(r).src, src);
            assert_eq!(mc.op(r).tgt, mc.op(outer).tgt);
            count += 1;
        }
    }
    count
}

#[test]
fn semigroup_operad_has_singleton_homs_and_is_valid() {
    let mc = semigroup_operad(3);
    for n in 1..=3 {
        assert_eq!(mc.hom(&vec![0; n], 0).len(), 1);
    }
    let rep = mc.validate();
    assert!(rep.valid, "{rep:?}");
    assert!(rep.assoc_instances > 0);
}

#[test]
fn discrete_has_only_identities() {
    let mc = discrete(&["c", "d"]);
    assert_eq!(mc.ops().len(), 2);
    assert!(mc.validate().valid);
    let lin = mc.linear_part().unwrap();
    assert_eq!(lin.mors().len(), 2);
    assert_eq!(lin.hom(0, 1).len(), 0);
}

#[test]
fn m3_is_valid_with_no_nontrivial_composites() {
    let mc = m3();
    let rep = mc.validate();
    assert!(rep.valid, "{rep:?}");
    // the composable configurations are (id_c; id_c), (id_d; id_d),
    // (id_d; b) and (b; id_c, id_c), all unit-law instances
    assert_eq!(oracle_composite_count(&mc), 4);
}

#[test]
fn m4_validates_and_has_idempotent_linear_part() {
    let mc = m4();
    let rep = mc.validate();
    assert!(rep.valid, "{rep:?}");
    let lin = mc.linear_part().unwrap();
    assert_eq!(lin.mors().len(), 2);
    let e = lin.mors().iter().position(|m| m.label.to_string().contains('e')).unwrap();
    assert_eq!(lin.compose(e, e), Some(e));
}

#[test]
fn fixtures_are_valid() {
    for mc in [m1(), m3(), m4(), m4_collapsed(), nonpromonoidal()] {
        let rep = mc.validate();
        assert!(rep.valid, "{rep:?}");
    }
    let mc = monoid_multicat(&["1", "z"], &[vec![0, 1], vec![1, 1]]);
    assert!(mc.validate().valid);
}

#[test]
fn corrupted_entry_is_reported_as_associativity_violation() {
    let mc = monoid_operad(&["1", "a"], &[vec![0, 1], vec![1, 0]], 2);
    assert!(mc.validate().valid);
    let a = mc.find_op(&[0], 0, "a").unwrap();
    let one = mc.identity(0);
    let m1 = mc.find_op(&[0, 0], 0, "1").unwrap();
    // σ(m_1; a, 1) should be m_a; setting it to m_1 makes the nesting
    // a ; m_1 ; (a, 1) evaluate to m_1 one way and m_a the other
    let bad = mc.with_subst_entry(m1, &[a, one], m1).unwrap();
    let rep = bad.validate();
    assert!(!rep.valid);
    assert!(rep.unit_violations.is_empty());
    assert!(rep.closure_gaps.is_empty());
    assert!(rep.assoc_violations.iter().any(|v| v.starts_with("associativity fails at a:(c)->c; 1:(c,c)->c")), "{rep:?}");
}

#[test]
fn missing_entry_is_a_closure_gap() {
    let spec: MulticatSpec = serde_json::from_value(serde_json::json!({
        "objects": ["c"],
        "arity_bound": 2,
        "multihoms": [{"src": ["c", "c"], "tgt": "c", "elems": ["m"]},
                      {"src": ["c"], "tgt": "c", "elems": ["e"]}],
        "identities": {"c": "id"},
        "subst": []
    }))
    .unwrap();
    let mc = Multicat::from_spec_unchecked(&spec).unwrap();
    let rep = mc.validate();
    assert!(!rep.valid);
    assert!(rep.closure_gaps.iter().any(|g| g.contains("e:(c)->c; e:(c)->c")));
    assert!(Multicat::from_tables(&spec).is_err());
}

#[test]
fn json_round_trip_preserves_tables() {
    for mc in [m1(), m3(), m4()] {
        let spec = mc.to_spec();
        let text = serde_json::to_string(&spec).unwrap();
        let back: MulticatSpec = serde_json::from_str(&text).unwrap();
        let mc2 = Multicat::from_tables(&back).unwrap();
        assert_eq!(mc2, mc);
    }
}

#[test]
fn from_tables_builds_m3() {
    let spec: MulticatSpec = serde_json::from_value(serde_json::json!({
        "objects": ["c", "d"],
        "multihoms": [{"src": ["c", "c"], "tgt": "d", "elems": ["b"]}],
        "identities": {"c": "id", "d": "id"}
    }))
    .unwrap();
    let mc = Multicat::from_tables(&spec).unwrap();
    assert_eq!(mc.arity_bound(), 2);
    assert_eq!(mc.ops().len(), 3);
}

#[test]
fn nullary_and_over_bound_homs_are_rejected() {
    let spec: MulticatSpec = serde_json::from_value(serde_json::json!({
        "objects": ["c"],
        "multihoms": [{"src": [], "tgt": "c", "elems": ["k"]}],
        "identities": {"c": "id"}
    }))
    .unwrap();
    assert!(Multicat::from_spec_unchecked(&spec).is_err());
    let spec: MulticatSpec = serde_json::from_value(serde_json::json!({
        "objects": ["c"],
        "arity_bound": 1,
        "multihoms": [{"src": ["c", "c"], "tgt": "c", "elems": ["m"]}],
        "identities": {"c": "id"}
    }))
    .unwrap();
    assert!(Multicat::from_spec_unchecked(&spec).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_multicats_validate_and_have_valid_linear_parts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mc = random_multicat(&mut rng);
        let rep = mc.validate();
        prop_assert!(rep.valid);
        let lin = mc.linear_part().unwrap();
        prop_assert!(lin.check().is_empty());
    }

    #[test]
    fn validation_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mc = random_multicat(&mut rng);
        prop_assert_eq!(mc.validate(), mc.validate());
        let again = random_multicat(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(again, mc);
    }
}
