mod common;

use choquet_oracle::fixtures;
use choquet_pricing::{Capacity, CapacityViolation, Error, GeneratorSpec, Subset, DEFAULT_TOL};
use common::{capacity_of, Family};
use proptest::prelude::*;

fn any_family() -> impl Strategy<Value = Capacity> {
    prop_oneof![
        capacity_of(Family::Random),
        capacity_of(Family::AutoConjugate),
        capacity_of(Family::Dominating),
        capacity_of(Family::NonDominating),
    ]
}

proptest! {
    #[test]
    fn conjugation_is_an_involution(v in any_family()) {
        let back = v.conjugate().conjugate();
        prop_assert_eq!(back.table(), v.table());
    }

    #[test]
    fn conjugate_is_a_capacity_with_the_same_total(v in any_family()) {
        let vs = v.conjugate();
        prop_assert_eq!(vs.total(), v.total());
        let rebuilt = Capacity::from_table(v.space().clone(), vs.table().to_vec());
        prop_assert!(rebuilt.is_ok());
    }

    #[test]
    fn auto_conjugate_iff_dominates_both_ways(v in any_family()) {
        let vs = v.conjugate();
        let both = v.dominates_conjugate(DEFAULT_TOL) && vs.dominates_conjugate(DEFAULT_TOL);
        prop_assert_eq!(v.is_auto_conjugate(DEFAULT_TOL), both);
    }

    #[test]
    fn dominating_means_pointwise_above_conjugate(v in any_family()) {
        let vs = v.conjugate();
        let above = Subset::all(v.n()).all(|a| v.value(a) >= vs.value(a) - DEFAULT_TOL);
        prop_assert_eq!(v.dominates_conjugate(DEFAULT_TOL), above);
    }

    #[test]
    fn family_constructions_hold(seed in any::<u64>(), n in 2usize..=5) {
        prop_assert!(common::capacity(n, Family::AutoConjugate, seed).is_auto_conjugate(DEFAULT_TOL));
        prop_assert!(common::capacity(n, Family::Dominating, seed).dominates_conjugate(DEFAULT_TOL));
        prop_assert!(!common::capacity(n, Family::NonDominating, seed).dominates_conjugate(DEFAULT_TOL));
    }

    #[test]
    fn additive_is_auto_conjugate_and_concave(weights in prop::collection::vec(0.0..1.0f64, 2..=6)) {
        let v = Capacity::additive(fixtures::space(weights.len()), &weights).unwrap();
        prop_assert!(v.is_additive(DEFAULT_TOL));
        prop_assert!(v.is_auto_conjugate(DEFAULT_TOL));
        prop_assert!(v.is_concave(DEFAULT_TOL).unwrap());
    }

    #[test]
    fn local_and_exhaustive_concavity_agree(v in any_family()) {
        prop_assert_eq!(v.is_concave(DEFAULT_TOL).unwrap(), v.is_concave_exhaustive(DEFAULT_TOL).unwrap());
    }

    #[test]
    fn distortion_concavity_follows_gamma(seed in any::<u64>(), n in 2usize..=5, gamma in 0.1..3.0f64) {
        let p = fixtures::random_probability(n, &mut common::rng(seed));
        let v = Capacity::distortion(fixtures::space(n), &p, gamma).unwrap();
        prop_assert_eq!(v.total(), 1.0);
        prop_assert_eq!(v.is_concave_exhaustive(DEFAULT_TOL).unwrap(), gamma <= 1.0 + 1e-12);
        // The conjugate of a concave capacity is supermodular: its own
        // conjugate is concave again.
        prop_assert_eq!(v.conjugate().conjugate().is_concave(DEFAULT_TOL).unwrap(), gamma <= 1.0 + 1e-12);
    }

    #[test]
    fn contamination_conjugate_is_concave(seed in any::<u64>(), n in 2usize..=5, eps in 0.0..1.0f64) {
        let p = fixtures::random_probability(n, &mut common::rng(seed));
        let v = Capacity::epsilon_contamination(fixtures::space(n), &p, eps).unwrap();
        prop_assert!(v.conjugate().is_concave_exhaustive(DEFAULT_TOL).unwrap());
        prop_assert!(v.dominates_conjugate(DEFAULT_TOL) == (eps < 1e-9));
    }
}

#[test]
fn validation_reports_every_violation() {
    let space = fixtures::space_ab();
    let err = Capacity::from_table(space, vec![0.1, 0.7, 0.2, 0.5]).unwrap_err();
    let Error::InvalidCapacity(violations) = err else {
        panic!("expected capacity violations, got {err:?}");
    };
    assert!(violations.iter().any(|v| matches!(v, CapacityViolation::NotGrounded { .. })));
    let monotone: Vec<_> = violations
        .iter()
        .filter(|v| matches!(v, CapacityViolation::NotMonotone { .. }))
        .collect();
    assert_eq!(monotone.len(), 1);
    let message = monotone[0].to_string();
    assert!(message.contains("{a} ⊆ {a,b}"), "{message}");
}

#[test]
fn generators_match_hand_values() {
    let space = fixtures::space_ab();
    let v = Capacity::generate(
        space.clone(),
        &GeneratorSpec::EpsilonContamination {
            p: vec![0.5, 0.5],
            epsilon: 0.2,
        },
    )
    .unwrap();
    assert_eq!(v.table(), &[0.0, 0.4, 0.4, 1.0]);
    let w = Capacity::generate(space, &GeneratorSpec::Additive { weights: vec![0.4, 0.6] }).unwrap();
    assert_eq!(w.table(), &[0.0, 0.4, 0.6, 1.0]);
}

#[test]
fn worked_conjugate() {
    let v = fixtures::two_state(0.6, 0.6, 1.0);
    let vs = v.conjugate();
    assert!((vs.value(Subset(1)) - 0.4).abs() < 1e-15);
    assert!((vs.value(Subset(2)) - 0.4).abs() < 1e-15);
    assert!(v.dominates_conjugate(DEFAULT_TOL));
    assert!(!vs.dominates_conjugate(DEFAULT_TOL));
    assert!(fixtures::auto_conjugate_three().is_auto_conjugate(DEFAULT_TOL));
}
