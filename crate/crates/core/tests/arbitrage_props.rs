mod common;

use std::sync::Arc;

use choquet_oracle::{anticore_vertex, fixtures};
use choquet_pricing::arbitrage::WITNESS_TOL;
use choquet_pricing::{
    anticore_element, check_af, extract_certificate, nonneg_spread_check, random_portfolio_probe,
    replay_portfolio, Anticore, ArbitrageVerdict, Arithmetic, BondPosition, Capacity, Error, Payoff,
    PricingRule, Subset, DEFAULT_TOL,
};
use common::{capacity_of, close, Family};
use proptest::prelude::*;

fn small_capacity() -> impl Strategy<Value = Capacity> {
    prop_oneof![
        capacity_of(Family::Random),
        capacity_of(Family::Dominating),
        capacity_of(Family::NonDominating),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lp_agrees_with_vertex_enumeration(v in small_capacity()) {
        let oracle = anticore_vertex(&v, 1e-9).unwrap();
        match anticore_element(&v, Arithmetic::Float).unwrap() {
            Anticore::Element(mu) => {
                prop_assert!(oracle.is_some());
                prop_assert!(close(mu.total(), v.total(), WITNESS_TOL));
                for a in Subset::all(v.n()) {
                    prop_assert!(mu.measure(a) <= v.value(a) + WITNESS_TOL);
                }
            }
            Anticore::Empty(cert) => {
                prop_assert!(oracle.is_none());
                prop_assert!(cert.verify().is_ok());
                prop_assert!(cert.cost < 0.0);
                prop_assert_eq!(cert.bond, BondPosition::Short);
            }
        }
    }

    #[test]
    fn anticore_lies_in_the_conjugate_core(v in small_capacity()) {
        if let Anticore::Element(mu) = anticore_element(&v, Arithmetic::Float).unwrap() {
            let vs = v.conjugate();
            for a in Subset::all(v.n()) {
                prop_assert!(mu.measure(a) >= vs.value(a) - WITNESS_TOL);
            }
        }
    }

    #[test]
    fn exact_and_float_arithmetic_agree(v in small_capacity()) {
        let float = anticore_element(&v, Arithmetic::Float).unwrap();
        let exact = anticore_element(&v, Arithmetic::Exact).unwrap();
        prop_assert_eq!(
            matches!(float, Anticore::Element(_)),
            matches!(exact, Anticore::Element(_))
        );
    }

    #[test]
    fn concave_capacities_are_arbitrage_free(seed in any::<u64>(), n in 2usize..=6, gamma in 0.05..1.0f64) {
        let p = fixtures::random_probability(n, &mut common::rng(seed));
        let v = Capacity::distortion(fixtures::space(n), &p, gamma).unwrap();
        prop_assert!(check_af(&PricingRule::choquet(v), Arithmetic::Float).unwrap().is_arbitrage_free());
    }

    #[test]
    fn auto_conjugate_with_nonempty_anticore_is_additive(v in capacity_of(Family::AutoConjugate)) {
        let free = matches!(anticore_element(&v, Arithmetic::Float).unwrap(), Anticore::Element(_));
        prop_assert_eq!(free, v.is_additive(1e-7));
    }

    #[test]
    fn certificates_replay_at_their_cost(v in small_capacity()) {
        let rule = PricingRule::choquet(v);
        if let ArbitrageVerdict::Arbitrage { certificate } = check_af(&rule, Arithmetic::Float).unwrap() {
            let violation = replay_portfolio(&rule, &certificate.portfolio()).unwrap().unwrap();
            prop_assert!(close(violation.total_price, certificate.cost, 1e-9));
        }
    }

    #[test]
    fn sipos_rules_are_arbitrage_free_iff_additive(v in small_capacity()) {
        let rule = PricingRule::sipos(v.clone());
        match check_af(&rule, Arithmetic::Float).unwrap() {
            ArbitrageVerdict::ArbitrageFree { .. } => prop_assert!(v.is_additive(DEFAULT_TOL)),
            ArbitrageVerdict::Arbitrage { certificate } => {
                prop_assert!(!v.is_additive(DEFAULT_TOL));
                prop_assert!(certificate.verify().is_ok());
                let violation = replay_portfolio(&rule, &certificate.portfolio()).unwrap();
                prop_assert!(violation.is_some());
            }
        }
    }
}

#[test]
fn worked_certificates() {
    for v in [fixtures::two_state(0.3, 0.3, 1.0), fixtures::auto_conjugate_three()] {
        let cert = extract_certificate(&v, Arithmetic::Float).unwrap();
        assert!(close(cert.cost, -0.4, 1e-12));
        assert_eq!(cert.bond, BondPosition::Short);
        assert_eq!(cert.legs.len(), v.n());
        assert!(cert.legs.iter().all(|l| l.set.len() == 1 && close(l.coefficient, 1.0, 1e-12)));

        let exact = extract_certificate(&v, Arithmetic::Exact).unwrap();
        assert_eq!(exact.cost, -0.4);
    }
}

#[test]
fn pair_cover_certificate() {
    let v = fixtures::symmetric_three(0.5, 0.5, 1.0);
    let cert = extract_certificate(&v, Arithmetic::Exact).unwrap();
    assert!(close(cert.cost, -0.25, 1e-12));
    assert!(cert.coverage().iter().all(|&c| close(c, 1.0, 1e-12)));
}

#[test]
fn certificate_on_feasible_capacity_is_a_logic_error() {
    let v = fixtures::two_state(0.6, 0.6, 1.0);
    assert!(matches!(extract_certificate(&v, Arithmetic::Float), Err(Error::Logic(_))));
}

#[test]
fn spread_check_worked_example() {
    let v = fixtures::two_state(0.3, 0.3, 1.0);
    let check = nonneg_spread_check(&v, DEFAULT_TOL);
    assert!(!check.pass);
    assert_eq!(check.violating_set, Some(Subset(0b01)));
    assert!(close(check.buy_sell_sum.unwrap(), -0.4, 1e-12));
    assert!(nonneg_spread_check(&fixtures::two_state(0.6, 0.6, 1.0), DEFAULT_TOL).pass);
}

#[test]
fn sipos_certificate_for_a_dominating_capacity_buys_the_bond() {
    let v = fixtures::two_state(0.6, 0.6, 1.0);
    let rule = PricingRule::sipos(v);
    let ArbitrageVerdict::Arbitrage { certificate } = check_af(&rule, Arithmetic::Float).unwrap() else {
        panic!("expected arbitrage");
    };
    assert_eq!(certificate.bond, BondPosition::Long);
    assert!(close(certificate.cost, -0.2, 1e-12));
    assert!(replay_portfolio(&rule, &certificate.portfolio()).unwrap().is_some());
}

#[test]
fn sipos_auto_conjugate_contrast() {
    let rule = PricingRule::sipos(fixtures::auto_conjugate_three());
    let ArbitrageVerdict::Arbitrage { certificate } = check_af(&rule, Arithmetic::Float).unwrap() else {
        panic!("expected arbitrage");
    };
    assert!(close(certificate.cost, -0.4, 1e-12));
    let violation = replay_portfolio(&rule, &certificate.portfolio()).unwrap().unwrap();
    assert!(close(violation.total_price, -0.4, 1e-12));
}

#[test]
fn probe_finds_nothing_for_arbitrage_free_rules() {
    let additive = Capacity::additive(fixtures::space(3), &[0.2, 0.3, 0.5]).unwrap();
    let concave = Capacity::distortion(fixtures::space(4), &[0.1, 0.2, 0.3, 0.4], 0.5).unwrap();
    for rule in [
        PricingRule::sipos(additive.clone()),
        PricingRule::choquet(additive),
        PricingRule::choquet(concave),
    ] {
        let report = random_portfolio_probe(&rule, 2000, 5).unwrap();
        assert_eq!(report.trials, 2000);
        assert!(report.violations.is_empty());
    }
}

#[test]
fn probe_is_deterministic_and_finds_buy_sell_arbitrage() {
    let rule = PricingRule::choquet(fixtures::two_state(0.3, 0.3, 1.0));
    let a = random_portfolio_probe(&rule, 500, 9).unwrap();
    let b = random_portfolio_probe(&rule, 500, 9).unwrap();
    assert_eq!(a, b);
    assert!(!a.violations.is_empty());
    assert!(random_portfolio_probe(&rule, 0, 9).is_err());
}

#[test]
fn replay_rejects_negative_total_payoff() {
    let rule = PricingRule::choquet(fixtures::two_state(0.6, 0.6, 1.0));
    let x = Payoff::new(Arc::clone(rule.capacity().space()), vec![-1.0, 0.0]).unwrap();
    assert!(replay_portfolio(&rule, &[x]).is_err());
}

#[test]
fn lp_has_a_state_budget() {
    let v = Capacity::additive(fixtures::space(17), &[0.05; 17]).unwrap();
    assert!(matches!(anticore_element(&v, Arithmetic::Float), Err(Error::Budget { .. })));
}
