mod common;

use std::sync::Arc;

use choquet_oracle::{choquet_riemann, fixtures, sipos_riemann};
use choquet_pricing::pricing::SANDWICH_TOL;
use choquet_pricing::{
    choquet_price, linear_price, price_report, sipos_price, Capacity, Payoff, PricingRule, RuleKind,
    StateSpace, Subset, DEFAULT_TOL,
};
use common::{capacity_of, capacity_with_payoffs, close, Family};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn shifted(x: &Payoff, bumps: &[f64]) -> Payoff {
    let values = x.values().iter().zip(bumps).map(|(a, b)| a + b.abs()).collect();
    Payoff::new(Arc::clone(x.space()), values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn integrals_match_riemann_oracle((v, xs) in capacity_with_payoffs(Family::Random, 1)) {
        let x = &xs[0];
        prop_assert!(close(choquet_price(&v, x).unwrap(), choquet_riemann(&v, x, 1e-3), TOL));
        prop_assert!(close(sipos_price(&v, x).unwrap(), sipos_riemann(&v, x, 1e-3), TOL));
    }

    #[test]
    fn positive_homogeneity((v, xs) in capacity_with_payoffs(Family::Random, 1), t in 0.0..5.0f64) {
        let x = &xs[0];
        for rule in [PricingRule::choquet(v.clone()), PricingRule::sipos(v.clone())] {
            let lhs = rule.price(&x.scale(t)).unwrap();
            prop_assert!(close(lhs, t * rule.price(x).unwrap(), TOL * (1.0 + t)));
        }
    }

    #[test]
    fn choquet_translation_invariance((v, xs) in capacity_with_payoffs(Family::Random, 1), k in -20.0..20.0f64) {
        let x = &xs[0];
        let f = |y: &Payoff| choquet_price(&v, y).unwrap();
        prop_assert!(close(f(&x.shift(k)), f(x) + k * v.total(), TOL));
    }

    #[test]
    fn monotonicity(
        (v, xs) in capacity_with_payoffs(Family::Random, 1),
        bumps in prop::collection::vec(0.0..3.0f64, 5),
    ) {
        let x = &xs[0];
        let y = shifted(x, &bumps[..x.len()]);
        for rule in [PricingRule::choquet(v.clone()), PricingRule::sipos(v.clone())] {
            prop_assert!(rule.price(x).unwrap() <= rule.price(&y).unwrap() + TOL);
        }
    }

    #[test]
    fn lipschitz_in_sup_norm((v, xs) in capacity_with_payoffs(Family::Random, 2)) {
        let d = xs[0].max_norm_distance(&xs[1]).unwrap();
        let f = |y: &Payoff| choquet_price(&v, y).unwrap();
        prop_assert!((f(&xs[0]) - f(&xs[1])).abs() <= v.total() * d + TOL);
    }

    #[test]
    fn comonotonic_additivity(
        (v, xs) in capacity_with_payoffs(Family::Random, 1),
        t1 in -5.0..5.0f64, t2 in -5.0..5.0f64, a in 0.0..3.0f64, c in -3.0..3.0f64,
    ) {
        let z = &xs[0];
        let x = z.max_with(t1).scale(a);
        let y = z.min_with(t2).shift(c);
        prop_assert!(x.is_comonotonic_with(&y).unwrap());
        let f = |p: &Payoff| choquet_price(&v, p).unwrap();
        prop_assert!(close(f(&(&x + &y)), f(&x) + f(&y), TOL));
    }

    #[test]
    fn buy_and_sell_additivity((v, xs) in capacity_with_payoffs(Family::Random, 1)) {
        let x = &xs[0];
        let f = |p: &Payoff| choquet_price(&v, p).unwrap();
        prop_assert!(close(f(x), f(&x.pos_part()) + f(&-&x.neg_part()), TOL));
    }

    #[test]
    fn sipos_is_odd((v, xs) in capacity_with_payoffs(Family::Random, 1)) {
        let x = &xs[0];
        prop_assert_eq!(sipos_price(&v, &-x).unwrap(), -sipos_price(&v, x).unwrap());
    }

    #[test]
    fn spread_is_buy_plus_sell_price((v, xs) in capacity_with_payoffs(Family::Random, 1)) {
        let x = &xs[0];
        let rule = PricingRule::choquet(v.clone());
        let rep = price_report(&rule, "x", x).unwrap();
        let f = |p: &Payoff| choquet_price(&v, p).unwrap();
        prop_assert!(close(rep.spread, f(x) + f(&-x), 1e-12));
        prop_assert_eq!(rep.ask, f(x));
    }

    #[test]
    fn dominating_capacities_have_nonnegative_spreads((v, xs) in capacity_with_payoffs(Family::Dominating, 4)) {
        let rule = PricingRule::choquet(v);
        for x in &xs {
            let rep = price_report(&rule, "x", x).unwrap();
            prop_assert!(rep.spread >= -TOL);
            prop_assert!(rep.sandwich_holds(SANDWICH_TOL));
        }
    }

    #[test]
    fn non_dominating_capacities_have_a_negative_indicator_spread(v in capacity_of(Family::NonDominating)) {
        let found = Subset::all(v.n()).any(|a| {
            let x = Payoff::indicator_of(Arc::clone(v.space()), a);
            choquet_price(&v, &x).unwrap() + choquet_price(&v, &-&x).unwrap() < -DEFAULT_TOL
        });
        prop_assert!(found);
    }

    #[test]
    fn auto_conjugate_choquet_equals_sipos((v, xs) in capacity_with_payoffs(Family::AutoConjugate, 3)) {
        for x in &xs {
            prop_assert!(close(choquet_price(&v, x).unwrap(), sipos_price(&v, x).unwrap(), TOL));
        }
    }

    #[test]
    fn concave_capacities_price_subadditively(
        (seed, gamma, xs) in (2usize..=5).prop_flat_map(|n| {
            (any::<u64>(), 0.1..1.0f64, prop::collection::vec(common::payoff_on(fixtures::space(n)), 2))
        }),
    ) {
        let space = Arc::clone(xs[0].space());
        let p = fixtures::random_probability(space.len(), &mut common::rng(seed));
        let v = Capacity::distortion(space, &p, gamma).unwrap();
        prop_assert!(v.is_concave(DEFAULT_TOL).unwrap());
        let f = |y: &Payoff| choquet_price(&v, y).unwrap();
        prop_assert!(f(&(&xs[0] + &xs[1])) <= f(&xs[0]) + f(&xs[1]) + TOL);
    }

    #[test]
    fn state_relabelling_does_not_change_prices(
        (v, xs) in capacity_with_payoffs(Family::Random, 1),
        rot in 1usize..5,
    ) {
        // Rotating the state order changes how ties are broken in the sort.
        let n = v.n();
        let rot = rot % n;
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let names: Vec<String> = perm.iter().map(|&i| v.space().names()[i].clone()).collect();
        let space = StateSpace::new(names).unwrap();
        let map = |a: Subset| Subset(
            (0..n).filter(|&j| a.contains(j)).fold(0u32, |m, j| m | 1 << perm[j]),
        );
        let w = Capacity::from_fn(Arc::clone(&space), |a| v.value(map(a))).unwrap();
        let x = &xs[0];
        let y = Payoff::new(space, perm.iter().map(|&i| x.values()[i]).collect()).unwrap();
        prop_assert!(close(choquet_price(&w, &y).unwrap(), choquet_price(&v, x).unwrap(), 1e-12));
    }
}

#[test]
fn ties_do_not_change_the_integral() {
    let v = fixtures::symmetric_three(0.3, 0.5, 1.0);
    let s = Arc::clone(v.space());
    let tied = Payoff::new(Arc::clone(&s), vec![1.0, 1.0, 0.0]).unwrap();
    let expected = v.value(s.subset(["a", "b"]).unwrap());
    assert_eq!(choquet_price(&v, &tied).unwrap(), expected);
    assert_eq!(choquet_riemann(&v, &tied, 1e-2), expected);
}

#[test]
fn additive_capacity_prices_linearly() {
    let v = Capacity::additive(fixtures::space(3), &[0.2, 0.3, 0.4]).unwrap();
    let rule = PricingRule::new(RuleKind::Linear, v.clone()).unwrap();
    let x = Payoff::new(Arc::clone(v.space()), vec![2.0, -1.0, 0.5]).unwrap();
    let lin = linear_price(&v, &x).unwrap();
    assert_eq!(rule.price(&x).unwrap(), lin);
    assert!(close(lin, choquet_price(&v, &x).unwrap(), 1e-12));
    assert!(close(lin, sipos_price(&v, &x).unwrap(), 1e-12));
    assert!(close(rule.riskless_rate(), 1.0 / 0.9 - 1.0, 1e-15));
}
