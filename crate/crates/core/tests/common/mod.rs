#![allow(dead_code)]

use std::sync::Arc;

use choquet_oracle::fixtures;
use choquet_pricing::{Capacity, Payoff, StateSpace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Arbitrary real entries in `[-10, 10]`, with some probability of landing
/// on the half-integer grid so ties occur.
pub fn entry() -> impl Strategy<Value = f64> {
    prop_oneof![
        -10.0..10.0f64,
        (-20i32..=20).prop_map(|j| 0.5 * f64::from(j)),
    ]
}

pub fn payoff_on(space: Arc<StateSpace>) -> impl Strategy<Value = Payoff> {
    let n = space.len();
    prop::collection::vec(entry(), n).prop_map(move |v| Payoff::new(Arc::clone(&space), v).unwrap())
}

#[derive(Debug, Clone, Copy)]
pub enum Family {
    Random,
    AutoConjugate,
    Dominating,
    NonDominating,
}

pub fn capacity(n: usize, family: Family, seed: u64) -> Capacity {
    let space = fixtures::space(n);
    let mut r = rng(seed);
    match family {
        Family::Random => fixtures::random_capacity(&space, &mut r),
        Family::AutoConjugate => fixtures::random_auto_conjugate(&space, &mut r),
        Family::Dominating => fixtures::random_dominating(&space, &mut r),
        Family::NonDominating => fixtures::random_non_dominating(&space, &mut r),
    }
}

/// A capacity from `family` on 2 to 5 states.
pub fn capacity_of(family: Family) -> impl Strategy<Value = Capacity> {
    (2usize..=5, any::<u64>()).prop_map(move |(n, seed)| capacity(n, family, seed))
}

/// A capacity and `k` payoffs on its space.
pub fn capacity_with_payoffs(family: Family, k: usize) -> impl Strategy<Value = (Capacity, Vec<Payoff>)> {
    capacity_of(family).prop_flat_map(move |v| {
        let space = Arc::clone(v.space());
        (Just(v), prop::collection::vec(payoff_on(space), k))
    })
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
