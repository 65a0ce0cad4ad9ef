//! Finite state spaces, subsets of states and contingent claims.
//!
//! A [`Payoff`] is a vector of money amounts indexed by the states of a
//! [`StateSpace`]. Subsets of states are bitmasks over the declared state
//! order, which keeps them hashable and usable as direct indices into
//! capacity tables.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of states; subsets fit in a `u32` mask.
pub const MAX_STATES: usize = 24;

/// An ordered, finite set of named states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSpace {
    names: Vec<String>,
}

impl StateSpace {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > MAX_STATES {
            return Err(Error::StateCount {
                got: names.len(),
                max: MAX_STATES,
            });
        }
        let mut seen = HashSet::with_capacity(names.len());
        for name in &names {
            if name.is_empty() {
                return Err(Error::EmptyStateName);
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateState(name.clone()));
            }
        }
        Ok(Arc::new(Self { names }))
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    /// Number of subsets, `2^n`.
    pub fn subset_count(&self) -> usize {
        1usize << self.len()
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn subset<I, S>(&self, names: I) -> Result<Subset>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut mask = 0u32;
        for name in names {
            mask |= 1 << self.index_of(name.as_ref())?;
        }
        Ok(Subset(mask))
    }

    /// Names of the states in `set`, in declared order.
    pub fn names_in(&self, set: Subset) -> Vec<&str> {
        set.states().map(|i| self.names[i].as_str()).collect()
    }

    /// Canonical key of a subset: comma-joined names in declared order,
    /// empty string for the empty set.
    pub fn subset_key(&self, set: Subset) -> String {
        self.names_in(set).join(",")
    }

    /// Human-readable `{a,b}` rendering.
    pub fn display_subset(&self, set: Subset) -> String {
        format!("{{{}}}", self.subset_key(set))
    }
}

/// A subset of states as a bitmask over the declared state order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        debug_assert!(n <= MAX_STATES);
        Subset(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << i)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn insert(self, i: usize) -> Subset {
        Subset(self.0 | (1 << i))
    }

    pub fn complement(self, n: usize) -> Subset {
        Subset(!self.0 & Subset::full(n).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Indices of member states in increasing order.
    pub fn states(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// Every subset of an `n`-state space, in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..(1u32 << n)).map(Subset)
    }
}

/// A contingent claim: one money amount per state, paid at the later date.
#[derive(Debug, Clone)]
pub struct Payoff {
    space: Arc<StateSpace>,
    values: Vec<f64>,
}

impl PartialEq for Payoff {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

pub(crate) fn same_space(a: &Arc<StateSpace>, b: &Arc<StateSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Payoff {
    pub fn new(space: Arc<StateSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { space, values })
    }

    /// The constant claim `k` in every state; `constant(space, 1.0)` is the bond.
    pub fn constant(space: Arc<StateSpace>, k: f64) -> Result<Self> {
        let n = space.len();
        Self::new(space, vec![k; n])
    }

    /// 1 on the named states, 0 elsewhere.
    pub fn indicator<I, S>(space: Arc<StateSpace>, names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set = space.subset(names)?;
        Ok(Self::indicator_of(space, set))
    }

    pub fn indicator_of(space: Arc<StateSpace>, set: Subset) -> Self {
        let values = (0..space.len())
            .map(|i| if set.contains(i) { 1.0 } else { 0.0 })
            .collect();
        Self { space, values }
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Payoff {
        Payoff {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip(&self, other: &Payoff, f: impl Fn(f64, f64) -> f64) -> Result<Payoff> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Payoff {
            space: Arc::clone(&self.space),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, other: &Payoff) -> Result<Payoff> {
        self.zip(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Payoff) -> Result<Payoff> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, t: f64) -> Payoff {
        self.map(|v| t * v)
    }

    pub fn shift(&self, k: f64) -> Payoff {
        self.map(|v| v + k)
    }

    /// Pointwise `self ∨ k`.
    pub fn max_with(&self, k: f64) -> Payoff {
        self.map(|v| v.max(k))
    }

    /// Pointwise `self ∧ k`.
    pub fn min_with(&self, k: f64) -> Payoff {
        self.map(|v| v.min(k))
    }

    /// `x⁺ = x ∨ 0`.
    pub fn pos_part(&self) -> Payoff {
        self.map(|v| if v > 0.0 { v } else { 0.0 })
    }

    /// `x⁻ = (−x) ∨ 0`.
    pub fn neg_part(&self) -> Payoff {
        self.map(|v| if v < 0.0 { -v } else { 0.0 })
    }

    /// Call with strike `k`: `(x − k)⁺`.
    pub fn call(&self, k: f64) -> Result<Payoff> {
        check_strike(k)?;
        Ok(self.map(|v| if v > k { v - k } else { 0.0 }))
    }

    /// Put with strike `k`: `(k − x)⁺`.
    pub fn put(&self, k: f64) -> Result<Payoff> {
        check_strike(k)?;
        Ok(self.map(|v| if v < k { k - v } else { 0.0 }))
    }

    /// Discount certificate with cap `k`: `x ∧ k`.
    pub fn discount_certificate(&self, k: f64) -> Result<Payoff> {
        check_strike(k)?;
        Ok(self.min_with(k))
    }

    /// Exhaustive pairwise comonotonicity check.
    pub fn is_comonotonic_with(&self, other: &Payoff) -> Result<bool> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let (x, y) = (&self.values, &other.values);
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                if (x[i] - x[j]) * (y[i] - y[j]) < 0.0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Sup-norm distance.
    pub fn max_norm_distance(&self, other: &Payoff) -> Result<f64> {
        Ok(self
            .try_sub(other)?
            .values
            .iter()
            .fold(0.0, |acc, v| acc.max(v.abs())))
    }

    /// Upper level set `{x ≥ t}`.
    pub fn level_set(&self, t: f64) -> Subset {
        let mut mask = 0u32;
        for (i, &v) in self.values.iter().enumerate() {
            if v >= t {
                mask |= 1 << i;
            }
        }
        Subset(mask)
    }

    pub fn to_file(&self) -> PayoffFile {
        PayoffFile {
            states: self.space.names().to_vec(),
            values: self.values.clone(),
        }
    }
}

fn check_strike(k: f64) -> Result<()> {
    if k >= 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeStrike(k))
    }
}

impl Neg for &Payoff {
    type Output = Payoff;

    fn neg(self) -> Payoff {
        self.map(|v| -v)
    }
}

impl Add for &Payoff {
    type Output = Payoff;

    /// Panics on mismatched spaces; use [`Payoff::try_add`] for fallible input.
    fn add(self, rhs: &Payoff) -> Payoff {
        self.try_add(rhs).expect("payoffs on different state spaces")
    }
}

impl Sub for &Payoff {
    type Output = Payoff;

    fn sub(self, rhs: &Payoff) -> Payoff {
        self.try_sub(rhs).expect("payoffs on different state spaces")
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// On-disk payoff: `{"states": ["a","b"], "values": [2.0, 0.0]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffFile {
    pub states: Vec<String>,
    pub values: Vec<f64>,
}

impl PayoffFile {
    /// Binds the file to `space`; the state list must match it exactly,
    /// names and order.
    pub fn into_payoff(self, space: &Arc<StateSpace>) -> Result<Payoff> {
        if self.states.as_slice() != space.names() {
            return Err(Error::InvalidParameter(format!(
                "payoff states {:?} do not match capacity states {:?}",
                self.states,
                space.names()
            )));
        }
        Payoff::new(Arc::clone(space), self.values)
    }
}
