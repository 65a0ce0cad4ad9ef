//! Choquet, Šipoš and linear pricing of contingent claims.

use serde::{Deserialize, Serialize};

use crate::capacity::{Capacity, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::payoff::{same_space, Payoff, Subset};

/// Tolerance used when checking the bid ≤ Šipoš ≤ ask sandwich.
pub const SANDWICH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Choquet,
    Sipos,
    Linear,
}

impl std::fmt::Display for RuleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RuleKind::Choquet => "choquet",
            RuleKind::Sipos => "sipos",
            RuleKind::Linear => "linear",
        })
    }
}

/// A pricing rule `f` determined by a capacity and an integral kind.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingRule {
    kind: RuleKind,
    capacity: Capacity,
}

impl PricingRule {
    /// A `linear` rule requires an additive capacity (within [`DEFAULT_TOL`]).
    pub fn new(kind: RuleKind, capacity: Capacity) -> Result<Self> {
        if kind == RuleKind::Linear && !capacity.is_additive(DEFAULT_TOL) {
            return Err(Error::InvalidParameter(
                "a linear pricing rule needs an additive capacity".into(),
            ));
        }
        Ok(Self { kind, capacity })
    }

    pub fn choquet(capacity: Capacity) -> Self {
        Self {
            kind: RuleKind::Choquet,
            capacity,
        }
    }

    pub fn sipos(capacity: Capacity) -> Self {
        Self {
            kind: RuleKind::Sipos,
            capacity,
        }
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn capacity(&self) -> &Capacity {
        &self.capacity
    }

    /// The price `f(x)` paid today for `x`.
    pub fn price(&self, x: &Payoff) -> Result<f64> {
        match self.kind {
            RuleKind::Choquet => choquet_price(&self.capacity, x),
            RuleKind::Sipos => sipos_price(&self.capacity, x),
            RuleKind::Linear => linear_price(&self.capacity, x),
        }
    }

    /// `r` with `f(1_Ω) = 1/(1+r)`.
    pub fn riskless_rate(&self) -> f64 {
        riskless_rate(&self.capacity)
    }
}

fn check_space(v: &Capacity, x: &Payoff) -> Result<()> {
    if same_space(v.space(), x.space()) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// Choquet integral of `x` with respect to `v`.
///
/// With states sorted so that `x₁ ≥ x₂ ≥ … ≥ xₙ` and `Sᵢ` the first `i`
/// states, the integral is `Σᵢ (xᵢ − xᵢ₊₁)·v(Sᵢ) + xₙ·v(Ω)`. Ties are
/// broken by declared state order; the value does not depend on it.
pub fn choquet_price(v: &Capacity, x: &Payoff) -> Result<f64> {
    check_space(v, x)?;
    Ok(choquet_sorted(v, x.values()))
}

fn choquet_sorted(v: &Capacity, values: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));

    let mut chain = Subset::EMPTY;
    let mut sum = 0.0;
    for w in order.windows(2) {
        chain = chain.insert(w[0]);
        let step = values[w[0]] - values[w[1]];
        if step != 0.0 {
            sum += step * v.value(chain);
        }
    }
    sum + values[order[order.len() - 1]] * v.total()
}

/// Šipoš integral `∫x⁺dv − ∫x⁻dv`.
pub fn sipos_price(v: &Capacity, x: &Payoff) -> Result<f64> {
    check_space(v, x)?;
    Ok(choquet_sorted(v, x.pos_part().values()) - choquet_sorted(v, x.neg_part().values()))
}

/// `Σ x(ω)·v({ω})`; equals both integrals when `v` is additive.
pub fn linear_price(v: &Capacity, x: &Payoff) -> Result<f64> {
    check_space(v, x)?;
    Ok(x
        .values()
        .iter()
        .zip(v.singleton_values())
        .map(|(xi, wi)| xi * wi)
        .sum())
}

/// `r = 1/v(Ω) − 1`.
pub fn riskless_rate(v: &Capacity) -> f64 {
    1.0 / v.total() - 1.0
}

/// Choquet and Šipoš integrals coincide for `v` exactly when `v` is
/// auto-conjugate.
pub fn is_choquet_sipos(v: &Capacity, tol: f64) -> bool {
    v.is_auto_conjugate(tol)
}

/// Prices quoted for one payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingReport {
    pub payoff_id: String,
    /// `f(x)`, the buying price.
    pub ask: f64,
    /// `−f(−x)`, the selling price.
    pub bid: f64,
    /// `ask − bid`; negative values are buy & sell arbitrage.
    pub spread: f64,
    pub sipos_value: f64,
    pub riskless_rate: f64,
}

impl PricingReport {
    /// `bid ≤ sipos_value ≤ ask` within `tol`.
    pub fn sandwich_holds(&self, tol: f64) -> bool {
        self.bid - tol <= self.sipos_value && self.sipos_value <= self.ask + tol
    }
}

pub fn price_report(rule: &PricingRule, payoff_id: impl Into<String>, x: &Payoff) -> Result<PricingReport> {
    let ask = rule.price(x)?;
    let bid = -rule.price(&-x)?;
    let report = PricingReport {
        payoff_id: payoff_id.into(),
        ask,
        bid,
        spread: ask - bid,
        sipos_value: sipos_price(rule.capacity(), x)?,
        riskless_rate: rule.riskless_rate(),
    };
    if rule.capacity().dominates_conjugate(DEFAULT_TOL) && !report.sandwich_holds(SANDWICH_TOL) {
        return Err(Error::Logic(format!(
            "bid {} ≤ sipos {} ≤ ask {} violated although v ≥ v*",
            report.bid, report.sipos_value, report.ask
        )));
    }
    Ok(report)
}
