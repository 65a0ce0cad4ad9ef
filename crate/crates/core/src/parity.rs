//! Call/put/discount-certificate parities and finite sweeps over payoffs
//! and strikes.
//!
//! A sweep that finds no failure is evidence for a universally quantified
//! parity, not a proof: it reports how many checks were run.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::{Payoff, StateSpace, Subset};
use crate::pricing::PricingRule;

/// Default tolerance on parity residuals.
pub const PARITY_TOL: f64 = 1e-9;

/// Fixed strikes of the standard sweep; `max(x) + 1` is added per payoff.
pub const STANDARD_STRIKES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    /// `f(x) = f(c) + f(−p) + f(k·1)`
    #[serde(rename = "PCP")]
    Pcp,
    /// `f(p) = f(c) + f(−x) + f(k·1)`
    #[serde(rename = "CPP")]
    Cpp,
    /// `f(x) = f(c) + f(d)`
    #[serde(rename = "DCP")]
    Dcp,
    /// `f(c) = f(x) + f(−d)`
    #[serde(rename = "DCPSTAR")]
    DcpStar,
}

impl Parity {
    pub const ALL: [Parity; 4] = [Parity::Pcp, Parity::Cpp, Parity::Dcp, Parity::DcpStar];

    pub fn label(self) -> &'static str {
        match self {
            Parity::Pcp => "PCP",
            Parity::Cpp => "CPP",
            Parity::Dcp => "DCP",
            Parity::DcpStar => "DCPSTAR",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pcp" => Ok(Parity::Pcp),
            "cpp" => Ok(Parity::Cpp),
            "dcp" => Ok(Parity::Dcp),
            "dcpstar" | "dcp*" => Ok(Parity::DcpStar),
            other => Err(Error::InvalidParameter(format!("unknown parity {other:?}"))),
        }
    }
}

/// One parity evaluated at one `(x, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityCheck {
    pub parity: Parity,
    pub x: Payoff,
    pub k: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`.
    pub residual: f64,
    pub pass: bool,
}

pub fn check(rule: &PricingRule, parity: Parity, x: &Payoff, k: f64, tol: f64) -> Result<ParityCheck> {
    let f = |y: &Payoff| rule.price(y);
    let bond = || Payoff::constant(Arc::clone(x.space()), k);
    let (lhs, rhs) = match parity {
        Parity::Pcp => {
            let (c, p) = (x.call(k)?, x.put(k)?);
            (f(x)?, f(&c)? + f(&-&p)? + f(&bond()?)?)
        }
        Parity::Cpp => {
            let (c, p) = (x.call(k)?, x.put(k)?);
            (f(&p)?, f(&c)? + f(&-x)? + f(&bond()?)?)
        }
        Parity::Dcp => {
            let (c, d) = (x.call(k)?, x.discount_certificate(k)?);
            (f(x)?, f(&c)? + f(&d)?)
        }
        Parity::DcpStar => {
            let (c, d) = (x.call(k)?, x.discount_certificate(k)?);
            (f(&c)?, f(x)? + f(&-&d)?)
        }
    };
    let residual = lhs - rhs;
    Ok(ParityCheck {
        parity,
        x: x.clone(),
        k,
        lhs,
        rhs,
        residual,
        pass: residual.abs() <= tol,
    })
}

pub fn check_pcp(rule: &PricingRule, x: &Payoff, k: f64, tol: f64) -> Result<ParityCheck> {
    check(rule, Parity::Pcp, x, k, tol)
}

pub fn check_cpp(rule: &PricingRule, x: &Payoff, k: f64, tol: f64) -> Result<ParityCheck> {
    check(rule, Parity::Cpp, x, k, tol)
}

pub fn check_dcp(rule: &PricingRule, x: &Payoff, k: f64, tol: f64) -> Result<ParityCheck> {
    check(rule, Parity::Dcp, x, k, tol)
}

pub fn check_dcp_star(rule: &PricingRule, x: &Payoff, k: f64, tol: f64) -> Result<ParityCheck> {
    check(rule, Parity::DcpStar, x, k, tol)
}

/// Strikes applied to every payoff of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct StrikeSet {
    pub fixed: Vec<f64>,
    /// Also check at `max(x) + 1`, where the call is worthless.
    pub above_max: bool,
}

impl StrikeSet {
    pub fn standard() -> Self {
        Self {
            fixed: STANDARD_STRIKES.to_vec(),
            above_max: true,
        }
    }

    pub fn fixed(strikes: impl Into<Vec<f64>>) -> Self {
        Self {
            fixed: strikes.into(),
            above_max: false,
        }
    }

    fn for_payoff(&self, x: &Payoff) -> Vec<f64> {
        let mut ks = self.fixed.clone();
        if self.above_max {
            ks.push((x.max() + 1.0).max(0.0));
        }
        ks
    }

    fn validate(&self) -> Result<()> {
        match self.fixed.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
            Some(&k) => Err(Error::NegativeStrike(k)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub parity: Parity,
    pub checked: usize,
    pub failures: Vec<ParityCheck>,
    /// Largest `|residual|` seen.
    pub max_residual: f64,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn verdict(&self) -> String {
        if self.passed() {
            format!("no counterexample found in {} checks", self.checked)
        } else {
            format!("{} of {} checks failed", self.failures.len(), self.checked)
        }
    }
}

/// Runs `parity` over every payoff and its strikes. Payoffs are checked in
/// parallel; failures keep input order.
pub fn sweep(
    rule: &PricingRule,
    parity: Parity,
    payoffs: &[Payoff],
    strikes: &StrikeSet,
    tol: f64,
) -> Result<SweepSummary> {
    strikes.validate()?;
    let per_payoff: Vec<Vec<ParityCheck>> = payoffs
        .par_iter()
        .map(|x| {
            strikes
                .for_payoff(x)
                .into_iter()
                .map(|k| check(rule, parity, x, k, tol))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut summary = SweepSummary {
        parity,
        checked: 0,
        failures: Vec::new(),
        max_residual: 0.0,
    };
    for c in per_payoff.into_iter().flatten() {
        summary.checked += 1;
        summary.max_residual = summary.max_residual.max(c.residual.abs());
        if !c.pass {
            summary.failures.push(c);
        }
    }
    Ok(summary)
}

/// Number of half-integer grid payoffs drawn when the full grid is larger.
pub const GRID_SAMPLE: usize = 500;
/// Number of uniform continuous payoffs in `[−3, 3]`.
pub const CONTINUOUS_SAMPLE: usize = 50;
/// Indicator payoffs are included up to this many states.
pub const MAX_INDICATOR_STATES: usize = 12;

/// The standard sweep payoff set, deterministic in `seed`:
///
/// * payoffs with entries `0.5·j` for integers `j ∈ [−5, 5]` (the whole grid when it
///   has at most [`GRID_SAMPLE`] points, a uniform sample otherwise),
/// * every indicator `1_A` and its negation (for `n ≤ 12`),
/// * [`CONTINUOUS_SAMPLE`] uniform payoffs in `[−3, 3]`.
pub fn standard_payoffs(space: &Arc<StateSpace>, seed: u64) -> Vec<Payoff> {
    let n = space.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let make = |values: Vec<f64>| Payoff::new(Arc::clone(space), values).expect("finite values");

    let grid_size = 11usize.checked_pow(n as u32).filter(|&g| g <= GRID_SAMPLE);
    match grid_size {
        Some(size) => {
            for mut code in 0..size {
                let mut values = Vec::with_capacity(n);
                for _ in 0..n {
                    values.push(((code % 11) as f64 - 5.0) * 0.5);
                    code /= 11;
                }
                out.push(make(values));
            }
        }
        None => {
            for _ in 0..GRID_SAMPLE {
                let values = (0..n).map(|_| rng.gen_range(-5i32..=5) as f64 * 0.5).collect();
                out.push(make(values));
            }
        }
    }

    if n <= MAX_INDICATOR_STATES {
        for a in Subset::all(n).skip(1) {
            let ind = Payoff::indicator_of(Arc::clone(space), a);
            out.push(-&ind);
            out.push(ind);
        }
    }

    for _ in 0..CONTINUOUS_SAMPLE {
        let values = (0..n).map(|_| rng.gen_range(-3.0..=3.0)).collect();
        out.push(make(values));
    }
    out
}
