//! Pricing of contingent claims on a finite state space with non-additive
//! pricing rules.
//!
//! * [`payoff`]: state spaces, subsets, claims, calls, puts and discount
//!   certificates.
//! * [`capacity`]: capacities, conjugation and classification.
//! * [`pricing`]: Choquet, Šipoš and linear prices, bid/ask reports.
//! * [`parity`]: put-call and discount-certificate parities and sweeps.
//! * [`arbitrage`]: anticore LP, arbitrage certificates and probes.

pub mod arbitrage;
pub mod capacity;
pub mod error;
pub mod lp;
pub mod parity;
pub mod payoff;
pub mod pricing;

pub use arbitrage::{
    anticore_element, check_af, extract_certificate, nonneg_spread_check, random_portfolio_probe,
    replay_portfolio, AdditiveMeasure, Anticore, ArbitrageCertificate, ArbitrageVerdict,
    Arithmetic, BondPosition, Leg, ProbeReport, SpreadCheck, Violation,
};
pub use capacity::{Capacity, CapacityViolation, GeneratorSpec, DEFAULT_TOL};
pub use error::{Error, Result};
pub use parity::{Parity, ParityCheck, StrikeSet, SweepSummary};
pub use payoff::{Payoff, PayoffFile, StateSpace, Subset, MAX_STATES};
pub use pricing::{
    choquet_price, linear_price, price_report, sipos_price, PricingReport, PricingRule, RuleKind,
};
