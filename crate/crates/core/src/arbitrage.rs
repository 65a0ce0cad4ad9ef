//! Absence of arbitrage for Choquet and Šipoš pricing rules.
//!
//! A Choquet rule is arbitrage free exactly when the anticore
//! `{μ ≥ 0 additive : μ ≤ v, μ(Ω) = v(Ω)}` is non-empty; a Šipoš rule is
//! arbitrage free exactly when it is linear. Every verdict carries evidence
//! that is re-checked by plain arithmetic after the solver returns: an
//! anticore element, or a finite portfolio with non-negative total payoff
//! and negative total price.

use std::sync::Arc;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::{Capacity, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lp::{self, decimal_rational, rational_to_f64, CoverSolution};
use crate::payoff::{Payoff, StateSpace, Subset};
use crate::pricing::{choquet_price, PricingRule, RuleKind};

/// Constraint tolerance for anticore elements; also the threshold on the
/// LP optimality gap below which the anticore is declared non-empty.
pub const WITNESS_TOL: f64 = 1e-8;

/// Tolerance on certificate coverage and the strict negativity of its cost.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// Dual weights below this are dropped from certificates.
pub const PRUNE_BELOW: f64 = 1e-12;

/// Sum of prices below `−PROBE_TOL` counts as an arbitrage in probes.
pub const PROBE_TOL: f64 = 1e-9;

/// Arithmetic used by the anticore LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Float,
    /// Exact rationals built from the shortest decimal form of each
    /// capacity value.
    Exact,
}

/// A non-negative additive set function, given by its state weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveMeasure {
    space: Arc<StateSpace>,
    weights: Vec<f64>,
}

impl AdditiveMeasure {
    pub fn new(space: Arc<StateSpace>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "measure weights must be finite and non-negative".into(),
            ));
        }
        Ok(Self { space, weights })
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn measure(&self, set: Subset) -> f64 {
        set.states().map(|i| self.weights[i]).sum()
    }

    /// Expectation `∫x dμ`.
    pub fn integrate(&self, x: &Payoff) -> f64 {
        x.values().iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// Largest violation of `μ(A) ≤ v(A)` over all `A`, together with
    /// `|μ(Ω) − v(Ω)|`.
    pub fn anticore_violation(&self, v: &Capacity) -> f64 {
        let over = Subset::all(v.n())
            .map(|a| self.measure(a) - v.value(a))
            .fold(0.0, f64::max);
        over.max((self.total() - v.total()).abs())
    }
}

/// Which side of the bond the certificate trades.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondPosition {
    /// Buy the legs, sell one unit of `1_Ω`; the legs cover `1_Ω`.
    Short,
    /// Sell the legs, buy one unit of `1_Ω`; the legs fit under `1_Ω`.
    Long,
}

impl BondPosition {
    /// Signed bond quantity in the portfolio.
    pub fn quantity(self) -> i32 {
        match self {
            BondPosition::Short => -1,
            BondPosition::Long => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub coefficient: f64,
    pub set: Subset,
}

/// A finite portfolio witnessing arbitrage: its total payoff is
/// non-negative in every state and its total price is `cost < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArbitrageCertificate {
    space: Arc<StateSpace>,
    pub legs: Vec<Leg>,
    pub bond: BondPosition,
    /// Total price of the portfolio.
    pub cost: f64,
}

impl ArbitrageCertificate {
    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    /// `Σ aᵢ·1_{Aᵢ}` per state.
    pub fn coverage(&self) -> Vec<f64> {
        let mut cover = vec![0.0; self.space.len()];
        for leg in &self.legs {
            for i in leg.set.states() {
                cover[i] += leg.coefficient;
            }
        }
        cover
    }

    /// The traded claims: each leg `±aᵢ·1_{Aᵢ}` followed by the bond leg.
    pub fn portfolio(&self) -> Vec<Payoff> {
        let sign = match self.bond {
            BondPosition::Short => 1.0,
            BondPosition::Long => -1.0,
        };
        let mut out: Vec<Payoff> = self
            .legs
            .iter()
            .map(|leg| Payoff::indicator_of(Arc::clone(&self.space), leg.set).scale(sign * leg.coefficient))
            .collect();
        out.push(
            Payoff::constant(Arc::clone(&self.space), self.bond.quantity() as f64)
                .expect("finite constant"),
        );
        out
    }

    /// Re-checks coverage and negative cost.
    pub fn verify(&self) -> Result<()> {
        let cover = self.coverage();
        let covered = match self.bond {
            BondPosition::Short => cover.iter().all(|&c| c >= 1.0 - CERTIFICATE_TOL),
            BondPosition::Long => cover.iter().all(|&c| c <= 1.0 + CERTIFICATE_TOL),
        };
        if !covered {
            return Err(Error::SolverTolerance(format!(
                "certificate legs do not match the bond leg: coverage {cover:?}"
            )));
        }
        if self.cost.is_nan() || self.cost >= -CERTIFICATE_TOL {
            return Err(Error::SolverTolerance(format!(
                "certificate cost {} is not below −{CERTIFICATE_TOL}",
                self.cost
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArbitrageVerdict {
    ArbitrageFree { witness: AdditiveMeasure },
    Arbitrage { certificate: ArbitrageCertificate },
}

impl ArbitrageVerdict {
    pub fn is_arbitrage_free(&self) -> bool {
        matches!(self, ArbitrageVerdict::ArbitrageFree { .. })
    }

    pub fn witness(&self) -> Option<&AdditiveMeasure> {
        match self {
            ArbitrageVerdict::ArbitrageFree { witness } => Some(witness),
            ArbitrageVerdict::Arbitrage { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&ArbitrageCertificate> {
        match self {
            ArbitrageVerdict::Arbitrage { certificate } => Some(certificate),
            ArbitrageVerdict::ArbitrageFree { .. } => None,
        }
    }
}

/// Outcome of the anticore LP.
#[derive(Debug, Clone, PartialEq)]
pub enum Anticore {
    Element(AdditiveMeasure),
    Empty(ArbitrageCertificate),
}

/// Finds an element of the anticore of `v`, or a certificate that it is
/// empty. Both outcomes are verified before returning.
pub fn anticore_element(v: &Capacity, arithmetic: Arithmetic) -> Result<Anticore> {
    let n = v.n();
    if n > lp::MAX_LP_STATES {
        return Err(Error::Budget {
            what: "anticore LP",
            got: n,
            max: lp::MAX_LP_STATES,
        });
    }
    // In exact mode the certificate cost is also computed exactly.
    let (gap, exact_feasible, exact_cost, sol) = match arithmetic {
        Arithmetic::Float => {
            let sol = lp::solve_cover(n, v.table())?;
            (v.total() - sol.objective, None, None, sol)
        }
        Arithmetic::Exact => {
            let table: Vec<BigRational> = v.table().iter().map(|&x| decimal_rational(x)).collect();
            let sol = lp::solve_cover(n, &table)?;
            let total = &table[table.len() - 1];
            let feasible = sol.objective == *total;
            let gap = rational_to_f64(&(total.clone() - sol.objective.clone()));
            let cost = sol
                .duals
                .iter()
                .zip(&table[1..])
                .fold(-total.clone(), |acc, (y, value)| acc + y * value);
            (gap, Some(feasible), Some(rational_to_f64(&cost)), to_float(&sol))
        }
    };
    let feasible = exact_feasible.unwrap_or(gap <= WITNESS_TOL);

    if feasible {
        let weights = sol.weights.iter().map(|&w| w.max(0.0)).collect();
        let mu = AdditiveMeasure::new(Arc::clone(v.space()), weights)?;
        let worst = mu.anticore_violation(v);
        if worst > WITNESS_TOL {
            return Err(Error::SolverTolerance(format!(
                "anticore element violates a constraint by {worst:e}"
            )));
        }
        return Ok(Anticore::Element(mu));
    }

    let legs: Vec<Leg> = Subset::all(n)
        .skip(1)
        .filter_map(|a| {
            let y = *sol.dual(a);
            (y >= PRUNE_BELOW).then_some(Leg { coefficient: y, set: a })
        })
        .collect();
    let cost = exact_cost
        .unwrap_or_else(|| legs.iter().map(|l| l.coefficient * v.value(l.set)).sum::<f64>() - v.total());
    let certificate = ArbitrageCertificate {
        space: Arc::clone(v.space()),
        legs,
        bond: BondPosition::Short,
        cost,
    };
    certificate.verify().map_err(|e| {
        Error::SolverTolerance(format!(
            "anticore emptiness is indeterminate (optimality gap {gap:e}): {e}"
        ))
    })?;
    Ok(Anticore::Empty(certificate))
}

fn to_float(sol: &CoverSolution<BigRational>) -> CoverSolution<f64> {
    CoverSolution {
        objective: rational_to_f64(&sol.objective),
        weights: sol.weights.iter().map(rational_to_f64).collect(),
        duals: sol.duals.iter().map(rational_to_f64).collect(),
        pivots: sol.pivots,
    }
}

/// The balanced-family certificate for an empty anticore. Calling this on a
/// capacity whose anticore is non-empty is a logic error.
pub fn extract_certificate(v: &Capacity, arithmetic: Arithmetic) -> Result<ArbitrageCertificate> {
    match anticore_element(v, arithmetic)? {
        Anticore::Empty(c) => Ok(c),
        Anticore::Element(_) => Err(Error::Logic(
            "anticore is non-empty, there is no arbitrage certificate".into(),
        )),
    }
}

/// Decides absence of arbitrage for `rule`.
pub fn check_af(rule: &PricingRule, arithmetic: Arithmetic) -> Result<ArbitrageVerdict> {
    let v = rule.capacity();
    match rule.kind() {
        RuleKind::Choquet => Ok(match anticore_element(v, arithmetic)? {
            Anticore::Element(witness) => ArbitrageVerdict::ArbitrageFree { witness },
            Anticore::Empty(certificate) => ArbitrageVerdict::Arbitrage { certificate },
        }),
        RuleKind::Linear => Ok(ArbitrageVerdict::ArbitrageFree {
            witness: singleton_measure(v)?,
        }),
        RuleKind::Sipos => sipos_verdict(v, arithmetic),
    }
}

fn singleton_measure(v: &Capacity) -> Result<AdditiveMeasure> {
    AdditiveMeasure::new(Arc::clone(v.space()), v.singleton_values())
}

fn sipos_verdict(v: &Capacity, arithmetic: Arithmetic) -> Result<ArbitrageVerdict> {
    if v.is_additive(DEFAULT_TOL) {
        return Ok(ArbitrageVerdict::ArbitrageFree {
            witness: singleton_measure(v)?,
        });
    }
    if v.is_auto_conjugate(DEFAULT_TOL) {
        // Šipoš prices indicators and the bond like the Choquet rule, so the
        // balanced-family certificate carries over; a non-empty anticore
        // would force v to be additive.
        return match anticore_element(v, arithmetic)? {
            Anticore::Empty(certificate) => Ok(ArbitrageVerdict::Arbitrage { certificate }),
            Anticore::Element(_) => Err(Error::SolverTolerance(
                "auto-conjugate capacity is non-additive within tolerance yet has a non-empty anticore"
                    .into(),
            )),
        };
    }
    // Not auto-conjugate: trade 1_A and 1_{A^c} against the bond.
    let n = v.n();
    let (set, excess) = Subset::all(n)
        .map(|a| (a, v.value(a) + v.value(a.complement(n)) - v.total()))
        .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .expect("at least one subset");
    let legs = vec![
        Leg {
            coefficient: 1.0,
            set,
        },
        Leg {
            coefficient: 1.0,
            set: set.complement(n),
        },
    ];
    let (bond, cost) = if excess < 0.0 {
        (BondPosition::Short, excess)
    } else {
        (BondPosition::Long, -excess)
    };
    let certificate = ArbitrageCertificate {
        space: Arc::clone(v.space()),
        legs,
        bond,
        cost,
    };
    certificate.verify()?;
    Ok(ArbitrageVerdict::Arbitrage { certificate })
}

/// Result of scanning for buy & sell arbitrage.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadCheck {
    pub pass: bool,
    /// Set with the most negative `v(A) + v(Aᶜ) − v(Ω)`, when below `−tol`.
    pub violating_set: Option<Subset>,
    /// Choquet price of buying and selling `1_A` for the violating set.
    pub buy_sell_sum: Option<f64>,
}

/// Checks `v(A) + v(Aᶜ) ≥ v(Ω) − tol` for every `A`. On failure the pair
/// `(1_A, −1_A)` is a buy & sell arbitrage for the Choquet rule.
pub fn nonneg_spread_check(v: &Capacity, tol: f64) -> SpreadCheck {
    let n = v.n();
    let worst = Subset::all(n)
        .map(|a| (a, v.value(a) + v.value(a.complement(n)) - v.total()))
        .filter(|&(_, d)| d < -tol)
        .min_by(|x, y| x.1.total_cmp(&y.1));
    match worst {
        None => SpreadCheck {
            pass: true,
            violating_set: None,
            buy_sell_sum: None,
        },
        Some((set, _)) => {
            let ind = Payoff::indicator_of(Arc::clone(v.space()), set);
            let sum = choquet_price(v, &ind).expect("same space")
                + choquet_price(v, &-&ind).expect("same space");
            SpreadCheck {
                pass: false,
                violating_set: Some(set),
                buy_sell_sum: Some(sum),
            }
        }
    }
}

/// A portfolio with non-negative total payoff and negative total price.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub trial: usize,
    pub total_price: f64,
    pub portfolio: Vec<Payoff>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub trials: usize,
    pub violations: Vec<Violation>,
}

/// Prices a portfolio whose total payoff must be non-negative; returns a
/// violation when its total price is below `−PROBE_TOL`.
pub fn replay_portfolio(rule: &PricingRule, portfolio: &[Payoff]) -> Result<Option<Violation>> {
    let Some(first) = portfolio.first() else {
        return Ok(None);
    };
    let mut total = Payoff::constant(Arc::clone(first.space()), 0.0)?;
    let mut price = 0.0;
    for x in portfolio {
        total = total.try_add(x)?;
        price += rule.price(x)?;
    }
    if total.values().iter().any(|&t| t < -CERTIFICATE_TOL) {
        return Err(Error::InvalidParameter(format!(
            "portfolio payoff {total} is not non-negative"
        )));
    }
    Ok((price < -PROBE_TOL).then(|| Violation {
        trial: 0,
        total_price: price,
        portfolio: portfolio.to_vec(),
    }))
}

/// Random search for portfolios violating absence of arbitrage. Each trial
/// draws `m ∈ [2, 5]` claims, the last one chosen so that the total payoff
/// is a random non-negative claim (zero half of the time).
pub fn random_portfolio_probe(rule: &PricingRule, trials: usize, seed: u64) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let space = rule.capacity().space();
    let n = space.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for trial in 0..trials {
        let m = rng.gen_range(2..=5);
        let target: Vec<f64> = if rng.gen_bool(0.5) {
            vec![0.0; n]
        } else {
            (0..n).map(|_| rng.gen_range(0.0..2.0)).collect()
        };
        let mut portfolio = Vec::with_capacity(m);
        let mut rest = target;
        for _ in 0..m - 1 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            for (r, xi) in rest.iter_mut().zip(&x) {
                *r -= xi;
            }
            portfolio.push(Payoff::new(Arc::clone(space), x)?);
        }
        portfolio.push(Payoff::new(Arc::clone(space), rest)?);

        let price: f64 = portfolio
            .iter()
            .map(|x| rule.price(x))
            .sum::<Result<f64>>()?;
        if price < -PROBE_TOL {
            violations.push(Violation {
                trial,
                total_price: price,
                portfolio,
            });
        }
    }
    Ok(ProbeReport { trials, violations })
}
