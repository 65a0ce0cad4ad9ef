//! Capacities: grounded, monotone set functions on the power set of a
//! finite state space, stored as a full table indexed by subset mask.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::{same_space, StateSpace, Subset};

/// Default tolerance for the classification predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest state count for the exhaustive `4^n` concavity check.
pub const MAX_EXHAUSTIVE_CONCAVITY_STATES: usize = 12;

/// Largest state count for the local (two-element) concavity check.
pub const MAX_LOCAL_CONCAVITY_STATES: usize = 20;

/// One reason a table fails to be a capacity.
#[derive(Debug, Clone, PartialEq)]
pub enum CapacityViolation {
    NonFinite { subset: String },
    NotGrounded { value: f64 },
    NotMonotone {
        subset: String,
        superset: String,
        lower: f64,
        upper: f64,
    },
    NonPositiveTotal { value: f64 },
}

impl fmt::Display for CapacityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapacityViolation::NonFinite { subset } => {
                write!(f, "value of {subset} is not finite")
            }
            CapacityViolation::NotGrounded { value } => {
                write!(f, "not grounded: v(∅) = {value}")
            }
            CapacityViolation::NotMonotone {
                subset,
                superset,
                lower,
                upper,
            } => write!(
                f,
                "monotonicity fails at {subset} ⊆ {superset}: {lower} > {upper}"
            ),
            CapacityViolation::NonPositiveTotal { value } => {
                write!(f, "total mass v(Ω) = {value} must be positive")
            }
        }
    }
}

/// A validated capacity.
///
/// `dual` holds the table this capacity was conjugated from, if any, so that
/// conjugating twice returns the original table bit for bit.
#[derive(Debug, Clone)]
pub struct Capacity {
    space: Arc<StateSpace>,
    table: Arc<[f64]>,
    dual: Option<Arc<[f64]>>,
}

impl PartialEq for Capacity {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.table == other.table
    }
}

impl Capacity {
    /// Validates a full table of `2^n` values indexed by subset mask,
    /// reporting every violated requirement.
    pub fn from_table(space: Arc<StateSpace>, table: Vec<f64>) -> Result<Self> {
        if table.len() != space.subset_count() {
            return Err(Error::LengthMismatch {
                expected: space.subset_count(),
                got: table.len(),
            });
        }
        let violations = violations(&space, &table);
        if !violations.is_empty() {
            return Err(Error::InvalidCapacity(violations));
        }
        Ok(Self {
            space,
            table: table.into(),
            dual: None,
        })
    }

    /// Builds a table by evaluating `f` on every subset, then validates it.
    pub fn from_fn(space: Arc<StateSpace>, f: impl Fn(Subset) -> f64) -> Result<Self> {
        let table = Subset::all(space.len()).map(f).collect();
        Self::from_table(space, table)
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn value(&self, set: Subset) -> f64 {
        self.table[set.index()]
    }

    /// `v(Ω)`.
    pub fn total(&self) -> f64 {
        self.table[self.table.len() - 1]
    }

    /// Values on the singletons, in state order.
    pub fn singleton_values(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| self.value(Subset::singleton(i)))
            .collect()
    }

    /// `v*(A) = v(Ω) − v(Aᶜ)`.
    pub fn conjugate(&self) -> Capacity {
        if let Some(dual) = &self.dual {
            return Capacity {
                space: Arc::clone(&self.space),
                table: Arc::clone(dual),
                dual: Some(Arc::clone(&self.table)),
            };
        }
        let n = self.n();
        let total = self.total();
        let table: Arc<[f64]> = Subset::all(n)
            .map(|a| total - self.value(a.complement(n)))
            .collect();
        Capacity {
            space: Arc::clone(&self.space),
            table,
            dual: Some(Arc::clone(&self.table)),
        }
    }

    /// `(A, v(A) + v(Aᶜ) − v(Ω))` for every `A`.
    fn complement_sums(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        let n = self.n();
        let total = self.total();
        Subset::all(n).map(move |a| (a, self.value(a) + self.value(a.complement(n)) - total))
    }

    /// `v(A) + v(Aᶜ) = v(Ω)` for every `A`, within `tol`.
    pub fn is_auto_conjugate(&self, tol: f64) -> bool {
        self.complement_sums().all(|(_, d)| d.abs() <= tol)
    }

    /// `v ≥ v*`, i.e. `v(A) + v(Aᶜ) ≥ v(Ω) − tol` for every `A`.
    pub fn dominates_conjugate(&self, tol: f64) -> bool {
        self.first_conjugate_excess(tol).is_none()
    }

    /// First set (in mask order) where `v(A) + v(Aᶜ) < v(Ω) − tol`, with the
    /// shortfall `v(A) + v(Aᶜ) − v(Ω)`.
    pub fn first_conjugate_excess(&self, tol: f64) -> Option<(Subset, f64)> {
        self.complement_sums().find(|&(_, d)| d < -tol)
    }

    /// `v(A) = Σ_{ω∈A} v({ω})` within `tol·|A|` for every `A`.
    pub fn is_additive(&self, tol: f64) -> bool {
        let singles = self.singleton_values();
        Subset::all(self.n()).all(|a| {
            let sum: f64 = a.states().map(|i| singles[i]).sum();
            (self.value(a) - sum).abs() <= tol * a.len() as f64
        })
    }

    /// Submodularity, `v(A∪B) + v(A∩B) ≤ v(A) + v(B) + tol`, checked on
    /// the equivalent local form: for every `A` and `i ≠ j` outside `A`,
    /// `v(A+i+j) + v(A) ≤ v(A+i) + v(A+j) + tol`.
    pub fn is_concave(&self, tol: f64) -> Result<bool> {
        let n = self.n();
        if n > MAX_LOCAL_CONCAVITY_STATES {
            return Err(Error::Budget {
                what: "concavity check",
                got: n,
                max: MAX_LOCAL_CONCAVITY_STATES,
            });
        }
        for a in Subset::all(n) {
            let base = self.value(a);
            for i in (0..n).filter(|&i| !a.contains(i)) {
                let ai = self.value(a.insert(i));
                for j in ((i + 1)..n).filter(|&j| !a.contains(j)) {
                    let aj = self.value(a.insert(j));
                    let aij = self.value(a.insert(i).insert(j));
                    if aij + base > ai + aj + tol {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Submodularity over all `4^n` ordered pairs of subsets.
    pub fn is_concave_exhaustive(&self, tol: f64) -> Result<bool> {
        let n = self.n();
        if n > MAX_EXHAUSTIVE_CONCAVITY_STATES {
            return Err(Error::Budget {
                what: "exhaustive concavity check",
                got: n,
                max: MAX_EXHAUSTIVE_CONCAVITY_STATES,
            });
        }
        for a in Subset::all(n) {
            for b in Subset::all(n) {
                let lhs = self.value(a.union(b)) + self.value(a.intersection(b));
                if lhs > self.value(a) + self.value(b) + tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Additive capacity from non-negative state weights.
    pub fn additive(space: Arc<StateSpace>, weights: &[f64]) -> Result<Self> {
        check_weights(&space, weights)?;
        Self::from_fn(space, |a| a.states().map(|i| weights[i]).sum())
    }

    /// Distortion `v(A) = p(A)^γ` of a probability `p`.
    pub fn distortion(space: Arc<StateSpace>, p: &[f64], gamma: f64) -> Result<Self> {
        let p = normalized(&space, p)?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        let full = space.full();
        Self::from_fn(space, |a| {
            if a == full {
                1.0
            } else {
                let pa: f64 = a.states().map(|i| p[i]).sum();
                pa.powf(gamma)
            }
        })
    }

    /// ε-contamination `v(A) = (1 − ε)·p(A)` for `A ≠ Ω`, `v(Ω) = 1`.
    pub fn epsilon_contamination(space: Arc<StateSpace>, p: &[f64], epsilon: f64) -> Result<Self> {
        let p = normalized(&space, p)?;
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        let full = space.full();
        Self::from_fn(space, |a| {
            if a == full {
                1.0
            } else {
                (1.0 - epsilon) * a.states().map(|i| p[i]).sum::<f64>()
            }
        })
    }

    pub fn generate(space: Arc<StateSpace>, spec: &GeneratorSpec) -> Result<Self> {
        match spec {
            GeneratorSpec::Additive { weights } => Self::additive(space, weights),
            GeneratorSpec::Distortion { p, gamma } => Self::distortion(space, p, *gamma),
            GeneratorSpec::EpsilonContamination { p, epsilon } => {
                Self::epsilon_contamination(space, p, *epsilon)
            }
        }
    }
}

fn violations(space: &StateSpace, table: &[f64]) -> Vec<CapacityViolation> {
    let n = space.len();
    let mut out = Vec::new();
    for a in Subset::all(n) {
        if !table[a.index()].is_finite() {
            out.push(CapacityViolation::NonFinite {
                subset: space.display_subset(a),
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    if table[0] != 0.0 {
        out.push(CapacityViolation::NotGrounded { value: table[0] });
    }
    // Covering pairs (A, A ∪ {ω}) suffice for monotonicity.
    for a in Subset::all(n) {
        for i in (0..n).filter(|&i| !a.contains(i)) {
            let b = a.insert(i);
            let (lower, upper) = (table[a.index()], table[b.index()]);
            if lower > upper {
                out.push(CapacityViolation::NotMonotone {
                    subset: space.display_subset(a),
                    superset: space.display_subset(b),
                    lower,
                    upper,
                });
            }
        }
    }
    let total = table[table.len() - 1];
    if total <= 0.0 {
        out.push(CapacityViolation::NonPositiveTotal { value: total });
    }
    out
}

fn check_weights(space: &StateSpace, weights: &[f64]) -> Result<()> {
    if weights.len() != space.len() {
        return Err(Error::LengthMismatch {
            expected: space.len(),
            got: weights.len(),
        });
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidParameter(
            "weights must be finite and non-negative".into(),
        ));
    }
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::InvalidParameter("weights must have a positive sum".into()));
    }
    Ok(())
}

fn normalized(space: &StateSpace, p: &[f64]) -> Result<Vec<f64>> {
    check_weights(space, p)?;
    let sum: f64 = p.iter().sum();
    Ok(p.iter().map(|w| w / sum).collect())
}

/// Parametric capacity families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Additive { weights: Vec<f64> },
    Distortion { p: Vec<f64>, gamma: f64 },
    EpsilonContamination { p: Vec<f64>, epsilon: f64 },
}

impl GeneratorSpec {
    pub fn state_count(&self) -> usize {
        match self {
            GeneratorSpec::Additive { weights } => weights.len(),
            GeneratorSpec::Distortion { p, .. } | GeneratorSpec::EpsilonContamination { p, .. } => {
                p.len()
            }
        }
    }
}
