//! Dense primal simplex for the anticore covering problem
//!
//! ```text
//! maximize   Σ_ω μ_ω
//! subject to Σ_{ω∈A} μ_ω ≤ v(A)   for every non-empty A ⊆ Ω
//!            μ ≥ 0
//! ```
//!
//! The origin is feasible (capacities are non-negative), so the slack basis
//! starts the method without an artificial phase. The optimum reaches
//! `v(Ω)` exactly when the anticore is non-empty; otherwise the optimal
//! duals `y_A ≥ 0` satisfy `Σ_{A∋ω} y_A ≥ 1` for every state and
//! `Σ y_A·v(A) < v(Ω)`, which is a Farkas certificate for the empty anticore.
//!
//! The tableau is kept in compact (Tucker) form: one row per subset
//! constraint and one column per nonbasic variable, so it is
//! `(2^n − 1) × n`. Pivoting uses Bland's rule, which rules out cycling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::payoff::Subset;

/// Largest state count accepted by the LP.
pub const MAX_LP_STATES: usize = 16;

/// Hard cap on pivots; Bland's rule terminates long before this in practice.
const MAX_PIVOTS: usize = 200_000;

/// Arithmetic the simplex runs on.
pub trait LpScalar: Clone + PartialOrd + Signed + ToPrimitive + std::fmt::Debug {
    /// Magnitudes at or below this are treated as zero when choosing pivots.
    fn pivot_eps() -> Self;
}

impl LpScalar for f64 {
    fn pivot_eps() -> Self {
        1e-12
    }
}

impl LpScalar for BigRational {
    fn pivot_eps() -> Self {
        BigRational::zero()
    }
}

/// Optimal point of the covering LP.
#[derive(Debug, Clone)]
pub struct CoverSolution<S> {
    /// `max Σ μ_ω`.
    pub objective: S,
    /// Optimal `μ`, one weight per state.
    pub weights: Vec<S>,
    /// Optimal dual `y_A`, indexed by `mask − 1`.
    pub duals: Vec<S>,
    pub pivots: usize,
}

impl<S: LpScalar> CoverSolution<S> {
    pub fn dual(&self, set: Subset) -> &S {
        &self.duals[set.index() - 1]
    }
}

/// Solves the covering LP for the capacity table `values` (indexed by
/// subset mask, `2^n` entries, `values[0] = 0`).
pub fn solve_cover<S: LpScalar>(n: usize, values: &[S]) -> Result<CoverSolution<S>> {
    if n > MAX_LP_STATES {
        return Err(Error::Budget {
            what: "anticore LP",
            got: n,
            max: MAX_LP_STATES,
        });
    }
    debug_assert_eq!(values.len(), 1 << n);
    let mut t = Tableau::new(n, values);
    let pivots = t.run()?;
    Ok(t.solution(pivots))
}

struct Tableau<S> {
    n: usize,
    m: usize,
    /// Row-major `m × n`: `basic[i] = rhs[i] − Σ_j coef[i][j]·nonbasic[j]`.
    coef: Vec<S>,
    rhs: Vec<S>,
    /// Objective `z = z0 + Σ_j cost[j]·nonbasic[j]`.
    cost: Vec<S>,
    z0: S,
    /// Variable labels: `0..n` structural, `n + i` slack of row `i`.
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl<S: LpScalar> Tableau<S> {
    fn new(n: usize, values: &[S]) -> Self {
        let m = (1usize << n) - 1;
        let mut coef = Vec::with_capacity(m * n);
        let mut rhs = Vec::with_capacity(m);
        for row in 0..m {
            let set = Subset((row + 1) as u32);
            for j in 0..n {
                coef.push(if set.contains(j) { S::one() } else { S::zero() });
            }
            rhs.push(values[row + 1].clone());
        }
        Self {
            n,
            m,
            coef,
            rhs,
            cost: vec![S::one(); n],
            z0: S::zero(),
            basic: (n..n + m).collect(),
            nonbasic: (0..n).collect(),
        }
    }

    fn at(&self, i: usize, j: usize) -> &S {
        &self.coef[i * self.n + j]
    }

    fn run(&mut self) -> Result<usize> {
        let eps = S::pivot_eps();
        for pivots in 0..MAX_PIVOTS {
            // Bland: the improving column with the smallest variable label.
            let entering = (0..self.n)
                .filter(|&j| self.cost[j] > eps)
                .min_by_key(|&j| self.nonbasic[j]);
            let Some(col) = entering else {
                return Ok(pivots);
            };

            let mut leaving: Option<(usize, S)> = None;
            for i in 0..self.m {
                let a = self.at(i, col);
                if *a <= eps {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((best, best_ratio)) => {
                        let diff = ratio.clone() - best_ratio.clone();
                        if diff < -eps.clone()
                            || (diff.abs() <= eps && self.basic[i] < self.basic[best])
                        {
                            Some((i, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((row, _)) = leaving else {
                // Each μ_ω is bounded by v({ω}), so this cannot happen for a
                // well-formed capacity.
                return Err(Error::SolverTolerance(
                    "covering LP reported unbounded".into(),
                ));
            };
            self.pivot(row, col);
        }
        Err(Error::SolverTolerance(format!(
            "simplex did not terminate within {MAX_PIVOTS} pivots"
        )))
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let n = self.n;
        let p = self.at(r, s).clone();
        let inv = S::one() / p;

        // Pivot row.
        for j in 0..n {
            let idx = r * n + j;
            self.coef[idx] = if j == s {
                inv.clone()
            } else {
                self.coef[idx].clone() * inv.clone()
            };
        }
        self.rhs[r] = self.rhs[r].clone() * inv.clone();
        let pivot_row: Vec<S> = self.coef[r * n..(r + 1) * n].to_vec();
        let pivot_rhs = self.rhs[r].clone();

        // Other rows.
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let factor = self.coef[i * n + s].clone();
            if factor.is_zero() {
                continue;
            }
            for (j, pj) in pivot_row.iter().enumerate() {
                let idx = i * n + j;
                self.coef[idx] = if j == s {
                    -(factor.clone() * inv.clone())
                } else {
                    self.coef[idx].clone() - factor.clone() * pj.clone()
                };
            }
            self.rhs[i] = self.rhs[i].clone() - factor * pivot_rhs.clone();
        }

        // Objective row.
        let cs = self.cost[s].clone();
        if !cs.is_zero() {
            for (j, pj) in pivot_row.iter().enumerate() {
                self.cost[j] = if j == s {
                    -(cs.clone() * inv.clone())
                } else {
                    self.cost[j].clone() - cs.clone() * pj.clone()
                };
            }
            self.z0 = self.z0.clone() + cs * pivot_rhs;
        }

        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[s]);
    }

    fn solution(&self, pivots: usize) -> CoverSolution<S> {
        let mut weights = vec![S::zero(); self.n];
        for (i, &label) in self.basic.iter().enumerate() {
            if label < self.n {
                weights[label] = self.rhs[i].clone();
            }
        }
        let mut duals = vec![S::zero(); self.m];
        for (j, &label) in self.nonbasic.iter().enumerate() {
            if label >= self.n {
                duals[label - self.n] = -self.cost[j].clone();
            }
        }
        CoverSolution {
            objective: self.z0.clone(),
            weights,
            duals,
            pivots,
        }
    }
}

/// Exact rational value of the shortest decimal string that round-trips to
/// `x`, so user-entered decimals such as `0.3` become exactly `3/10`.
pub fn decimal_rational(x: f64) -> BigRational {
    let text = format!("{x}");
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.as_str()),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let numer: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .expect("Display of a finite f64 is a plain decimal");
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(numer, denom);
    if negative {
        -r
    } else {
        r
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
