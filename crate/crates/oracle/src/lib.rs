//! Brute-force reference implementations and fixtures for testing
//! `choquet-pricing`.
//!
//! Nothing here calls the library's integral code: prices are computed by
//! summing the level-set integrand directly, using only `Capacity::value`.

use std::sync::Arc;

use choquet_pricing::{
    Capacity, Error, Parity, ParityCheck, Payoff, PricingRule, Result, RuleKind, StateSpace, Subset,
};
use rand::Rng;

pub mod fixtures;

/// Largest state count accepted by [`exhaustive_parity`].
pub const EXHAUSTIVE_MAX_STATES: usize = 3;

/// Payoff entries enumerated by [`exhaustive_parity`].
pub const EXHAUSTIVE_VALUES: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

/// Strikes enumerated by [`exhaustive_parity`].
pub const EXHAUSTIVE_STRIKES: [f64; 3] = [0.0, 1.0, 2.0];

/// Largest state count accepted by [`anticore_vertex`].
pub const VERTEX_MAX_STATES: usize = 5;

/// `{x ≥ t}` computed by scanning the payoff.
fn upper_level(x: &[f64], t: f64) -> Subset {
    let mut mask = 0u32;
    for (i, &xi) in x.iter().enumerate() {
        if xi >= t {
            mask |= 1 << i;
        }
    }
    Subset(mask)
}

/// Sum evaluation of
/// `∫_{-∞}^0 (v({x ≥ t}) − v(Ω)) dt + ∫_0^∞ v({x ≥ t}) dt`.
///
/// The uniform grid of width `step` over `[min(x)∧0, max(x)∨0]` is refined
/// with every payoff value and with 0, and the integrand is sampled at the
/// midpoint of each cell. The integrand is constant on every refined cell,
/// so the sum is exact up to rounding for any `step`. Adjacent cells with
/// the same integrand are merged before multiplying.
///
/// # Panics
/// If `step` is not positive and finite.
pub fn choquet_riemann(v: &Capacity, x: &Payoff, step: f64) -> f64 {
    assert!(step > 0.0 && step.is_finite(), "step must be positive");
    let xs = x.values();
    let lo = x.min().min(0.0);
    let hi = x.max().max(0.0);
    if lo == hi {
        return 0.0;
    }

    let cells = ((hi - lo) / step).ceil() as usize;
    let mut grid: Vec<f64> = (0..cells).map(|i| lo + i as f64 * step).filter(|&t| t < hi).collect();
    grid.push(hi);
    grid.extend_from_slice(xs);
    grid.push(0.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let total = v.value(Subset((1u32 << xs.len()) - 1));
    let integrand = |t: f64| {
        let level = v.value(upper_level(xs, t));
        if t < 0.0 {
            level - total
        } else {
            level
        }
    };

    let mut sum = 0.0;
    let mut run_start = grid[0];
    let mut run_value = integrand(0.5 * (grid[0] + grid[1]));
    for w in grid.windows(2).skip(1) {
        let value = integrand(0.5 * (w[0] + w[1]));
        if value != run_value {
            sum += (w[0] - run_start) * run_value;
            run_start = w[0];
            run_value = value;
        }
    }
    sum + (hi - run_start) * run_value
}

/// `choquet_riemann(x⁺) − choquet_riemann(x⁻)`.
pub fn sipos_riemann(v: &Capacity, x: &Payoff, step: f64) -> f64 {
    choquet_riemann(v, &x.pos_part(), step) - choquet_riemann(v, &x.neg_part(), step)
}

/// `Σ x(ω)·v({ω})`.
pub fn linear_reference(v: &Capacity, x: &Payoff) -> f64 {
    x.values()
        .iter()
        .enumerate()
        .map(|(i, xi)| xi * v.value(Subset(1 << i)))
        .sum()
}

/// Reference price of `x` under `rule`.
pub fn reference_price(rule: &PricingRule, x: &Payoff, step: f64) -> f64 {
    match rule.kind() {
        RuleKind::Choquet => choquet_riemann(rule.capacity(), x, step),
        RuleKind::Sipos => sipos_riemann(rule.capacity(), x, step),
        RuleKind::Linear => linear_reference(rule.capacity(), x),
    }
}

/// Outcome of an exhaustive parity enumeration.
#[derive(Debug, Clone)]
pub struct ExhaustiveRun {
    pub checked: usize,
    pub failures: Vec<ParityCheck>,
}

/// Checks `parity` on every payoff with entries in [`EXHAUSTIVE_VALUES`]
/// and every strike in [`EXHAUSTIVE_STRIKES`], pricing each leg with
/// [`reference_price`].
pub fn exhaustive_parity(rule: &PricingRule, parity: Parity, tol: f64) -> Result<ExhaustiveRun> {
    let space = rule.capacity().space();
    let n = space.len();
    if n > EXHAUSTIVE_MAX_STATES {
        return Err(Error::Budget {
            what: "exhaustive parity grid",
            got: n,
            max: EXHAUSTIVE_MAX_STATES,
        });
    }
    // Payoff legs are built by hand so that the oracle does not depend on
    // the library's option constructors.
    let leg = |f: &dyn Fn(f64) -> f64, x: &[f64]| {
        Payoff::new(Arc::clone(space), x.iter().map(|&xi| f(xi)).collect()).expect("finite")
    };
    let f = |y: &Payoff| reference_price(rule, y, 0.25);

    let mut checked = 0;
    let mut failures = Vec::new();
    let combos = EXHAUSTIVE_VALUES.len().pow(n as u32);
    for code in 0..combos {
        let mut xs = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            xs.push(EXHAUSTIVE_VALUES[c % EXHAUSTIVE_VALUES.len()]);
            c /= EXHAUSTIVE_VALUES.len();
        }
        let x = Payoff::new(Arc::clone(space), xs.clone())?;
        for &k in &EXHAUSTIVE_STRIKES {
            let call = leg(&|t| (t - k).max(0.0), &xs);
            let put = leg(&|t| (k - t).max(0.0), &xs);
            let dc = leg(&|t| t.min(k), &xs);
            let bond = leg(&|_| k, &xs);
            let neg = |y: &Payoff| leg(&|t| -t, y.values());
            let (lhs, rhs) = match parity {
                Parity::Pcp => (f(&x), f(&call) + f(&neg(&put)) + f(&bond)),
                Parity::Cpp => (f(&put), f(&call) + f(&neg(&x)) + f(&bond)),
                Parity::Dcp => (f(&x), f(&call) + f(&dc)),
                Parity::DcpStar => (f(&call), f(&x) + f(&neg(&dc))),
            };
            checked += 1;
            let residual = lhs - rhs;
            if residual.abs() > tol {
                failures.push(ParityCheck {
                    parity,
                    x: x.clone(),
                    k,
                    lhs,
                    rhs,
                    residual,
                    pass: false,
                });
            }
        }
    }
    Ok(ExhaustiveRun { checked, failures })
}

/// Searches the vertices of `{μ ≥ 0, μ(A) ≤ v(A) ∀A, μ(Ω) = v(Ω)}` by
/// solving every square system of tight constraints. Returns a feasible
/// vertex (within `tol`) if the polytope is non-empty.
pub fn anticore_vertex(v: &Capacity, tol: f64) -> Result<Option<Vec<f64>>> {
    let n = v.n();
    if n > VERTEX_MAX_STATES {
        return Err(Error::Budget {
            what: "anticore vertex search",
            got: n,
            max: VERTEX_MAX_STATES,
        });
    }
    let full = (1u32 << n) - 1;
    // Inequalities a·μ ≤ b.
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for mask in 1..full {
        let a = (0..n).map(|i| f64::from((mask >> i) & 1)).collect();
        rows.push((a, v.value(Subset(mask))));
    }
    for i in 0..n {
        let mut a = vec![0.0; n];
        a[i] = -1.0;
        rows.push((a, 0.0));
    }
    let total_row = (vec![1.0; n], v.value(Subset(full)));

    let feasible = |mu: &[f64]| {
        let dot = |a: &[f64]| a.iter().zip(mu).map(|(p, q)| p * q).sum::<f64>();
        (dot(&total_row.0) - total_row.1).abs() <= tol
            && rows.iter().all(|(a, b)| dot(a) <= b + tol)
    };

    for pick in combinations(rows.len(), n - 1) {
        let mut system: Vec<(Vec<f64>, f64)> = pick.iter().map(|&r| rows[r].clone()).collect();
        system.push(total_row.clone());
        if let Some(mu) = solve_square(system) {
            if feasible(&mu) {
                return Ok(Some(mu));
            }
        }
    }
    Ok(None)
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..m {
            current.push(i);
            rec(i + 1, m, k, current, out);
            current.pop();
        }
    }
    rec(0, m, k, &mut current, &mut out);
    out
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_square(mut rows: Vec<(Vec<f64>, f64)>) -> Option<Vec<f64>> {
    let n = rows.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| rows[a].0[col].abs().total_cmp(&rows[b].0[col].abs()))?;
        if rows[pivot].0[col].abs() < 1e-12 {
            return None;
        }
        rows.swap(col, pivot);
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = rows[r].0[col] / rows[col].0[col];
            if factor == 0.0 {
                continue;
            }
            let (src_a, src_b) = rows[col].clone();
            for (dst, src) in rows[r].0.iter_mut().zip(&src_a) {
                *dst -= factor * src;
            }
            rows[r].1 -= factor * src_b;
        }
    }
    Some((0..n).map(|i| rows[i].1 / rows[i].0[i]).collect())
}

/// Uniform payoff with entries in `[-bound, bound]`.
pub fn random_payoff(space: &Arc<StateSpace>, rng: &mut impl Rng, bound: f64) -> Payoff {
    let values = (0..space.len()).map(|_| rng.gen_range(-bound..=bound)).collect();
    Payoff::new(Arc::clone(space), values).expect("finite")
}

/// Payoff with entries `0.5·j`, `j ∈ {-2b..2b}`, so ties are frequent.
pub fn random_grid_payoff(space: &Arc<StateSpace>, rng: &mut impl Rng, bound: i32) -> Payoff {
    let values = (0..space.len())
        .map(|_| 0.5 * f64::from(rng.gen_range(-2 * bound..=2 * bound)))
        .collect();
    Payoff::new(Arc::clone(space), values).expect("finite")
}
