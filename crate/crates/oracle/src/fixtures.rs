//! Capacities with known classification, plus random generators.

use std::sync::Arc;

use choquet_pricing::{Capacity, StateSpace, Subset};
use rand::Rng;

/// States `s1..sn`.
pub fn space(n: usize) -> Arc<StateSpace> {
    StateSpace::new((1..=n).map(|i| format!("s{i}"))).expect("valid state count")
}

/// States `a, b`.
pub fn space_ab() -> Arc<StateSpace> {
    StateSpace::new(["a", "b"]).expect("two states")
}

/// States `a, b, c`.
pub fn space_abc() -> Arc<StateSpace> {
    StateSpace::new(["a", "b", "c"]).expect("three states")
}

/// `{∅:0, {a}:va, {b}:vb, Ω:total}`.
pub fn two_state(va: f64, vb: f64, total: f64) -> Capacity {
    Capacity::from_table(space_ab(), vec![0.0, va, vb, total]).expect("valid two-state capacity")
}

/// Symmetric capacity on `a, b, c`: singletons `s`, pairs `p`, `Ω = total`.
pub fn symmetric_three(s: f64, p: f64, total: f64) -> Capacity {
    Capacity::from_fn(space_abc(), |a| match a.len() {
        0 => 0.0,
        1 => s,
        2 => p,
        _ => total,
    })
    .expect("valid symmetric capacity")
}

/// Singletons 0.2, pairs 0.8: auto-conjugate, not additive, empty anticore.
pub fn auto_conjugate_three() -> Capacity {
    symmetric_three(0.2, 0.8, 1.0)
}

/// Symmetric capacity on `n` states from a table indexed by cardinality.
pub fn by_cardinality(n: usize, levels: &[f64]) -> Capacity {
    assert_eq!(levels.len(), n + 1);
    Capacity::from_fn(space(n), |a| levels[a.len()]).expect("valid symmetric capacity")
}

/// Random monotone capacity: each subset exceeds its largest immediate
/// subset by a uniform increment, then the table is scaled so that
/// `v(Ω) ∈ [0.8, 1.2]`. A quarter of the increments are zero, to produce
/// ties and flat regions.
pub fn random_capacity(space: &Arc<StateSpace>, rng: &mut impl Rng) -> Capacity {
    let n = space.len();
    let count = 1usize << n;
    let mut table = vec![0.0; count];
    for mask in 1..count {
        let floor = Subset(mask as u32)
            .states()
            .map(|i| table[mask & !(1 << i)])
            .fold(0.0, f64::max);
        let step = if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.0..1.0) };
        table[mask] = floor + step;
    }
    if table[count - 1] == 0.0 {
        table[count - 1] = 1.0;
    }
    let scale = rng.gen_range(0.8..1.2) / table[count - 1];
    for t in &mut table {
        *t *= scale;
    }
    Capacity::from_table(Arc::clone(space), table).expect("monotone by construction")
}

/// `(w + w*)/2` for a random `w`: always auto-conjugate.
pub fn random_auto_conjugate(space: &Arc<StateSpace>, rng: &mut impl Rng) -> Capacity {
    let w = random_capacity(space, rng);
    let ws = w.conjugate();
    Capacity::from_fn(Arc::clone(space), |a| 0.5 * (w.value(a) + ws.value(a))).expect("monotone")
}

/// `max(w, w*)` for a random `w`: always dominates its conjugate.
pub fn random_dominating(space: &Arc<StateSpace>, rng: &mut impl Rng) -> Capacity {
    let w = random_capacity(space, rng);
    let ws = w.conjugate();
    Capacity::from_fn(Arc::clone(space), |a| w.value(a).max(ws.value(a))).expect("monotone")
}

/// `min(w, w*)`, resampled until it does not dominate its conjugate.
pub fn random_non_dominating(space: &Arc<StateSpace>, rng: &mut impl Rng) -> Capacity {
    loop {
        let w = random_capacity(space, rng);
        let ws = w.conjugate();
        let v = Capacity::from_fn(Arc::clone(space), |a| w.value(a).min(ws.value(a))).expect("monotone");
        if !v.dominates_conjugate(1e-9) {
            return v;
        }
    }
}

/// Random probability vector with every weight at least 0.05.
pub fn random_probability(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|r| r / sum).collect()
}

/// Ten concave capacities: distortions `p(A)^γ` with `γ ≤ 1`, conjugates of
/// ε-contaminations, and additive measures.
pub fn concave_suite(rng: &mut impl Rng) -> Vec<Capacity> {
    let mut out = Vec::new();
    for (n, gamma) in [(2, 0.5), (3, 0.7), (4, 0.3), (3, 1.0)] {
        let p = random_probability(n, rng);
        out.push(Capacity::distortion(space(n), &p, gamma).expect("valid distortion"));
    }
    for (n, eps) in [(2, 0.2), (3, 0.5), (4, 0.1)] {
        let p = random_probability(n, rng);
        let contamination = Capacity::epsilon_contamination(space(n), &p, eps).expect("valid contamination");
        out.push(contamination.conjugate());
    }
    out.push(two_state(0.6, 0.6, 1.0));
    out.push(symmetric_three(0.5, 0.9, 1.0));
    out.push(Capacity::additive(space(3), &[0.2, 0.3, 0.5]).expect("valid weights"));
    out
}

/// Ten capacities whose anticore is empty, each with a hand-derivable
/// balanced cover of cost below `v(Ω)`.
pub fn infeasible_suite() -> Vec<Capacity> {
    let u3 = [1.0 / 3.0; 3];
    vec![
        // Singletons: 0.3 + 0.3 < 1.
        two_state(0.3, 0.3, 1.0),
        // Singletons: 3·0.2 < 1.
        auto_conjugate_three(),
        // Singletons: 2·(1 − 0.2)·0.5 = 0.8 < 1.
        Capacity::epsilon_contamination(space(2), &[0.5, 0.5], 0.2).expect("valid"),
        // Singletons: (1 − 0.5)·1 < 1.
        Capacity::epsilon_contamination(space(3), &u3, 0.5).expect("valid"),
        // Singletons: 3·(1/3)² < 1.
        Capacity::distortion(space(3), &u3, 2.0).expect("valid"),
        // Singletons: 3·0.3 < 1.
        symmetric_three(0.3, 0.5, 1.0),
        // Pairs, each with weight ½: 1.5·0.5 = 0.75 < 1, singletons would give 1.5.
        symmetric_three(0.5, 0.5, 1.0),
        // {a,b} and {c}: 0.6 + 0.1 < 1.
        Capacity::from_table(space_abc(), vec![0.0, 0.6, 0.6, 0.6, 0.1, 0.7, 0.7, 1.0]).expect("valid"),
        // Singletons: 4·0.2 < 1.
        by_cardinality(4, &[0.0, 0.2, 0.45, 0.7, 1.0]),
        // {a,b} and {c,d}: 0.9 + 0.9 < 2, with v(Ω) = 2.
        by_cardinality(4, &[0.0, 0.4, 0.9, 1.3, 2.0]),
    ]
}
