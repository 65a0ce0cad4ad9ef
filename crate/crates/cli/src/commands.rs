//! One function per subcommand. Each returns the JSON body, the text
//! rendering and whether an analytical finding was made.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use choquet_pricing::parity::{standard_payoffs, sweep, PARITY_TOL};
use choquet_pricing::{
    check_af, nonneg_spread_check, price_report, random_portfolio_probe, AdditiveMeasure,
    ArbitrageCertificate, ArbitrageVerdict, Arithmetic, BondPosition, Capacity, Parity, Payoff,
    PricingReport, PricingRule, RuleKind, SpreadCheck, StateSpace, StrikeSet, SweepSummary, Subset,
    DEFAULT_TOL,
};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::io::{self, Input};
use crate::output::{num, render_json};
use crate::{CapacityArgs, Format};

pub struct Outcome {
    pub json: Value,
    /// `None` for commands whose output is always JSON.
    pub text: Option<String>,
    pub finding: bool,
}

pub struct Context {
    tol: f64,
    seed: u64,
    format: Format,
    inputs: Vec<Input>,
}

impl Context {
    pub fn new(tol: f64, seed: u64, format: Format) -> Self {
        Self {
            tol,
            seed,
            format,
            inputs: Vec::new(),
        }
    }

    fn read(&mut self, path: &Path) -> CliResult<Input> {
        let input = io::read_input(path)?;
        self.inputs.push(input.clone());
        Ok(input)
    }

    fn meta(&self) -> Value {
        let inputs: Vec<Value> = self
            .inputs
            .iter()
            .map(|i| json!({ "path": i.path, "sha256": i.sha256 }))
            .collect();
        json!({
            "tool": "choquet",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "tolerance": self.tol,
            "inputs": inputs,
        })
    }

    pub fn render(&self, body: Value, text: Option<&str>) -> String {
        match (self.format, text) {
            (Format::Text, Some(text)) => {
                let mut out = format!("choquet {} (seed {})\n", env!("CARGO_PKG_VERSION"), self.seed);
                for i in &self.inputs {
                    out.push_str(&format!("input {} sha256 {}\n", i.path, i.sha256));
                }
                out.push('\n');
                out.push_str(text);
                out
            }
            _ => {
                let mut body = match body {
                    Value::Object(map) => map,
                    other => Map::from_iter([("result".to_string(), other)]),
                };
                body.insert("meta".into(), self.meta());
                render_json(Value::Object(body))
            }
        }
    }
}

fn load_capacity(ctx: &mut Context, path: &Path) -> CliResult<Capacity> {
    let input = ctx.read(path)?;
    io::parse_capacity(&input)
}

fn load_payoffs(ctx: &mut Context, paths: &[PathBuf], space: &Arc<StateSpace>) -> CliResult<Vec<(String, Payoff)>> {
    paths
        .iter()
        .map(|p| {
            let input = ctx.read(p)?;
            let x = io::parse_payoff(&input, space)?;
            Ok((input.path, x))
        })
        .collect()
}

fn load_rule(ctx: &mut Context, args: &CapacityArgs) -> CliResult<PricingRule> {
    let v = load_capacity(ctx, &args.capacity)?;
    Ok(PricingRule::new(args.rule.into(), v)?)
}

fn subset_names(space: &StateSpace, set: Subset) -> Value {
    json!(space.names_in(set))
}

fn payoff_text(x: &Payoff) -> String {
    let parts: Vec<String> = x.values().iter().map(|&v| num(v)).collect();
    format!("({})", parts.join(", "))
}

fn measure_text(mu: &AdditiveMeasure) -> String {
    let parts: Vec<String> = mu
        .space()
        .names()
        .iter()
        .zip(mu.weights())
        .map(|(n, w)| format!("{n}: {}", num(*w)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn report_json(r: &PricingReport) -> Value {
    json!({
        "payoff_id": r.payoff_id,
        "ask": r.ask,
        "bid": r.bid,
        "spread": r.spread,
        "sipos_value": r.sipos_value,
        "riskless_rate": r.riskless_rate,
    })
}

fn price_reports(rule: &PricingRule, payoffs: &[(String, Payoff)]) -> CliResult<Vec<PricingReport>> {
    payoffs
        .iter()
        .map(|(id, x)| Ok(price_report(rule, id.clone(), x)?))
        .collect()
}

pub fn price(ctx: &mut Context, args: &CapacityArgs, paths: &[PathBuf]) -> CliResult<Outcome> {
    let rule = load_rule(ctx, args)?;
    let payoffs = load_payoffs(ctx, paths, rule.capacity().space())?;
    let reports = price_reports(&rule, &payoffs)?;

    let mut text = format!("{} pricing, riskless rate {}\n", rule.kind(), num(rule.riskless_rate()));
    let mut finding = false;
    for r in &reports {
        text.push_str(&format!(
            "{}: ask {}, bid {}, spread {}, sipos {}\n",
            r.payoff_id,
            num(r.ask),
            num(r.bid),
            num(r.spread),
            num(r.sipos_value)
        ));
        if r.spread < -ctx.tol {
            finding = true;
            text.push_str(&format!(
                "  negative spread: buying and selling {} earns {} today\n",
                r.payoff_id,
                num(-r.spread)
            ));
        }
    }
    Ok(Outcome {
        json: json!({
            "command": "price",
            "rule": rule.kind().to_string(),
            "prices": reports.iter().map(report_json).collect::<Vec<_>>(),
        }),
        text: Some(text),
        finding,
    })
}

fn spread_check_json(v: &Capacity, check: &SpreadCheck) -> Value {
    json!({
        "pass": check.pass,
        "violating_set": check.violating_set.map(|a| subset_names(v.space(), a)),
        "buy_sell_sum": check.buy_sell_sum,
    })
}

fn spread_check_text(v: &Capacity, check: &SpreadCheck) -> String {
    match (check.violating_set, check.buy_sell_sum) {
        (Some(a), Some(sum)) => {
            let s = v.space();
            format!(
                "v dominates its conjugate: no. v({}) + v({}) - v(Ω) = {}, so buying and selling 1_{} earns {} today\n",
                s.display_subset(a),
                s.display_subset(a.complement(v.n())),
                num(sum),
                s.display_subset(a),
                num(-sum)
            )
        }
        _ => "v dominates its conjugate: yes, so bid ≤ sipos ≤ ask for every payoff\n".into(),
    }
}

pub fn spread(ctx: &mut Context, args: &CapacityArgs, paths: &[PathBuf]) -> CliResult<Outcome> {
    let rule = load_rule(ctx, args)?;
    let v = rule.capacity().clone();
    let payoffs = load_payoffs(ctx, paths, v.space())?;
    let reports = price_reports(&rule, &payoffs)?;
    let check = nonneg_spread_check(&v, ctx.tol.max(DEFAULT_TOL));

    let mut finding = !check.pass;
    let mut text = spread_check_text(&v, &check);
    let mut rows = Vec::new();
    for r in &reports {
        let negative = r.spread < -ctx.tol;
        finding |= negative;
        let line = if r.sandwich_holds(ctx.tol) {
            format!("bid {} ≤ sipos {} ≤ ask {}", num(r.bid), num(r.sipos_value), num(r.ask))
        } else {
            format!("bid {}, sipos {}, ask {}", num(r.bid), num(r.sipos_value), num(r.ask))
        };
        text.push_str(&format!("{}: {line}", r.payoff_id));
        if negative {
            text.push_str(&format!(" (negative spread {})", num(r.spread)));
        }
        text.push('\n');
        rows.push(json!({
            "payoff_id": r.payoff_id,
            "bid": r.bid,
            "sipos_value": r.sipos_value,
            "ask": r.ask,
            "spread": r.spread,
            "sandwich": r.sandwich_holds(ctx.tol),
        }));
    }
    Ok(Outcome {
        json: json!({
            "command": "spread",
            "rule": rule.kind().to_string(),
            "dominates_conjugate": check.pass,
            "spread_check": spread_check_json(&v, &check),
            "payoffs": rows,
        }),
        text: Some(text),
        finding,
    })
}

fn sweep_json(s: &SweepSummary, max_failures: usize) -> Value {
    let failures: Vec<Value> = s
        .failures
        .iter()
        .take(max_failures)
        .map(|f| {
            json!({
                "x": f.x.values(),
                "k": f.k,
                "lhs": f.lhs,
                "rhs": f.rhs,
                "residual": f.residual,
            })
        })
        .collect();
    json!({
        "parity": s.parity.label(),
        "checked": s.checked,
        "failure_count": s.failures.len(),
        "failures": failures,
        "max_residual": s.max_residual,
        "passed": s.passed(),
    })
}

fn sweep_text(s: &SweepSummary, rule: &PricingRule, max_failures: usize) -> String {
    let mut out = format!(
        "{} ({}): {}, max residual {}\n",
        s.parity,
        rule.kind(),
        s.verdict(),
        num(s.max_residual)
    );
    for f in s.failures.iter().take(max_failures) {
        out.push_str(&format!(
            "  x = {}, k = {}: lhs {}, rhs {}, residual {}\n",
            payoff_text(&f.x),
            num(f.k),
            num(f.lhs),
            num(f.rhs),
            num(f.residual)
        ));
    }
    if s.failures.len() > max_failures {
        out.push_str(&format!("  ... {} more\n", s.failures.len() - max_failures));
    }
    if let Some(line) = parity_interpretation(s, rule) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn parity_interpretation(s: &SweepSummary, rule: &PricingRule) -> Option<String> {
    if s.passed() {
        return None;
    }
    let all_negative = s.failures.iter().all(|f| f.residual < 0.0);
    let all_positive = s.failures.iter().all(|f| f.residual > 0.0);
    match (s.parity, rule.kind()) {
        (Parity::Cpp, _) if all_negative => Some(
            "interpretation: puts are cheaper than their replication by a call, a short underlying and bonds".into(),
        ),
        (Parity::Cpp, _) if all_positive => Some(
            "interpretation: puts are dearer than their replication by a call, a short underlying and bonds".into(),
        ),
        (Parity::DcpStar, RuleKind::Choquet) => Some(
            "interpretation: the discount certificate carries a bid-ask spread, so selling it does not undo buying it".into(),
        ),
        (Parity::Pcp | Parity::Dcp, RuleKind::Sipos) => Some(
            "interpretation: a Šipoš rule is translation invariant only for an auto-conjugate capacity".into(),
        ),
        _ => None,
    }
}

fn sweep_payoffs(ctx: &mut Context, paths: &[PathBuf], space: &Arc<StateSpace>) -> CliResult<Vec<Payoff>> {
    if paths.is_empty() {
        Ok(standard_payoffs(space, ctx.seed))
    } else {
        Ok(load_payoffs(ctx, paths, space)?.into_iter().map(|(_, x)| x).collect())
    }
}

pub fn parity(
    ctx: &mut Context,
    args: &CapacityArgs,
    parity: Parity,
    paths: &[PathBuf],
    max_failures: usize,
) -> CliResult<Outcome> {
    let rule = load_rule(ctx, args)?;
    let payoffs = sweep_payoffs(ctx, paths, rule.capacity().space())?;
    let s = sweep(&rule, parity, &payoffs, &StrikeSet::standard(), ctx.tol)?;
    let mut json = sweep_json(&s, max_failures);
    json["rule"] = json!(rule.kind().to_string());
    Ok(Outcome {
        text: Some(sweep_text(&s, &rule, max_failures)),
        finding: !s.passed(),
        json,
    })
}

fn signed_legs(cert: &ArbitrageCertificate) -> Vec<(f64, Subset)> {
    let side = -f64::from(cert.bond.quantity());
    cert.legs.iter().map(|l| (side * l.coefficient, l.set)).collect()
}

fn certificate_json(cert: &ArbitrageCertificate) -> Value {
    let legs: Vec<Value> = signed_legs(cert)
        .into_iter()
        .map(|(a, set)| json!({ "a": a, "set": subset_names(cert.space(), set) }))
        .collect();
    json!({ "legs": legs, "bond_leg": cert.bond.quantity(), "cost": cert.cost })
}

fn certificate_text(cert: &ArbitrageCertificate) -> String {
    let mut trades: Vec<String> = signed_legs(cert)
        .into_iter()
        .map(|(a, set)| {
            let verb = if a >= 0.0 { "buy" } else { "sell" };
            format!("{verb} {} × 1_{}", num(a.abs()), cert.space().display_subset(set))
        })
        .collect();
    trades.push(match cert.bond {
        BondPosition::Short => "sell 1 × 1_Ω".into(),
        BondPosition::Long => "buy 1 × 1_Ω".into(),
    });
    format!(
        "arbitrage: {}\n  the portfolio pays at least 0 in every state and costs {} today\n",
        trades.join(", "),
        num(cert.cost)
    )
}

struct ArbitrageOutcome {
    json: Value,
    text: String,
    arbitrage: bool,
}

fn analyse_arbitrage(ctx: &Context, rule: &PricingRule, exact: bool, trials: usize) -> CliResult<ArbitrageOutcome> {
    let arithmetic = if exact { Arithmetic::Exact } else { Arithmetic::Float };
    let verdict = check_af(rule, arithmetic)?;
    let (mut json, mut text) = match &verdict {
        ArbitrageVerdict::ArbitrageFree { witness } => {
            let measure: Map<String, Value> = witness
                .space()
                .names()
                .iter()
                .zip(witness.weights())
                .map(|(n, w)| (n.clone(), json!(w)))
                .collect();
            (
                json!({ "status": "arbitrage_free", "measure": measure }),
                format!(
                    "arbitrage free: the additive measure {} lies below v on every event and matches v(Ω)\n",
                    measure_text(witness)
                ),
            )
        }
        ArbitrageVerdict::Arbitrage { certificate } => (
            json!({ "status": "arbitrage", "certificate": certificate_json(certificate) }),
            certificate_text(certificate),
        ),
    };
    json["rule"] = json!(rule.kind().to_string());
    json["arithmetic"] = json!(if exact { "exact" } else { "float" });

    if trials > 0 {
        let probe = random_portfolio_probe(rule, trials, ctx.seed)?;
        if verdict.is_arbitrage_free() && !probe.violations.is_empty() {
            return Err(CliError::Internal(format!(
                "the LP found no arbitrage but the probe found {} violating portfolios",
                probe.violations.len()
            )));
        }
        json["probe"] = json!({ "trials": probe.trials, "violations": probe.violations.len() });
        text.push_str(&format!(
            "probe: {} violations in {} random portfolios\n",
            probe.violations.len(),
            probe.trials
        ));
    }
    Ok(ArbitrageOutcome {
        json,
        text,
        arbitrage: !verdict.is_arbitrage_free(),
    })
}

pub fn arbitrage(ctx: &mut Context, args: &CapacityArgs, exact: bool, trials: usize) -> CliResult<Outcome> {
    let rule = load_rule(ctx, args)?;
    let a = analyse_arbitrage(ctx, &rule, exact, trials)?;
    Ok(Outcome {
        json: a.json,
        text: Some(a.text),
        finding: a.arbitrage,
    })
}

pub fn generate(ctx: &mut Context, spec: &Path) -> CliResult<Outcome> {
    let input = ctx.read(spec)?;
    let v = io::parse_generator(&input)?;
    Ok(Outcome {
        json: io::capacity_json(&v),
        text: None,
        finding: false,
    })
}

fn capacity_summary(v: &Capacity) -> CliResult<Value> {
    let concave = if v.n() <= choquet_pricing::capacity::MAX_LOCAL_CONCAVITY_STATES {
        json!(v.is_concave(DEFAULT_TOL)?)
    } else {
        Value::Null
    };
    Ok(json!({
        "states": v.space().names(),
        "total": v.total(),
        "riskless_rate": choquet_pricing::pricing::riskless_rate(v),
        "additive": v.is_additive(DEFAULT_TOL),
        "auto_conjugate": v.is_auto_conjugate(DEFAULT_TOL),
        "dominates_conjugate": v.dominates_conjugate(DEFAULT_TOL),
        "concave": concave,
    }))
}

pub fn report(
    ctx: &mut Context,
    args: &CapacityArgs,
    paths: &[PathBuf],
    exact: bool,
    trials: usize,
    max_failures: usize,
) -> CliResult<Outcome> {
    let rule = load_rule(ctx, args)?;
    let v = rule.capacity().clone();
    let payoffs = load_payoffs(ctx, paths, v.space())?;
    let reports = price_reports(&rule, &payoffs)?;
    let check = nonneg_spread_check(&v, DEFAULT_TOL);
    let summary = capacity_summary(&v)?;

    let mut findings = Vec::new();
    let mut text = format!(
        "capacity on {} states, v(Ω) = {}, {} rule\n",
        v.n(),
        num(v.total()),
        rule.kind()
    );
    for (label, key) in [
        ("additive", "additive"),
        ("auto-conjugate", "auto_conjugate"),
        ("dominates its conjugate", "dominates_conjugate"),
        ("concave", "concave"),
    ] {
        let answer = match summary[key].as_bool() {
            Some(true) => "yes",
            Some(false) => "no",
            None => "not checked",
        };
        text.push_str(&format!("  {label}: {answer}\n"));
    }

    text.push_str("\nprices\n");
    if reports.is_empty() {
        text.push_str("  no payoffs given\n");
    }
    for r in &reports {
        text.push_str(&format!(
            "  {}: bid {}, sipos {}, ask {}\n",
            r.payoff_id,
            num(r.bid),
            num(r.sipos_value),
            num(r.ask)
        ));
        if r.spread < -ctx.tol {
            findings.push(format!("negative spread on {}", r.payoff_id));
        }
    }
    text.push_str("\nspreads\n  ");
    text.push_str(&spread_check_text(&v, &check));
    if rule.kind() == RuleKind::Choquet && !check.pass {
        findings.push("buy & sell arbitrage on an event".into());
    }

    let mut sweep_inputs = standard_payoffs(v.space(), ctx.seed);
    sweep_inputs.extend(payoffs.iter().map(|(_, x)| x.clone()));
    text.push_str("\nparities\n");
    let mut sweeps = Vec::new();
    let mut passed = Vec::new();
    for parity in Parity::ALL {
        let s = sweep(&rule, parity, &sweep_inputs, &StrikeSet::standard(), ctx.tol.max(PARITY_TOL))?;
        if !s.passed() {
            findings.push(format!("{} fails", parity.label()));
        }
        passed.push(s.passed());
        for line in sweep_text(&s, &rule, max_failures.min(3)).lines() {
            text.push_str(&format!("  {line}\n"));
        }
        sweeps.push(sweep_json(&s, max_failures));
    }
    let (pcp, cpp) = (passed[0], passed[1]);
    if pcp && !cpp && check.pass {
        text.push_str(
            "  CPP fails while PCP holds and spreads are nonnegative: puts trade below the cost of \
             building them from calls, which matches the put mispricing seen when listed puts were introduced\n",
        );
    }

    let a = analyse_arbitrage(ctx, &rule, exact, trials)?;
    if a.arbitrage {
        findings.push("arbitrage".into());
    }
    text.push_str("\narbitrage\n");
    for line in a.text.lines() {
        text.push_str(&format!("  {line}\n"));
    }
    if cpp && a.arbitrage {
        text.push_str("  CPP holds on every checked payoff, yet the rule admits arbitrage\n");
    }

    text.push_str(&format!(
        "\nfindings: {}\n",
        if findings.is_empty() { "none".to_string() } else { findings.join("; ") }
    ));
    let finding = !findings.is_empty();
    Ok(Outcome {
        json: json!({
            "command": "report",
            "rule": rule.kind().to_string(),
            "capacity": summary,
            "prices": reports.iter().map(report_json).collect::<Vec<_>>(),
            "spread_check": spread_check_json(&v, &check),
            "parity": sweeps,
            "arbitrage": a.json,
            "findings": findings,
        }),
        text: Some(text),
        finding,
    })
}
