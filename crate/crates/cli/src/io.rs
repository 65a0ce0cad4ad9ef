//! Reading capacity and payoff files.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use choquet_pricing::{Capacity, GeneratorSpec, Payoff, PayoffFile, StateSpace, Subset};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// A file read from disk together with its digest.
#[derive(Debug, Clone)]
pub struct Input {
    pub path: String,
    pub sha256: String,
    pub text: String,
}

pub fn read_input(path: &Path) -> CliResult<Input> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))?;
    Ok(Input {
        path: path.display().to_string(),
        sha256,
        text,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CapacityFile {
    states: Option<Vec<String>>,
    values: Option<BTreeMap<String, f64>>,
    generate: Option<GeneratorSpec>,
    /// Written by `generate`; ignored on input.
    #[allow(dead_code)]
    meta: Option<Value>,
}

fn parse_error(input: &Input, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", input.path))
}

/// Parses either a full table or a generator spec.
pub fn parse_capacity(input: &Input) -> CliResult<Capacity> {
    let file: CapacityFile = serde_json::from_str(&input.text).map_err(|e| parse_error(input, e))?;
    match (file.values, file.generate) {
        (Some(values), None) => {
            let states = file
                .states
                .ok_or_else(|| parse_error(input, "missing \"states\""))?;
            let space = StateSpace::new(states)?;
            table_capacity(&space, &values).map_err(|e| match e {
                CliError::Input(m) => parse_error(input, m),
                other => other,
            })
        }
        (None, Some(spec)) => generated_capacity(file.states, &spec),
        _ => Err(parse_error(input, "expected exactly one of \"values\" or \"generate\"")),
    }
}

/// Parses a generator spec, bare (`{"kind": ...}`) or wrapped
/// (`{"generate": {...}, "states": [...]}`).
pub fn parse_generator(input: &Input) -> CliResult<Capacity> {
    if let Ok(spec) = serde_json::from_str::<GeneratorSpec>(&input.text) {
        return generated_capacity(None, &spec);
    }
    let file: CapacityFile = serde_json::from_str(&input.text).map_err(|e| parse_error(input, e))?;
    match (file.values, file.generate) {
        (None, Some(spec)) => generated_capacity(file.states, &spec),
        _ => Err(parse_error(input, "expected a generator spec")),
    }
}

fn generated_capacity(states: Option<Vec<String>>, spec: &GeneratorSpec) -> CliResult<Capacity> {
    let n = spec.state_count();
    let states = states.unwrap_or_else(|| (1..=n).map(|i| format!("s{i}")).collect());
    if states.len() != n {
        return Err(CliError::Input(format!(
            "generator describes {n} states but {} state names were given",
            states.len()
        )));
    }
    let space = StateSpace::new(states)?;
    Ok(Capacity::generate(space, spec)?)
}

/// Resolves a subset key such as `"a,b"`; names may appear in any order.
pub fn parse_subset_key(space: &StateSpace, key: &str) -> CliResult<Subset> {
    if key.trim().is_empty() {
        return Ok(Subset::EMPTY);
    }
    let mut set = Subset::EMPTY;
    for name in key.split(',').map(str::trim) {
        let i = space.index_of(name)?;
        if set.contains(i) {
            return Err(CliError::Input(format!("state {name:?} repeated in subset key {key:?}")));
        }
        set = set.insert(i);
    }
    Ok(set)
}

fn table_capacity(space: &Arc<StateSpace>, values: &BTreeMap<String, f64>) -> CliResult<Capacity> {
    let mut table: Vec<Option<f64>> = vec![None; space.subset_count()];
    for (key, &value) in values {
        let set = parse_subset_key(space, key)?;
        if table[set.index()].replace(value).is_some() {
            return Err(CliError::Input(format!(
                "subset {} given more than once",
                space.display_subset(set)
            )));
        }
    }
    let missing: Vec<String> = Subset::all(space.len())
        .filter(|a| table[a.index()].is_none())
        .map(|a| space.display_subset(a))
        .collect();
    if !missing.is_empty() {
        let shown = missing.iter().take(8).cloned().collect::<Vec<_>>().join(", ");
        let more = if missing.len() > 8 { format!(" and {} more", missing.len() - 8) } else { String::new() };
        return Err(CliError::Input(format!("missing subsets: {shown}{more}")));
    }
    Ok(Capacity::from_table(
        Arc::clone(space),
        table.into_iter().map(|v| v.expect("checked above")).collect(),
    )?)
}

pub fn parse_payoff(input: &Input, space: &Arc<StateSpace>) -> CliResult<Payoff> {
    let file: PayoffFile = serde_json::from_str(&input.text).map_err(|e| parse_error(input, e))?;
    file.into_payoff(space).map_err(|e| parse_error(input, e))
}

/// Capacity as a file: `{"states": [...], "values": {"a,b": ...}}`.
pub fn capacity_json(v: &Capacity) -> Value {
    let space = v.space();
    let values: serde_json::Map<String, Value> = Subset::all(space.len())
        .map(|a| (space.subset_key(a), json!(v.value(a))))
        .collect();
    json!({ "states": space.names(), "values": values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(text: &str) -> Input {
        Input {
            path: "test.json".into(),
            sha256: String::new(),
            text: text.into(),
        }
    }

    #[test]
    fn table_with_any_name_order() {
        let v = parse_capacity(&input(
            r#"{"states":["a","b"],"values":{"":0,"a":0.6,"b":0.6,"b,a":1}}"#,
        ))
        .unwrap();
        assert_eq!(v.table(), &[0.0, 0.6, 0.6, 1.0]);
    }

    #[test]
    fn missing_and_duplicate_subsets() {
        let err = parse_capacity(&input(r#"{"states":["a","b"],"values":{"":0,"a":0.6,"a,b":1}}"#));
        assert!(err.unwrap_err().to_string().contains("missing subsets: {b}"));
        let err = parse_capacity(&input(
            r#"{"states":["a","b"],"values":{"":0,"a":0.6,"b":0.6,"a,b":1,"b,a":1}}"#,
        ));
        assert!(err.unwrap_err().to_string().contains("more than once"));
        let err = parse_capacity(&input(r#"{"states":["a","b"],"values":{"":0,"a,a":0.6}}"#));
        assert!(err.unwrap_err().to_string().contains("repeated"));
    }

    #[test]
    fn generator_forms() {
        let wrapped = parse_capacity(&input(
            r#"{"generate":{"kind":"epsilon_contamination","p":[0.5,0.5],"epsilon":0.2}}"#,
        ))
        .unwrap();
        assert_eq!(wrapped.space().names(), &["s1", "s2"]);
        assert_eq!(wrapped.table(), &[0.0, 0.4, 0.4, 1.0]);
        let bare = parse_generator(&input(r#"{"kind":"additive","weights":[0.4,0.6]}"#)).unwrap();
        assert_eq!(bare.table(), &[0.0, 0.4, 0.6, 1.0]);
        let named = parse_generator(&input(
            r#"{"states":["x","y"],"generate":{"kind":"additive","weights":[0.4,0.6]}}"#,
        ))
        .unwrap();
        assert_eq!(named.space().names(), &["x", "y"]);
        assert!(parse_generator(&input(
            r#"{"states":["x"],"generate":{"kind":"additive","weights":[0.4,0.6]}}"#,
        ))
        .is_err());
    }

    #[test]
    fn capacity_round_trips_through_json() {
        let v = parse_capacity(&input(
            r#"{"states":["a","b","c"],"generate":{"kind":"distortion","p":[0.2,0.3,0.5],"gamma":0.5}}"#,
        ))
        .unwrap();
        let text = serde_json::to_string(&capacity_json(&v)).unwrap();
        let back = parse_capacity(&input(&text)).unwrap();
        assert_eq!(back.table(), v.table());
    }
}
