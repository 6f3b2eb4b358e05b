//! JSON game documents, machine files and adversary words.
//!
//! A game document looks like
//!
//! ```json
//! {
//!   "alphabet": { "actionsA": ["0", "1"], "actionsB": ["0", "1"] },
//!   "monitor": {
//!     "states": ["s", "t"],
//!     "initial": "s",
//!     "step": { "s": { "0,0": "s", "0,1": "t", "1,0": "t", "1,1": "t" }, "t": { ... } },
//!     "energy": { "dim": 1, "weights": { "s": { "0,0": [1], ... }, ... }, "initialCredit": [0] }
//!   },
//!   "condition": { "not": { "open": ["t"] } },
//!   "meta": { "name": "example", "description": "..." }
//! }
//! ```
//!
//! Errors name the offending field as a JSON path and, when the field can be
//! found in the source text, its line.

use crate::condition::{ConditionExpr, Game};
use crate::error::{Error, Result};
use crate::game::{Alphabet, BetaWord, FiniteMemoryMachine, Lasso};
use crate::monitor::{ConditionMonitor, EnergySpec};
use serde_json::{json, Map, Value};
use std::path::Path;

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema { path: path.to_string(), message: message.into() }
}

fn get<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| schema(path, format!("missing field {key:?}")))
}

fn string_list(v: &Value, path: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| schema(path, "expected an array of strings"))?
        .iter()
        .enumerate()
        .map(|(i, x)| x.as_str().map(str::to_string).ok_or_else(|| schema(&format!("{path}[{i}]"), "expected a string")))
        .collect()
}

fn int_list(v: &Value, path: &str) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| schema(path, "expected an array of integers"))?
        .iter()
        .enumerate()
        .map(|(i, x)| x.as_i64().ok_or_else(|| schema(&format!("{path}[{i}]"), "expected an integer")))
        .collect()
}

fn parse_alphabet(v: &Value) -> Result<Alphabet> {
    let a = string_list(get(v, "actionsA", "$.alphabet")?, "$.alphabet.actionsA")?;
    let b = string_list(get(v, "actionsB", "$.alphabet")?, "$.alphabet.actionsB")?;
    Alphabet::new(a, b).map_err(|e| schema("$.alphabet", e.to_string()))
}

fn parse_monitor(v: &Value, al: &Alphabet) -> Result<ConditionMonitor> {
    let states = string_list(get(v, "states", "$.monitor")?, "$.monitor.states")?;
    let index = |name: &str| states.iter().position(|s| s == name);
    let initial_name =
        get(v, "initial", "$.monitor")?.as_str().ok_or_else(|| schema("$.monitor.initial", "expected a state name"))?;
    let initial =
        index(initial_name).ok_or_else(|| schema("$.monitor.initial", format!("unknown state {initial_name:?}")))?;
    let step = get(v, "step", "$.monitor")?.as_object().ok_or_else(|| schema("$.monitor.step", "expected an object"))?;
    for key in step.keys() {
        if index(key).is_none() {
            return Err(schema(&format!("$.monitor.step.{key}"), format!("unknown state {key:?}")));
        }
    }
    let mut table = Vec::with_capacity(states.len());
    for s in &states {
        let path = format!("$.monitor.step.{s}");
        let row = step.get(s).ok_or_else(|| schema(&path, format!("missing transitions of state {s:?}")))?;
        let row = row.as_object().ok_or_else(|| schema(&path, "expected an object"))?;
        for key in row.keys() {
            al.parse_pair(key).map_err(|e| schema(&format!("{path}.{key}"), e.to_string()))?;
        }
        let mut targets = Vec::with_capacity(al.num_pairs());
        for p in al.pairs() {
            let label = al.pair_label(p);
            let t = row
                .get(&label)
                .ok_or_else(|| schema(&format!("{path}.{label}"), format!("missing transition ({s}, \"{label}\")")))?;
            let name = t.as_str().ok_or_else(|| schema(&format!("{path}.{label}"), "expected a state name"))?;
            targets.push(index(name).ok_or_else(|| schema(&format!("{path}.{label}"), format!("unknown state {name:?}")))?);
        }
        table.push(targets);
    }
    let energy = match v.get("energy") {
        None | Some(Value::Null) => None,
        Some(e) => {
            let dim = get(e, "dim", "$.monitor.energy")?
                .as_u64()
                .ok_or_else(|| schema("$.monitor.energy.dim", "expected a positive integer"))? as usize;
            let credit = int_list(get(e, "initialCredit", "$.monitor.energy")?, "$.monitor.energy.initialCredit")?;
            if credit.len() != dim {
                return Err(schema("$.monitor.energy.initialCredit", format!("expected {dim} entries")));
            }
            let w = get(e, "weights", "$.monitor.energy")?
                .as_object()
                .ok_or_else(|| schema("$.monitor.energy.weights", "expected an object"))?;
            let mut weights = Vec::with_capacity(states.len());
            for s in &states {
                let path = format!("$.monitor.energy.weights.{s}");
                let row = w.get(s).and_then(Value::as_object).ok_or_else(|| schema(&path, "missing weights"))?;
                let mut r = Vec::with_capacity(al.num_pairs());
                for p in al.pairs() {
                    let label = al.pair_label(p);
                    let lp = format!("{path}.{label}");
                    let vec = int_list(row.get(&label).ok_or_else(|| schema(&lp, "missing weight vector"))?, &lp)?;
                    if vec.len() != dim {
                        return Err(schema(&lp, format!("expected {dim} entries")));
                    }
                    r.push(vec);
                }
                weights.push(r);
            }
            Some(EnergySpec { weights, initial_credit: credit })
        }
    };
    ConditionMonitor::new(al.clone(), states, initial, table, energy).map_err(|e| schema("$.monitor", e.to_string()))
}

/// Parses and validates a game document.
pub fn game_from_json(v: &Value) -> Result<Game> {
    let al = parse_alphabet(get(v, "alphabet", "$")?)?;
    let m = parse_monitor(get(v, "monitor", "$")?, &al)?;
    let cond = ConditionExpr::from_json(get(v, "condition", "$")?, &m, "$.condition")?;
    let meta = v.get("meta");
    let name = meta.and_then(|x| x.get("name")).and_then(Value::as_str).unwrap_or("game").to_string();
    let description = meta.and_then(|x| x.get("description")).and_then(Value::as_str).unwrap_or("").to_string();
    let game = Game::new(name, m, cond).map_err(|e| schema("$.condition", e.to_string()))?;
    Ok(game.with_description(description))
}

/// Line (1-based) where the last key of a `$.a.b.c` path first appears after
/// its ancestors.
fn locate(text: &str, path: &str) -> Option<usize> {
    let mut pos = 0;
    let mut found = false;
    for part in path.trim_start_matches('$').split('.').filter(|s| !s.is_empty()) {
        let key = part.split('[').next().unwrap_or(part);
        let needle = format!("\"{key}\"");
        let at = text[pos..].find(&needle)?;
        pos += at + needle.len();
        found = true;
    }
    found.then(|| text[..pos].matches('\n').count() + 1)
}

/// Parses a game document from text. JSON syntax errors carry line and column.
pub fn parse_game_str(text: &str) -> Result<Game> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| schema("$", format!("line {} column {}: {e}", e.line(), e.column())))?;
    game_from_json(&v).map_err(|e| match e {
        Error::Schema { path, message } => match locate(text, &path) {
            Some(line) => Error::Schema { path, message: format!("{message} (line {line})") },
            None => Error::Schema { path, message },
        },
        other => other,
    })
}

pub fn parse_game_file(path: impl AsRef<Path>) -> Result<Game> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_game_str(&text)
}

/// Serializes a game document. Keys come out sorted.
pub fn game_to_json(game: &Game) -> Value {
    let m = &game.monitor;
    let al = m.alphabet();
    let row = |q: usize| -> Value {
        Value::Object(al.pairs().map(|p| (al.pair_label(p), json!(m.name(m.step(q, p))))).collect::<Map<_, _>>())
    };
    let mut monitor = json!({
        "states": m.names(),
        "initial": m.name(m.initial()),
        "step": Value::Object((0..m.num_states()).map(|q| (m.name(q).to_string(), row(q))).collect()),
    });
    if m.energy_dim() > 0 {
        let weights: Map<String, Value> = (0..m.num_states())
            .map(|q| {
                let r: Map<String, Value> = al.pairs().map(|p| (al.pair_label(p), json!(m.weight(q, p)))).collect();
                (m.name(q).to_string(), Value::Object(r))
            })
            .collect();
        monitor["energy"] = json!({ "dim": m.energy_dim(), "weights": weights, "initialCredit": m.initial_credit() });
    }
    json!({
        "alphabet": { "actionsA": al.actions_a(), "actionsB": al.actions_b() },
        "monitor": monitor,
        "condition": game.condition.to_json(m),
        "meta": { "name": game.name, "description": game.description },
    })
}

pub fn game_to_string(game: &Game) -> String {
    serde_json::to_string_pretty(&game_to_json(game)).expect("serializable") + "\n"
}

pub fn parse_machine_str(text: &str, alphabet: &Alphabet) -> Result<FiniteMemoryMachine> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| schema("$", format!("line {} column {}: {e}", e.line(), e.column())))?;
    FiniteMemoryMachine::from_json(alphabet, &v)
}

pub fn parse_machine_file(path: impl AsRef<Path>, alphabet: &Alphabet) -> Result<FiniteMemoryMachine> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_machine_str(&text, alphabet)
}

/// Parses `"b0 b1 : b2 b3"` (Player-2 action names; prefix, colon, non-empty cycle).
pub fn parse_beta(text: &str, alphabet: &Alphabet) -> Result<BetaWord> {
    let (prefix, cycle) = text
        .split_once(':')
        .ok_or_else(|| Error::InvalidParams(format!("adversary word {text:?} needs the form \"prefix : cycle\"")))?;
    let parse = |part: &str| -> Result<Vec<usize>> {
        part.split_whitespace()
            .map(|b| alphabet.b_index(b).ok_or_else(|| Error::InvalidAction(format!("unknown Player 2 action {b:?}"))))
            .collect()
    };
    Lasso::new(parse(prefix)?, parse(cycle)?).map_err(|_| Error::InvalidParams("the cycle of an adversary word is empty".into()))
}

pub fn beta_to_string(beta: &BetaWord, alphabet: &Alphabet) -> String {
    let names = |v: &[usize]| v.iter().map(|&b| alphabet.b_name(b)).collect::<Vec<_>>().join(" ");
    format!("{} : {}", names(&beta.prefix), names(&beta.cycle)).trim().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn round_trip_catalog_games() {
        for game in [catalog::example10(), catalog::example10_closed(), catalog::w_full(), catalog::multienergy_d2()] {
            let text = game_to_string(&game);
            let back = parse_game_str(&text).unwrap();
            assert_eq!(back.monitor, game.monitor);
            assert_eq!(back.condition, game.condition);
            assert_eq!(game_to_string(&back), text);
        }
    }

    #[test]
    fn missing_transition_is_named() {
        let mut v = game_to_json(&catalog::example10());
        v["monitor"]["step"]["c"].as_object_mut().unwrap().remove("1,0");
        let text = serde_json::to_string_pretty(&v).unwrap();
        match parse_game_str(&text).unwrap_err() {
            Error::Schema { path, message } => {
                assert_eq!(path, "$.monitor.step.c.1,0");
                assert!(message.contains("(c, \"1,0\")"), "{message}");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_game_str("{\n  \"alphabet\": ,\n}").unwrap_err() {
            Error::Schema { message, .. } => assert!(message.contains("line 2"), "{message}"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn overlapping_guards_are_rejected() {
        let mut v = game_to_json(&catalog::example10());
        v["condition"] = json!({ "openUnion": [
            { "guard": ["win"], "expr": { "open": ["win"] } },
            { "guard": ["win", "lose"], "expr": { "open": ["lose"] } }
        ]});
        assert!(matches!(game_from_json(&v).unwrap_err(), Error::Schema { .. }));
    }

    #[test]
    fn beta_words() {
        let al = Alphabet::numeric(2, 2).unwrap();
        let b = parse_beta("0 1 : 1", &al).unwrap();
        assert_eq!(b, Lasso::new(vec![0, 1], vec![1]).unwrap());
        assert_eq!(beta_to_string(&b, &al), "0 1 : 1");
        assert_eq!(parse_beta(" : 0", &al).unwrap(), Lasso::constant(0));
        assert!(parse_beta("0 1", &al).is_err());
        assert!(parse_beta("0 :", &al).is_err());
        assert!(parse_beta("7 : 0", &al).is_err());
    }
}
