//! `--set key=value` overrides applied to the parsed TOML document before it
//! is turned into a config.
//!
//! Keys are dotted paths; a numeric segment indexes an array, so
//! `signals.0.power_dbm=-3` edits the first signal.

use toml::{Table, Value};

/// Parses the right-hand side as a TOML value; anything that is not valid
/// TOML is taken as a bare string.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

pub fn apply_override(doc: &mut Table, assignment: &str) -> Result<(), String> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("override `{assignment}` is not of the form key=value"))?;
    let key = key.trim();
    let segments: Vec<&str> = key.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(format!("override key `{key}` has an empty segment"));
    }
    let value = parse_value(raw.trim());

    let (last, parents) = segments.split_last().expect("split yields at least one segment");
    let mut node: &mut Value = doc
        .entry(parents.first().copied().unwrap_or(last).to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    if parents.is_empty() {
        *node = value;
        return Ok(());
    }
    for seg in &parents[1..] {
        node = step(node, seg, key)?;
    }
    match node {
        Value::Table(t) => {
            t.insert(last.to_string(), value);
            Ok(())
        }
        Value::Array(a) => {
            let i: usize = last.parse().map_err(|_| format!("`{key}`: `{last}` is not an array index"))?;
            let slot = a.get_mut(i).ok_or_else(|| format!("`{key}`: index {i} out of range"))?;
            *slot = value;
            Ok(())
        }
        _ => Err(format!("`{key}`: cannot set a field inside a scalar")),
    }
}

fn step<'a>(node: &'a mut Value, seg: &str, key: &str) -> Result<&'a mut Value, String> {
    match node {
        Value::Table(t) => Ok(t.entry(seg.to_string()).or_insert_with(|| Value::Table(Table::new()))),
        Value::Array(a) => {
            let i: usize = seg.parse().map_err(|_| format!("`{key}`: `{seg}` is not an array index"))?;
            a.get_mut(i).ok_or_else(|| format!("`{key}`: index {i} out of range"))
        }
        _ => Err(format!("`{key}`: cannot descend into a scalar at `{seg}`")),
    }
}
