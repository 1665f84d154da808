//! `key=value` edits applied to the scenario JSON before it is parsed.
//!
//! Keys are dotted paths into the document; array elements are addressed by
//! index (`sfn_stations.1.power_w`). A key must name a field that already
//! exists, so typos fail loudly instead of being ignored.

use serde_json::Value;

use crate::CliError;

pub fn apply(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Config(format!(
            "override `{assignment}` has an empty key"
        )));
    }
    let mut slot = &mut *doc;
    for part in key.split('.') {
        slot = match slot {
            Value::Object(map) => map.get_mut(part),
            Value::Array(items) => part.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| CliError::Config(format!("unknown override key `{key}`")))?;
    }
    if slot.is_object() || slot.is_array() {
        return Err(CliError::Config(format!(
            "override key `{key}` does not name a scalar field"
        )));
    }
    let raw = raw.trim();
    *slot = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    Ok(())
}
