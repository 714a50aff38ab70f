//! Operation files: one `{"id", "ops"}` object per line with keys sorted.

use relay_core::logic::{Operation, OperationSet};
use serde_json::{json, Value};

use crate::{Error, Result};

/// Operations as a JSON array in set order, every object's keys sorted.
pub fn ops_value(ops: &OperationSet) -> Value {
    serde_json::to_value(ops.iter().collect::<Vec<&Operation>>()).expect("operations serialize")
}

/// One line of an operation file, without the newline. `error` is set when
/// the utterance failed to compile; its `ops` are then empty.
pub fn ops_line(id: &str, ops: &OperationSet, error: Option<&str>) -> String {
    let mut v = json!({ "id": id, "ops": ops_value(ops) });
    if let Some(e) = error {
        v["error"] = Value::from(e);
    }
    v.to_string()
}

/// Reads an operation file back into `(id, operations)` rows.
pub fn parse_ops(text: &str, origin: &str) -> Result<Vec<(String, OperationSet)>> {
    #[derive(serde::Deserialize)]
    struct Row {
        id: String,
        ops: Vec<Operation>,
    }
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Row = serde_json::from_str(line).map_err(|e| Error::json(origin, n + 1, e))?;
        out.push((row.id, row.ops.into_iter().collect()));
    }
    Ok(out)
}
