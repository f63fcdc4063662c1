//! Experiment reports and their canonical serialization.
//!
//! JSON output is canonical: object keys sorted, floats printed with 17
//! significant digits (`{:.16e}`), no insignificant whitespace. Identical
//! values therefore always produce identical bytes, which is what the
//! comparison hash relies on.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// 17-significant-digit decimal, exact on round trip. Non-finite values map to `null`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// Canonical JSON text of `value`.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_canonical(value, &mut out);
    out
}

fn write_canonical(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(num) => {
            if let Some(u) = num.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = num.as_i64() {
                out.push_str(&i.to_string());
            } else {
                out.push_str(&fmt_f64(num.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_canonical(&map[key], out);
            }
            out.push('}');
        }
    }
}

/// A seeded, serializable record of one command run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub command: String,
    /// Fully resolved parameter record.
    pub params: Value,
    pub seed: u64,
    pub version: String,
    /// Excluded from the comparison hash.
    pub wall_time_ms: u64,
    pub payload: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Map<String, Value>>>,
    /// SHA-256 over the canonical JSON of everything except wall time and this field.
    pub comparison_hash: String,
}

impl ExperimentReport {
    pub fn new(
        command: &str,
        params: Value,
        seed: u64,
        payload: Value,
        rows: Option<Vec<Map<String, Value>>>,
    ) -> Self {
        let mut report = ExperimentReport {
            command: command.to_string(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_ms: 0,
            payload,
            rows,
            comparison_hash: String::new(),
        };
        report.comparison_hash = report.compute_hash();
        report
    }

    pub fn compute_hash(&self) -> String {
        let mut hashed = Map::new();
        hashed.insert("command".into(), Value::String(self.command.clone()));
        hashed.insert("params".into(), self.params.clone());
        hashed.insert("seed".into(), Value::from(self.seed));
        hashed.insert("version".into(), Value::String(self.version.clone()));
        hashed.insert("payload".into(), self.payload.clone());
        if let Some(rows) = &self.rows {
            hashed.insert(
                "rows".into(),
                Value::Array(rows.iter().cloned().map(Value::Object).collect()),
            );
        }
        let digest = Sha256::digest(canonical_json(&Value::Object(hashed)).as_bytes());
        hex::encode(digest)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("report is always representable as JSON")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Serializes `report` as canonical JSON or as CSV of its per-sample rows.
pub fn serialize_report(report: &ExperimentReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => Ok(canonical_json(&report.to_value()).into_bytes()),
        Format::Csv => {
            let rows = report
                .rows
                .as_ref()
                .filter(|r| !r.is_empty())
                .ok_or_else(|| Error::invalid("format", "csv output needs per-sample rows"))?;
            rows_to_csv(rows)
        }
    }
}

/// Header row from the sorted union of keys, then one RFC 4180 record per row.
pub fn rows_to_csv(rows: &[Map<String, Value>]) -> Result<Vec<u8>> {
    let mut header: Vec<&String> = rows.iter().flat_map(|r| r.keys()).collect();
    header.sort();
    header.dedup();
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    writer.write_record(header.iter().map(|h| h.as_str()))?;
    for row in rows {
        writer.write_record(header.iter().map(|h| match row.get(*h) {
            None | Some(Value::Null) => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => canonical_json(v),
        }))?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}
