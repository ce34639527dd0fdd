//! CSV and JSON emission with nine-significant-digit floats.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use osdma_core::sim::format_sig;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn open(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Rounds every float in `v` to nine significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            format_sig(x)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number)
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(round_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

pub fn write_json<W: Write>(out: &mut W, provenance: &[(String, String)], result: Value) -> io::Result<()> {
    let header: Map<String, Value> = provenance
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let mut doc = Map::new();
    doc.insert("header".into(), Value::Object(header));
    doc.insert("result".into(), round_floats(result));
    serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
    writeln!(out)
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&join(k), v, rows)),
        Value::Array(xs) => xs.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, rows)),
        Value::Number(n) => rows.push((
            prefix.to_string(),
            match n.as_f64() {
                Some(x) if n.is_f64() => format_sig(x),
                _ => n.to_string(),
            },
        )),
        Value::Null => rows.push((prefix.to_string(), "nan".into())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
    }
}

/// Two-column `field,value` CSV of a JSON-shaped result.
pub fn write_record_csv<W: Write>(out: &mut W, provenance: &[(String, String)], result: &Value) -> io::Result<()> {
    for (k, v) in provenance {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "field,value")?;
    let mut rows = Vec::new();
    flatten("", result, &mut rows);
    for (k, v) in rows {
        writeln!(out, "{k},{v}")?;
    }
    Ok(())
}
