//! Batch classification from CSV or JSON input.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use maxab_core::classify_max_abelian;
use rayon::prelude::*;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use serde_json::json;

use crate::{check_level, open_out, parse_curve, CliError, CliResult};

/// One input record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchRecord {
    pub a: String,
    pub b: String,
    pub p: u64,
    pub n: u32,
}

/// A decimal integer, given either as a JSON string or a JSON number.
#[derive(Debug, Clone, PartialEq, Eq)]
struct IntString(String);

fn is_integer_literal(s: &str) -> bool {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit())
}

impl<'de> Deserialize<'de> for IntString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = IntString;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a decimal integer string")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<IntString, E> {
                let t = s.trim();
                if is_integer_literal(t) {
                    Ok(IntString(t.to_string()))
                } else {
                    Err(E::custom(format!("not an integer: {s:?}")))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<IntString, E> {
                Ok(IntString(v.to_string()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<IntString, E> {
                Ok(IntString(v.to_string()))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Deserialize)]
struct JsonRow {
    #[serde(rename = "A")]
    a: IntString,
    #[serde(rename = "B")]
    b: IntString,
    p: u64,
    n: u32,
}

fn malformed(line: u64, msg: impl fmt::Display) -> CliError {
    CliError::Usage(format!("malformed input at line {line}: {msg}"))
}

fn parse_csv(text: &str) -> CliResult<Vec<BatchRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| malformed(1, e))?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Ok(Vec::new());
    }
    if headers.iter().collect::<Vec<_>>() != ["A", "B", "p", "n"] {
        return Err(malformed(
            1,
            format!("expected header A,B,p,n but found {}", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e)
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let (a, b) = (&rec[0], &rec[1]);
        if !is_integer_literal(a) || !is_integer_literal(b) {
            return Err(malformed(line, "A and B must be decimal integers"));
        }
        let p = rec[2].parse().map_err(|_| malformed(line, format!("bad p {:?}", &rec[2])))?;
        let n = rec[3].parse().map_err(|_| malformed(line, format!("bad n {:?}", &rec[3])))?;
        out.push(BatchRecord { a: a.to_string(), b: b.to_string(), p, n });
    }
    Ok(out)
}

fn parse_json(text: &str) -> CliResult<Vec<BatchRecord>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let rows: Vec<JsonRow> = serde_json::from_str(text).map_err(|e| malformed(e.line() as u64, e))?;
    Ok(rows.into_iter().map(|r| BatchRecord { a: r.a.0, b: r.b.0, p: r.p, n: r.n }).collect())
}

/// Read a batch file, choosing the format from its extension.
pub fn read_batch(path: &Path) -> CliResult<Vec<BatchRecord>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("csv") => parse_csv(&text),
        Some("json") => parse_json(&text),
        _ => Err(CliError::Usage(format!("{}: expected a .csv or .json file", path.display()))),
    }
}

fn classify_record(r: &BatchRecord) -> CliResult<serde_json::Value> {
    check_level(r.p, r.n)?;
    let curve = parse_curve(&r.a, &r.b)?;
    let report = classify_max_abelian(&curve, r.p, r.n)?;
    Ok(serde_json::to_value(report).expect("report serializes"))
}

/// Classify all records in parallel and write one JSON line each, in input order.
pub fn cmd_batch(input: &Path, out_path: Option<&Path>) -> CliResult<()> {
    let records = read_batch(input)?;
    let results: Vec<CliResult<serde_json::Value>> = records.par_iter().map(classify_record).collect();
    let mut out = open_out(out_path)?;
    let mut failures = 0usize;
    for (i, (rec, res)) in records.iter().zip(results).enumerate() {
        let line = match res {
            Ok(v) => v,
            Err(e) => {
                failures += 1;
                json!({
                    "record": i + 1,
                    "curve": {"A": rec.a, "B": rec.b},
                    "p": rec.p,
                    "n": rec.n,
                    "error": e.message(),
                })
            }
        };
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    if failures > 0 {
        return Err(CliError::Domain(format!("{failures} of {} records could not be classified", records.len())));
    }
    Ok(())
}
