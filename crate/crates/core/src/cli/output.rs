//! Serialization shared by all subcommands: 17-significant-digit numbers,
//! LF-terminated CSV, and the run manifest with its payload checksum.

use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

/// Formats `x` like C's `%.17g`: 17 significant digits, positional for
/// decimal exponents in `[-5, 17)`, trailing zeros trimmed.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();

    let body = if (-5..17).contains(&exp) {
        let mut s = if exp >= 0 {
            let point = exp as usize + 1;
            format!("{}.{}", &digits[..point], &digits[point..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    } else {
        let mut frac = digits[1..].to_string();
        while frac.ends_with('0') {
            frac.pop();
        }
        let sign = if exp < 0 { '-' } else { '+' };
        if frac.is_empty() {
            format!("{}e{}{:02}", &digits[..1], sign, exp.abs())
        } else {
            format!("{}.{}e{}{:02}", &digits[..1], frac, sign, exp.abs())
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// A JSON number carrying exactly the [`fmt_g17`] text; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fmt_g17(x)).expect("formatted float is a JSON number"))
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Provenance attached to every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub seed: Option<u64>,
    pub tool_version: String,
    /// Seconds since the epoch from `SOURCE_DATE_EPOCH`, if set. Left
    /// unset otherwise so repeated runs stay byte-identical.
    pub timestamp: Option<u64>,
    /// SHA-256 of the payload bytes (JSON `data` or CSV body).
    pub output_checksum: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Map<String, Value>, seed: Option<u64>, payload: &[u8]) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: std::env::var("SOURCE_DATE_EPOCH")
                .ok()
                .and_then(|s| s.trim().parse().ok()),
            output_checksum: format!("sha256:{}", sha256_hex(payload)),
        }
    }
}

/// `{"manifest": ..., "data": ...}`, pretty-printed, LF-terminated.
pub fn json_document(command: &str, params: Map<String, Value>, seed: Option<u64>, data: Value) -> String {
    let payload = serde_json::to_string(&data).expect("values serialize");
    let manifest = RunManifest::new(command, params, seed, payload.as_bytes());
    let doc = serde_json::json!({ "manifest": manifest, "data": data });
    let mut text = serde_json::to_string_pretty(&doc).expect("values serialize");
    text.push('\n');
    text
}

/// A numeric table rendered as CSV.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn body(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Manifest as a `# manifest: {...}` comment line, then header and rows.
    pub fn document(&self, command: &str, params: Map<String, Value>, seed: Option<u64>) -> String {
        let body = self.body();
        let manifest = RunManifest::new(command, params, seed, body.as_bytes());
        format!(
            "# manifest: {}\n{body}",
            serde_json::to_string(&manifest).expect("manifest serializes")
        )
    }
}
