//! Deterministic report rendering.
//!
//! Every real number is written with exactly nine decimals, both in text and
//! in JSON, and JSON objects are key-sorted, so identical runs produce
//! identical bytes.

use mwrc_core::Subset;
use serde_json::{Map, Number, Value};

/// `x` with nine decimals; negative zero prints as zero.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.9}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// JSON number with nine decimals, or `null` when not finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(fixed(x).parse::<Number>().expect("decimal literal"))
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn tuple(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| fixed(x)).collect();
    format!("({})", parts.join(", "))
}

pub fn subset(s: Subset) -> Value {
    Value::String(s.to_string())
}

/// Builds a JSON object from `(key, value)` pairs.
pub fn object<const N: usize>(entries: [(&str, Value); N]) -> Value {
    let mut map = Map::new();
    for (k, v) in entries {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

pub fn to_json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
