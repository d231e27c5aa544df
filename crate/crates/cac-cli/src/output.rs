//! Canonical JSON output.
//!
//! All maps go through `serde_json::Map` (BTree-backed, so keys serialize
//! sorted) and repeated runs are byte-identical. Integers above 2^53 are
//! emitted as decimal strings so double-precision JSON parsers cannot
//! silently round them.

use serde_json::{Map, Value};

/// Largest integer a double-precision consumer can hold exactly.
pub const MAX_EXACT_DOUBLE: u64 = 1 << 53;

/// A `u64` as a JSON number, or a decimal string above 2^53.
pub fn jnum(v: u64) -> Value {
    if v > MAX_EXACT_DOUBLE {
        Value::String(v.to_string())
    } else {
        Value::from(v)
    }
}

/// Parses a value written by [`jnum`].
pub fn parse_jnum(v: &Value) -> Option<u64> {
    match v {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

pub fn object(fields: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in fields {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

/// Pretty for terminals, compact single-line when `--json` is set.
pub fn render(v: &Value, compact: bool) -> String {
    if compact {
        v.to_string()
    } else {
        serde_json::to_string_pretty(v).expect("value serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_integers_become_strings() {
        assert_eq!(jnum(17), Value::from(17));
        assert_eq!(jnum(MAX_EXACT_DOUBLE), Value::from(MAX_EXACT_DOUBLE));
        let big = MAX_EXACT_DOUBLE + 1;
        assert_eq!(jnum(big), Value::String(big.to_string()));
        assert_eq!(parse_jnum(&jnum(big)), Some(big));
        assert_eq!(parse_jnum(&jnum(17)), Some(17));
    }

    #[test]
    fn objects_serialize_with_sorted_keys() {
        let v = object(vec![("zeta", jnum(1)), ("alpha", jnum(2))]);
        assert_eq!(v.to_string(), r#"{"alpha":2,"zeta":1}"#);
    }
}
