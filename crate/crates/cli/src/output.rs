//! Deterministic JSON rendering: keys in sorted order, floats rounded to six
//! significant digits.

use serde_json::{Number, Value};

pub const SIGNIFICANT_DIGITS: usize = 6;

pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn round_value(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| Number::from_f64(round_significant(x)))
            .map_or_else(|| v.clone(), Value::Number),
        Value::Array(items) => Value::Array(items.iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(
            map.iter()
                .map(|(k, v)| (k.clone(), round_value(v)))
                .collect(),
        ),
        other => other.clone(),
    }
}

/// Pretty JSON with rounded floats. Keys come out sorted since
/// `serde_json::Map` is ordered by key.
pub fn render(v: &Value) -> String {
    serde_json::to_string_pretty(&round_value(v)).expect("JSON values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn six_significant_digits() {
        assert_eq!(round_significant(2.0 / 3.0), 0.666667);
        assert_eq!(round_significant(51.466_592_392_7), 51.4666);
        assert_eq!(round_significant(100.0), 100.0);
        assert_eq!(round_significant(1234567.0), 1234570.0);
        assert_eq!(round_significant(0.0), 0.0);
    }

    #[test]
    fn nested_values_and_sorted_keys() {
        let v = json!({"b": [1.0 / 3.0, 2], "a": {"x": 0.123456789}});
        assert_eq!(
            render(&v),
            "{\n  \"a\": {\n    \"x\": 0.123457\n  },\n  \"b\": [\n    0.333333,\n    2\n  ]\n}"
        );
    }
}
