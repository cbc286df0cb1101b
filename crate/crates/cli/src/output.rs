use std::io::Write;
use std::path::Path;

use serde_json::Value;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Text form of a number at 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let r = round12(x);
        if r == 0.0 || (1e-6..1e16).contains(&r.abs()) {
            r.to_string()
        } else {
            format!("{r:e}")
        }
    }
}

/// Rounds every floating-point number in a JSON document.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .and_then(|x| serde_json::Number::from_f64(round12(x)))
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// CSV from a header and rows of numbers.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt12).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Two-column CSV of the top-level scalar fields of a JSON object.
pub fn csv_fields(v: &Value) -> String {
    let mut out = String::from("field,value\n");
    if let Value::Object(map) = v {
        for (k, x) in map {
            let cell = match x {
                Value::Number(n) => n.as_f64().map(fmt12).unwrap_or_else(|| n.to_string()),
                Value::Bool(b) => b.to_string(),
                Value::String(s) => s.clone(),
                Value::Null => "null".into(),
                _ => continue,
            };
            out.push_str(&format!("{k},{cell}\n"));
        }
    }
    out
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(std::f64::consts::E), 2.71828182846);
        assert_eq!(fmt12(0.1 + 0.2), "0.3");
        assert_eq!(fmt12(1.0), "1");
        assert_eq!(fmt12(f64::INFINITY), "inf");
        assert_eq!(fmt12(1e-8), "1e-8");
        assert_eq!(fmt12(-2.5e200), "-2.5e200");
        assert_eq!(round12(-1.234567890123456e-300), -1.23456789012e-300);
    }

    #[test]
    fn json_rounding_leaves_integers() {
        let mut v = serde_json::json!({"a": 1, "b": [0.1234567890123456, 7], "c": "x"});
        round_json(&mut v);
        assert_eq!(
            v,
            serde_json::json!({"a": 1, "b": [0.123456789012, 7], "c": "x"})
        );
    }
}
