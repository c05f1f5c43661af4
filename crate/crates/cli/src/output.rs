use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

/// `x` rounded to 10 significant digits.
pub fn sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..10).contains(&mag) {
        let decimals = (9 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.9e}");
        match s.split_once('e') {
            Some((m, e)) if m.contains('.') => format!("{}e{e}", m.trim_end_matches('0').trim_end_matches('.')),
            _ => s,
        }
    }
}

/// Full-precision decimal for CSV cells.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        sig10(x)
    }
}

/// `key: value` lines of a JSON tree, numbers at 10 significant digits.
/// Arrays of objects are printed as indented rows.
pub fn text_lines(value: &Value) -> String {
    let mut out = String::new();
    walk(value, "", &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(x) => x.as_f64().map(sig10).unwrap_or_else(|| x.to_string()),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}

fn walk(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                walk(child, &key, out);
            }
        }
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            let _ = writeln!(out, "{prefix}: [{}]", parts.join(", "));
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{prefix}: {} rows", items.len());
            for (i, item) in items.iter().enumerate() {
                match item {
                    Value::Object(map) => {
                        let parts: Vec<String> = map
                            .iter()
                            .filter(|(_, x)| !x.is_object() && !x.is_array())
                            .map(|(k, x)| format!("{k}={}", scalar(x)))
                            .collect();
                        let _ = writeln!(out, "  [{i}] {}", parts.join(" "));
                    }
                    other => walk(other, &format!("{prefix}[{i}]"), out),
                }
            }
        }
        other => {
            let _ = writeln!(out, "{prefix}: {}", scalar(other));
        }
    }
}

/// A CSV table with `#` comment lines above the header.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_digits() {
        assert_eq!(sig10(0.8), "0.8");
        assert_eq!(sig10(1.0 / 3.0), "0.3333333333");
        assert_eq!(sig10(123456.789012345), "123456.789");
        assert_eq!(sig10(2.0f64.sqrt() * 1e-7), "1.414213562e-7");
        assert_eq!(sig10(-7.0), "-7");
        assert_eq!(sig10(1e-12), "1e-12");
        assert_eq!(sig10(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_cells_round_trip() {
        let x = 0.1 + 0.2;
        assert_eq!(cell(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn nested_text() {
        let v: Value = serde_json::json!({"a": 1.0, "b": {"c": [1.0, 2.5]}, "rows": [{"p": 1.5, "r": 0.25}]});
        let t = text_lines(&v);
        assert!(t.contains("a: 1\n"));
        assert!(t.contains("b.c: [1, 2.5]"));
        assert!(t.contains("[0] p=1.5 r=0.25"));
    }
}
