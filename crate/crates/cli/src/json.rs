//! Deterministic JSON writer: sorted keys, two-space indentation, every
//! float printed with 17 significant digits so golden files are byte-stable.

use serde::Serialize;
use serde_json::Value;

pub fn to_stable_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report serialization cannot fail");
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    let f = if f == 0.0 { 0.0 } else { f };
                    out.push_str(&format!("{f:.16e}"));
                } else {
                    out.push_str(&n.to_string());
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                write_value(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            // serde_json's map is BTreeMap-backed: keys iterate sorted
            for (i, (k, val)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push_str(": ");
                write_value(val, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_get_seventeen_significant_digits() {
        #[derive(Serialize)]
        struct S {
            x: f64,
            n: u32,
        }
        let s = to_stable_json(&S { x: 0.1, n: 4 });
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": 4"), "{s}");
    }
}
