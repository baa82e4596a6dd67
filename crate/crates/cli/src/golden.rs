//! Structural comparison of JSON reports against golden files.

use std::path::Path;

use serde_json::Value;
use verma_core::Error;

/// Keys never compared.
fn is_timing(key: &str) -> bool {
    key == "timing" || key.ends_with("_ms") || key.ends_with("_secs")
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// JSON pointers of every difference, in document order.
pub fn diff(report: &Value, golden: &Value) -> Vec<String> {
    let mut out = Vec::new();
    walk(report, golden, String::new(), &mut out);
    out
}

fn walk(a: &Value, b: &Value, path: String, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).filter(|k| !is_timing(k)).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                let p = format!("{path}/{}", escape(k));
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => walk(u, v, p, out),
                    _ => out.push(p),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            for i in 0..x.len().max(y.len()) {
                let p = format!("{path}/{i}");
                match (x.get(i), y.get(i)) {
                    (Some(u), Some(v)) => walk(u, v, p, out),
                    _ => out.push(p),
                }
            }
        }
        _ if a == b => {}
        _ => out.push(if path.is_empty() { "/".into() } else { path }),
    }
}

pub enum GoldenOutcome {
    Match,
    Differs(Vec<String>),
    Written,
}

/// Compares `report` with the file at `golden`, or overwrites it when `regenerate`.
pub fn compare(report: &Value, golden: &Path, regenerate: bool) -> anyhow::Result<GoldenOutcome> {
    if regenerate {
        std::fs::write(golden, crate::report::to_stable_string(report))?;
        return Ok(GoldenOutcome::Written);
    }
    if !golden.exists() {
        return Err(Error::MissingGolden(golden.display().to_string()).into());
    }
    let g: Value = serde_json::from_str(&std::fs::read_to_string(golden)?)?;
    let d = diff(report, &g);
    Ok(if d.is_empty() { GoldenOutcome::Match } else { GoldenOutcome::Differs(d) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn pointers() {
        let a = json!({"layers": [{"dims": [1]}, {"dims": [2, 1]}, {"dims": [6, 3, 1, 0]}], "elapsed_ms": 4});
        let mut b = a.clone();
        assert!(diff(&a, &b).is_empty());
        b["layers"][2]["dims"][1] = json!(4);
        b["elapsed_ms"] = json!(9);
        assert_eq!(diff(&a, &b), vec!["/layers/2/dims/1"]);
        b["new/key"] = json!(true);
        assert_eq!(diff(&a, &b)[1], "/new~1key");
    }

    #[test]
    fn missing_golden() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.json");
        let e = compare(&json!({}), &p, false).err().unwrap();
        assert!(matches!(e.downcast_ref::<Error>(), Some(Error::MissingGolden(_))));
        assert!(matches!(compare(&json!({"a": 1}), &p, true).unwrap(), GoldenOutcome::Written));
        assert!(matches!(compare(&json!({"a": 1}), &p, false).unwrap(), GoldenOutcome::Match));
    }
}
