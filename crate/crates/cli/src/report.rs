//! Report assembly. Everything is ordered deterministically so reports are
//! byte-stable for a fixed configuration.

use serde_json::{json, Map, Value};

use crate::suites::Section;

pub fn assemble(config: Value, sections: &[(String, Section)]) -> Value {
    let mut suites = Map::new();
    for (name, s) in sections {
        let mut body = s.body.clone();
        if let Value::Object(o) = &mut body {
            o.insert("pass".into(), Value::Bool(s.pass));
        }
        suites.insert(name.clone(), body);
    }
    json!({
        "config": config,
        "pass": sections.iter().all(|(_, s)| s.pass),
        "suites": suites,
    })
}

/// Pretty JSON with a trailing newline; `serde_json` maps keep sorted keys.
pub fn to_stable_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn summary(config: &Value, sections: &[(String, Section)]) -> String {
    let mut out = format!(
        "verma-critical report: algebra {}, smax {}, hmax {}\n",
        config["algebra"].as_str().unwrap_or("?"),
        config["smax"],
        config["hmax"]
    );
    for (name, s) in sections {
        out.push_str(&format!("{:<15} {}  {}\n", name, if s.pass { "PASS" } else { "FAIL" }, s.summary));
    }
    let ok = sections.iter().all(|(_, s)| s.pass);
    out.push_str(if ok { "overall PASS\n" } else { "overall FAIL\n" });
    out
}
