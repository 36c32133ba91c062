//! The hand-written schema under `schemas/` must agree with what the
//! loader accepts.

use std::collections::BTreeSet;

use serde_json::Value;

fn schema() -> Value {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas/scenario.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().map(|o| o.keys().cloned().collect()).unwrap_or_default()
}

fn resolve<'a>(root: &'a Value, node: &'a Value) -> &'a Value {
    match node.get("$ref").and_then(Value::as_str) {
        Some(r) => root.pointer(r.trim_start_matches('#')).unwrap(),
        None => node,
    }
}

/// Checks declared object keys (and `required`) wherever the schema closes
/// an object, descending through properties and array items.
fn check(root: &Value, node: &Value, doc: &Value, path: &str) {
    let node = resolve(root, node);
    if let (Some(props), Some(obj)) = (node.get("properties"), doc.as_object()) {
        if node.get("additionalProperties") == Some(&Value::Bool(false)) {
            let extra: Vec<_> = keys(doc).difference(&keys(props)).cloned().collect();
            assert!(extra.is_empty(), "{path}: keys {extra:?} not in schema");
        }
        for r in node.get("required").and_then(Value::as_array).into_iter().flatten() {
            assert!(obj.contains_key(r.as_str().unwrap()), "{path}: missing required `{r}`");
        }
        for (k, v) in obj {
            if let Some(p) = props.get(k) {
                check(root, p, v, &format!("{path}.{k}"));
            }
        }
    }
    if let (Some(items), Some(arr)) = (node.get("items"), doc.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            check(root, items, v, &format!("{path}[{i}]"));
        }
    }
    if let Some(allowed) = node.get("enum").and_then(Value::as_array) {
        assert!(allowed.contains(doc), "{path}: {doc} not in {allowed:?}");
    }
}

fn shipped() -> Vec<Value> {
    let muddy = scenarios::gen_muddy(3, &["a".to_string(), "b".to_string()].into()).unwrap();
    [scenarios::INCIDENT_JSON, scenarios::DESIGN_REVIEW_JSON, &muddy.to_json()]
        .iter()
        .map(|t| serde_json::from_str(t).unwrap())
        .collect()
}

#[test]
fn shipped_scenarios_conform() {
    let root = schema();
    for doc in shipped() {
        check(&root, &root, &doc, "$");
    }
}

#[test]
fn required_keys_are_required_by_the_loader() {
    let root = schema();
    let required: Vec<&str> = root["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(required, ["format", "name", "agents", "initial", "turns"]);
    for key in required {
        let mut doc = shipped().remove(0);
        doc.as_object_mut().unwrap().remove(key);
        assert!(scenarios::Scenario::from_json(&doc.to_string()).is_err(), "loader accepted a scenario without `{key}`");
    }
}
