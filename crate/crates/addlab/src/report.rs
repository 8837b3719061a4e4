//! JSON reports.
//!
//! Keys are emitted in sorted order and every rational is a `"num/den"`
//! string, so a report is a pure function of its inputs. Wall-clock timing is
//! attached only on request.

use std::time::Duration;

use addlab_core::{Check, ExactRatio, GroupSet, Status};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::setfile::parse_element;

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub checks: Vec<Check>,
    pub timing: Option<Duration>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), inputs: Map::new(), outputs: Map::new(), checks: Vec::new(), timing: None }
    }

    pub fn file(&mut self, role: &str, path: &str, bytes: &[u8]) {
        let files = self.inputs.entry("files").or_insert_with(|| Value::Object(Map::new()));
        files
            .as_object_mut()
            .expect("files is an object")
            .insert(role.into(), json!({ "path": path, "sha256": sha256(bytes) }));
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        let params = self.inputs.entry("params").or_insert_with(|| Value::Object(Map::new()));
        params.as_object_mut().expect("params is an object").insert(key.into(), value.into());
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) {
        self.outputs.insert(key.into(), value.into());
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend_checks(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(Check::failed)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), self.command.clone().into());
        obj.insert("inputs".into(), Value::Object(self.inputs.clone()));
        obj.insert("outputs".into(), Value::Object(self.outputs.clone()));
        obj.insert("checks".into(), Value::Array(self.checks.iter().map(check_json).collect()));
        if let Some(t) = self.timing {
            obj.insert("timing".into(), json!({ "elapsed_ms": t.as_millis() as u64 }));
        }
        Value::Object(obj)
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
        s.push('\n');
        s
    }
}

pub fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn rat(r: &ExactRatio) -> Value {
    Value::String(r.to_string())
}

/// Integers beyond `u64` fall back to decimal strings.
pub fn int(n: u128) -> Value {
    u64::try_from(n).map_or_else(|_| Value::String(n.to_string()), Value::from)
}

pub fn set_json(s: &GroupSet) -> Value {
    json!({
        "group": s.spec().to_string(),
        "elements": s.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
    })
}

pub fn sets_json<'a>(sets: impl IntoIterator<Item = &'a GroupSet>) -> Value {
    Value::Array(sets.into_iter().map(set_json).collect())
}

pub fn check_json(c: &Check) -> Value {
    let witnesses: Map<String, Value> = c.witnesses.iter().map(|(k, v)| (k.clone(), rat(v))).collect();
    json!({ "name": c.name, "status": c.status.as_str(), "witnesses": witnesses })
}

pub fn parse_rat(v: &Value) -> Result<ExactRatio, String> {
    v.as_str().ok_or("expected a \"num/den\" string")?.parse().map_err(|e: addlab_core::Error| e.to_string())
}

pub fn parse_set_json(v: &Value) -> Result<GroupSet, String> {
    let spec =
        v["group"].as_str().ok_or("set without group")?.parse().map_err(|e: addlab_core::Error| e.to_string())?;
    let elems = v["elements"]
        .as_array()
        .ok_or("set without elements")?
        .iter()
        .map(|e| parse_element(&spec, e.as_str().ok_or("element is not a string")?))
        .collect::<Result<Vec<_>, _>>()?;
    GroupSet::new(spec, elems).map_err(|e| e.to_string())
}

pub fn parse_sets_json(v: &Value) -> Result<Vec<GroupSet>, String> {
    v.as_array().ok_or("expected a list of sets")?.iter().map(parse_set_json).collect()
}

pub fn parse_check(v: &Value) -> Result<Check, String> {
    let name = v["name"].as_str().ok_or("check without name")?.to_string();
    let status = match v["status"].as_str() {
        Some("pass") => Status::Pass,
        Some("fail") => Status::Fail,
        Some("reported") => Status::Reported,
        _ => return Err(format!("check {name}: bad status")),
    };
    let mut witnesses = Vec::new();
    if let Some(w) = v["witnesses"].as_object() {
        for (k, val) in w {
            witnesses.push((k.clone(), parse_rat(val)?));
        }
    }
    Ok(Check { name, status, witnesses })
}
