//! Machine-readable verification reports.
//!
//! A report has the stable shape
//! `{suite, checks: [{name, value, bound, relation, pass}], config, versions}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Direction of the comparison between a measured value and its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= bound`; NaN never passes.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, relation: Relation::AtMost, pass: value <= bound }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, relation: Relation::AtLeast, pass: value >= bound }
    }

    pub fn equal(name: impl Into<String>, value: f64, expected: f64) -> Self {
        Self { name: name.into(), value, bound: expected, relation: Relation::Equal, pass: value == expected }
    }

    /// One human-readable line, `PASS name: value <= bound`.
    pub fn line(&self) -> String {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Equal => "==",
        };
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("{tag} {}: {:e} {rel} {:e}", self.name, self.value, self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
    pub config: serde_json::Value,
    pub versions: BTreeMap<String, String>,
}

impl Report {
    pub fn new(suite: impl Into<String>, config: serde_json::Value) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("sp4moment".to_string(), env!("CARGO_PKG_VERSION").to_string());
        Self { suite: suite.into(), checks: Vec::new(), config, versions }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are plain data")
    }
}
