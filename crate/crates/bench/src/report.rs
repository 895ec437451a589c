//! Scenario reports: grouped check outcomes, rendered as text or JSON.
//!
//! Reports carry no timing so that identical inputs give identical bytes;
//! the CLI prints elapsed time on stderr instead.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// Outcome recorded for a claim the model is not required to satisfy.
    Reported,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Reported => "reported",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }
}

/// Outcome of one family of checks, for example every instance of a schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    /// Instances that held.
    pub held: usize,
    /// Instances that did not hold.
    pub failed: usize,
    pub inconclusive: usize,
    /// First counterexample, or a note.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioReport {
    pub scenario: String,
    /// `pass` or `fail` for scenarios; the verdict name for single queries.
    pub verdict: String,
    pub witness: Option<String>,
    pub values: BTreeMap<String, String>,
    /// Largest world count any model reached while producing the report.
    pub world_count: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRecord>,
}

impl ScenarioReport {
    pub fn new(scenario: &str) -> Self {
        ScenarioReport {
            scenario: scenario.to_string(),
            verdict: "pass".to_string(),
            witness: None,
            values: BTreeMap::new(),
            world_count: 0,
            checks: Vec::new(),
        }
    }

    fn family(&mut self, name: &str, must_hold: bool) -> &mut CheckRecord {
        if let Some(i) = self.checks.iter().position(|c| c.name == name) {
            return &mut self.checks[i];
        }
        self.checks.push(CheckRecord {
            name: name.to_string(),
            status: if must_hold { Status::Pass } else { Status::Reported },
            held: 0,
            failed: 0,
            inconclusive: 0,
            detail: None,
        });
        self.checks.last_mut().expect("just pushed")
    }

    /// Records one instance of a must-hold check.
    pub fn check(&mut self, name: &str, held: bool, detail: impl FnOnce() -> String) {
        let rec = self.family(name, true);
        if held {
            rec.held += 1;
        } else {
            rec.failed += 1;
            rec.status = Status::Fail;
            if rec.detail.is_none() {
                rec.detail = Some(detail());
            }
        }
    }

    /// Records one instance of a check that is reported, never asserted.
    pub fn report(&mut self, name: &str, held: bool, detail: impl FnOnce() -> String) {
        let rec = self.family(name, false);
        if held {
            rec.held += 1;
        } else {
            rec.failed += 1;
            if rec.detail.is_none() {
                rec.detail = Some(detail());
            }
        }
    }

    pub fn inconclusive(&mut self, name: &str, must_hold: bool, reason: &str) {
        let rec = self.family(name, must_hold);
        rec.inconclusive += 1;
        if rec.status == Status::Pass && rec.held == 0 && rec.failed == 0 {
            rec.status = Status::Inconclusive;
        }
        if rec.detail.is_none() {
            rec.detail = Some(reason.to_string());
        }
    }

    pub fn set_value(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn see_worlds(&mut self, n: usize) {
        self.world_count = self.world_count.max(n);
    }

    pub fn merge(&mut self, other: ScenarioReport) {
        self.world_count = self.world_count.max(other.world_count);
        for (k, v) in other.values {
            self.values.insert(k, v);
        }
        for c in other.checks {
            if let Some(mine) = self.checks.iter_mut().find(|m| m.name == c.name) {
                mine.held += c.held;
                mine.failed += c.failed;
                mine.inconclusive += c.inconclusive;
                mine.status = mine.status.max(c.status);
                if mine.detail.is_none() {
                    mine.detail = c.detail;
                }
            } else {
                self.checks.push(c);
            }
        }
    }

    /// True when no must-hold check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// Sets `verdict` from the check outcomes.
    pub fn finish(mut self) -> Self {
        self.verdict = if self.passed() { "pass" } else { "fail" }.to_string();
        self
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| c.status == Status::Fail).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.scenario, self.verdict);
        if let Some(w) = &self.witness {
            out.push_str(&format!("witness: {w}\n"));
        }
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!("{:<12} {}  held {}", c.status.as_str(), c.name, c.held));
            if c.failed > 0 {
                out.push_str(&format!(", not held {}", c.failed));
            }
            if c.inconclusive > 0 {
                out.push_str(&format!(", inconclusive {}", c.inconclusive));
            }
            if let Some(d) = &c.detail {
                out.push_str(&format!("  [{d}]"));
            }
            out.push('\n');
        }
        out.push_str(&format!("worlds (peak): {}\n", self.world_count));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_dominate_and_reported_never_fails() {
        let mut r = ScenarioReport::new("t");
        r.check("a", true, String::new);
        r.check("a", false, || "first".into());
        r.check("a", false, || "second".into());
        r.report("b", false, || "nope".into());
        let r = r.finish();
        assert_eq!(r.verdict, "fail");
        assert_eq!(r.checks[0].detail.as_deref(), Some("first"));
        assert_eq!(r.checks[0].failed, 2);
        assert_eq!(r.checks[1].status, Status::Reported);
    }

    #[test]
    fn json_uses_documented_keys() {
        let mut r = ScenarioReport::new("t");
        r.set_value("x", "1/2");
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["verdict", "witness", "values", "worldCount"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn inconclusive_only_family_is_inconclusive() {
        let mut r = ScenarioReport::new("t");
        r.inconclusive("g", true, "guard");
        assert_eq!(r.checks[0].status, Status::Inconclusive);
        assert!(r.passed());
    }
}
