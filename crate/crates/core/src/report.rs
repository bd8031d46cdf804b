//! Check reports: per-axiom status with coefficient witnesses.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// First violating coefficient: where, and both scalars in exact syntax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub location: String,
    pub expected: String,
    pub actual: String,
}

impl Witness {
    pub fn new(location: impl Into<String>, expected: impl ToString, actual: impl ToString) -> Self {
        Witness { location: location.into(), expected: expected.to_string(), actual: actual.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    /// Coefficients compared / left uncertified.
    #[serde(default)]
    pub checked: u64,
    #[serde(default)]
    pub skipped: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub results: Vec<AxiomResult>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(suite: &str) -> Self {
        CheckReport { suite: suite.to_string(), results: Vec::new(), notes: Vec::new() }
    }

    pub fn pass(&mut self, axiom: impl Into<String>, checked: u64) -> &mut AxiomResult {
        self.push(AxiomResult { axiom: axiom.into(), status: Status::Pass, reason: None, witness: None, window: None, checked, skipped: 0 })
    }

    pub fn fail(&mut self, axiom: impl Into<String>, witness: Witness) -> &mut AxiomResult {
        self.push(AxiomResult { axiom: axiom.into(), status: Status::Fail, reason: None, witness: Some(witness), window: None, checked: 0, skipped: 0 })
    }

    pub fn fail_reason(&mut self, axiom: impl Into<String>, reason: impl Into<String>, witness: Witness) -> &mut AxiomResult {
        let r = self.fail(axiom, witness);
        r.reason = Some(reason.into());
        r
    }

    pub fn skip(&mut self, axiom: impl Into<String>, reason: impl Into<String>) -> &mut AxiomResult {
        self.push(AxiomResult { axiom: axiom.into(), status: Status::Skipped, reason: Some(reason.into()), witness: None, window: None, checked: 0, skipped: 0 })
    }

    pub fn push(&mut self, r: AxiomResult) -> &mut AxiomResult {
        self.results.push(r);
        self.results.last_mut().unwrap()
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.results.extend(other.results);
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomResult> {
        self.results.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn count(&self, s: Status) -> usize {
        self.results.iter().filter(|r| r.status == s).count()
    }
}

impl AxiomResult {
    pub fn with_window(&mut self, w: impl Into<String>) -> &mut Self {
        self.window = Some(w.into());
        self
    }

    pub fn with_skipped(&mut self, n: u64) -> &mut Self {
        self.skipped = n;
        self
    }

    pub fn with_reason(&mut self, r: impl Into<String>) -> &mut Self {
        self.reason = Some(r.into());
        self
    }
}

/// All suites of one run, in registry order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub window: i64,
    pub suites: Vec<CheckReport>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "instance: {}  window: {}", self.instance, self.window);
        for suite in &self.suites {
            let _ = writeln!(
                s,
                "== {} : {} ({} pass, {} fail, {} skipped)",
                suite.suite,
                if suite.passed() { "PASS" } else { "FAIL" },
                suite.count(Status::Pass),
                suite.count(Status::Fail),
                suite.count(Status::Skipped)
            );
            for r in &suite.results {
                let tag = match r.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skip",
                };
                let _ = write!(s, "  [{}] {}", tag, r.axiom);
                if let Some(reason) = &r.reason {
                    let _ = write!(s, " ({})", reason);
                }
                s.push('\n');
                if let Some(w) = &r.witness {
                    let _ = writeln!(s, "      at {}: expected {}, got {}", w.location, w.expected, w.actual);
                }
            }
            for n in &suite.notes {
                let _ = writeln!(s, "  note: {}", n);
            }
        }
        s
    }
}
