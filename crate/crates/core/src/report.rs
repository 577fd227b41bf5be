//! Check reports: the common result shape produced by every law checker.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail { witness: Value },
    Skipped { reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// The outcome of one suite of checks against one subject. A failing record
/// always carries a machine-readable witness naming the inputs, so the
/// failing case can be replayed on its own.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub subject: String,
    pub suite: String,
    pub checks: Vec<CheckRecord>,
}

impl CheckReport {
    pub fn new(subject: impl Into<String>, suite: impl Into<String>) -> Self {
        CheckReport { subject: subject.into(), suite: suite.into(), checks: Vec::new() }
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(CheckRecord { name: name.into(), outcome: Outcome::Pass });
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: Value) {
        self.checks.push(CheckRecord { name: name.into(), outcome: Outcome::Fail { witness } });
    }

    pub fn skip(&mut self, name: impl Into<String>, reason: impl Into<String>) {
        self.checks.push(CheckRecord {
            name: name.into(),
            outcome: Outcome::Skipped { reason: reason.into() },
        });
    }

    /// Records a pass or a fail depending on `ok`.
    pub fn record(&mut self, name: impl Into<String>, ok: bool, witness: impl FnOnce() -> Value) {
        if ok {
            self.pass(name);
        } else {
            self.fail(name, witness());
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| !matches!(c.outcome, Outcome::Fail { .. }))
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| matches!(c.outcome, Outcome::Fail { .. }))
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut pass = 0;
        let mut fail = 0;
        let mut skip = 0;
        for c in &self.checks {
            match c.outcome {
                Outcome::Pass => pass += 1,
                Outcome::Fail { .. } => fail += 1,
                Outcome::Skipped { .. } => skip += 1,
            }
        }
        (pass, fail, skip)
    }

    /// Merges another report's records into this one, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        for mut check in other.checks {
            check.name = format!("{prefix}/{}", check.name);
            self.checks.push(check);
        }
    }

    /// Panics with the first failure; used by tests that demand a green suite.
    pub fn expect_all_passed(&self) {
        if let Some(first) = self.failures().next() {
            panic!("suite {} on {} failed: {} ({:?})", self.suite, self.subject, first.name, first.outcome);
        }
    }
}
