//! Verification reports shared by the suites and the command line.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report {
            suite: suite.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Records an outcome, turning errors into failed checks.
    pub fn record<T>(&mut self, name: impl Into<String>, outcome: crate::error::Result<T>, detail: impl FnOnce(&T) -> (bool, String)) {
        match outcome {
            Ok(v) => {
                let (passed, d) = detail(&v);
                self.push(name, passed, d);
            }
            Err(e) => self.push(name, false, format!("error: {e}")),
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn count_passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{}: {} ({}/{} checks)",
            self.suite,
            if self.passed() { "pass" } else { "FAIL" },
            self.count_passed(),
            self.checks.len()
        )
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {}", self.suite)?;
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "{mark} {}", c.name)?;
            } else {
                writeln!(f, "{mark} {}: {}", c.name, c.detail)?;
            }
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        writeln!(f, "{}", self.summary_line())
    }
}
