//! Structured pass/fail reports for filter and scale-grid checks.

use alloc::string::String;
use alloc::vec::Vec;

/// Severity of a single check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Severity {
    /// Failing this check invalidates the configuration.
    Required,
    /// Failing this check degrades guarantees but does not block use.
    Advisory,
}

/// One named check with the measured value and the tolerance it was held to.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub severity: Severity,
    pub passed: bool,
}

/// Outcome of a validation run: every check, in a stable order.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub(crate) fn push(
        &mut self,
        name: impl Into<String>,
        value: f64,
        tolerance: f64,
        severity: Severity,
        passed: bool,
    ) {
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance,
            severity,
            passed,
        });
    }

    /// True when every `Required` check passed.
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.passed || c.severity == Severity::Advisory)
    }

    /// Checks that failed, regardless of severity.
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Looks up a check by name.
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
