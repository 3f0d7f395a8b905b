//! Pass/fail records produced by the verification suites.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// The relation being checked, written out as a formula.
    pub reference: String,
    pub status: Status,
    pub measured: f64,
    pub tolerance: f64,
    pub notes: String,
}

impl Check {
    /// Passes when `measured <= tolerance`; NaN always fails.
    pub fn within(
        name: impl Into<String>,
        reference: impl Into<String>,
        measured: f64,
        tolerance: f64,
    ) -> Self {
        let status = if measured <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name: name.into(),
            reference: reference.into(),
            status,
            measured,
            tolerance,
            notes: String::new(),
        }
    }

    /// Passes when `measured >= threshold`.
    pub fn at_least(
        name: impl Into<String>,
        reference: impl Into<String>,
        measured: f64,
        threshold: f64,
    ) -> Self {
        let mut c = Self::within(name, reference, measured, threshold);
        c.status = if measured >= threshold {
            Status::Pass
        } else {
            Status::Fail
        };
        c
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            write!(
                f,
                "{tag}  {:<44} measured={:<12.3e} tol={:<10.1e} {}",
                c.name, c.measured, c.tolerance, c.reference
            )?;
            if !c.notes.is_empty() {
                write!(f, "  [{}]", c.notes)?;
            }
            writeln!(f)?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} checks, {} passed, {} failed",
            self.checks.len(),
            self.checks.len() - failed,
            failed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Check::within("x", "", f64::NAN, 1.0).passed());
        assert!(!Check::at_least("x", "", f64::NAN, 1.0).passed());
    }

    #[test]
    fn report_tracks_failures() {
        let mut r = VerificationReport::new();
        r.push(Check::within("a", "", 0.0, 0.0));
        assert!(r.all_passed());
        r.push(Check::within("b", "", 2.0, 1.0));
        assert!(!r.all_passed());
        assert_eq!(r.failures().count(), 1);
        assert!(r.to_string().contains("FAIL"));
    }
}
