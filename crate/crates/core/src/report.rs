//! Verdicts returned by verifiers.
//!
//! Structural problems (bad shapes, broken preconditions) surface as
//! [`crate::error::Error`]; a well-formed input that fails the property
//! under test yields `Verdict::Fail` carrying a violation report instead.

use std::fmt;

/// Outcome of verifying a defining property: the extracted parameters on
/// success, or a report naming the first violation on failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<P, V> {
    Pass(P),
    Fail(V),
}

impl<P, V> Verdict<P, V> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass(_))
    }

    pub fn pass(&self) -> Option<&P> {
        match self {
            Verdict::Pass(p) => Some(p),
            Verdict::Fail(_) => None,
        }
    }

    pub fn fail(&self) -> Option<&V> {
        match self {
            Verdict::Pass(_) => None,
            Verdict::Fail(v) => Some(v),
        }
    }

    /// Unwraps the parameters, panicking with the violation's message otherwise.
    pub fn expect_pass(self, context: &str) -> P
    where
        V: fmt::Display,
    {
        match self {
            Verdict::Pass(p) => p,
            Verdict::Fail(v) => panic!("{context}: {v}"),
        }
    }
}

impl<P: fmt::Display, V: fmt::Display> fmt::Display for Verdict<P, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass(p) => write!(f, "pass: {p}"),
            Verdict::Fail(v) => write!(f, "fail: {v}"),
        }
    }
}
