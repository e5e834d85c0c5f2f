use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_linalg::Scalar;

/// First failing instance of an identity.
///
/// `elements` lists semigroup indices and `basis` lists basis indices, in the
/// order the identity quantifies over them. Validators scan tuples
/// lexicographically, so the violation reported is the smallest one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub elements: Vec<usize>,
    pub basis: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at elements {:?}, basis {:?}", self.rule, self.elements, self.basis)
    }
}

/// Outcome of a validator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    /// Number of instances evaluated before stopping.
    pub checks: usize,
    pub violation: Option<Violation>,
}

impl Report {
    pub fn pass(checks: usize) -> Self {
        Report { checks, violation: None }
    }

    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }

    /// Turn a failing report into a precondition error.
    pub fn require(self, what: &str) -> Result<()> {
        match self.violation {
            None => Ok(()),
            Some(v) => Err(Error::precondition(what, v)),
        }
    }

    /// Turn a failing report into a postcondition error.
    pub fn ensure(self, what: &str) -> Result<()> {
        match self.violation {
            None => Ok(()),
            Some(v) => Err(Error::postcondition(what, v)),
        }
    }
}

/// Counts checks and stops at the first mismatch.
#[derive(Default)]
pub(crate) struct Audit {
    checks: usize,
}

impl Audit {
    pub fn expect_eq(
        &mut self,
        lhs: &[Scalar],
        rhs: &[Scalar],
        rule: &str,
        elements: &[usize],
        basis: &[usize],
    ) -> std::result::Result<(), Violation> {
        self.checks += 1;
        if lhs == rhs {
            Ok(())
        } else {
            Err(Violation { rule: rule.to_string(), elements: elements.to_vec(), basis: basis.to_vec() })
        }
    }

    pub fn expect_bool(
        &mut self,
        ok: bool,
        rule: &str,
        elements: &[usize],
        basis: &[usize],
    ) -> std::result::Result<(), Violation> {
        self.checks += 1;
        if ok {
            Ok(())
        } else {
            Err(Violation { rule: rule.to_string(), elements: elements.to_vec(), basis: basis.to_vec() })
        }
    }

    pub fn expect_zero(
        &mut self,
        v: &[Scalar],
        rule: &str,
        elements: &[usize],
        basis: &[usize],
    ) -> std::result::Result<(), Violation> {
        self.checks += 1;
        if v.iter().all(Scalar::is_zero) {
            Ok(())
        } else {
            Err(Violation { rule: rule.to_string(), elements: elements.to_vec(), basis: basis.to_vec() })
        }
    }

    pub fn finish(self, outcome: std::result::Result<(), Violation>) -> Report {
        Report { checks: self.checks, violation: outcome.err() }
    }
}
