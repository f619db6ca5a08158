//! Validation reports shared by the clone, i-structure and i-algebra checkers.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Number of witnesses kept verbatim; the total count is always exact.
pub const MAX_LISTED_VIOLATIONS: usize = 1000;

/// Printed with every report: finite checks certify the truncation only.
pub const TRUNCATION_CAVEAT: &str =
    "axiom checks certify arities up to n_max only; nothing is claimed above the truncation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    // clone
    Associativity,
    Projection,
    Unit,
    Normalisation,
    // i-structure
    ArityOne,
    ArityZero,
    Precomposition,
    // i-algebra
    Neighbourhood,
    ActionAssociativity,
    ActionProjection,
    Totality,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).unwrap();
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

/// One violated axiom instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// The arity indices of the instance, e.g. `[n, j]` for a projection.
    pub indices: Vec<usize>,
    pub witness: String,
}

/// How much of one block of axiom instances was inspected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub axiom: Axiom,
    pub indices: Vec<usize>,
    pub checked: u64,
    pub total: u128,
}

impl Coverage {
    pub fn exhaustive(&self) -> bool {
        self.checked as u128 >= self.total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub subject: String,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub coverage: Vec<Coverage>,
    pub caveat: String,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        ValidationReport {
            subject: subject.into(),
            violation_count: 0,
            violations: Vec::new(),
            coverage: Vec::new(),
            caveat: TRUNCATION_CAVEAT.to_string(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violation_count == 0
    }

    /// True when every block was checked exhaustively (no sampling).
    pub fn is_exhaustive(&self) -> bool {
        self.coverage.iter().all(Coverage::exhaustive)
    }

    pub fn push(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    pub fn extend(&mut self, vs: impl IntoIterator<Item = Violation>) {
        for v in vs {
            self.push(v);
        }
    }

    pub fn cover(&mut self, axiom: Axiom, indices: Vec<usize>, checked: u64, total: u128) {
        self.coverage.push(Coverage {
            axiom,
            indices,
            checked,
            total,
        });
    }

    /// Sorts the listed witnesses into canonical order.
    pub fn finish(mut self) -> Self {
        self.violations.sort();
        self
    }

    pub fn has_violation(&self, axiom: Axiom, indices: &[usize]) -> bool {
        self.violations
            .iter()
            .any(|v| v.axiom == axiom && v.indices == indices)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {} violations", self.subject, self.violation_count)?;
        for v in &self.violations {
            writeln!(f, "  {} {:?}: {}", v.axiom, v.indices, v.witness)?;
        }
        let sampled: Vec<_> = self.coverage.iter().filter(|c| !c.exhaustive()).collect();
        if !sampled.is_empty() {
            writeln!(f, "  sampled blocks (checked/total):")?;
            for c in sampled {
                writeln!(
                    f,
                    "    {} {:?}: {}/{}",
                    c.axiom, c.indices, c.checked, c.total
                )?;
            }
        }
        write!(f, "  note: {}", self.caveat)
    }
}
