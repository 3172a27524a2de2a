use serde::Serialize;

use crate::compose::ProductEffectRay;
use crate::vector::GptVector;

/// Outcome of a cone or validity test.
///
/// `margin` is the smallest value of the tested functionals that the
/// procedure saw (for exact tests, the true minimum).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum MembershipVerdict {
    Accepted { margin: f64 },
    Rejected { margin: f64, witness: Witness },
    /// A non-exhaustive search found no violation.
    InconclusiveAccept { margin: f64, reason: String },
}

/// What a rejection violated.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Inequality { description: String, value: f64 },
    Eigenvalue { value: f64 },
    Effect { effect: GptVector, value: f64 },
    ProductRay { ray: ProductEffectRay, value: f64 },
    State { state: GptVector, value: f64 },
    Condition { description: String, deviation: f64 },
}

impl MembershipVerdict {
    pub fn margin(&self) -> f64 {
        match self {
            MembershipVerdict::Accepted { margin }
            | MembershipVerdict::Rejected { margin, .. }
            | MembershipVerdict::InconclusiveAccept { margin, .. } => *margin,
        }
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self, MembershipVerdict::Accepted { .. })
    }

    pub fn is_rejected(&self) -> bool {
        matches!(self, MembershipVerdict::Rejected { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, MembershipVerdict::InconclusiveAccept { .. })
    }

    /// Accepted, or at least not refuted.
    pub fn not_rejected(&self) -> bool {
        !self.is_rejected()
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            MembershipVerdict::Rejected { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            MembershipVerdict::Accepted { .. } => "accepted",
            MembershipVerdict::Rejected { .. } => "rejected",
            MembershipVerdict::InconclusiveAccept { .. } => "inconclusive-accept",
        }
    }

    /// Combines two verdicts over disjoint sets of conditions.
    pub(crate) fn and(self, other: MembershipVerdict) -> MembershipVerdict {
        use MembershipVerdict::*;
        let margin = self.margin().min(other.margin());
        match (self, other) {
            (Rejected { witness, margin: a }, Rejected { margin: b, .. }) if a <= b => {
                Rejected { margin, witness }
            }
            (Rejected { .. }, Rejected { witness, .. }) => Rejected { margin, witness },
            (Rejected { witness, .. }, _) | (_, Rejected { witness, .. }) => Rejected { margin, witness },
            (InconclusiveAccept { reason, .. }, _) | (_, InconclusiveAccept { reason, .. }) => {
                InconclusiveAccept { margin, reason }
            }
            (Accepted { .. }, Accepted { .. }) => Accepted { margin },
        }
    }
}
