//! Machine-readable residual reports.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    /// Identity disagreed beyond tolerance but is reported rather than
    /// failed (used by cross-checks that adjudicate printed formulas).
    Flagged,
}

/// Residual summary of one named identity over the sampled points.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub points: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl CheckReport {
    pub fn from_max(name: &str, points: usize, max_residual: f64, tolerance: f64) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            points,
            max_residual,
            tolerance,
            verdict: if max_residual < tolerance { Verdict::Pass } else { Verdict::Fail },
        }
    }

    pub fn with_verdict(mut self, verdict: Verdict) -> CheckReport {
        self.verdict = verdict;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub jet_order: usize,
}

/// Full verification report; field order is the serialization order, which
/// together with deterministic sampling makes reports byte-stable.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub manifold: String,
    pub environment: Environment,
    pub checks: Vec<CheckReport>,
    pub overall: Verdict,
}

impl Report {
    pub fn overall_of(checks: &[CheckReport]) -> Verdict {
        if checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else {
            Verdict::Pass
        }
    }
}
