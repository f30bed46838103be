//! Prediction versus simulation.

use std::fmt;

use super::{classify, predict, ClassifyConfig, Prediction, Scenario, Verdict, VerdictKind};
use crate::error::Result;
use crate::evolve::{run, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// The simulation reproduces the predicted behavior.
    Consistent,
    /// The simulation shows the opposite behavior.
    Violation,
    /// No criterion applies; the simulation is exploratory.
    Undecided,
    /// A criterion applies but the run was too short or too coarse to tell.
    Unresolved,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Consistent => "CONSISTENT",
            Status::Violation => "VIOLATION",
            Status::Undecided => "UNDECIDED",
            Status::Unresolved => "UNRESOLVED",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone)]
pub struct CrossCheckReport {
    pub label: String,
    pub prediction: Prediction,
    pub verdict: Verdict,
    pub status: Status,
    pub trajectory: Trajectory,
}

impl CrossCheckReport {
    /// Runs without an applicable criterion only document behavior.
    pub fn exploratory(&self) -> bool {
        self.status == Status::Undecided
    }

    pub fn predicted(&self) -> Option<VerdictKind> {
        self.prediction.verdict()
    }
}

pub fn status_of(predicted: Option<VerdictKind>, observed: VerdictKind) -> Status {
    match predicted {
        None => Status::Undecided,
        Some(p) => {
            if observed == VerdictKind::Inconclusive {
                Status::Unresolved
            } else if p.is_bounded() == observed.is_bounded() {
                Status::Consistent
            } else {
                Status::Violation
            }
        }
    }
}

pub fn cross_check(s: &Scenario) -> Result<CrossCheckReport> {
    let prediction = predict(s)?;
    let trajectory = run(s)?;
    let verdict = classify(&trajectory, &ClassifyConfig::default());
    let status = status_of(prediction.verdict(), verdict.kind);
    Ok(CrossCheckReport {
        label: s.label.clone(),
        prediction,
        verdict,
        status,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_table() {
        use VerdictKind::*;
        assert_eq!(status_of(None, GrowUp), Status::Undecided);
        assert_eq!(status_of(Some(Bounded), Decay), Status::Consistent);
        assert_eq!(status_of(Some(Bounded), GrowUp), Status::Violation);
        assert_eq!(status_of(Some(GrowUp), GrowUp), Status::Consistent);
        assert_eq!(status_of(Some(GrowUp), Bounded), Status::Violation);
        assert_eq!(status_of(Some(GrowUp), Inconclusive), Status::Unresolved);
    }
}
