//! Heuristic classification of a finite trajectory.
//!
//! * `GrowUp` when the run hit its growth cap and the sup-norm was
//!   nondecreasing over the tail of the records.
//! * `Decay` when the final sup-norm fell below `1e-6` of the initial one.
//! * `Bounded` when the maxima of the last two trailing windows agree to
//!   within the drift tolerance and stay below a tenth of the cap.
//! * `Inconclusive` otherwise.

use std::fmt;

use crate::evolve::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Decay,
    Bounded,
    GrowUp,
    Inconclusive,
}

impl VerdictKind {
    /// Decay is a special case of boundedness.
    pub fn is_bounded(self) -> bool {
        matches!(self, VerdictKind::Decay | VerdictKind::Bounded)
    }

    pub fn label(self) -> &'static str {
        match self {
            VerdictKind::Decay => "DECAY",
            VerdictKind::Bounded => "BOUNDED",
            VerdictKind::GrowUp => "GROWUP",
            VerdictKind::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Largest sup-norm over the trailing windows, for bounded runs.
    pub bound_estimate: Option<f64>,
    pub cap_hit_time: Option<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    /// Fraction of the records forming one trailing window.
    pub window_fraction: f64,
    /// Relative drift allowed between consecutive window maxima.
    pub drift_tol: f64,
    /// Final/initial sup-norm ratio counted as decay.
    pub decay_ratio: f64,
    /// Bounded runs must stay below this fraction of the growth cap.
    pub cap_fraction: f64,
    pub min_records: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            window_fraction: 0.2,
            drift_tol: 0.01,
            decay_ratio: 1e-6,
            cap_fraction: 0.1,
            min_records: 50,
        }
    }
}

pub fn classify(tr: &Trajectory, cfg: &ClassifyConfig) -> Verdict {
    let n = tr.sup_norms.len();
    let inconclusive = |reason: String| Verdict {
        kind: VerdictKind::Inconclusive,
        bound_estimate: None,
        cap_hit_time: tr.cap_hit,
        reason,
    };
    if n < 2 {
        return inconclusive(format!("only {n} records"));
    }
    let w = ((n as f64 * cfg.window_fraction).ceil() as usize).max(2).min(n);
    if let Some(t_cap) = tr.cap_hit {
        let tail = &tr.sup_norms[n - w..];
        let monotone = tail.windows(2).all(|p| p[1] >= p[0] * (1.0 - 1e-12));
        if monotone {
            return Verdict {
                kind: VerdictKind::GrowUp,
                bound_estimate: None,
                cap_hit_time: Some(t_cap),
                reason: format!("sup-norm exceeded the cap {:e} at t = {t_cap}", tr.growth_cap),
            };
        }
        return inconclusive("cap hit after a non-monotone tail".into());
    }
    let first = tr.sup_norms[0];
    let last = tr.sup_norms[n - 1];
    if first > 0.0 && last < cfg.decay_ratio * first {
        return Verdict {
            kind: VerdictKind::Decay,
            bound_estimate: Some(tr.sup_norms.iter().copied().fold(0.0, f64::max)),
            cap_hit_time: None,
            reason: format!("sup-norm decayed to {last:e}"),
        };
    }
    if n < cfg.min_records || 2 * w > n {
        return inconclusive(format!("{n} records are too few to compare windows"));
    }
    let max_of = |s: &[f64]| s.iter().copied().fold(0.0, f64::max);
    let m_prev = max_of(&tr.sup_norms[n - 2 * w..n - w]);
    let m_last = max_of(&tr.sup_norms[n - w..]);
    let level = m_prev.max(m_last);
    let drift = if level > 0.0 {
        (m_last - m_prev).abs() / level
    } else {
        0.0
    };
    if drift < cfg.drift_tol && level < cfg.cap_fraction * tr.growth_cap {
        return Verdict {
            kind: VerdictKind::Bounded,
            bound_estimate: Some(level),
            cap_hit_time: None,
            reason: format!("trailing-window maxima drift {drift:.2e} at level {level:.4e}"),
        };
    }
    inconclusive(format!(
        "trailing-window drift {drift:.2e} at level {level:.4e} (cap {:e})",
        tr.growth_cap
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::grid::{Field, Grid};

    fn traj(sups: Vec<f64>, cap_hit: Option<f64>) -> Trajectory {
        let g = Grid::new(DomainSpec::unit_square(), 4).unwrap();
        let n = sups.len();
        Trajectory {
            times: (0..n).map(|k| k as f64).collect(),
            l2_norms: sups.clone(),
            masses: sups.clone(),
            sup_norms: sups,
            snapshots: Vec::new(),
            cap_hit,
            growth_cap: 1e4,
            final_u: Field::zeros(&g),
        }
    }

    #[test]
    fn plateau_is_bounded() {
        let s: Vec<f64> = (0..100).map(|k| 5.0 - (-(k as f64) / 5.0).exp()).collect();
        let v = classify(&traj(s, None), &ClassifyConfig::default());
        assert_eq!(v.kind, VerdictKind::Bounded);
        assert!((v.bound_estimate.unwrap() - 5.0).abs() < 1e-3);
    }

    #[test]
    fn oscillating_plateau_is_bounded() {
        let s: Vec<f64> = (0..200).map(|k| 3.0 + (k as f64 * 0.7).sin()).collect();
        assert_eq!(classify(&traj(s, None), &ClassifyConfig::default()).kind, VerdictKind::Bounded);
    }

    #[test]
    fn cap_hit_with_monotone_tail_is_growup() {
        let s: Vec<f64> = (0..60).map(|k| (k as f64 * 0.2).exp()).collect();
        let v = classify(&traj(s, Some(59.0)), &ClassifyConfig::default());
        assert_eq!(v.kind, VerdictKind::GrowUp);
        assert_eq!(v.cap_hit_time, Some(59.0));
    }

    #[test]
    fn slow_growth_without_cap_is_inconclusive() {
        let s: Vec<f64> = (0..100).map(|k| 1.0 + k as f64).collect();
        assert_eq!(
            classify(&traj(s, None), &ClassifyConfig::default()).kind,
            VerdictKind::Inconclusive
        );
    }

    #[test]
    fn decay_is_detected() {
        let s: Vec<f64> = (0..100).map(|k| (-(k as f64) / 5.0).exp()).collect();
        let v = classify(&traj(s, None), &ClassifyConfig::default());
        assert_eq!(v.kind, VerdictKind::Decay);
        assert!(v.kind.is_bounded());
    }
}
