//! Initial-data independence of the long-time behavior.
//!
//! After a delay both solutions are positive on the mask, so
//! `α u ≤ v ≤ β u` at that time with `α = min v/u`, `β = max v/u`. For the
//! nonlinear problem the comparison principle and the sub-homogeneity of
//! the semiflow propagate the sandwich with `α ∧ 1` and `β ∨ 1`; for the
//! linear problem the raw ratios propagate exactly.
//!
//! At boundary-adjacent nodes the one-sided difference towards the zero
//! boundary value is `u/h`, so its ratio coincides with the nodal ratio.

use super::Scenario;
use crate::error::{ConfigError, Error, Result};
use crate::evolve::{lagged_step, step_count, Coefficient, SetCoefficient, Stepper};
use crate::grid::Field;

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    /// Ratio bounds at `t0 + delta`.
    pub alpha: f64,
    pub beta: f64,
    /// Bounds actually propagated.
    pub alpha_used: f64,
    pub beta_used: f64,
    /// `(t, lower violation, upper violation)`, relative to the sup-norms.
    pub samples: Vec<(f64, f64, f64)>,
    pub slack: f64,
}

impl IndependenceReport {
    pub fn max_violation(&self) -> f64 {
        self.samples
            .iter()
            .map(|&(_, lo, hi)| lo.max(hi))
            .fold(0.0, f64::max)
    }

    pub fn holds(&self) -> bool {
        self.max_violation() <= self.slack
    }
}

pub const SANDWICH_SLACK: f64 = 1e-8;

/// Evolves `u0` and `v0` together, fixes the ratio bounds at `t0 + delta`
/// and checks the sandwich at ten equally spaced later steps up to `t_end`.
pub fn initial_data_independence(s: &Scenario, u0: &Field, v0: &Field, delta: f64) -> Result<IndependenceReport> {
    s.validate()?;
    if !(delta > 0.0 && s.t0 + delta < s.t_end) {
        return Err(ConfigError::invariant("time", "requires 0 < delta < t_end − t0").into());
    }
    let grid = s.build_grid()?;
    let mut cfg = s.scheme;
    cfg.growth_cap = f64::INFINITY;
    let stepper = Stepper::new(&grid, &grid.mask, s.params.lambda, s.params.rho, cfg)?;
    let mut coef = SetCoefficient::new(&s.params.moving_set, s.params.nu);
    let dt = cfg.dt;
    let k_delay = step_count(s.t0, s.t0 + delta, dt).max(1);
    let k_end = step_count(s.t0, s.t_end, dt);
    if k_end < k_delay + 10 {
        return Err(ConfigError::invariant("time", "too few steps after the delay for ten samples").into());
    }
    let sample_steps: Vec<usize> = (1..=10).map(|j| k_delay + j * (k_end - k_delay) / 10).collect();
    let linear = s.params.nu.is_vanishing();
    let mut u = u0.restricted(&grid.mask);
    let mut v = v0.restricted(&grid.mask);
    let mut bounds = None;
    let mut samples = Vec::with_capacity(10);
    for k in 1..=k_end {
        let t = s.t0 + k as f64 * dt;
        let n = coef.n_field(&grid, t);
        u = lagged_step(&stepper, &grid, &u, n)?;
        v = lagged_step(&stepper, &grid, &v, n)?;
        if k == k_delay {
            let mut alpha = f64::INFINITY;
            let mut beta: f64 = 0.0;
            for idx in grid.mask.indices() {
                if !(u.values[idx] > 0.0) {
                    return Err(Error::VanishingRatio { node: idx });
                }
                let q = v.values[idx] / u.values[idx];
                alpha = alpha.min(q);
                beta = beta.max(q);
            }
            let (a, b) = if linear {
                (alpha, beta)
            } else {
                (alpha.min(1.0), beta.max(1.0))
            };
            bounds = Some((alpha, beta, a, b));
        }
        if let Some((_, _, a, b)) = bounds {
            if sample_steps.contains(&k) {
                let scale = u.sup_norm().max(v.sup_norm()).max(f64::MIN_POSITIVE);
                let mut lo: f64 = 0.0;
                let mut hi: f64 = 0.0;
                for idx in grid.mask.indices() {
                    lo = lo.max((a * u.values[idx] - v.values[idx]) / scale);
                    hi = hi.max((v.values[idx] - b * u.values[idx]) / scale);
                }
                samples.push((t, lo, hi));
            }
        }
    }
    let (alpha, beta, alpha_used, beta_used) = bounds.unwrap_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN));
    Ok(IndependenceReport {
        alpha,
        beta,
        alpha_used,
        beta_used,
        samples,
        slack: SANDWICH_SLACK,
    })
}
