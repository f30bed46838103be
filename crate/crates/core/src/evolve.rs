//! Semi-implicit time stepping for `u_t − Δu = λu − n(t,x) u^ρ`.
//!
//! One step solves
//!
//! ```text
//! (I + dt(−Δ_h) + dt·diag(n(t_{k+1}) u_k^{ρ−1})) u_{k+1} = (1 + dt λ) u_k
//! ```
//!
//! The matrix is a symmetric M-matrix whenever `n ≥ 0`, so the step is
//! order preserving in the right-hand side and keeps `u ≥ 0`.

use crate::error::{ConfigError, Error, Result};
use crate::geometry::{MovingSetSpec, NuProfile, SetShape};
use crate::grid::{cg_solve, Field, Grid, Mask, SpdOperator, Stencil, DEFAULT_SOLVE_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct EquationParams {
    pub lambda: f64,
    pub rho: f64,
    pub nu: NuProfile,
    pub moving_set: MovingSetSpec,
}

impl EquationParams {
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        if !self.lambda.is_finite() {
            return Err(ConfigError::invariant("equation", "lambda must be finite"));
        }
        if !(self.rho.is_finite() && self.rho > 1.0) {
            return Err(ConfigError::invariant(
                "equation",
                format!("rho = {} violates ρ > 1", self.rho),
            ));
        }
        self.nu.validate()?;
        self.moving_set.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub dt: f64,
    pub solve_tol: f64,
    /// Sup-norm above which a run stops and reports the cap hit.
    pub growth_cap: f64,
}

impl SchemeConfig {
    pub fn new(dt: f64, growth_cap: f64) -> Self {
        SchemeConfig {
            dt,
            solve_tol: DEFAULT_SOLVE_TOL,
            growth_cap,
        }
    }

    pub fn validate(&self, lambda: f64) -> std::result::Result<(), ConfigError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ConfigError::invariant("scheme", "dt must be > 0"));
        }
        if 1.0 + self.dt * lambda <= 0.0 {
            return Err(ConfigError::invariant("scheme", "requires 1 + dt·λ > 0"));
        }
        if self.dt * lambda.max(0.0) >= 0.5 {
            return Err(ConfigError::invariant(
                "scheme",
                format!("dt·λ = {} violates dt·max(λ,0) < 0.5", self.dt * lambda),
            ));
        }
        if !(self.solve_tol > 0.0 && self.solve_tol < 1.0) {
            return Err(ConfigError::invariant("scheme", "solve_tol must lie in (0, 1)"));
        }
        if !(self.growth_cap > 0.0) {
            return Err(ConfigError::invariant("scheme", "growth_cap must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepState {
    pub t: f64,
    pub u: Field,
}

/// Source of the nodal coefficient `n(t, ·)`.
pub trait Coefficient {
    fn n_field(&mut self, grid: &Grid, t: f64) -> &Field;
}

/// `n(t,x) = ν(d(x, K(t)))`, cached while the snapshot is unchanged.
#[derive(Debug, Clone)]
pub struct SetCoefficient<'a> {
    spec: &'a MovingSetSpec,
    nu: NuProfile,
    cache: Option<(SetShape, Field)>,
}

impl<'a> SetCoefficient<'a> {
    pub fn new(spec: &'a MovingSetSpec, nu: NuProfile) -> Self {
        SetCoefficient {
            spec,
            nu,
            cache: None,
        }
    }
}

/// Samples `n(t, ·)` for a snapshot on the grid mask.
pub fn n_field_for(grid: &Grid, snap: &SetShape, nu: &NuProfile) -> Field {
    Field::from_fn(grid, &grid.mask, |p| nu.eval(snap.distance(p)))
}

impl Coefficient for SetCoefficient<'_> {
    fn n_field(&mut self, grid: &Grid, t: f64) -> &Field {
        let snap = self.spec.snapshot(t);
        let stale = self.cache.as_ref().is_none_or(|(s, _)| *s != snap);
        if stale {
            let f = n_field_for(grid, &snap, &self.nu);
            self.cache = Some((snap, f));
        }
        &self.cache.as_ref().expect("cache filled above").1
    }
}

/// A time-independent coefficient.
#[derive(Debug, Clone)]
pub struct FixedCoefficient(pub Field);

impl Coefficient for FixedCoefficient {
    fn n_field(&mut self, _grid: &Grid, _t: f64) -> &Field {
        &self.0
    }
}

/// A coefficient given by a closure of time.
pub struct FnCoefficient<F: FnMut(f64) -> Field> {
    f: F,
    current: Option<Field>,
}

impl<F: FnMut(f64) -> Field> FnCoefficient<F> {
    pub fn new(f: F) -> Self {
        FnCoefficient { f, current: None }
    }
}

impl<F: FnMut(f64) -> Field> Coefficient for FnCoefficient<F> {
    fn n_field(&mut self, _grid: &Grid, t: f64) -> &Field {
        self.current = Some((self.f)(t));
        self.current.as_ref().expect("just set")
    }
}

/// Assembled linear-algebra context for stepping on one mask.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub mask: Mask,
    stencil: Stencil,
    pub lambda: f64,
    pub rho: f64,
    pub cfg: SchemeConfig,
}

/// One time step `u_k → u_{k+1}` given the end-of-step coefficient.
pub type StepKernel = fn(&Stepper, &Grid, &Field, &Field) -> Result<Field>;

impl Stepper {
    pub fn new(grid: &Grid, mask: &Mask, lambda: f64, rho: f64, cfg: SchemeConfig) -> Result<Self> {
        cfg.validate(lambda)?;
        if !(rho > 1.0) {
            return Err(ConfigError::invariant("equation", "rho must satisfy ρ > 1").into());
        }
        if !mask.is_subset_of(&grid.mask) || mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(Stepper {
            mask: mask.clone(),
            stencil: Stencil::new(grid, mask),
            lambda,
            rho,
            cfg,
        })
    }

    /// Advances `u` by one step with coefficient `n` sampled at the new time.
    pub fn advance(&self, grid: &Grid, u: &Field, n: &Field) -> Result<Field> {
        let dt = self.cfg.dt;
        let uk = self.stencil.gather(u);
        let nk = self.stencil.gather(n);
        let c: Vec<f64> = uk
            .iter()
            .zip(&nk)
            .map(|(&u, &n)| n * u.max(0.0).powf(self.rho - 1.0))
            .collect();
        let scale = (1.0 + dt * self.lambda) / dt;
        let rhs: Vec<f64> = uk.iter().map(|u| scale * u).collect();
        let op = SpdOperator {
            stencil: &self.stencil,
            shift: 1.0 / dt,
            c: Some(&c),
        };
        let (mut x, _) = cg_solve(&op, &rhs, Some(&uk), self.cfg.solve_tol)?;
        // the exact solution is nonnegative; clip solver round-off
        x.iter_mut().for_each(|v| *v = v.max(0.0));
        Ok(self.stencil.scatter(grid, &x))
    }
}

/// The default kernel.
pub fn lagged_step(stepper: &Stepper, grid: &Grid, u: &Field, n: &Field) -> Result<Field> {
    stepper.advance(grid, u, n)
}

/// One step of the scheme with `n` taken from the equation's moving set.
pub fn step(grid: &Grid, state: &StepState, params: &EquationParams, cfg: &SchemeConfig) -> Result<StepState> {
    if state.u.values.iter().any(|&v| v < 0.0) {
        return Err(ConfigError::invariant("initial", "state must be nonnegative").into());
    }
    let stepper = Stepper::new(grid, &grid.mask, params.lambda, params.rho, *cfg)?;
    let t = state.t + cfg.dt;
    let n = n_field_for(grid, &params.moving_set.snapshot(t), &params.nu);
    Ok(StepState {
        t,
        u: stepper.advance(grid, &state.u, &n)?,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputPlan {
    /// Record norms every this many steps (and at the first and last step).
    pub sample_every: usize,
    /// Keep a field snapshot at the first step reaching each of these times.
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    pub l2_norms: Vec<f64>,
    pub masses: Vec<f64>,
    pub snapshots: Vec<(f64, Field)>,
    pub cap_hit: Option<f64>,
    pub growth_cap: f64,
    pub final_u: Field,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: f64, u: &Field) {
        self.times.push(t);
        self.sup_norms.push(u.sup_norm());
        self.l2_norms.push(u.l2_norm());
        self.masses.push(u.mass());
    }

    /// Sup-norm of the last record at or before `t`.
    pub fn sup_at(&self, t: f64) -> Option<f64> {
        let k = self.times.partition_point(|&s| s <= t + 1e-9 * t.abs().max(1.0));
        k.checked_sub(1).map(|k| self.sup_norms[k])
    }
}

/// Number of whole steps of size `dt` fitting in `[t0, t_end]`.
pub fn step_count(t0: f64, t_end: f64, dt: f64) -> usize {
    ((t_end - t0) / dt + 1e-9).floor().max(0.0) as usize
}

/// Runs the scheme from `t0` for as many whole steps as fit before `t_end`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_with(
    grid: &Grid,
    stepper: &Stepper,
    coef: &mut dyn Coefficient,
    kernel: StepKernel,
    t0: f64,
    t_end: f64,
    u0: &Field,
    plan: &OutputPlan,
) -> Result<Trajectory> {
    if u0.values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(ConfigError::invariant("initial", "initial data must be finite and >= 0").into());
    }
    let dt = stepper.cfg.dt;
    let steps = step_count(t0, t_end, dt);
    let every = plan.sample_every.max(1);
    let mut u = u0.restricted(&stepper.mask);
    let mut tr = Trajectory {
        times: Vec::new(),
        sup_norms: Vec::new(),
        l2_norms: Vec::new(),
        masses: Vec::new(),
        snapshots: Vec::new(),
        cap_hit: None,
        growth_cap: stepper.cfg.growth_cap,
        final_u: u.clone(),
    };
    let mut pending: Vec<f64> = plan.snapshot_times.clone();
    pending.sort_by(f64::total_cmp);
    let mut next_snap = 0;
    let mut take_snapshots = |t: f64, u: &Field, tr: &mut Trajectory| {
        while next_snap < pending.len() && pending[next_snap] <= t + 1e-9 * dt {
            tr.snapshots.push((t, u.clone()));
            next_snap += 1;
        }
    };
    tr.push(t0, &u);
    take_snapshots(t0, &u, &mut tr);
    for k in 1..=steps {
        let t = t0 + k as f64 * dt;
        let n = coef.n_field(grid, t);
        u = kernel(stepper, grid, &u, n)?;
        let sup = u.sup_norm();
        if !sup.is_finite() {
            return Err(Error::NoConvergence {
                what: "time stepping (non-finite state)",
                iterations: k,
                residual: sup,
            });
        }
        take_snapshots(t, &u, &mut tr);
        if sup > stepper.cfg.growth_cap {
            tr.push(t, &u);
            tr.cap_hit = Some(t);
            break;
        }
        if k % every == 0 || k == steps {
            tr.push(t, &u);
        }
    }
    tr.final_u = u;
    Ok(tr)
}

/// Runs the scheme with `n` driven by the equation's moving set.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    grid: &Grid,
    mask: &Mask,
    params: &EquationParams,
    cfg: &SchemeConfig,
    t0: f64,
    t_end: f64,
    u0: &Field,
    plan: &OutputPlan,
) -> Result<Trajectory> {
    params.validate()?;
    let stepper = Stepper::new(grid, mask, params.lambda, params.rho, *cfg)?;
    let mut coef = SetCoefficient::new(&params.moving_set, params.nu);
    simulate_with(grid, &stepper, &mut coef, lagged_step, t0, t_end, u0, plan)
}

/// Runs a complete scenario on its own grid.
pub fn run(s: &crate::scenarios::Scenario) -> Result<Trajectory> {
    s.validate()?;
    let grid = s.build_grid()?;
    let u0 = s.initial_field(&grid)?;
    simulate(
        &grid,
        &grid.mask,
        &s.params,
        &s.scheme,
        s.t0,
        s.t_end,
        &u0,
        &s.outputs.plan(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainSpec, Point};

    fn linear_params() -> EquationParams {
        EquationParams {
            lambda: 5.0,
            rho: 2.0,
            nu: NuProfile::vanishing(),
            moving_set: MovingSetSpec::Static(SetShape::Empty),
        }
    }

    #[test]
    fn zero_is_an_equilibrium() {
        let g = Grid::new(DomainSpec::unit_square(), 12).unwrap();
        let state = StepState {
            t: 0.0,
            u: Field::zeros(&g),
        };
        let cfg = SchemeConfig::new(1e-3, 1e4);
        let next = step(&g, &state, &linear_params(), &cfg).unwrap();
        assert!(next.u.values.iter().all(|&v| v == 0.0));
        assert!((next.t - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn eigenfunction_multiplier_is_exact() {
        // sin(πx) sin(πy) is an exact eigenvector of the 5-point Laplacian
        let g = Grid::new(DomainSpec::unit_square(), 16).unwrap();
        let pi = std::f64::consts::PI;
        let mu = 8.0 / (g.h * g.h) * (pi * g.h / 2.0).sin().powi(2);
        let phi = Field::from_fn(&g, &g.mask, |p| (pi * p.x).sin() * (pi * p.y).sin());
        let p = linear_params();
        let mut cfg = SchemeConfig::new(2e-3, 1e9);
        cfg.solve_tol = 1e-14;
        let m = 20;
        let tr = simulate(&g, &g.mask, &p, &cfg, 0.0, m as f64 * cfg.dt, &phi, &OutputPlan::default()).unwrap();
        let factor = ((1.0 + cfg.dt * p.lambda) / (1.0 + cfg.dt * mu)).powi(m);
        for idx in g.mask.indices() {
            let want = factor * phi.values[idx];
            let got = tr.final_u.values[idx];
            assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn single_record_when_horizon_is_zero() {
        let g = Grid::new(DomainSpec::unit_square(), 10).unwrap();
        let u0 = Field::from_fn(&g, &g.mask, |_| 1.0);
        let tr = simulate(
            &g,
            &g.mask,
            &linear_params(),
            &SchemeConfig::new(1e-3, 1e4),
            0.0,
            0.0,
            &u0,
            &OutputPlan::default(),
        )
        .unwrap();
        assert_eq!(tr.len(), 1);
    }

    #[test]
    fn rejects_large_steps() {
        let cfg = SchemeConfig::new(0.1, 1e4);
        assert!(cfg.validate(10.0).is_err());
        assert!(SchemeConfig::new(0.1, 1e4).validate(-20.0).is_err());
    }

    #[test]
    fn cap_hit_stops_the_run() {
        let g = Grid::new(DomainSpec::unit_square(), 10).unwrap();
        let u0 = Field::from_fn(&g, &g.mask, |p| (p.x * (1.0 - p.x) * p.y * (1.0 - p.y)).max(0.0));
        let mut p = linear_params();
        p.lambda = 100.0;
        let cfg = SchemeConfig::new(1e-3, 10.0 * u0.sup_norm());
        let tr = simulate(&g, &g.mask, &p, &cfg, 0.0, 5.0, &u0, &OutputPlan::default()).unwrap();
        let hit = tr.cap_hit.expect("growth beyond the cap");
        assert!(hit < 5.0);
        assert!(*tr.sup_norms.last().unwrap() > cfg.growth_cap);
        assert_eq!(tr.times.last().copied(), Some(hit));
    }

    #[test]
    fn coefficient_cache_tracks_snapshots() {
        let g = Grid::new(DomainSpec::unit_square(), 16).unwrap();
        let spec = MovingSetSpec::Jumping {
            k0: SetShape::ball(Point::new(0.3, 0.5), 0.1),
            k1: SetShape::ball(Point::new(0.7, 0.5), 0.1),
            period: 1.0,
            t1: 0.5,
        };
        let mut c = SetCoefficient::new(&spec, NuProfile::indicator(2.0));
        let a = c.n_field(&g, 0.25).clone();
        let b = c.n_field(&g, 0.75).clone();
        assert_ne!(a, b);
        let idx = g.nearest_node(Point::new(0.3, 0.5));
        assert_eq!(a.values[idx], 0.0);
        assert_eq!(b.values[idx], 2.0);
    }
}
