//! Mechanical evaluation of the boundedness and grow-up criteria.
//!
//! Every check works on the declarative moving-set description and on
//! spectral data of grid masks; nothing here looks at a simulated field.
//! The checks are:
//!
//! * [`Theorem::SupEnvelope`]: `λ < λ₀(K^sup_{τ₀})` for some `τ₀` gives
//!   bounded solutions.
//! * [`Theorem::InfEnvelope`]: `λ > λ₀(K^inf_{τ₀})` gives grow-up.
//! * [`Theorem::Intermittent`]: `K(t)` empty on a periodic family of
//!   intervals of length `η`, where `n ≥ ν₀`, gives bounded solutions.
//! * [`Theorem::MovingNeighborhood`]: `λ` below `inf_t λ₁(Ω_δ(t))`, with
//!   `Ω_δ(t)` the `δ`-dilation of the union of `K(s)` over `|s − t| ≤ τ₀`.
//! * [`Theorem::SeparatedJumps`]: piecewise-constant sets whose values on
//!   either side of each jump are a positive distance apart give bounded
//!   solutions for every `λ`.
//! * [`Theorem::OverlapChain`]: a chain of congruent balls `E_i` inside
//!   `K(s)` on windows of length at least the waiting time `τ`, with
//!   consecutive balls overlapping in `B(x_i, 2r)`, gives grow-up when
//!   `λ > λ₁(E₀)`.
//! * [`Theorem::NestedAlternation`]: alternation between `K₁ ⊃ K₀` with
//!   `λ₀(K₁) < λ < λ₀(K₀)`, long `K₁` phases and short `K₀` phases gives
//!   grow-up.

use std::f64::consts::{PI, TAU};
use std::fmt;

use super::{Scenario, VerdictKind};
use crate::error::{Error, Result};
use crate::geometry::{
    default_sample_dt, k_inf, k_sup, union_over_interval, AngleSchedule, DomainSpec, MovingSetSpec,
    PathSchedule, Point, RadiusSchedule, SetShape,
};
use crate::grid::{Grid, Mask};
use crate::oracles::{tau_unbounded, w_inf, TauInputs};
use crate::spectral::{
    default_deltas, lambda0_of_mask, lambda0_of_set, lambda1_of_mask, principal_eigenpair,
    second_eigenvalue, Lambda0Estimate, DEFAULT_EIGEN_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    SupEnvelope,
    InfEnvelope,
    Intermittent,
    MovingNeighborhood,
    SeparatedJumps,
    OverlapChain,
    NestedAlternation,
    /// Placeholder row when no criterion applies.
    None,
}

impl Theorem {
    pub fn label(self) -> &'static str {
        match self {
            Theorem::SupEnvelope => "sup-envelope",
            Theorem::InfEnvelope => "inf-envelope",
            Theorem::Intermittent => "intermittent",
            Theorem::MovingNeighborhood => "moving-neighborhood",
            Theorem::SeparatedJumps => "separated-jumps",
            Theorem::OverlapChain => "overlap-chain",
            Theorem::NestedAlternation => "nested-alternation",
            Theorem::None => "none",
        }
    }

    /// The verdict a check predicts when its hypotheses hold.
    pub fn conclusion(self) -> VerdictKind {
        match self {
            Theorem::SupEnvelope
            | Theorem::Intermittent
            | Theorem::MovingNeighborhood
            | Theorem::SeparatedJumps => VerdictKind::Bounded,
            Theorem::InfEnvelope | Theorem::OverlapChain | Theorem::NestedAlternation => {
                VerdictKind::GrowUp
            }
            Theorem::None => VerdictKind::Inconclusive,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Outcome of one criterion; `predicted` is `Inconclusive` unless the
/// hypotheses hold.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck {
    pub theorem: Theorem,
    pub hypotheses_hold: bool,
    pub predicted: VerdictKind,
    /// Measured quantities in evaluation order.
    pub details: Vec<(&'static str, f64)>,
    pub note: String,
}

impl TheoremCheck {
    fn new(theorem: Theorem, holds: bool, details: Vec<(&'static str, f64)>, note: impl Into<String>) -> Self {
        TheoremCheck {
            theorem,
            hypotheses_hold: holds,
            predicted: if holds {
                theorem.conclusion()
            } else {
                VerdictKind::Inconclusive
            },
            details,
            note: note.into(),
        }
    }

    fn not_applicable(theorem: Theorem, note: impl Into<String>) -> Self {
        TheoremCheck::new(theorem, false, Vec::new(), note)
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    /// `key=value` pairs joined by spaces.
    pub fn details_text(&self) -> String {
        self.details
            .iter()
            .map(|(k, v)| format!("{k}={}", fmt_num(*v)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub(crate) fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.6e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub checks: Vec<TheoremCheck>,
}

impl Prediction {
    pub fn fired(&self) -> impl Iterator<Item = &TheoremCheck> {
        self.checks.iter().filter(|c| c.hypotheses_hold)
    }

    /// The common conclusion of the fired checks; `None` when none fired.
    pub fn verdict(&self) -> Option<VerdictKind> {
        self.fired().map(|c| c.predicted).next()
    }

    pub fn check(&self, theorem: Theorem) -> Option<&TheoremCheck> {
        self.checks.iter().find(|c| c.theorem == theorem)
    }
}

struct Ctx<'a> {
    s: &'a Scenario,
    grid: Grid,
    deltas: Vec<f64>,
    lambda: f64,
}

impl Ctx<'_> {
    fn lambda0(&self, k: &SetShape) -> Result<Lambda0Estimate> {
        lambda0_of_set(&self.grid, k, &self.deltas, self.s.predict.lambda0_cap)
    }

    fn lambda0_mask(&self, m: &Mask) -> Result<Lambda0Estimate> {
        lambda0_of_mask(&self.grid, m, &self.deltas, self.s.predict.lambda0_cap)
    }

    fn spec(&self) -> &MovingSetSpec {
        &self.s.params.moving_set
    }
}

/// Evaluates every criterion on the scenario's own grid.
///
/// Fails with [`Error::Contradiction`] if a boundedness and a grow-up
/// criterion both fire.
pub fn predict(s: &Scenario) -> Result<Prediction> {
    s.validate()?;
    let grid = s.build_grid()?;
    let deltas = default_deltas(&grid);
    let ctx = Ctx {
        s,
        grid,
        deltas,
        lambda: s.params.lambda,
    };
    let checks = if s.params.nu.is_vanishing() {
        linear_checks(&ctx)?
    } else {
        let mut checks = envelope_checks(&ctx)?;
        checks.push(intermittent_check(&ctx)?);
        checks.push(moving_neighborhood_check(&ctx)?);
        checks.push(separated_jumps_check(&ctx));
        checks.push(overlap_chain_check(&ctx)?);
        checks.push(nested_alternation_check(&ctx)?);
        checks
    };
    let out = Prediction { checks };
    let bounded: Vec<_> = out
        .fired()
        .filter(|c| c.predicted.is_bounded())
        .map(|c| c.theorem.label())
        .collect();
    let growup: Vec<_> = out
        .fired()
        .filter(|c| c.predicted == VerdictKind::GrowUp)
        .map(|c| c.theorem.label())
        .collect();
    if !bounded.is_empty() && !growup.is_empty() {
        return Err(Error::Contradiction(format!(
            "{} predict bounded while {} predict grow-up on '{}'",
            bounded.join(", "),
            growup.join(", "),
            s.label
        )));
    }
    Ok(out)
}

/// With `n ≡ 0` the whole closure of Ω is degenerate and `λ₀ = λ₁^Ω`.
fn linear_checks(ctx: &Ctx) -> Result<Vec<TheoremCheck>> {
    let l1 = lambda1_of_mask(&ctx.grid, &ctx.grid.mask, DEFAULT_EIGEN_TOL)?;
    let details = vec![("lambda", ctx.lambda), ("lambda1_domain", l1)];
    Ok(vec![
        TheoremCheck::new(
            Theorem::SupEnvelope,
            ctx.lambda < l1,
            details.clone(),
            "n vanishes identically: K(t) is the closure of the domain",
        ),
        TheoremCheck::new(
            Theorem::InfEnvelope,
            ctx.lambda > l1,
            details,
            "n vanishes identically: K(t) is the closure of the domain",
        ),
    ])
}

/// Candidate starting times `τ₀` for the envelopes: up to mid-horizon.
fn envelope_times(s: &Scenario) -> Vec<f64> {
    let span = s.t_end - s.t0;
    (0..=4).map(|k| s.t0 + span * k as f64 / 8.0).collect()
}

/// Sup over `t ≥ tau0` of a radius schedule.
fn sup_radius_after(r: &RadiusSchedule, tau0: f64) -> f64 {
    match *r {
        RadiusSchedule::Constant(v) => v,
        RadiusSchedule::Grow { r0 } => r0,
        RadiusSchedule::Decay { r0 } => r0 / (tau0.max(0.0) + 1.0),
        RadiusSchedule::AbsSine { r0, omega } => {
            if omega == 0.0 {
                r0
            } else {
                2.0 * r0
            }
        }
    }
}

fn union_of(parts: Vec<SetShape>) -> SetShape {
    let mut out: Vec<SetShape> = Vec::new();
    for p in parts {
        if !p.is_empty() && !out.contains(&p) {
            out.push(p);
        }
    }
    match out.len() {
        0 => SetShape::Empty,
        1 => out.pop().unwrap_or(SetShape::Empty),
        _ => SetShape::Union(out),
    }
}

/// `K^sup_{τ₀}` as a shape, and whether it is exact rather than sampled.
fn sup_envelope(spec: &MovingSetSpec, tau0: f64, horizon: f64) -> (SetShape, bool) {
    match spec {
        MovingSetSpec::Static(s) => (s.clone(), true),
        MovingSetSpec::RadiusBall { center, radius } => (
            SetShape::ball(*center, sup_radius_after(radius, tau0)),
            true,
        ),
        MovingSetSpec::RotatingSector { omega, .. } => {
            let span = if *omega == 0.0 { 0.0 } else { TAU / omega.abs() };
            (union_over_interval(spec, tau0, tau0 + span, default_sample_dt(0.0)), true)
        }
        MovingSetSpec::Jumping { k0, k1, .. } => (union_of(vec![k0.clone(), k1.clone()]), true),
        MovingSetSpec::Translating { .. } => match spec.period() {
            Some(0.0) => (spec.snapshot(tau0), true),
            Some(p) => (k_sup(spec, tau0, tau0 + p, sample_dt_for(p)), false),
            None => (k_sup(spec, tau0, horizon, sample_dt_for(horizon - tau0)), false),
        },
    }
}

fn sample_dt_for(span: f64) -> f64 {
    default_sample_dt(0.0).min((span / 200.0).max(1e-4))
}

enum InfSet {
    Mask(Mask),
    /// A point or the empty set: `λ₀ = ∞`.
    Negligible(&'static str),
}

/// `K^inf_{τ₀}` as a node set.
fn inf_envelope(grid: &Grid, spec: &MovingSetSpec, tau0: f64, horizon: f64) -> InfSet {
    match spec {
        MovingSetSpec::Static(s) => InfSet::Mask(grid.mask_from_shape(s)),
        MovingSetSpec::RadiusBall { center, radius } => {
            let r = radius.min_radius_after(tau0.max(0.0));
            if r <= 0.0 {
                InfSet::Negligible("the radius tends to zero")
            } else {
                InfSet::Mask(grid.mask_from_shape(&SetShape::ball(*center, r)))
            }
        }
        MovingSetSpec::RotatingSector {
            center,
            r0,
            theta0,
            theta1,
            omega,
        } => {
            if *omega == 0.0 {
                InfSet::Mask(grid.mask_from_shape(&SetShape::Sector {
                    center: *center,
                    r0: *r0,
                    theta0: *theta0,
                    theta1: *theta1,
                }))
            } else {
                InfSet::Negligible("a rotating sector only keeps its apex")
            }
        }
        MovingSetSpec::Jumping { k0, k1, .. } => {
            let mut m = grid.mask_from_shape(k0);
            m.intersect_with(&grid.mask_from_shape(k1));
            InfSet::Mask(m)
        }
        MovingSetSpec::Translating { .. } => match spec.period() {
            Some(0.0) => InfSet::Mask(grid.mask_from_shape(&spec.snapshot(tau0))),
            Some(p) => InfSet::Mask(k_inf(grid, spec, tau0, tau0 + p, sample_dt_for(p))),
            None => InfSet::Mask(k_inf(grid, spec, tau0, horizon, sample_dt_for(horizon - tau0))),
        },
    }
}

fn envelope_checks(ctx: &Ctx) -> Result<Vec<TheoremCheck>> {
    let spec = ctx.spec();
    let horizon = ctx.s.t_end;
    let mut best_sup: Option<(f64, f64, bool)> = None;
    let mut best_inf: Option<(f64, f64)> = None;
    let mut negligible: Option<&'static str> = None;
    let mut last_shape: Option<(SetShape, f64)> = None;
    let mut last_mask: Option<(Mask, f64)> = None;
    for tau0 in envelope_times(ctx.s) {
        let (shape, exact) = sup_envelope(spec, tau0, horizon);
        let sup_value = if shape.is_empty() {
            f64::INFINITY
        } else {
            match &last_shape {
                Some((s, v)) if *s == shape => *v,
                _ => ctx.lambda0(&shape)?.value(),
            }
        };
        last_shape = Some((shape, sup_value));
        if best_sup.is_none_or(|(_, v, _)| sup_value > v) {
            best_sup = Some((tau0, sup_value, exact));
        }

        let inf_value = match inf_envelope(&ctx.grid, spec, tau0, horizon) {
            InfSet::Negligible(why) => {
                negligible = Some(why);
                f64::INFINITY
            }
            InfSet::Mask(m) => match &last_mask {
                Some((pm, v)) if *pm == m => *v,
                _ => {
                    let v = ctx.lambda0_mask(&m)?.value();
                    last_mask = Some((m, v));
                    v
                }
            },
        };
        if best_inf.is_none_or(|(_, v)| inf_value < v) {
            best_inf = Some((tau0, inf_value));
        }
    }
    let (tau_s, l0_sup, exact) = best_sup.unwrap_or((ctx.s.t0, f64::INFINITY, true));
    let (tau_i, l0_inf) = best_inf.unwrap_or((ctx.s.t0, f64::INFINITY));
    let sampled_note = if exact {
        "envelope in closed form"
    } else {
        "envelope sampled over one period or the horizon"
    };
    Ok(vec![
        TheoremCheck::new(
            Theorem::SupEnvelope,
            ctx.lambda < l0_sup,
            vec![("lambda", ctx.lambda), ("tau0", tau_s), ("lambda0_sup", l0_sup)],
            sampled_note,
        ),
        TheoremCheck::new(
            Theorem::InfEnvelope,
            ctx.lambda > l0_inf,
            vec![("lambda", ctx.lambda), ("tau0", tau_i), ("lambda0_inf", l0_inf)],
            if l0_inf.is_infinite() {
                negligible.unwrap_or("K^inf has infinite characteristic value")
            } else {
                sampled_note
            },
        ),
    ])
}

fn intermittent_check(ctx: &Ctx) -> Result<TheoremCheck> {
    let nu0 = ctx.s.params.nu.n_empty;
    let (eta, xi) = match ctx.spec() {
        MovingSetSpec::Static(s) if s.is_empty() => {
            (f64::INFINITY, 0.0)
        }
        MovingSetSpec::Jumping { k0, k1, period, t1 } => match (k0.is_empty(), k1.is_empty()) {
            (true, false) => (*t1, period - t1),
            (false, true) => (period - t1, *t1),
            (true, true) => (*period, 0.0),
            (false, false) => {
                return Ok(TheoremCheck::not_applicable(
                    Theorem::Intermittent,
                    "K(t) is never empty",
                ))
            }
        },
        _ => {
            return Ok(TheoremCheck::not_applicable(
                Theorem::Intermittent,
                "no periodic empty phases",
            ))
        }
    };
    let mut details = vec![("lambda", ctx.lambda), ("eta", eta), ("xi", xi), ("nu0", nu0)];
    if ctx.lambda > 0.0 && eta.is_finite() {
        details.push(("w_inf_eta", w_inf(ctx.lambda, nu0, ctx.s.params.rho, eta)?));
    }
    Ok(TheoremCheck::new(
        Theorem::Intermittent,
        eta > 0.0,
        details,
        "n equals n_empty on the empty phases",
    ))
}

/// Upper bound on how fast points of `K(t)` move.
fn motion_speed(spec: &MovingSetSpec) -> f64 {
    match spec {
        MovingSetSpec::Static(_) | MovingSetSpec::Jumping { .. } => 0.0,
        MovingSetSpec::RadiusBall { radius, .. } => match *radius {
            RadiusSchedule::Constant(_) => 0.0,
            RadiusSchedule::Grow { r0 } | RadiusSchedule::Decay { r0 } => r0,
            RadiusSchedule::AbsSine { r0, omega } => r0 * omega.abs(),
        },
        MovingSetSpec::RotatingSector { r0, omega, .. } => r0 * omega.abs(),
        MovingSetSpec::Translating {
            template,
            curve,
            rotation,
        } => {
            let extent = template
                .bounding_ball()
                .map_or(0.0, |(c, r)| c.norm() + r);
            curve.max_speed() + rotation.max_rate() * extent
        }
    }
}

/// Smallest distance from the set to `∂Ω`.
fn clearance(domain: &DomainSpec, shape: &SetShape) -> f64 {
    shape
        .primitives()
        .into_iter()
        .map(|p| match p {
            SetShape::Ball { center, radius } => domain.boundary_distance(*center) - radius,
            other => boundary_samples(other)
                .into_iter()
                .map(|q| domain.boundary_distance(q))
                .fold(f64::INFINITY, f64::min),
        })
        .fold(f64::INFINITY, f64::min)
}

/// Points on the boundary of a primitive (the point itself for a point).
fn boundary_samples(shape: &SetShape) -> Vec<Point> {
    match *shape {
        SetShape::PointSet(p) => vec![p],
        SetShape::Ball { center, radius } => (0..256)
            .map(|k| center.add(Point::polar(radius, TAU * k as f64 / 256.0)))
            .collect(),
        SetShape::Sector {
            center,
            r0,
            theta0,
            theta1,
        } => {
            let mut out = vec![center];
            let span = (theta1 - theta0).min(TAU);
            out.extend((0..=128).map(|k| center.add(Point::polar(r0, theta0 + span * k as f64 / 128.0))));
            for a in [theta0, theta0 + span] {
                out.extend((1..64).map(|k| center.add(Point::polar(r0 * k as f64 / 64.0, a))));
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Distance between two closed sets; infinite if either is empty.
fn set_distance(a: &SetShape, b: &SetShape) -> f64 {
    let mut best = f64::INFINITY;
    for pa in a.primitives() {
        for pb in b.primitives() {
            let d = match (as_ball(pa), as_ball(pb)) {
                (Some((c0, r0)), Some((c1, r1))) => (c0.dist(c1) - r0 - r1).max(0.0),
                _ => {
                    let ab = boundary_samples(pa)
                        .into_iter()
                        .filter_map(|q| pb.distance(q))
                        .fold(f64::INFINITY, f64::min);
                    let ba = boundary_samples(pb)
                        .into_iter()
                        .filter_map(|q| pa.distance(q))
                        .fold(f64::INFINITY, f64::min);
                    ab.min(ba)
                }
            };
            best = best.min(d);
        }
    }
    best
}

/// Points are balls of radius zero.
fn as_ball(s: &SetShape) -> Option<(Point, f64)> {
    match *s {
        SetShape::Ball { center, radius } => Some((center, radius)),
        SetShape::PointSet(p) => Some((p, 0.0)),
        _ => None,
    }
}

fn moving_neighborhood_check(ctx: &Ctx) -> Result<TheoremCheck> {
    let spec = ctx.spec();
    let tau0 = ctx.s.predict.tau0;
    let delta = ctx.s.predict.delta.unwrap_or(2.0 * ctx.grid.h);
    let start = ctx.s.t0 + tau0;
    let end = match spec.period() {
        Some(0.0) => start,
        Some(p) => start + p,
        None => ctx.s.t_end.max(start),
    };
    let samples = if end > start { 16 } else { 1 };
    let sdt = default_sample_dt(tau0);
    // the sampled window union misses at most speed·sdt/2 of the true one
    let slack = motion_speed(spec) * sdt / 2.0;
    let reach = delta + slack;
    let mut floor = f64::INFINITY;
    let mut arg = start;
    let mut min_clearance = f64::INFINITY;
    let mut last: Option<(Mask, f64)> = None;
    for j in 0..samples {
        let t = if samples == 1 {
            start
        } else {
            start + (end - start) * j as f64 / samples as f64
        };
        let window = union_over_interval(spec, t - tau0, t + tau0, sdt);
        if window.is_empty() {
            continue;
        }
        min_clearance = min_clearance.min(clearance(&ctx.s.domain, &window));
        let m = ctx.grid.mask_within(&window, reach);
        let l1 = match &last {
            Some((pm, v)) if *pm == m => *v,
            _ => lambda1_of_mask(&ctx.grid, &m, DEFAULT_EIGEN_TOL)?,
        };
        last = Some((m, l1));
        if l1 < floor {
            floor = l1;
            arg = t;
        }
    }
    let inside = min_clearance > reach;
    let details = vec![
        ("lambda", ctx.lambda),
        ("tau0", tau0),
        ("delta", delta),
        ("slack", slack),
        ("floor", floor),
        ("floor_time", arg),
        ("clearance", min_clearance),
    ];
    if !inside {
        return Ok(TheoremCheck::new(
            Theorem::MovingNeighborhood,
            false,
            details,
            "the dilated window unions reach the boundary of the domain",
        ));
    }
    Ok(TheoremCheck::new(
        Theorem::MovingNeighborhood,
        ctx.lambda < floor,
        details,
        format!("{samples} sampled windows"),
    ))
}

fn separated_jumps_check(ctx: &Ctx) -> TheoremCheck {
    let MovingSetSpec::Jumping { k0, k1, period, t1 } = ctx.spec() else {
        return TheoremCheck::not_applicable(Theorem::SeparatedJumps, "K(t) does not jump");
    };
    let min_gap = t1.min(period - t1);
    let max_gap = t1.max(period - t1);
    let tau0 = min_gap / 2.0;
    let sep = set_distance(k0, k1);
    TheoremCheck::new(
        Theorem::SeparatedJumps,
        sep > 0.0,
        vec![
            ("lambda", ctx.lambda),
            ("tau0", tau0),
            ("min_gap", min_gap),
            ("max_gap", max_gap),
            ("separation", sep),
        ],
        "windows of half-width tau0 on either side of each jump",
    )
}

/// Ball `(center, radius)` inscribed in a primitive.
fn inscribed_ball(shape: &SetShape) -> Option<(Point, f64)> {
    match *shape {
        SetShape::Ball { center, radius } if radius > 0.0 => Some((center, radius)),
        SetShape::Sector {
            center,
            r0,
            theta0,
            theta1,
        } => {
            let aperture = (theta1 - theta0).min(TAU);
            let rho = sector_inradius(r0, aperture);
            let mid = 0.5 * (theta0 + theta0 + aperture);
            let at = if aperture >= TAU { 0.0 } else { r0 - rho };
            Some((center.add(Point::polar(at, mid)), rho))
        }
        SetShape::Union(ref parts) => parts
            .iter()
            .filter_map(inscribed_ball)
            .max_by(|a, b| a.1.total_cmp(&b.1)),
        _ => None,
    }
}

/// Radius of the largest ball inside a sector of radius `r0`.
fn sector_inradius(r0: f64, aperture: f64) -> f64 {
    if aperture >= TAU {
        r0
    } else if aperture >= PI {
        r0 / 2.0
    } else {
        let s = (aperture / 2.0).sin();
        r0 * s / (1.0 + s)
    }
}

/// Chain geometry: `E = B(e_center, e_radius)`, previous and next overlap
/// centers, and the overlap half-radius `r`.
#[derive(Debug, Clone, Copy)]
struct Chain {
    step: f64,
    e_center: Point,
    e_radius: f64,
    x_prev: Point,
    x_next: Point,
    r: f64,
}

/// Waiting time of the linear problem on the chain's ball.
fn chain_tau(ctx: &Ctx, c: &Chain) -> Result<Option<(f64, f64)>> {
    let g = &ctx.grid;
    let e = g.mask_from_shape(&SetShape::ball(c.e_center, c.e_radius));
    let d = g.mask_from_shape(&SetShape::ball(c.x_next, c.r));
    let v = g.mask_from_shape(&SetShape::ball(c.x_prev, c.r));
    if e.count() < 5 || d.is_empty() || v.is_empty() || !g.is_connected(&e) || !g.is_connected(&d) || !g.is_connected(&v) {
        return Ok(None);
    }
    let pe = principal_eigenpair(g, &e, DEFAULT_EIGEN_TOL)?;
    if ctx.lambda <= pe.value {
        return Ok(Some((pe.value, f64::INFINITY)));
    }
    let lam2 = second_eigenvalue(g, &e, DEFAULT_EIGEN_TOL)?;
    let pd = principal_eigenpair(g, &d, DEFAULT_EIGEN_TOL)?;
    let pv = principal_eigenpair(g, &v, DEFAULT_EIGEN_TOL)?;
    let input = TauInputs {
        dim: g.dim(),
        lam: ctx.lambda,
        lam1_e: pe.value,
        lam2_e: lam2,
        c_inf: ctx.s.predict.c_inf,
        v0_norm: pv.vector.l2_norm(),
        alpha1: pv.vector.dot(&pe.vector),
        inf_phi1_d: pe.vector.min_on(&d),
        max_phi1_d: pd.vector.sup_norm(),
        gamma: ctx.s.predict.gamma,
    };
    if input.validate().is_err() {
        return Ok(Some((pe.value, f64::INFINITY)));
    }
    Ok(Some((pe.value, tau_unbounded(&input)?)))
}

fn chain_candidates(ctx: &Ctx) -> std::result::Result<Vec<Chain>, &'static str> {
    let spec = ctx.spec();
    let t0 = ctx.s.t0;
    let fixed = |center: Point, radius: f64| {
        vec![Chain {
            step: f64::INFINITY,
            e_center: center,
            e_radius: radius,
            x_prev: center,
            x_next: center,
            r: radius / 2.0,
        }]
    };
    match spec {
        MovingSetSpec::Static(s) => inscribed_ball(s)
            .map(|(c, r)| fixed(c, r))
            .ok_or("K has no interior"),
        MovingSetSpec::RadiusBall { center, radius } => {
            let r = radius.min_radius_after(t0.max(0.0));
            if r > 0.0 {
                Ok(fixed(*center, r))
            } else {
                Err("the radius tends to zero")
            }
        }
        MovingSetSpec::Jumping { k0, k1, .. } => {
            let (SetShape::Ball { center: c0, radius: r0 }, SetShape::Ball { center: c1, radius: r1 }) = (k0, k1)
            else {
                return Err("overlap of non-ball jumping sets is not constructed");
            };
            let d = c0.dist(*c1);
            if d + r1.min(*r0) <= r1.max(*r0) {
                let (c, r) = if r0 <= r1 { (*c0, *r0) } else { (*c1, *r1) };
                return Ok(fixed(c, r));
            }
            if d >= r0 + r1 {
                return Err("the two sets are disjoint");
            }
            let rad = (r0 + r1 - d) / 2.0;
            let u = c1.sub(*c0).scale(1.0 / d);
            Ok(fixed(c0.add(u.scale(r0 - rad)), rad))
        }
        MovingSetSpec::Translating {
            template,
            curve,
            rotation,
        } => {
            let SetShape::Ball { center: tc, radius } = template else {
                return Err("only ball templates are chained");
            };
            let v = curve.max_speed() + rotation.max_rate() * tc.norm();
            if v == 0.0 {
                return Ok(fixed(spec.snapshot(t0).bounding_ball().map_or(*tc, |b| b.0), *radius));
            }
            let mut out = Vec::new();
            for frac in [0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6] {
                let l = frac * radius;
                let step = l / v;
                let mid = t0 + step / 2.0;
                let e_center = template.transformed(curve.at(mid), rotation.at(mid)).bounding_ball().map_or(*tc, |b| b.0);
                let dir = direction_at(curve, rotation, *tc, mid);
                out.push(Chain {
                    step,
                    e_center,
                    e_radius: radius - l / 2.0,
                    x_prev: e_center.sub(dir.scale(l / 2.0)),
                    x_next: e_center.add(dir.scale(l / 2.0)),
                    r: (radius - l) / 2.0,
                });
            }
            Ok(out)
        }
        MovingSetSpec::RotatingSector {
            center,
            r0,
            theta0,
            theta1,
            omega,
        } => {
            let aperture = theta1 - theta0;
            if *omega == 0.0 {
                return inscribed_ball(&spec.snapshot(t0))
                    .map(|(c, r)| fixed(c, r))
                    .ok_or("K has no interior");
            }
            let w = omega.abs();
            let mut out = Vec::new();
            for frac in [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7] {
                let sweep = frac * aperture.min(TAU);
                let step = sweep / w;
                let rho = sector_inradius(*r0, aperture - sweep);
                let dist = r0 - rho;
                let s = 2.0 * dist * (sweep / 2.0).sin();
                if rho - s / 2.0 <= 0.0 {
                    continue;
                }
                // bisector of the intersection of the snapshots over the window
                let mid_t = t0 + step / 2.0;
                let phi = 0.5 * (theta0 + theta1) - omega * mid_t;
                let e_center = center.add(Point::polar(dist, phi));
                let tangent = Point::polar(1.0, phi - omega.signum() * PI / 2.0);
                out.push(Chain {
                    step,
                    e_center,
                    e_radius: rho,
                    x_prev: e_center.sub(tangent.scale(s / 2.0)),
                    x_next: e_center.add(tangent.scale(s / 2.0)),
                    r: (rho - s / 2.0) / 2.0,
                });
            }
            Ok(out)
        }
    }
}

/// Unit direction of motion of the template center at time `t`.
fn direction_at(curve: &PathSchedule, rotation: &AngleSchedule, tc: Point, t: f64) -> Point {
    let eps = 1e-6;
    let p = |s: f64| tc.rotate(rotation.at(s)).add(curve.at(s));
    let d = p(t + eps).sub(p(t - eps));
    let n = d.norm();
    if n == 0.0 {
        Point::new(1.0, 0.0)
    } else {
        d.scale(1.0 / n)
    }
}

fn overlap_chain_check(ctx: &Ctx) -> Result<TheoremCheck> {
    let candidates = match chain_candidates(ctx) {
        Ok(c) => c,
        Err(why) => return Ok(TheoremCheck::not_applicable(Theorem::OverlapChain, why)),
    };
    let mut last: Option<Vec<(&'static str, f64)>> = None;
    for c in &candidates {
        if c.r < ctx.grid.h {
            continue;
        }
        let Some((lam1_e, tau)) = chain_tau(ctx, c)? else {
            continue;
        };
        let details = vec![
            ("lambda", ctx.lambda),
            ("lambda1_e", lam1_e),
            ("e_radius", c.e_radius),
            ("r", c.r),
            ("step", c.step),
            ("tau", tau),
        ];
        if tau.is_finite() && c.step >= tau {
            return Ok(TheoremCheck::new(
                Theorem::OverlapChain,
                true,
                details,
                "windows of the chain outlast the waiting time",
            ));
        }
        last = Some(details);
    }
    Ok(match last {
        Some(details) => TheoremCheck::new(
            Theorem::OverlapChain,
            false,
            details,
            "no chain step outlasts its waiting time",
        ),
        None => TheoremCheck::not_applicable(
            Theorem::OverlapChain,
            "overlap balls are below grid resolution",
        ),
    })
}

fn nested_alternation_check(ctx: &Ctx) -> Result<TheoremCheck> {
    let MovingSetSpec::Jumping { k0, k1, period, t1 } = ctx.spec() else {
        return Ok(TheoremCheck::not_applicable(
            Theorem::NestedAlternation,
            "K(t) does not alternate",
        ));
    };
    let g = &ctx.grid;
    let (m0, m1) = (g.mask_from_shape(k0), g.mask_from_shape(k1));
    // (large set, its phase length, small set, its phase length)
    let (big, big_len, small, eta) = if m1.is_subset_of(&m0) && m1 != m0 {
        (k0, *t1, k1, period - t1)
    } else if m0.is_subset_of(&m1) && m0 != m1 {
        (k1, period - t1, k0, *t1)
    } else {
        return Ok(TheoremCheck::not_applicable(
            Theorem::NestedAlternation,
            "the two sets are not nested",
        ));
    };
    if small.is_empty() {
        return Ok(TheoremCheck::not_applicable(
            Theorem::NestedAlternation,
            "the smaller set is empty",
        ));
    }
    let l0_big = ctx.lambda0(big)?.value();
    let l0_small = ctx.lambda0(small)?.value();
    let mut details = vec![
        ("lambda", ctx.lambda),
        ("lambda0_large", l0_big),
        ("lambda0_small", l0_small),
        ("long_phase", big_len),
        ("short_phase", eta),
    ];
    if !(l0_big < ctx.lambda && ctx.lambda < l0_small && l0_small.is_finite()) {
        return Ok(TheoremCheck::new(
            Theorem::NestedAlternation,
            false,
            details,
            "requires lambda0(large) < lambda < lambda0(small) < inf",
        ));
    }
    let e = g.mask_from_shape(big);
    let d = g.mask_from_shape(small);
    if !g.is_connected(&e) || !g.is_connected(&d) {
        return Ok(TheoremCheck::new(
            Theorem::NestedAlternation,
            false,
            details,
            "waiting time needs connected sets",
        ));
    }
    let pe = principal_eigenpair(g, &e, DEFAULT_EIGEN_TOL)?;
    let pd = principal_eigenpair(g, &d, DEFAULT_EIGEN_TOL)?;
    let lam2 = second_eigenvalue(g, &e, DEFAULT_EIGEN_TOL)?;
    // loss factor over one short phase, absorbed into the growth target
    let alpha = ((ctx.lambda - pd.value) * eta).exp();
    let gamma = ctx.s.predict.gamma / alpha;
    let input = TauInputs {
        dim: g.dim(),
        lam: ctx.lambda,
        lam1_e: pe.value,
        lam2_e: lam2,
        c_inf: ctx.s.predict.c_inf,
        v0_norm: pd.vector.l2_norm(),
        alpha1: pd.vector.dot(&pe.vector),
        inf_phi1_d: pe.vector.min_on(&d),
        max_phi1_d: pd.vector.sup_norm(),
        gamma,
    };
    let tau = if input.validate().is_ok() {
        tau_unbounded(&input)?
    } else {
        f64::INFINITY
    };
    details.push(("alpha", alpha));
    details.push(("tau", tau));
    Ok(TheoremCheck::new(
        Theorem::NestedAlternation,
        big_len > tau,
        details,
        "long phases must outlast the waiting time",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_inradius_limits() {
        assert!((sector_inradius(1.0, PI / 2.0) - (0.5f64.sqrt() / (1.0 + 0.5f64.sqrt()))).abs() < 1e-12);
        assert_eq!(sector_inradius(1.0, PI), 0.5);
        assert_eq!(sector_inradius(1.0, TAU), 1.0);
    }

    #[test]
    fn inscribed_ball_fits_inside_the_sector() {
        let s = SetShape::Sector {
            center: Point::new(0.1, -0.2),
            r0: 0.4,
            theta0: 0.3,
            theta1: 1.5,
        };
        let (c, r) = inscribed_ball(&s).unwrap();
        for k in 0..64 {
            let q = c.add(Point::polar(r * (1.0 - 1e-9), TAU * k as f64 / 64.0));
            assert!(s.contains(q), "boundary point {q:?} escapes");
        }
    }

    #[test]
    fn ball_distances() {
        let a = SetShape::ball(Point::new(0.0, 0.0), 0.2);
        let b = SetShape::ball(Point::new(0.5, 0.0), 0.1);
        assert!((set_distance(&a, &b) - 0.2).abs() < 1e-12);
        assert_eq!(set_distance(&a, &SetShape::Empty), f64::INFINITY);
        let nested = SetShape::ball(Point::new(0.05, 0.0), 0.05);
        assert_eq!(set_distance(&a, &nested), 0.0);
    }

    #[test]
    fn sector_ball_distance_is_sampled_from_both_sides() {
        let s = SetShape::Sector {
            center: Point::new(0.0, 0.0),
            r0: 0.3,
            theta0: 0.0,
            theta1: PI / 2.0,
        };
        let b = SetShape::ball(Point::new(0.5, 0.0), 0.1);
        assert!((set_distance(&s, &b) - 0.1).abs() < 1e-3);
    }

    #[test]
    fn decay_radius_envelope_shrinks() {
        let r = RadiusSchedule::Decay { r0: 0.3 };
        assert_eq!(sup_radius_after(&r, 0.0), 0.3);
        assert!((sup_radius_after(&r, 2.0) - 0.1).abs() < 1e-15);
        assert_eq!(sup_radius_after(&RadiusSchedule::Grow { r0: 0.3 }, 5.0), 0.3);
    }
}
