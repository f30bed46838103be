//! Domains, moving vanishing sets and the degeneracy coefficient `n(t, x)`.
//!
//! A [`MovingSetSpec`] is a declarative description of a time-dependent
//! compact set `K(t)`. The coefficient `n(t, x)` is built from the distance
//! to the current snapshot through a [`NuProfile`], so that `n` vanishes
//! exactly on `K(t)` and is bounded below by an increasing function of the
//! distance elsewhere.
//!
//! Everything here is a pure function of its inputs.

use std::f64::consts::PI;

use crate::error::ConfigError;
use crate::grid::{Grid, Mask};

const TWO_PI: f64 = 2.0 * PI;

/// A point of the plane. One-dimensional problems use `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub const fn on_line(x: f64) -> Self {
        Point { x, y: 0.0 }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn polar(radius: f64, angle: f64) -> Point {
        Point::new(radius * angle.cos(), radius * angle.sin())
    }
}

/// The spatial domain Ω.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// One-dimensional interval `(lo, hi)`.
    Interval { lo: f64, hi: f64 },
    Rectangle { lo: Point, hi: Point },
    Disc { center: Point, radius: f64 },
}

impl DomainSpec {
    pub fn unit_square() -> Self {
        DomainSpec::Rectangle {
            lo: Point::new(0.0, 0.0),
            hi: Point::new(1.0, 1.0),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match *self {
            DomainSpec::Interval { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(ConfigError::invariant("domain", "interval requires lo < hi"));
                }
            }
            DomainSpec::Rectangle { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo.x < hi.x && lo.y < hi.y) {
                    return Err(ConfigError::invariant(
                        "domain",
                        "rectangle requires lo < hi componentwise",
                    ));
                }
            }
            DomainSpec::Disc { center, radius } => {
                if !(center.is_finite() && radius.is_finite() && radius > 0.0) {
                    return Err(ConfigError::invariant("domain", "disc radius must be > 0"));
                }
            }
        }
        Ok(())
    }

    /// Lower-left corner and extent of the bounding box.
    pub fn bounding_box(&self) -> (Point, Point) {
        match *self {
            DomainSpec::Interval { lo, hi } => (Point::on_line(lo), Point::on_line(hi)),
            DomainSpec::Rectangle { lo, hi } => (lo, hi),
            DomainSpec::Disc { center, radius } => (
                Point::new(center.x - radius, center.y - radius),
                Point::new(center.x + radius, center.y + radius),
            ),
        }
    }

    /// Membership in the open domain.
    pub fn contains(&self, p: Point) -> bool {
        self.boundary_distance(p) > 0.0
    }

    /// Signed distance to ∂Ω, positive inside.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match *self {
            DomainSpec::Interval { lo, hi } => (p.x - lo).min(hi - p.x),
            DomainSpec::Rectangle { lo, hi } => {
                let dx = (p.x - lo.x).min(hi.x - p.x);
                let dy = (p.y - lo.y).min(hi.y - p.y);
                dx.min(dy)
            }
            DomainSpec::Disc { center, radius } => radius - p.dist(center),
        }
    }

    pub fn measure(&self) -> f64 {
        match *self {
            DomainSpec::Interval { lo, hi } => hi - lo,
            DomainSpec::Rectangle { lo, hi } => (hi.x - lo.x) * (hi.y - lo.y),
            DomainSpec::Disc { radius, .. } => PI * radius * radius,
        }
    }
}

/// Compact subsets of the plane used as snapshots of `K(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SetShape {
    Empty,
    PointSet(Point),
    Ball { center: Point, radius: f64 },
    /// Polar sector `{0 ≤ r ≤ r0, theta0 ≤ θ ≤ theta1}` around `center`.
    Sector {
        center: Point,
        r0: f64,
        theta0: f64,
        theta1: f64,
    },
    Union(Vec<SetShape>),
}

impl SetShape {
    pub fn ball(center: Point, radius: f64) -> Self {
        SetShape::Ball { center, radius }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            SetShape::Empty => Ok(()),
            SetShape::PointSet(p) => {
                if p.is_finite() {
                    Ok(())
                } else {
                    Err(ConfigError::invariant("kset", "point must be finite"))
                }
            }
            SetShape::Ball { center, radius } => {
                if center.is_finite() && radius.is_finite() && *radius >= 0.0 {
                    Ok(())
                } else {
                    Err(ConfigError::invariant("kset", "ball radius must be >= 0"))
                }
            }
            SetShape::Sector {
                center,
                r0,
                theta0,
                theta1,
            } => {
                if !(center.is_finite() && r0.is_finite() && *r0 > 0.0) {
                    return Err(ConfigError::invariant("kset", "sector radius must be > 0"));
                }
                if !(theta0.is_finite() && theta1.is_finite() && theta0 < theta1) {
                    return Err(ConfigError::invariant("kset", "sector requires theta0 < theta1"));
                }
                Ok(())
            }
            SetShape::Union(parts) => parts.iter().try_for_each(SetShape::validate),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SetShape::Empty => true,
            SetShape::Union(parts) => parts.iter().all(SetShape::is_empty),
            _ => false,
        }
    }

    /// Euclidean distance from `p` to the set; `None` for the empty set.
    pub fn distance(&self, p: Point) -> Option<f64> {
        match self {
            SetShape::Empty => None,
            SetShape::PointSet(q) => Some(p.dist(*q)),
            SetShape::Ball { center, radius } => Some((p.dist(*center) - radius).max(0.0)),
            SetShape::Sector {
                center,
                r0,
                theta0,
                theta1,
            } => Some(sector_distance(p.sub(*center), *r0, *theta0, *theta1)),
            SetShape::Union(parts) => parts
                .iter()
                .filter_map(|s| s.distance(p))
                .fold(None, |acc, d| Some(acc.map_or(d, |a: f64| a.min(d)))),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.distance(p) == Some(0.0)
    }

    /// Radius of a ball containing the shape, with its center.
    pub fn bounding_ball(&self) -> Option<(Point, f64)> {
        match self {
            SetShape::Empty => None,
            SetShape::PointSet(p) => Some((*p, 0.0)),
            SetShape::Ball { center, radius } => Some((*center, *radius)),
            SetShape::Sector { center, r0, .. } => Some((*center, *r0)),
            SetShape::Union(parts) => {
                let balls: Vec<_> = parts.iter().filter_map(SetShape::bounding_ball).collect();
                let first = *balls.first()?;
                let c = first.0;
                let r = balls
                    .iter()
                    .map(|(q, s)| q.dist(c) + s)
                    .fold(0.0_f64, f64::max);
                Some((c, r))
            }
        }
    }

    /// Rigid motion: rotate about the origin, then translate.
    pub fn transformed(&self, shift: Point, angle: f64) -> SetShape {
        let map = |p: Point| p.rotate(angle).add(shift);
        match self {
            SetShape::Empty => SetShape::Empty,
            SetShape::PointSet(p) => SetShape::PointSet(map(*p)),
            SetShape::Ball { center, radius } => SetShape::Ball {
                center: map(*center),
                radius: *radius,
            },
            SetShape::Sector {
                center,
                r0,
                theta0,
                theta1,
            } => SetShape::Sector {
                center: map(*center),
                r0: *r0,
                theta0: theta0 + angle,
                theta1: theta1 + angle,
            },
            SetShape::Union(parts) => {
                SetShape::Union(parts.iter().map(|s| s.transformed(shift, angle)).collect())
            }
        }
    }

    /// Flattened list of the non-empty primitives.
    pub fn primitives(&self) -> Vec<&SetShape> {
        match self {
            SetShape::Empty => Vec::new(),
            SetShape::Union(parts) => parts.iter().flat_map(SetShape::primitives).collect(),
            other => vec![other],
        }
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TWO_PI);
    if w >= TWO_PI {
        0.0
    } else {
        w
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let s = ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2;
    let s = s.clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(s)))
}

/// Distance from `p` (relative to the apex) to the closed sector.
///
/// Split into the arc face, the two radial faces and the corners; the corners
/// are the endpoints of the radial segments.
fn sector_distance(p: Point, r0: f64, theta0: f64, theta1: f64) -> f64 {
    let aperture = theta1 - theta0;
    let rho = p.norm();
    if aperture >= TWO_PI {
        return (rho - r0).max(0.0);
    }
    let rel = wrap_angle(p.y.atan2(p.x) - theta0);
    let in_wedge = rho == 0.0 || rel <= aperture;
    if in_wedge {
        return (rho - r0).max(0.0);
    }
    let e0 = Point::polar(r0, theta0);
    let e1 = Point::polar(r0, theta1);
    let origin = Point::default();
    segment_distance(p, origin, e0).min(segment_distance(p, origin, e1))
}

/// Radius as a function of time for [`MovingSetSpec::RadiusBall`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusSchedule {
    Constant(f64),
    /// `r0 (1 - 1/(t+1))`
    Grow { r0: f64 },
    /// `r0 / (t+1)`
    Decay { r0: f64 },
    /// `r0 (1 + |sin(ωt)|)`
    AbsSine { r0: f64, omega: f64 },
}

impl RadiusSchedule {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            RadiusSchedule::Constant(r) => r,
            RadiusSchedule::Grow { r0 } => r0 * (1.0 - 1.0 / (t + 1.0)),
            RadiusSchedule::Decay { r0 } => r0 / (t + 1.0),
            RadiusSchedule::AbsSine { r0, omega } => r0 * (1.0 + (omega * t).sin().abs()),
        }
    }

    /// Supremum of the radius over `t >= 0`.
    pub fn max_radius(&self) -> f64 {
        match *self {
            RadiusSchedule::Constant(r) => r,
            RadiusSchedule::Grow { r0 } | RadiusSchedule::Decay { r0 } => r0,
            RadiusSchedule::AbsSine { r0, .. } => 2.0 * r0,
        }
    }

    /// Infimum of the radius over `t >= from` (`from >= 0`).
    pub fn min_radius_after(&self, from: f64) -> f64 {
        match *self {
            RadiusSchedule::Constant(r) => r,
            RadiusSchedule::Grow { r0 } => r0 * (1.0 - 1.0 / (from + 1.0)),
            RadiusSchedule::Decay { .. } => 0.0,
            RadiusSchedule::AbsSine { r0, .. } => r0,
        }
    }

    fn params(&self) -> Vec<f64> {
        match *self {
            RadiusSchedule::Constant(r) => vec![r],
            RadiusSchedule::Grow { r0 } | RadiusSchedule::Decay { r0 } => vec![r0],
            RadiusSchedule::AbsSine { r0, omega } => vec![r0, omega],
        }
    }
}

/// Curve `γ(t)` for [`MovingSetSpec::Translating`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSchedule {
    Fixed(Point),
    Linear { start: Point, velocity: Point },
    /// `center + radius (cos(ωt + phase), sin(ωt + phase))`
    Circle {
        center: Point,
        radius: f64,
        omega: f64,
        phase: f64,
    },
}

impl PathSchedule {
    pub fn at(&self, t: f64) -> Point {
        match *self {
            PathSchedule::Fixed(p) => p,
            PathSchedule::Linear { start, velocity } => start.add(velocity.scale(t)),
            PathSchedule::Circle {
                center,
                radius,
                omega,
                phase,
            } => center.add(Point::polar(radius, omega * t + phase)),
        }
    }

    /// Upper bound on |γ'(t)|.
    pub fn max_speed(&self) -> f64 {
        match *self {
            PathSchedule::Fixed(_) => 0.0,
            PathSchedule::Linear { velocity, .. } => velocity.norm(),
            PathSchedule::Circle { radius, omega, .. } => radius * omega.abs(),
        }
    }
}

/// Rotation angle `R(t)` for [`MovingSetSpec::Translating`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSchedule {
    Fixed(f64),
    Linear { theta0: f64, omega: f64 },
}

impl AngleSchedule {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            AngleSchedule::Fixed(a) => a,
            AngleSchedule::Linear { theta0, omega } => theta0 + omega * t,
        }
    }

    pub fn max_rate(&self) -> f64 {
        match *self {
            AngleSchedule::Fixed(_) => 0.0,
            AngleSchedule::Linear { omega, .. } => omega.abs(),
        }
    }
}

/// Declarative description of the moving vanishing set `K(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum MovingSetSpec {
    Static(SetShape),
    /// Ball with fixed center and time-dependent radius.
    RadiusBall {
        center: Point,
        radius: RadiusSchedule,
    },
    /// Sector rotating clockwise with angular speed `omega`.
    RotatingSector {
        center: Point,
        r0: f64,
        theta0: f64,
        theta1: f64,
        omega: f64,
    },
    /// `k0` on `(n·period, n·period + t1]`, `k1` on `(n·period + t1, (n+1)·period]`.
    Jumping {
        k0: SetShape,
        k1: SetShape,
        period: f64,
        t1: f64,
    },
    /// `K(t) = γ(t) + R(t) K0` with the template given relative to the origin.
    Translating {
        template: SetShape,
        curve: PathSchedule,
        rotation: AngleSchedule,
    },
}

impl MovingSetSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            MovingSetSpec::Static(s) => s.validate(),
            MovingSetSpec::RadiusBall { center, radius } => {
                if !center.is_finite() {
                    return Err(ConfigError::invariant("kset", "center must be finite"));
                }
                if radius.params().iter().any(|v| !v.is_finite()) || radius.max_radius() < 0.0 {
                    return Err(ConfigError::invariant("kset", "radius schedule must be >= 0"));
                }
                Ok(())
            }
            MovingSetSpec::RotatingSector {
                center,
                r0,
                theta0,
                theta1,
                omega,
            } => {
                SetShape::Sector {
                    center: *center,
                    r0: *r0,
                    theta0: *theta0,
                    theta1: *theta1,
                }
                .validate()?;
                if !omega.is_finite() {
                    return Err(ConfigError::invariant("kset", "omega must be finite"));
                }
                Ok(())
            }
            MovingSetSpec::Jumping {
                k0,
                k1,
                period,
                t1,
            } => {
                k0.validate()?;
                k1.validate()?;
                if !(period.is_finite() && *period > 0.0) {
                    return Err(ConfigError::invariant("kset", "jumping period must be > 0"));
                }
                if !(*t1 > 0.0 && t1 < period) {
                    return Err(ConfigError::invariant("kset", "jumping requires 0 < t1 < period"));
                }
                Ok(())
            }
            MovingSetSpec::Translating { template, .. } => template.validate(),
        }
    }

    /// The realized set `K(t)`.
    pub fn snapshot(&self, t: f64) -> SetShape {
        match self {
            MovingSetSpec::Static(s) => s.clone(),
            MovingSetSpec::RadiusBall { center, radius } => SetShape::Ball {
                center: *center,
                radius: radius.at(t).max(0.0),
            },
            MovingSetSpec::RotatingSector {
                center,
                r0,
                theta0,
                theta1,
                omega,
            } => SetShape::Sector {
                center: *center,
                r0: *r0,
                theta0: theta0 - omega * t,
                theta1: theta1 - omega * t,
            },
            MovingSetSpec::Jumping {
                k0,
                k1,
                period,
                t1,
            } => {
                if self.jumping_phase_is_first(t, *period, *t1) {
                    k0.clone()
                } else {
                    k1.clone()
                }
            }
            MovingSetSpec::Translating {
                template,
                curve,
                rotation,
            } => template.transformed(curve.at(t), rotation.at(t)),
        }
    }

    fn jumping_phase_is_first(&self, t: f64, period: f64, t1: f64) -> bool {
        let phase = t.rem_euclid(period);
        if phase == 0.0 {
            // right end of the previous k1 interval, except at the very start
            t <= 0.0
        } else {
            phase <= t1
        }
    }

    /// Period of the motion when the set family is periodic in time.
    pub fn period(&self) -> Option<f64> {
        match self {
            MovingSetSpec::Static(_) => Some(0.0),
            MovingSetSpec::RadiusBall { radius, .. } => match *radius {
                RadiusSchedule::Constant(_) => Some(0.0),
                RadiusSchedule::AbsSine { omega, .. } if omega != 0.0 => Some(PI / omega.abs()),
                _ => None,
            },
            MovingSetSpec::RotatingSector { omega, .. } => {
                if *omega == 0.0 {
                    Some(0.0)
                } else {
                    Some(TWO_PI / omega.abs())
                }
            }
            MovingSetSpec::Jumping { period, .. } => Some(*period),
            MovingSetSpec::Translating {
                curve, rotation, ..
            } => {
                let curve_period = match *curve {
                    PathSchedule::Fixed(_) => Some(0.0),
                    PathSchedule::Linear { velocity, .. } => {
                        (velocity.norm() == 0.0).then_some(0.0)
                    }
                    PathSchedule::Circle { omega, .. } => {
                        Some(if omega == 0.0 { 0.0 } else { TWO_PI / omega.abs() })
                    }
                };
                let rot_period = match *rotation {
                    AngleSchedule::Fixed(_) => Some(0.0),
                    AngleSchedule::Linear { omega, .. } => {
                        Some(if omega == 0.0 { 0.0 } else { TWO_PI / omega.abs() })
                    }
                };
                match (curve_period?, rot_period?) {
                    (a, 0.0) => Some(a),
                    (0.0, b) => Some(b),
                    (a, b) if (a - b).abs() <= 1e-12 * a.max(b) => Some(a),
                    _ => None,
                }
            }
        }
    }

    /// Checks that every sampled snapshot on `[t_start, t_end]` stays inside Ω.
    pub fn check_inside(
        &self,
        domain: &DomainSpec,
        t_start: f64,
        t_end: f64,
        sample_dt: f64,
    ) -> Result<(), ConfigError> {
        for t in sample_times(t_start, t_end, sample_dt) {
            let snap = self.snapshot(t);
            for prim in snap.primitives() {
                if let Some((c, r)) = prim.bounding_ball() {
                    let margin = domain.boundary_distance(c) - r;
                    if margin < 0.0 && !sector_inside(prim, domain) {
                        return Err(ConfigError::invariant(
                            "kset",
                            format!("K(t) leaves the domain at t = {t}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn sector_inside(shape: &SetShape, domain: &DomainSpec) -> bool {
    match shape {
        SetShape::Sector {
            center,
            r0,
            theta0,
            theta1,
        } => {
            let n = 64;
            (0..=n).all(|k| {
                let a = theta0 + (theta1 - theta0) * k as f64 / n as f64;
                domain.boundary_distance(center.add(Point::polar(*r0, a))) > 0.0
            }) && domain.boundary_distance(*center) > 0.0
        }
        _ => false,
    }
}

/// Sample times `t_start, t_start + dt, …` up to and including `t_end`.
pub fn sample_times(t_start: f64, t_end: f64, dt: f64) -> Vec<f64> {
    if !(dt > 0.0) || t_end <= t_start {
        return vec![t_start];
    }
    let n = ((t_end - t_start) / dt).floor() as usize;
    let mut out: Vec<f64> = (0..=n).map(|k| t_start + k as f64 * dt).collect();
    if let Some(&last) = out.last() {
        if t_end - last > 1e-12 * dt {
            out.push(t_end);
        }
    }
    out
}

/// Sample times on the global lattice `k·dt` that fall in `[t_start, t_end]`.
///
/// Using a fixed lattice keeps sample sets nested when `t_start` grows.
pub fn lattice_times(t_start: f64, t_end: f64, dt: f64) -> Vec<f64> {
    let k0 = (t_start / dt - 1e-9).ceil() as i64;
    let k1 = (t_end / dt + 1e-9).floor() as i64;
    (k0..=k1).map(|k| k as f64 * dt).collect()
}

/// Profile `ν` of the degeneracy coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NuKind {
    /// `ν(d) = nu_max (1 - exp(-d / d_ramp))`
    Saturating { nu_max: f64, d_ramp: f64 },
    /// `n = level · 1_{d > 0}`
    Indicator { level: f64 },
    /// `n ≡ 0`: the linear problem.
    Vanishing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuProfile {
    pub kind: NuKind,
    /// Value of `n` when `K(t)` is empty.
    pub n_empty: f64,
}

impl NuProfile {
    pub fn saturating(nu_max: f64, d_ramp: f64) -> Self {
        NuProfile {
            kind: NuKind::Saturating { nu_max, d_ramp },
            n_empty: nu_max,
        }
    }

    pub fn indicator(level: f64) -> Self {
        NuProfile {
            kind: NuKind::Indicator { level },
            n_empty: level,
        }
    }

    pub fn vanishing() -> Self {
        NuProfile {
            kind: NuKind::Vanishing,
            n_empty: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match self.kind {
            NuKind::Saturating { nu_max, d_ramp } => {
                if !(positive(nu_max) && positive(d_ramp)) {
                    return Err(ConfigError::invariant(
                        "equation",
                        "saturating profile needs nu_max > 0 and d_ramp > 0",
                    ));
                }
            }
            NuKind::Indicator { level } => {
                if !positive(level) {
                    return Err(ConfigError::invariant("equation", "indicator level must be > 0"));
                }
            }
            NuKind::Vanishing => return Ok(()),
        }
        if !positive(self.n_empty) {
            return Err(ConfigError::invariant("equation", "n_empty must be > 0"));
        }
        Ok(())
    }

    pub fn is_vanishing(&self) -> bool {
        matches!(self.kind, NuKind::Vanishing)
    }

    /// The strictly increasing lower bound `ν(d)` of Assumption (N).
    pub fn nu(&self, d: f64) -> f64 {
        match self.kind {
            NuKind::Saturating { nu_max, d_ramp } => nu_max * (1.0 - (-d / d_ramp).exp()),
            NuKind::Indicator { level } => level * (1.0 - (-d).exp()),
            NuKind::Vanishing => 0.0,
        }
    }

    /// `n` as a function of the distance to `K(t)`; `None` means `K(t) = ∅`.
    pub fn eval(&self, distance: Option<f64>) -> f64 {
        match (self.kind, distance) {
            (NuKind::Vanishing, _) => 0.0,
            (_, None) => self.n_empty,
            (NuKind::Saturating { nu_max, d_ramp }, Some(d)) => {
                nu_max * (1.0 - (-d / d_ramp).exp())
            }
            (NuKind::Indicator { level }, Some(d)) => {
                if d > 0.0 {
                    level
                } else {
                    0.0
                }
            }
        }
    }

    /// Positive lower bound of `n` away from `K(t)` by at least `d`.
    pub fn lower_bound_at(&self, d: f64) -> f64 {
        match self.kind {
            NuKind::Indicator { level } if d > 0.0 => level,
            _ => self.eval(Some(d)),
        }
    }
}

pub fn evaluate_n(spec: &MovingSetSpec, nu: &NuProfile, t: f64, x: Point) -> f64 {
    nu.eval(spec.snapshot(t).distance(x))
}

fn push_unique(out: &mut Vec<SetShape>, s: SetShape) {
    if s.is_empty() {
        return;
    }
    if !out.contains(&s) {
        out.push(s);
    }
}

/// Union of the snapshots at `t_a, t_a + dt, …, t_b`.
///
/// The sampled union is a surrogate for the continuous one: it is exact for
/// piecewise-constant families sampled at least once per phase, and within
/// `speed · dt` of it for continuously moving sets. A rotating sector whose
/// sweep covers a full turn is returned as the full disc.
pub fn union_over_interval(spec: &MovingSetSpec, t_a: f64, t_b: f64, sample_dt: f64) -> SetShape {
    if let MovingSetSpec::Static(s) = spec {
        return s.clone();
    }
    if let MovingSetSpec::RotatingSector {
        center,
        r0,
        theta0,
        theta1,
        omega,
    } = spec
    {
        if omega.abs() * (t_b - t_a) + (theta1 - theta0) >= TWO_PI {
            return SetShape::Ball {
                center: *center,
                radius: *r0,
            };
        }
    }
    let mut parts = Vec::new();
    for t in sample_times(t_a, t_b, sample_dt) {
        push_unique(&mut parts, spec.snapshot(t));
    }
    match parts.len() {
        0 => SetShape::Empty,
        1 => parts.pop().unwrap_or(SetShape::Empty),
        _ => SetShape::Union(parts),
    }
}

/// Default sampling step for unions and intersections over time.
pub fn default_sample_dt(tau0: f64) -> f64 {
    if tau0 > 0.0 {
        0.01_f64.min(tau0 / 50.0)
    } else {
        0.01
    }
}

/// Finite-horizon surrogate of `K^sup_{τ0}`: the union of snapshots on the
/// sample lattice inside `[tau0, horizon]`.
pub fn k_sup(spec: &MovingSetSpec, tau0: f64, horizon: f64, sample_dt: f64) -> SetShape {
    let mut parts = Vec::new();
    for t in lattice_times(tau0, horizon, sample_dt) {
        push_unique(&mut parts, spec.snapshot(t));
    }
    match parts.len() {
        0 => SetShape::Empty,
        1 => parts.pop().unwrap_or(SetShape::Empty),
        _ => SetShape::Union(parts),
    }
}

/// Mask of [`k_sup`] on a grid.
pub fn k_sup_mask(grid: &Grid, spec: &MovingSetSpec, tau0: f64, horizon: f64, sample_dt: f64) -> Mask {
    let mut acc = Mask::empty(grid);
    let mut last: Option<SetShape> = None;
    for t in lattice_times(tau0, horizon, sample_dt) {
        let snap = spec.snapshot(t);
        if last.as_ref() == Some(&snap) {
            continue;
        }
        acc.union_with(&grid.mask_from_shape(&snap));
        last = Some(snap);
    }
    acc
}

/// Finite-horizon surrogate of `K^inf_{τ0}`: intersection of the snapshot
/// masks on the sample lattice inside `[tau0, horizon]`.
pub fn k_inf(grid: &Grid, spec: &MovingSetSpec, tau0: f64, horizon: f64, sample_dt: f64) -> Mask {
    let mut acc = grid.mask.clone();
    let mut last: Option<SetShape> = None;
    for t in lattice_times(tau0, horizon, sample_dt) {
        let snap = spec.snapshot(t);
        if last.as_ref() == Some(&snap) {
            continue;
        }
        acc.intersect_with(&grid.mask_from_shape(&snap));
        if acc.count() == 0 {
            break;
        }
        last = Some(snap);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_snapshot_is_time_independent() {
        let b = SetShape::ball(Point::new(0.3, 0.4), 0.1);
        let spec = MovingSetSpec::Static(b.clone());
        assert_eq!(spec.snapshot(0.0), b);
        assert_eq!(spec.snapshot(17.5), b);
    }

    #[test]
    fn decaying_radius_starts_at_r0() {
        let c = Point::new(0.5, 0.5);
        let spec = MovingSetSpec::RadiusBall {
            center: c,
            radius: RadiusSchedule::Decay { r0: 0.2 },
        };
        assert_eq!(spec.snapshot(0.0), SetShape::ball(c, 0.2));
        assert_eq!(spec.snapshot(1.0), SetShape::ball(c, 0.1));
    }

    #[test]
    fn jumping_phases() {
        let k0 = SetShape::ball(Point::new(0.25, 0.5), 0.1);
        let k1 = SetShape::ball(Point::new(0.75, 0.5), 0.1);
        let spec = MovingSetSpec::Jumping {
            k0: k0.clone(),
            k1: k1.clone(),
            period: 1.0,
            t1: 0.4,
        };
        assert_eq!(spec.snapshot(0.2), k0);
        assert_eq!(spec.snapshot(0.0), k0);
        assert_eq!(spec.snapshot(0.4), k0);
        assert_eq!(spec.snapshot(0.41), k1);
        assert_eq!(spec.snapshot(1.0), k1);
        assert_eq!(spec.snapshot(1.2), k0);
    }

    #[test]
    fn ball_distances() {
        let c = Point::new(1.0, -2.0);
        let b = SetShape::ball(c, 0.5);
        assert_eq!(b.distance(c), Some(0.0));
        let p = Point::new(1.0 + 1.5, -2.0);
        assert!((b.distance(p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(SetShape::Empty.distance(c), None);
    }

    #[test]
    fn sector_inside_and_faces() {
        let s = SetShape::Sector {
            center: Point::default(),
            r0: 1.0,
            theta0: 0.0,
            theta1: PI / 2.0,
        };
        assert_eq!(s.distance(Point::new(0.3, 0.3)), Some(0.0));
        // beyond the arc, inside the wedge
        assert!((s.distance(Point::new(2.0, 0.0)).unwrap() - 1.0).abs() < 1e-14);
        // below the x axis, nearest point on the radial face
        assert!((s.distance(Point::new(0.5, -0.2)).unwrap() - 0.2).abs() < 1e-14);
        // opposite quadrant: nearest point is the apex
        assert!((s.distance(Point::new(-0.3, -0.4)).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn saturating_profile_value() {
        let nu = NuProfile::saturating(1.0, 1.0);
        assert!((nu.eval(Some(2.0_f64.ln())) - 0.5).abs() < 1e-15);
        assert_eq!(nu.eval(Some(0.0)), 0.0);
        assert_eq!(nu.eval(None), 1.0);
    }

    #[test]
    fn n_vanishes_on_the_set() {
        let spec = MovingSetSpec::Static(SetShape::ball(Point::new(0.5, 0.5), 0.2));
        let nu = NuProfile::indicator(3.0);
        assert_eq!(evaluate_n(&spec, &nu, 0.0, Point::new(0.6, 0.5)), 0.0);
        assert_eq!(evaluate_n(&spec, &nu, 0.0, Point::new(0.9, 0.5)), 3.0);
        let empty = MovingSetSpec::Static(SetShape::Empty);
        let nu = NuProfile {
            kind: NuKind::Saturating {
                nu_max: 2.0,
                d_ramp: 0.1,
            },
            n_empty: 1.0,
        };
        assert_eq!(evaluate_n(&empty, &nu, 3.0, Point::new(0.1, 0.1)), 1.0);
    }

    #[test]
    fn rotating_union_over_full_turn_is_disc() {
        let spec = MovingSetSpec::RotatingSector {
            center: Point::default(),
            r0: 0.3,
            theta0: 0.0,
            theta1: 0.5,
            omega: 2.0,
        };
        let u = union_over_interval(&spec, 0.0, PI, 0.01);
        assert_eq!(u, SetShape::ball(Point::default(), 0.3));
    }

    #[test]
    fn jumping_union_over_one_period() {
        let k0 = SetShape::ball(Point::new(0.25, 0.5), 0.1);
        let k1 = SetShape::ball(Point::new(0.75, 0.5), 0.1);
        let spec = MovingSetSpec::Jumping {
            k0: k0.clone(),
            k1: k1.clone(),
            period: 1.0,
            t1: 0.5,
        };
        assert_eq!(
            union_over_interval(&spec, 0.0, 1.0, 0.01),
            SetShape::Union(vec![k0, k1])
        );
    }

    #[test]
    fn invalid_shapes_rejected() {
        assert!(SetShape::ball(Point::default(), -1.0).validate().is_err());
        let bad = SetShape::Sector {
            center: Point::default(),
            r0: 1.0,
            theta0: 1.0,
            theta1: 0.5,
        };
        assert!(bad.validate().is_err());
        let jump = MovingSetSpec::Jumping {
            k0: SetShape::Empty,
            k1: SetShape::Empty,
            period: 1.0,
            t1: 1.5,
        };
        assert!(jump.validate().is_err());
    }

    #[test]
    fn leaving_the_domain_is_rejected() {
        let spec = MovingSetSpec::Translating {
            template: SetShape::ball(Point::default(), 0.1),
            curve: PathSchedule::Linear {
                start: Point::new(0.5, 0.5),
                velocity: Point::new(1.0, 0.0),
            },
            rotation: AngleSchedule::Fixed(0.0),
        };
        let dom = DomainSpec::unit_square();
        assert!(spec.check_inside(&dom, 0.0, 0.2, 0.01).is_ok());
        assert!(spec.check_inside(&dom, 0.0, 1.0, 0.01).is_err());
    }
}
