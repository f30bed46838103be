//! TOML scenario files.
//!
//! ```toml
//! label = "example"
//!
//! [domain]
//! kind = "rectangle"          # rectangle | interval | disc
//! lo = [0.0, 0.0]
//! hi = [1.0, 1.0]
//! resolution = 32
//!
//! [equation]
//! lambda = 40.0
//! rho = 2.0
//! nu = "saturating"           # saturating | indicator | vanishing
//! nu_max = 10.0
//! d_ramp = 0.05
//!
//! [kset]
//! kind = "static"             # static | radius-ball | rotating-sector | jumping | translating
//! shape = "ball(0.5, 0.5, 0.3)"
//!
//! [time]
//! t_end = 5.0
//! ```
//!
//! Every other key is optional; see [`DEFAULTS`]. Keys that do not belong
//! to the chosen `kind` are rejected just like unknown keys.

use serde::{Deserialize, Serialize};

use super::shape_syntax::{numbers, parse_term, Term};
use super::{format_shape, parse_shape, ParseError};
use crate::error::{ConfigError, Error, Result};
use crate::evolve::{EquationParams, SchemeConfig};
use crate::geometry::{
    AngleSchedule, DomainSpec, MovingSetSpec, NuKind, NuProfile, PathSchedule, Point, RadiusSchedule,
};
use crate::grid::DEFAULT_SOLVE_TOL;
use crate::scenarios::{InitialData, OutputSpec, PredictConfig, Scenario};

/// Defaults for omitted keys, as `(key, value)` text.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("label", "custom"),
    ("domain.kind", "rectangle, unit square"),
    ("domain.resolution", "32"),
    ("equation.rho", "2"),
    ("equation.nu", "saturating, nu_max = 10, d_ramp = 0.05"),
    ("equation.n_empty", "nu_max or level"),
    ("time.t0", "0"),
    ("time.t_end", "1"),
    ("scheme.dt", "0.001 / (first Dirichlet eigenvalue of the domain)"),
    ("scheme.solve_tol", "1e-10"),
    ("scheme.growth_cap", "1e4 times the sup-norm of the initial data"),
    ("initial.kind", "constant, value = 1"),
    ("output.sample_every", "10"),
];

const DEFAULT_RESOLUTION: usize = 32;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDomain {
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lo: Option<Coord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hi: Option<Coord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolution: Option<usize>,
}

/// A scalar for intervals, a pair for rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Coord {
    Scalar(f64),
    Pair([f64; 2]),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEquation {
    lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_ramp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_empty: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileKset {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k0: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    template: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    curve: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rotation: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTime {
    #[serde(skip_serializing_if = "Option::is_none")]
    t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_end: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileScheme {
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solve_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    growth_cap: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileInitial {
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    height: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_every: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    snapshot_times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    display_max: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePredict {
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_inf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda0_cap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default)]
    domain: FileDomain,
    equation: FileEquation,
    kset: FileKset,
    #[serde(default)]
    time: FileTime,
    #[serde(default)]
    scheme: FileScheme,
    #[serde(default)]
    initial: FileInitial,
    #[serde(default)]
    output: FileOutput,
    #[serde(default)]
    predict: FilePredict,
}

fn bad(section: &str, msg: impl Into<String>) -> Error {
    ConfigError::invariant(section, msg).into()
}

fn need<T>(section: &str, key: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| bad(section, format!("missing key '{key}'")))
}

/// Rejects keys that are set but do not apply to the chosen kind.
fn forbid(section: &str, kind: &str, keys: &[(&str, bool)]) -> Result<()> {
    for (k, set) in keys {
        if *set {
            return Err(bad(section, format!("key '{k}' does not apply to kind = \"{kind}\"")));
        }
    }
    Ok(())
}

fn shape_field(section: &str, key: &str, v: Option<&String>) -> Result<crate::geometry::SetShape> {
    let text = need(section, key, v)?;
    parse_shape(text).map_err(|e| bad(section, format!("{key}: {}", e.message)))
}

fn call_of(section: &str, key: &str, text: &str) -> Result<(String, Vec<Term>)> {
    match parse_term(text).map_err(|e| bad(section, format!("{key}: {}", e.message)))? {
        Term::Call(n, a) => Ok((n, a)),
        Term::Num(_) => Err(bad(section, format!("{key}: expected name(args)"))),
    }
}

fn nums(section: &str, key: &str, name: &str, args: &[Term], arity: usize) -> Result<Vec<f64>> {
    numbers(name, args, arity).map_err(|e| bad(section, format!("{key}: {}", e.message)))
}

fn radius_schedule(text: &str) -> Result<RadiusSchedule> {
    let (name, args) = call_of("kset", "radius", text)?;
    let n = |k| nums("kset", "radius", &name, &args, k);
    Ok(match name.as_str() {
        "constant" => RadiusSchedule::Constant(n(1)?[0]),
        "grow" => RadiusSchedule::Grow { r0: n(1)?[0] },
        "decay" => RadiusSchedule::Decay { r0: n(1)?[0] },
        "abs-sine" => {
            let v = n(2)?;
            RadiusSchedule::AbsSine { r0: v[0], omega: v[1] }
        }
        other => return Err(bad("kset", format!("radius: unknown schedule '{other}'"))),
    })
}

fn format_radius(r: &RadiusSchedule) -> String {
    match *r {
        RadiusSchedule::Constant(v) => format!("constant({v})"),
        RadiusSchedule::Grow { r0 } => format!("grow({r0})"),
        RadiusSchedule::Decay { r0 } => format!("decay({r0})"),
        RadiusSchedule::AbsSine { r0, omega } => format!("abs-sine({r0}, {omega})"),
    }
}

fn path_schedule(text: &str) -> Result<PathSchedule> {
    let (name, args) = call_of("kset", "curve", text)?;
    let n = |k| nums("kset", "curve", &name, &args, k);
    Ok(match name.as_str() {
        "fixed" => {
            let v = n(2)?;
            PathSchedule::Fixed(Point::new(v[0], v[1]))
        }
        "linear" => {
            let v = n(4)?;
            PathSchedule::Linear {
                start: Point::new(v[0], v[1]),
                velocity: Point::new(v[2], v[3]),
            }
        }
        "circle" => {
            let v = n(5)?;
            PathSchedule::Circle {
                center: Point::new(v[0], v[1]),
                radius: v[2],
                omega: v[3],
                phase: v[4],
            }
        }
        other => return Err(bad("kset", format!("curve: unknown path '{other}'"))),
    })
}

fn format_path(p: &PathSchedule) -> String {
    match *p {
        PathSchedule::Fixed(q) => format!("fixed({}, {})", q.x, q.y),
        PathSchedule::Linear { start, velocity } => {
            format!("linear({}, {}, {}, {})", start.x, start.y, velocity.x, velocity.y)
        }
        PathSchedule::Circle {
            center,
            radius,
            omega,
            phase,
        } => format!("circle({}, {}, {radius}, {omega}, {phase})", center.x, center.y),
    }
}

fn angle_schedule(text: &str) -> Result<AngleSchedule> {
    let (name, args) = call_of("kset", "rotation", text)?;
    let n = |k| nums("kset", "rotation", &name, &args, k);
    Ok(match name.as_str() {
        "fixed" => AngleSchedule::Fixed(n(1)?[0]),
        "linear" => {
            let v = n(2)?;
            AngleSchedule::Linear { theta0: v[0], omega: v[1] }
        }
        other => return Err(bad("kset", format!("rotation: unknown schedule '{other}'"))),
    })
}

fn format_angle(a: &AngleSchedule) -> String {
    match *a {
        AngleSchedule::Fixed(v) => format!("fixed({v})"),
        AngleSchedule::Linear { theta0, omega } => format!("linear({theta0}, {omega})"),
    }
}

fn domain_of(d: &FileDomain) -> Result<DomainSpec> {
    let kind = d.kind.as_deref().unwrap_or("rectangle");
    match kind {
        "rectangle" => {
            forbid("domain", kind, &[("center", d.center.is_some()), ("radius", d.radius.is_some())])?;
            let pair = |c: Option<Coord>, key: &str, default: [f64; 2]| match c {
                None => Ok(default),
                Some(Coord::Pair(p)) => Ok(p),
                Some(Coord::Scalar(_)) => Err(bad("domain", format!("{key} must be [x, y] for a rectangle"))),
            };
            let lo = pair(d.lo, "lo", [0.0, 0.0])?;
            let hi = pair(d.hi, "hi", [1.0, 1.0])?;
            Ok(DomainSpec::Rectangle {
                lo: Point::new(lo[0], lo[1]),
                hi: Point::new(hi[0], hi[1]),
            })
        }
        "interval" => {
            forbid("domain", kind, &[("center", d.center.is_some()), ("radius", d.radius.is_some())])?;
            let scalar = |c: Option<Coord>, key: &str, default: f64| match c {
                None => Ok(default),
                Some(Coord::Scalar(v)) => Ok(v),
                Some(Coord::Pair(_)) => Err(bad("domain", format!("{key} must be a number for an interval"))),
            };
            Ok(DomainSpec::Interval {
                lo: scalar(d.lo, "lo", 0.0)?,
                hi: scalar(d.hi, "hi", 1.0)?,
            })
        }
        "disc" => {
            forbid("domain", kind, &[("lo", d.lo.is_some()), ("hi", d.hi.is_some())])?;
            let c = need("domain", "center", d.center)?;
            Ok(DomainSpec::Disc {
                center: Point::new(c[0], c[1]),
                radius: need("domain", "radius", d.radius)?,
            })
        }
        other => Err(bad("domain", format!("unknown kind '{other}'"))),
    }
}

fn nu_of(e: &FileEquation) -> Result<NuProfile> {
    let kind = e.nu.as_deref().unwrap_or("saturating");
    let mut p = match kind {
        "saturating" => {
            forbid("equation", kind, &[("level", e.level.is_some())])?;
            NuProfile::saturating(e.nu_max.unwrap_or(10.0), e.d_ramp.unwrap_or(0.05))
        }
        "indicator" => {
            forbid("equation", kind, &[("nu_max", e.nu_max.is_some()), ("d_ramp", e.d_ramp.is_some())])?;
            NuProfile::indicator(need("equation", "level", e.level)?)
        }
        "vanishing" => {
            forbid(
                "equation",
                kind,
                &[
                    ("nu_max", e.nu_max.is_some()),
                    ("d_ramp", e.d_ramp.is_some()),
                    ("level", e.level.is_some()),
                    ("n_empty", e.n_empty.is_some()),
                ],
            )?;
            NuProfile::vanishing()
        }
        other => return Err(bad("equation", format!("unknown nu profile '{other}'"))),
    };
    if let Some(v) = e.n_empty {
        p.n_empty = v;
    }
    Ok(p)
}

fn kset_of(k: &FileKset) -> Result<MovingSetSpec> {
    let kind = k.kind.as_str();
    let all = [
        ("shape", k.shape.is_some()),
        ("center", k.center.is_some()),
        ("radius", k.radius.is_some()),
        ("r0", k.r0.is_some()),
        ("theta0", k.theta0.is_some()),
        ("theta1", k.theta1.is_some()),
        ("omega", k.omega.is_some()),
        ("k0", k.k0.is_some()),
        ("k1", k.k1.is_some()),
        ("period", k.period.is_some()),
        ("t1", k.t1.is_some()),
        ("template", k.template.is_some()),
        ("curve", k.curve.is_some()),
        ("rotation", k.rotation.is_some()),
    ];
    let allowed: &[&str] = match kind {
        "static" => &["shape"],
        "radius-ball" => &["center", "radius"],
        "rotating-sector" => &["center", "r0", "theta0", "theta1", "omega"],
        "jumping" => &["k0", "k1", "period", "t1"],
        "translating" => &["template", "curve", "rotation"],
        other => return Err(bad("kset", format!("unknown kind '{other}'"))),
    };
    let extra: Vec<(&str, bool)> = all.iter().filter(|(n, _)| !allowed.contains(n)).copied().collect();
    forbid("kset", kind, &extra)?;
    Ok(match kind {
        "static" => MovingSetSpec::Static(shape_field("kset", "shape", k.shape.as_ref())?),
        "radius-ball" => {
            let c = need("kset", "center", k.center)?;
            MovingSetSpec::RadiusBall {
                center: Point::new(c[0], c[1]),
                radius: radius_schedule(need("kset", "radius", k.radius.as_ref())?)?,
            }
        }
        "rotating-sector" => {
            let c = need("kset", "center", k.center)?;
            MovingSetSpec::RotatingSector {
                center: Point::new(c[0], c[1]),
                r0: need("kset", "r0", k.r0)?,
                theta0: need("kset", "theta0", k.theta0)?,
                theta1: need("kset", "theta1", k.theta1)?,
                omega: need("kset", "omega", k.omega)?,
            }
        }
        "jumping" => MovingSetSpec::Jumping {
            k0: shape_field("kset", "k0", k.k0.as_ref())?,
            k1: shape_field("kset", "k1", k.k1.as_ref())?,
            period: need("kset", "period", k.period)?,
            t1: need("kset", "t1", k.t1)?,
        },
        _ => MovingSetSpec::Translating {
            template: shape_field("kset", "template", k.template.as_ref())?,
            curve: path_schedule(need("kset", "curve", k.curve.as_ref())?)?,
            rotation: match &k.rotation {
                Some(r) => angle_schedule(r)?,
                None => AngleSchedule::Fixed(0.0),
            },
        },
    })
}

fn initial_of(i: &FileInitial) -> Result<InitialData> {
    let kind = i.kind.as_deref().unwrap_or("constant");
    let all = [
        ("value", i.value.is_some()),
        ("center", i.center.is_some()),
        ("radius", i.radius.is_some()),
        ("height", i.height.is_some()),
        ("shape", i.shape.is_some()),
        ("sup", i.sup.is_some()),
        ("values", i.values.is_some()),
    ];
    let allowed: &[&str] = match kind {
        "constant" => &["value"],
        "bump" => &["center", "radius", "height"],
        "eigenfunction" => &["shape", "sup"],
        "custom" => &["values"],
        other => return Err(bad("initial", format!("unknown kind '{other}'"))),
    };
    let extra: Vec<(&str, bool)> = all.iter().filter(|(n, _)| !allowed.contains(n)).copied().collect();
    forbid("initial", kind, &extra)?;
    Ok(match kind {
        "constant" => InitialData::Constant(i.value.unwrap_or(1.0)),
        "bump" => {
            let c = need("initial", "center", i.center)?;
            InitialData::Bump {
                center: Point::new(c[0], c[1]),
                radius: need("initial", "radius", i.radius)?,
                height: i.height.unwrap_or(1.0),
            }
        }
        "eigenfunction" => InitialData::PrincipalEigenfunction {
            shape: shape_field("initial", "shape", i.shape.as_ref())?,
            sup: i.sup.unwrap_or(1.0),
        },
        _ => InitialData::Custom(need("initial", "values", i.values.clone())?),
    })
}

fn scenario_of(f: &ScenarioFile) -> Result<Scenario> {
    let domain = domain_of(&f.domain)?;
    domain.validate()?;
    let params = EquationParams {
        lambda: f.equation.lambda,
        rho: f.equation.rho.unwrap_or(2.0),
        nu: nu_of(&f.equation)?,
        moving_set: kset_of(&f.kset)?,
    };
    let initial = initial_of(&f.initial)?;
    let scheme = SchemeConfig {
        dt: f
            .scheme
            .dt
            .unwrap_or_else(|| Scenario::default_dt(&domain)),
        solve_tol: f.scheme.solve_tol.unwrap_or(DEFAULT_SOLVE_TOL),
        growth_cap: f
            .scheme
            .growth_cap
            .unwrap_or_else(|| Scenario::default_growth_cap(&initial)),
    };
    let defaults = PredictConfig::default();
    let s = Scenario {
        label: f.label.clone().unwrap_or_else(|| "custom".into()),
        domain,
        resolution: f.domain.resolution.unwrap_or(DEFAULT_RESOLUTION),
        params,
        scheme,
        t0: f.time.t0.unwrap_or(0.0),
        t_end: f.time.t_end.unwrap_or(1.0),
        initial,
        outputs: OutputSpec {
            sample_every: f.output.sample_every.unwrap_or(10),
            snapshot_times: f.output.snapshot_times.clone().unwrap_or_default(),
            display_max: f.output.display_max,
        },
        predict: PredictConfig {
            delta: f.predict.delta,
            tau0: f.predict.tau0.unwrap_or(defaults.tau0),
            gamma: f.predict.gamma.unwrap_or(defaults.gamma),
            c_inf: f.predict.c_inf.unwrap_or(defaults.c_inf),
            lambda0_cap: f.predict.lambda0_cap.unwrap_or(defaults.lambda0_cap),
        },
    };
    s.validate()?;
    Ok(s)
}

fn line_of(src: &str, offset: usize) -> usize {
    src.as_bytes()[..offset.min(src.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

fn syntax_error(src: &str, e: &toml::de::Error) -> Error {
    let msg = e.message().trim().to_string();
    match e.span() {
        Some(span) => ParseError::at(line_of(src, span.start), msg).into(),
        None => ParseError::new(msg).into(),
    }
}

/// Parses a scenario file and checks every invariant.
pub fn parse_scenario(src: &str) -> Result<Scenario> {
    let f: ScenarioFile = toml::from_str(src).map_err(|e| syntax_error(src, &e))?;
    scenario_of(&f)
}

/// Applies `section.key=value` overrides; values are parsed as TOML and
/// fall back to plain strings.
pub fn apply_overrides(src: &str, overrides: &[String]) -> Result<String> {
    let mut doc: toml::Table = toml::from_str(src).map_err(|e| syntax_error(src, &e))?;
    for o in overrides {
        let (path, raw) = o
            .split_once('=')
            .ok_or_else(|| ParseError::new(format!("override '{o}' is not key=value")))?;
        let path = path.trim();
        let raw = raw.trim();
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        let (table, key) = match path.split_once('.') {
            Some((section, key)) => {
                let entry = doc
                    .entry(section.to_string())
                    .or_insert_with(|| toml::Value::Table(toml::Table::new()));
                match entry {
                    toml::Value::Table(t) => (t, key),
                    _ => return Err(ParseError::new(format!("'{section}' is not a section")).into()),
                }
            }
            None => (&mut doc, path),
        };
        if key.is_empty() || key.contains('.') {
            return Err(ParseError::new(format!("override key '{path}' must be section.key")).into());
        }
        table.insert(key.to_string(), value);
    }
    toml::to_string(&doc).map_err(|e| ParseError::new(e.to_string()).into())
}

pub fn parse_scenario_with_overrides(src: &str, overrides: &[String]) -> Result<Scenario> {
    if overrides.is_empty() {
        return parse_scenario(src);
    }
    let merged = apply_overrides(src, overrides)?;
    parse_scenario(&merged)
}

fn file_of(s: &Scenario) -> ScenarioFile {
    let domain = match &s.domain {
        DomainSpec::Rectangle { lo, hi } => FileDomain {
            kind: Some("rectangle".into()),
            lo: Some(Coord::Pair([lo.x, lo.y])),
            hi: Some(Coord::Pair([hi.x, hi.y])),
            resolution: Some(s.resolution),
            ..FileDomain::default()
        },
        DomainSpec::Interval { lo, hi } => FileDomain {
            kind: Some("interval".into()),
            lo: Some(Coord::Scalar(*lo)),
            hi: Some(Coord::Scalar(*hi)),
            resolution: Some(s.resolution),
            ..FileDomain::default()
        },
        DomainSpec::Disc { center, radius } => FileDomain {
            kind: Some("disc".into()),
            center: Some([center.x, center.y]),
            radius: Some(*radius),
            resolution: Some(s.resolution),
            ..FileDomain::default()
        },
    };
    let nu = &s.params.nu;
    let mut equation = FileEquation {
        lambda: s.params.lambda,
        rho: Some(s.params.rho),
        ..FileEquation::default()
    };
    match nu.kind {
        NuKind::Saturating { nu_max, d_ramp } => {
            equation.nu = Some("saturating".into());
            equation.nu_max = Some(nu_max);
            equation.d_ramp = Some(d_ramp);
            equation.n_empty = Some(nu.n_empty);
        }
        NuKind::Indicator { level } => {
            equation.nu = Some("indicator".into());
            equation.level = Some(level);
            equation.n_empty = Some(nu.n_empty);
        }
        NuKind::Vanishing => equation.nu = Some("vanishing".into()),
    }
    let kset = match &s.params.moving_set {
        MovingSetSpec::Static(shape) => FileKset {
            kind: "static".into(),
            shape: Some(format_shape(shape)),
            ..FileKset::default()
        },
        MovingSetSpec::RadiusBall { center, radius } => FileKset {
            kind: "radius-ball".into(),
            center: Some([center.x, center.y]),
            radius: Some(format_radius(radius)),
            ..FileKset::default()
        },
        MovingSetSpec::RotatingSector {
            center,
            r0,
            theta0,
            theta1,
            omega,
        } => FileKset {
            kind: "rotating-sector".into(),
            center: Some([center.x, center.y]),
            r0: Some(*r0),
            theta0: Some(*theta0),
            theta1: Some(*theta1),
            omega: Some(*omega),
            ..FileKset::default()
        },
        MovingSetSpec::Jumping { k0, k1, period, t1 } => FileKset {
            kind: "jumping".into(),
            k0: Some(format_shape(k0)),
            k1: Some(format_shape(k1)),
            period: Some(*period),
            t1: Some(*t1),
            ..FileKset::default()
        },
        MovingSetSpec::Translating {
            template,
            curve,
            rotation,
        } => FileKset {
            kind: "translating".into(),
            template: Some(format_shape(template)),
            curve: Some(format_path(curve)),
            rotation: Some(format_angle(rotation)),
            ..FileKset::default()
        },
    };
    let initial = match &s.initial {
        InitialData::Constant(c) => FileInitial {
            kind: Some("constant".into()),
            value: Some(*c),
            ..FileInitial::default()
        },
        InitialData::Bump {
            center,
            radius,
            height,
        } => FileInitial {
            kind: Some("bump".into()),
            center: Some([center.x, center.y]),
            radius: Some(*radius),
            height: Some(*height),
            ..FileInitial::default()
        },
        InitialData::PrincipalEigenfunction { shape, sup } => FileInitial {
            kind: Some("eigenfunction".into()),
            shape: Some(format_shape(shape)),
            sup: Some(*sup),
            ..FileInitial::default()
        },
        InitialData::Custom(values) => FileInitial {
            kind: Some("custom".into()),
            values: Some(values.clone()),
            ..FileInitial::default()
        },
    };
    ScenarioFile {
        label: Some(s.label.clone()),
        domain,
        equation,
        kset,
        time: FileTime {
            t0: Some(s.t0),
            t_end: Some(s.t_end),
        },
        scheme: FileScheme {
            dt: Some(s.scheme.dt),
            solve_tol: Some(s.scheme.solve_tol),
            growth_cap: Some(s.scheme.growth_cap),
        },
        initial,
        output: FileOutput {
            sample_every: Some(s.outputs.sample_every),
            snapshot_times: (!s.outputs.snapshot_times.is_empty()).then(|| s.outputs.snapshot_times.clone()),
            display_max: s.outputs.display_max,
        },
        predict: FilePredict {
            delta: s.predict.delta,
            tau0: Some(s.predict.tau0),
            gamma: Some(s.predict.gamma),
            c_inf: Some(s.predict.c_inf),
            lambda0_cap: Some(s.predict.lambda0_cap),
        },
    }
}

/// Canonical text of a scenario: every key spelled out.
pub fn emit_scenario(s: &Scenario) -> String {
    // every field is a plain number, string or array, so serialization cannot fail
    toml::to_string(&file_of(s)).unwrap_or_default()
}
