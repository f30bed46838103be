//! Complete experiment descriptions, the theorem-predicate engine, the
//! trajectory classifier and the cross-check that ties them together.

mod classify;
mod crosscheck;
mod independence;
mod predict;
pub mod registry;

pub use classify::{classify, ClassifyConfig, Verdict, VerdictKind};
pub use crosscheck::{cross_check, CrossCheckReport, Status};
pub use independence::{initial_data_independence, IndependenceReport};
pub use predict::{predict, Prediction, Theorem, TheoremCheck};

use crate::error::{ConfigError, Result};
use crate::evolve::{EquationParams, OutputPlan, SchemeConfig};
use crate::geometry::{DomainSpec, Point, SetShape};
use crate::grid::{Field, Grid};
use crate::spectral::{principal_of_components, DEFAULT_EIGEN_TOL};

/// Nonnegative, nontrivial initial data.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Constant(f64),
    /// `height · max(0, 1 − |x−c|²/r²)`
    Bump {
        center: Point,
        radius: f64,
        height: f64,
    },
    /// Principal eigenfunction of the set, scaled to the given sup-norm.
    PrincipalEigenfunction { shape: SetShape, sup: f64 },
    /// Values on the full node box of the scenario grid.
    Custom(Vec<f64>),
}

impl InitialData {
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::invariant("initial", m));
        match self {
            InitialData::Constant(c) => {
                if !(c.is_finite() && *c > 0.0) {
                    return bad("constant initial data must be > 0");
                }
            }
            InitialData::Bump {
                center,
                radius,
                height,
            } => {
                if !(center.is_finite() && *radius > 0.0 && *height > 0.0 && height.is_finite()) {
                    return bad("bump needs radius > 0 and height > 0");
                }
            }
            InitialData::PrincipalEigenfunction { shape, sup } => {
                shape.validate()?;
                if shape.is_empty() {
                    return bad("eigenfunction of an empty set");
                }
                if !(sup.is_finite() && *sup > 0.0) {
                    return bad("eigenfunction sup must be > 0");
                }
            }
            InitialData::Custom(values) => {
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return bad("custom initial data must be finite and >= 0");
                }
                if values.iter().all(|&v| v == 0.0) {
                    return bad("initial data must not vanish identically");
                }
            }
        }
        Ok(())
    }

    /// Sup-norm of the data before restriction to a grid.
    pub fn nominal_sup(&self) -> f64 {
        match self {
            InitialData::Constant(c) => *c,
            InitialData::Bump { height, .. } => *height,
            InitialData::PrincipalEigenfunction { sup, .. } => *sup,
            InitialData::Custom(values) => values.iter().copied().fold(0.0, f64::max),
        }
    }

    pub fn field(&self, grid: &Grid) -> Result<Field> {
        let f = match self {
            InitialData::Constant(c) => Field::from_fn(grid, &grid.mask, |_| *c),
            InitialData::Bump {
                center,
                radius,
                height,
            } => Field::from_fn(grid, &grid.mask, |p| {
                height * (1.0 - (p.dist(*center) / radius).powi(2)).max(0.0)
            }),
            InitialData::PrincipalEigenfunction { shape, sup } => {
                let m = grid.mask_from_shape(shape);
                let pair = principal_of_components(grid, &m, DEFAULT_EIGEN_TOL)?;
                let s = pair.vector.sup_norm();
                pair.vector.scaled(sup / s)
            }
            InitialData::Custom(values) => {
                if values.len() != grid.len() {
                    return Err(ConfigError::invariant(
                        "initial",
                        format!("custom data has {} values, grid has {}", values.len(), grid.len()),
                    )
                    .into());
                }
                let mut f = Field::zeros(grid);
                f.values.clone_from(values);
                f.restricted(&grid.mask)
            }
        };
        if f.values.iter().all(|&v| v == 0.0) {
            return Err(ConfigError::invariant(
                "initial",
                "initial data vanishes on every grid node",
            )
            .into());
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub sample_every: usize,
    pub snapshot_times: Vec<f64>,
    /// Upper end of the gray scale for PGM snapshots; the run's max when unset.
    pub display_max: Option<f64>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            sample_every: 10,
            snapshot_times: Vec::new(),
            display_max: None,
        }
    }
}

impl OutputSpec {
    pub fn plan(&self) -> OutputPlan {
        OutputPlan {
            sample_every: self.sample_every,
            snapshot_times: self.snapshot_times.clone(),
        }
    }
}

/// Knobs of the theorem-predicate engine.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictConfig {
    /// Dilation radius for the moving neighborhoods; defaults to `2h`.
    pub delta: Option<f64>,
    /// Half-width of the time windows for the moving neighborhoods.
    pub tau0: f64,
    /// Growth factor per window in the unboundedness checks.
    pub gamma: f64,
    /// Surrogate for the Sobolev embedding constant.
    pub c_inf: f64,
    /// `λ₀` values above this count as infinite.
    pub lambda0_cap: f64,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            delta: None,
            tau0: 0.05,
            gamma: 2.0,
            c_inf: 1.0,
            lambda0_cap: crate::spectral::DEFAULT_LAMBDA0_CAP,
        }
    }
}

impl PredictConfig {
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(ConfigError::invariant("predict", "delta must be > 0"));
            }
        }
        if !(self.tau0 > 0.0 && self.tau0.is_finite()) {
            return Err(ConfigError::invariant("predict", "tau0 must be > 0"));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(ConfigError::invariant("predict", "gamma must be > 1"));
        }
        if !(self.c_inf > 0.0 && self.c_inf.is_finite()) {
            return Err(ConfigError::invariant("predict", "c_inf must be > 0"));
        }
        if !(self.lambda0_cap > 0.0) {
            return Err(ConfigError::invariant("predict", "lambda0_cap must be > 0"));
        }
        Ok(())
    }
}

/// A complete experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub domain: DomainSpec,
    pub resolution: usize,
    pub params: EquationParams,
    pub scheme: SchemeConfig,
    pub t0: f64,
    pub t_end: f64,
    pub initial: InitialData,
    pub outputs: OutputSpec,
    pub predict: PredictConfig,
}

impl Scenario {
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        self.domain.validate()?;
        if self.resolution < 2 {
            return Err(ConfigError::invariant("domain", "resolution must be >= 2"));
        }
        self.params.validate()?;
        self.scheme.validate(self.params.lambda)?;
        if !(self.t0.is_finite() && self.t_end.is_finite() && self.t_end >= self.t0) {
            return Err(ConfigError::invariant("time", "requires t_end >= t0"));
        }
        self.initial.validate()?;
        if self.outputs.sample_every == 0 {
            return Err(ConfigError::invariant("output", "sample_every must be >= 1"));
        }
        self.predict.validate()?;
        let sample_dt = crate::geometry::default_sample_dt(0.0).min((self.t_end - self.t0).max(1e-3) / 50.0);
        // Coarse sampling is enough here: motion is continuous or piecewise constant.
        self.params
            .moving_set
            .check_inside(&self.domain, self.t0, self.t_end, sample_dt)
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::new(self.domain.clone(), self.resolution)
    }

    pub fn initial_field(&self, grid: &Grid) -> Result<Field> {
        self.initial.field(grid)
    }

    /// Default time step: a thousandth of the reference time `1/λ₁^Ω`.
    pub fn default_dt(domain: &DomainSpec) -> f64 {
        1e-3 / crate::spectral::analytic_lambda1_domain(domain)
    }

    /// Default growth cap: `10⁴·‖u₀‖_∞`.
    pub fn default_growth_cap(initial: &InitialData) -> f64 {
        1e4 * initial.nominal_sup()
    }
}
