use crate::error::CliError;
use growdiff::critical::FitConfig;
use growdiff::exact::log_w_over_u;
use growdiff::motion::{BoundaryMotion, EtaSpec, MotionDocument, PhysicsParams};
use growdiff::numeric::{Representation, SolverConfig, TimeSteps};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Reads an optional JSON config file, applies flag overrides on top and
/// deserializes the result. Unknown keys are rejected by the target type.
pub fn load<T: DeserializeOwned>(path: Option<&Path>, overrides: Map<String, Value>) -> Result<T, CliError> {
    let mut map = match path {
        None => Map::new(),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            match serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))? {
                Value::Object(m) => m,
                _ => return Err(CliError::Config(format!("{}: expected a JSON object", p.display()))),
            }
        }
    };
    map.extend(overrides);
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(e.to_string()))
}

/// Collects `Some` flag values into an override map.
#[derive(Default)]
pub struct Overrides(Map<String, Value>);

impl Overrides {
    pub fn set<V: Into<Value>>(&mut self, key: &str, v: Option<V>) -> &mut Self {
        if let Some(v) = v {
            self.0.insert(key.to_string(), v.into());
        }
        self
    }

    pub fn set_value(&mut self, key: &str, v: Value) -> &mut Self {
        self.0.insert(key.to_string(), v);
        self
    }

    pub fn into_map(self) -> Map<String, Value> {
        self.0
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("growdiff-out")
}

fn default_modes() -> usize {
    4
}

fn default_eigen_grid() -> usize {
    1024
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenConfig {
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "L0")]
    pub l0: Option<f64>,
    #[serde(rename = "R0")]
    pub r0: Option<f64>,
    pub n_dim: Option<u32>,
    #[serde(default)]
    pub gamma0: f64,
    #[serde(default)]
    pub gamma1: f64,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_eigen_grid")]
    pub grid: usize,
    #[serde(default = "default_true")]
    pub refine: bool,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

/// Initial data `u0(ξ)` on `[0, L0]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    /// `u0 = sin(k π ξ/L0)`.
    Sine {
        #[serde(default = "one")]
        mode: u32,
    },
    /// `u0` chosen so that the transformed data is `w0 = sin(π ξ/L0)`.
    WSine,
    /// Samples on a uniform grid over `[0, L0]`, interpolated linearly.
    Values { values: Vec<f64> },
}

fn one() -> u32 {
    1
}

impl Default for Initial {
    fn default() -> Self {
        Initial::Sine { mode: 1 }
    }
}

impl Initial {
    pub fn function(&self, motion: &BoundaryMotion, physics: &PhysicsParams) -> Result<Box<dyn Fn(f64) -> f64>, CliError> {
        let l0 = motion.l0();
        Ok(match self.clone() {
            Initial::Sine { mode } => Box::new(move |x| (mode as f64 * PI * x / l0).sin()),
            Initial::WSine => {
                let k = motion.kinematics(0.0).map_err(|e| CliError::Config(e.to_string()))?;
                let phys = *physics;
                Box::new(move |x| (PI * x / l0).sin() * (-log_w_over_u(&k, &phys, l0, 0.0, 0.0, x)).exp())
            }
            Initial::Values { values } => {
                if values.len() < 2 {
                    return Err(CliError::Config("initial.values needs at least two samples".into()));
                }
                Box::new(move |x| {
                    let n = values.len() - 1;
                    let f = (x / l0).clamp(0.0, 1.0) * n as f64;
                    let i = (f.floor() as usize).min(n - 1);
                    let r = f - i as f64;
                    values[i] * (1.0 - r) + values[i + 1] * r
                })
            }
        })
    }
}

fn default_field_grid() -> usize {
    512
}

fn default_series_modes() -> usize {
    32
}

fn default_exact_grid() -> usize {
    1024
}

fn default_steps() -> TimeSteps {
    TimeSteps::Uniform { dt: 1e-4 }
}

fn default_theta() -> f64 {
    0.5
}

fn default_compare_tol() -> f64 {
    1e-4
}

/// Motion block: a motion document with its physics inside.
#[derive(Debug, Clone, Deserialize)]
#[serde(transparent)]
pub struct MotionBlock(pub Value);

impl MotionBlock {
    pub fn build(&self) -> Result<(BoundaryMotion, PhysicsParams), CliError> {
        let doc = MotionDocument::from_value(self.0.clone()).map_err(|e| CliError::Config(format!("motion: {e}")))?;
        let motion = doc.build().map_err(|e| CliError::Config(format!("motion: {e}")))?;
        Ok((motion, doc.physics))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactConfig {
    pub motion: MotionBlock,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default = "default_exact_grid")]
    pub grid: usize,
    #[serde(default = "default_series_modes")]
    pub modes: usize,
    pub times: Vec<f64>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericConfig {
    pub motion: MotionBlock,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default = "default_field_grid")]
    pub grid: usize,
    #[serde(default = "default_steps")]
    pub steps: TimeSteps,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_representation")]
    pub representation: Representation,
    pub times: Vec<f64>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_representation() -> Representation {
    Representation::U
}

impl NumericConfig {
    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            grid_size: self.grid,
            steps: self.steps,
            theta: self.theta,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub motion: MotionBlock,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default = "default_field_grid")]
    pub grid: usize,
    #[serde(default = "default_exact_grid")]
    pub exact_grid: usize,
    #[serde(default = "default_series_modes")]
    pub modes: usize,
    #[serde(default = "default_steps")]
    pub steps: TimeSteps,
    #[serde(default = "default_theta")]
    pub theta: f64,
    pub times: Vec<f64>,
    #[serde(default = "default_compare_tol")]
    pub tol: f64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_l0_offset() -> f64 {
    2.0
}

fn default_n_dim() -> u32 {
    1
}

fn default_fit_grid() -> usize {
    1024
}

fn default_window() -> [f64; 2] {
    [1e3, 1e5]
}

fn default_probes() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_samples() -> usize {
    40
}

fn default_fit_steps() -> TimeSteps {
    TimeSteps::Geometric {
        dt0: 1e-4,
        ratio: 1.02,
        dt_max: 2.0,
    }
}

fn default_fit_tol() -> f64 {
    0.05
}

fn default_envelope_t() -> f64 {
    1e3
}

fn default_envelope_grid() -> usize {
    512
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalConfig {
    pub physics: PhysicsParams,
    /// `α` itself.
    pub alpha: Option<f64>,
    /// `α` in units of `D/c*`.
    pub alpha_dc: Option<f64>,
    #[serde(default)]
    pub eta: EtaSpec,
    #[serde(rename = "L0_offset", default = "default_l0_offset")]
    pub l0_offset: f64,
    #[serde(default = "default_n_dim")]
    pub n_dim: u32,
    #[serde(default = "default_fit_grid")]
    pub grid: usize,
    #[serde(default = "default_fit_steps")]
    pub steps: TimeSteps,
    #[serde(default = "default_window")]
    pub t_window: [f64; 2],
    #[serde(default = "default_probes")]
    pub y_probes: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_fit_tol")]
    pub tol: f64,
    #[serde(default = "default_true")]
    pub envelope: bool,
    #[serde(default = "default_envelope_t")]
    pub envelope_t_max: f64,
    #[serde(default = "default_envelope_grid")]
    pub envelope_grid: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

impl CriticalConfig {
    pub fn alpha(&self) -> Result<f64, CliError> {
        match (self.alpha, self.alpha_dc) {
            (Some(a), None) => Ok(a),
            (None, Some(k)) => Ok(k * self.physics.d / self.physics.c_star()),
            (None, None) => Err(CliError::Config("missing field `alpha` (or `alpha_dc`)".into())),
            (Some(_), Some(_)) => Err(CliError::Config("give only one of `alpha` and `alpha_dc`".into())),
        }
    }

    pub fn fit(&self) -> FitConfig {
        FitConfig {
            solver: SolverConfig {
                grid_size: self.grid,
                steps: self.steps,
                theta: 0.5,
            },
            t_window: self.t_window,
            y_probes: self.y_probes.clone(),
            samples: self.samples,
        }
    }
}
