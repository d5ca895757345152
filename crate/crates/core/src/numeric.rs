//! Finite-difference solvers on the fixed computational domain.
//!
//! All three solvers use a θ-scheme (Crank–Nicolson by default) with central
//! differences, coefficients frozen at the half step and one tridiagonal
//! solve per step.

use crate::eigen;
use crate::exact::log_w_over_u;
use crate::io;
use crate::motion::{BoundaryMotion, MotionError, PhysicsParams};
use crate::quad::{self, QuadError, Tolerance};
use crate::tridiag::thomas_solve;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub const MIN_GRID: usize = 8;
/// Largest admissible cell Péclet number for the central advection stencil.
pub const MAX_PECLET: f64 = 2.0;
/// Backward-Euler half steps taken before switching to the θ-scheme, so that
/// rough or boundary-incompatible data does not seed undamped oscillations.
pub const STARTUP_STEPS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("final time {t} is not below the validity horizon {horizon}")]
    Horizon { t: f64, horizon: f64 },
    #[error("cell Péclet number {peclet:.3} exceeds {MAX_PECLET} at xi = {xi} (t = {t}); refine the grid")]
    Peclet { peclet: f64, xi: f64, t: f64 },
    #[error("grid needs at least {MIN_GRID} intervals, got {0}")]
    GridTooSmall(usize),
    #[error("initial data has {got} values, expected {expected}")]
    GridMismatch { expected: usize, got: usize },
    #[error("invalid time stepping: {0}")]
    BadSteps(String),
    #[error("output times must be nonnegative and nondecreasing")]
    BadTimes,
    #[error("the w-equation solver needs a symmetric motion (Ȧ = -L̇/2)")]
    Asymmetric,
    #[error("radial solver supports n_dim in 1..=3, got {0}")]
    BadDimension(u32),
    #[error("solution became non-finite at t = {0}")]
    NonFinite(f64),
    #[error("representation {0:?} cannot be mapped this way")]
    WrongRepresentation(Representation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// `u(ξ, t) = ψ(A + ξ L/L0, t)`.
    U,
    /// Interval `w`.
    W,
    /// Radial `W(r, t)` on `[0, R0]`.
    RadialW,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeSteps {
    Uniform { dt: f64 },
    /// `dt_{k+1} = min(ratio dt_k, dt_max)`.
    Geometric { dt0: f64, ratio: f64, dt_max: f64 },
}

impl TimeSteps {
    fn validate(&self) -> Result<(), NumericError> {
        let ok = match *self {
            TimeSteps::Uniform { dt } => dt > 0.0 && dt.is_finite(),
            TimeSteps::Geometric { dt0, ratio, dt_max } => {
                dt0 > 0.0 && ratio >= 1.0 && ratio.is_finite() && dt_max >= dt0 && dt_max.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(NumericError::BadSteps(format!("{self:?}")))
        }
    }

    fn first(&self) -> f64 {
        match *self {
            TimeSteps::Uniform { dt } => dt,
            TimeSteps::Geometric { dt0, .. } => dt0,
        }
    }

    fn next(&self, dt: f64) -> f64 {
        match *self {
            TimeSteps::Uniform { dt } => dt,
            TimeSteps::Geometric { ratio, dt_max, .. } => (dt * ratio).min(dt_max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub grid_size: usize,
    pub steps: TimeSteps,
    #[serde(default = "default_theta")]
    pub theta: f64,
}

fn default_theta() -> f64 {
    0.5
}

impl SolverConfig {
    pub fn uniform(grid_size: usize, dt: f64) -> Self {
        SolverConfig {
            grid_size,
            steps: TimeSteps::Uniform { dt },
            theta: 0.5,
        }
    }

    pub fn geometric(grid_size: usize, dt0: f64, ratio: f64, dt_max: f64) -> Self {
        SolverConfig {
            grid_size,
            steps: TimeSteps::Geometric { dt0, ratio, dt_max },
            theta: 0.5,
        }
    }

    fn validate(&self) -> Result<(), NumericError> {
        if self.grid_size < MIN_GRID {
            return Err(NumericError::GridTooSmall(self.grid_size));
        }
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(NumericError::BadSteps(format!("theta {} outside [0.5, 1]", self.theta)));
        }
        self.steps.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeMeta {
    pub representation: Representation,
    pub grid_size: usize,
    pub theta: f64,
    pub steps: TimeSteps,
    pub step_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_dim: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSolution {
    /// `ξ` nodes (or `r` nodes for radial runs), both ends included.
    pub grid: Vec<f64>,
    pub times: Vec<f64>,
    /// `field[k][i]` is the value at `times[k]`, `grid[i]`.
    pub field: Vec<Vec<f64>>,
    pub meta: SchemeMeta,
}

impl GridSolution {
    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Cubic interpolation of the `k`-th output row.
    pub fn value_at(&self, k: usize, x: f64) -> f64 {
        eigen::interpolate(&self.field[k], self.spacing(), x)
    }

    pub fn max_abs(&self) -> f64 {
        self.field.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maps between the `u` and `w` interval representations.
    pub fn remap(&self, motion: &BoundaryMotion, physics: &PhysicsParams, to: Representation) -> Result<GridSolution, NumericError> {
        let sign = match (self.meta.representation, to) {
            (a, b) if a == b => return Ok(self.clone()),
            (Representation::U, Representation::W) => 1.0,
            (Representation::W, Representation::U) => -1.0,
            (from, _) => return Err(NumericError::WrongRepresentation(from)),
        };
        let integrals = adot_sq_integrals(motion, &self.times)?;
        let l0 = motion.l0();
        let mut field = Vec::with_capacity(self.field.len());
        for ((row, &t), ia) in self.field.iter().zip(&self.times).zip(&integrals) {
            let k = motion.kinematics(t)?;
            field.push(
                row.iter()
                    .zip(&self.grid)
                    .map(|(v, &xi)| v * (sign * log_w_over_u(&k, physics, l0, t, *ia, xi)).exp())
                    .collect(),
            );
        }
        let mut meta = self.meta.clone();
        meta.representation = to;
        Ok(GridSolution {
            grid: self.grid.clone(),
            times: self.times.clone(),
            field,
            meta,
        })
    }

    /// Long-format CSV `t, xi, value` (`r` in place of `xi` for radial runs).
    pub fn to_csv(&self) -> String {
        let x = if self.meta.representation == Representation::RadialW { "r" } else { "xi" };
        let rows = self
            .times
            .iter()
            .zip(&self.field)
            .flat_map(|(&t, row)| self.grid.iter().zip(row).map(move |(&x, &v)| [t, x, v]));
        io::csv_string(&["t", x, "value"], rows)
    }

    pub fn manifest(&self, motion: &BoundaryMotion, physics: &PhysicsParams) -> Value {
        let spec = serde_json::to_string(motion.spec()).expect("json");
        io::manifest(
            "numeric",
            json!({
                "scheme": self.meta,
                "physics": physics,
                "motion": motion.spec(),
                "motion_sha256": io::sha256_hex(spec.as_bytes()),
                "nodes": self.grid.len(),
                "times": self.times,
            }),
        )
    }
}

/// `∫_0^t Ȧ²` at each of the (nondecreasing) `times`.
pub fn adot_sq_integrals(motion: &BoundaryMotion, times: &[f64]) -> Result<Vec<f64>, NumericError> {
    let f = |z: f64| motion.kinematics(z).map(|k| k.adot * k.adot).unwrap_or(f64::NAN);
    Ok(quad::cumulative(f, 0.0, times, Tolerance { abs: 1e-12, rel: 1e-13 })?)
}

/// Tridiagonal operator rows for the unknowns at one instant.
struct Rows {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl Rows {
    fn new(m: usize) -> Self {
        Rows {
            sub: vec![0.0; m],
            diag: vec![0.0; m],
            sup: vec![0.0; m],
        }
    }
}

fn check_times(times: &[f64]) -> Result<f64, NumericError> {
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| !t.is_finite()) {
        return Err(NumericError::BadTimes);
    }
    Ok(times[times.len() - 1])
}

fn check_horizon(motion: &BoundaryMotion, t_end: f64) -> Result<(), NumericError> {
    let horizon = motion.validity_horizon();
    if t_end >= horizon && !(motion.critical_params().is_none() && motion.separable_params().is_none() && t_end <= horizon) {
        return Err(NumericError::Horizon { t: t_end, horizon });
    }
    Ok(())
}

/// θ-scheme march of `y' = L(t) y`, recording `y` at each output time.
/// `offset` is the node index of the first unknown; remaining nodes are 0.
fn march<F>(
    y0: Vec<f64>,
    nodes: usize,
    offset: usize,
    cfg: &SolverConfig,
    outputs: &[f64],
    mut operator: F,
) -> Result<(Vec<Vec<f64>>, usize), NumericError>
where
    F: FnMut(f64, &mut Rows) -> Result<(), NumericError>,
{
    let m = y0.len();
    let theta = cfg.theta;
    let mut y = y0;
    let mut rows = Rows::new(m);
    let (mut sub, mut diag, mut sup, mut rhs) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut scratch = Vec::with_capacity(m);
    let mut t = 0.0;
    let mut dt = cfg.steps.first();
    let mut count = 0;
    let mut field = Vec::with_capacity(outputs.len());
    let embed = |y: &[f64]| {
        let mut row = vec![0.0; nodes];
        row[offset..offset + y.len()].copy_from_slice(y);
        row
    };
    for &target in outputs {
        while t < target {
            let startup = count < STARTUP_STEPS && theta < 1.0;
            let mut step = if startup { 0.5 * dt } else { dt };
            let full = target - t <= step * (1.0 + 1e-9);
            if full {
                step = target - t;
            }
            operator(t + 0.5 * step, &mut rows)?;
            let th = if startup { 1.0 } else { theta };
            let (a, b) = (th * step, (1.0 - th) * step);
            for i in 0..m {
                let left = if i > 0 { rows.sub[i] * y[i - 1] } else { 0.0 };
                let right = if i + 1 < m { rows.sup[i] * y[i + 1] } else { 0.0 };
                rhs[i] = y[i] + b * (left + rows.diag[i] * y[i] + right);
                sub[i] = -a * rows.sub[i];
                diag[i] = 1.0 - a * rows.diag[i];
                sup[i] = -a * rows.sup[i];
            }
            thomas_solve(&sub, &diag, &sup, &mut rhs, &mut scratch);
            std::mem::swap(&mut y, &mut rhs);
            t = if full { target } else { t + step };
            count += 1;
            if !full && !startup {
                dt = cfg.steps.next(dt);
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(NumericError::NonFinite(t));
            }
        }
        field.push(embed(&y));
    }
    Ok((field, count))
}

fn uniform_grid(extent: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { extent } else { extent * i as f64 / n as f64 }).collect()
}

fn interior(values: &[f64], n: usize) -> Result<Vec<f64>, NumericError> {
    if values.len() != n + 1 {
        return Err(NumericError::GridMismatch {
            expected: n + 1,
            got: values.len(),
        });
    }
    Ok(values[1..n].to_vec())
}

/// Solves `u_t = D L0²/L² u_ξξ + ((Ȧ L0 + ξ L̇)/L) u_ξ + f0 u` with zero
/// boundary values. `u0` holds the `grid_size + 1` node values.
pub fn solve_u(
    motion: &BoundaryMotion,
    physics: &PhysicsParams,
    u0: &[f64],
    cfg: &SolverConfig,
    output_times: &[f64],
) -> Result<GridSolution, NumericError> {
    cfg.validate()?;
    physics.validate()?;
    let t_end = check_times(output_times)?;
    check_horizon(motion, t_end)?;
    let n = cfg.grid_size;
    let l0 = motion.l0();
    let h = l0 / n as f64;
    let grid = uniform_grid(l0, n);
    let y0 = interior(u0, n)?;
    let (d, f0) = (physics.d, physics.f0);
    let (field, count) = march(y0, n + 1, 1, cfg, output_times, |t, rows| {
        let k = motion.kinematics(t)?;
        let diff = d * l0 * l0 / (k.l * k.l);
        for (j, xi) in grid[1..n].iter().enumerate() {
            let v = (k.adot * l0 + xi * k.ldot) / k.l;
            let peclet = v.abs() * h / diff;
            if peclet > MAX_PECLET {
                return Err(NumericError::Peclet { peclet, xi: *xi, t });
            }
            rows.sub[j] = diff / (h * h) - v / (2.0 * h);
            rows.diag[j] = -2.0 * diff / (h * h) + f0;
            rows.sup[j] = diff / (h * h) + v / (2.0 * h);
        }
        Ok(())
    })?;
    Ok(GridSolution {
        grid: grid.clone(),
        times: output_times.to_vec(),
        field,
        meta: SchemeMeta {
            representation: Representation::U,
            grid_size: n,
            theta: cfg.theta,
            steps: cfg.steps,
            step_count: count,
            n_dim: None,
        },
    })
}

/// Solves `w_t = D L0²/L² w_ξξ + L̈ L ξ(ξ - L0)/(4 D L0²) w` for a symmetric
/// motion.
pub fn solve_w(
    motion: &BoundaryMotion,
    physics: &PhysicsParams,
    w0: &[f64],
    cfg: &SolverConfig,
    output_times: &[f64],
) -> Result<GridSolution, NumericError> {
    cfg.validate()?;
    physics.validate()?;
    if !motion.is_symmetric() {
        return Err(NumericError::Asymmetric);
    }
    let t_end = check_times(output_times)?;
    check_horizon(motion, t_end)?;
    let n = cfg.grid_size;
    let l0 = motion.l0();
    let h = l0 / n as f64;
    let grid = uniform_grid(l0, n);
    let y0 = interior(w0, n)?;
    let d = physics.d;
    let (field, count) = march(y0, n + 1, 1, cfg, output_times, |t, rows| {
        let k = motion.kinematics(t)?;
        let diff = d * l0 * l0 / (k.l * k.l);
        let pot = k.lddot * k.l / (4.0 * d * l0 * l0);
        for (j, xi) in grid[1..n].iter().enumerate() {
            rows.sub[j] = diff / (h * h);
            rows.diag[j] = -2.0 * diff / (h * h) + pot * xi * (xi - l0);
            rows.sup[j] = diff / (h * h);
        }
        Ok(())
    })?;
    Ok(GridSolution {
        grid,
        times: output_times.to_vec(),
        field,
        meta: SchemeMeta {
            representation: Representation::W,
            grid_size: n,
            theta: cfg.theta,
            steps: cfg.steps,
            step_count: count,
            n_dim: None,
        },
    })
}

/// Solves the radial problem on `[0, R0]` with `R(t) = L(t)/2` taken from
/// `motion`:
/// `W_t = D R0²/R² ∇²W + (R̈ R/(4D)) (r²/R0² - 1) W`, regular at `r = 0`.
pub fn solve_radial(
    motion: &BoundaryMotion,
    physics: &PhysicsParams,
    w0: &[f64],
    n_dim: u32,
    cfg: &SolverConfig,
    output_times: &[f64],
) -> Result<GridSolution, NumericError> {
    cfg.validate()?;
    physics.validate()?;
    if !(1..=3).contains(&n_dim) {
        return Err(NumericError::BadDimension(n_dim));
    }
    let t_end = check_times(output_times)?;
    check_horizon(motion, t_end)?;
    let n = cfg.grid_size;
    let r0 = 0.5 * motion.l0();
    let h = r0 / n as f64;
    let grid = uniform_grid(r0, n);
    if w0.len() != n + 1 {
        return Err(NumericError::GridMismatch {
            expected: n + 1,
            got: w0.len(),
        });
    }
    let y0 = w0[..n].to_vec();
    let nd = n_dim as i32;
    let face = |i: usize| ((i as f64 + 0.5) * h).powi(nd - 1);
    let mass: Vec<f64> = (0..n)
        .map(|i| {
            let hi = ((i as f64 + 0.5) * h).powi(nd);
            let lo = if i == 0 { 0.0 } else { ((i as f64 - 0.5) * h).powi(nd) };
            (hi - lo) / nd as f64
        })
        .collect();
    let d = physics.d;
    let (field, count) = march(y0, n + 1, 0, cfg, output_times, |t, rows| {
        let k = motion.kinematics(t)?;
        // R = L/2, R0 = L0/2: D R0²/R² = D L0²/L² and R̈ R = L̈ L/4.
        let diff = d * (r0 / (0.5 * k.l)).powi(2);
        let pot = k.lddot * k.l / (16.0 * d);
        for i in 0..n {
            let left = if i == 0 { 0.0 } else { face(i - 1) };
            let right = face(i);
            let r = i as f64 * h;
            rows.sub[i] = diff * left / (h * mass[i]);
            rows.sup[i] = diff * right / (h * mass[i]);
            rows.diag[i] = -diff * (left + right) / (h * mass[i]) + pot * (r * r / (r0 * r0) - 1.0);
        }
        Ok(())
    })?;
    Ok(GridSolution {
        grid,
        times: output_times.to_vec(),
        field,
        meta: SchemeMeta {
            representation: Representation::RadialW,
            grid_size: n,
            theta: cfg.theta,
            steps: cfg.steps,
            step_count: count,
            n_dim: Some(n_dim),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{RadialSeries, SeriesSolution};
    use crate::motion::SeparableParams;
    use std::f64::consts::PI;

    fn unit() -> PhysicsParams {
        PhysicsParams::new(1.0, 1.0).unwrap()
    }

    fn sample(grid: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = grid.len() - 1;
        grid.iter().enumerate().map(|(i, &x)| if i == 0 || i == n { 0.0 } else { f(x) }).collect()
    }

    fn nodes(extent: f64, n: usize) -> Vec<f64> {
        uniform_grid(extent, n)
    }

    #[test]
    fn fourier_mode_on_fixed_interval() {
        let phys = PhysicsParams::new(1.0, 0.5).unwrap();
        let m = BoundaryMotion::separable(SeparableParams::fixed(1.0)).unwrap();
        let u0 = sample(&nodes(1.0, 512), |x| (PI * x).sin());
        let sol = solve_u(&m, &phys, &u0, &SolverConfig::uniform(512, 1e-4), &[0.5, 1.0]).unwrap();
        let decay = (0.5 - PI * PI).exp();
        let err = sol.grid.iter().zip(&sol.field[1]).map(|(x, v)| (v - decay * (PI * x).sin()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-5, "{err}");
        assert_eq!(sol.field[1][0], 0.0);
        assert_eq!(sol.field[1][512], 0.0);
    }

    #[test]
    fn zero_data_stays_zero() {
        let m = BoundaryMotion::separable(SeparableParams::linear(1.0, 1.0).with_drift(0.3, 0.0)).unwrap();
        let sol = solve_u(&m, &unit(), &vec![0.0; 65], &SolverConfig::uniform(64, 1e-2), &[1.0]).unwrap();
        assert!(sol.field[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn heat_decay_in_w_form() {
        let m = BoundaryMotion::separable(SeparableParams::fixed(2.0).with_drift(0.0, -1.0)).unwrap();
        let w0 = sample(&nodes(2.0, 400), |x| (PI * x / 2.0).sin());
        let sol = solve_w(&m, &unit(), &w0, &SolverConfig::uniform(400, 1e-3), &[1.0]).unwrap();
        let decay = (-PI * PI / 4.0).exp();
        for (x, v) in sol.grid.iter().zip(&sol.field[0]) {
            assert!((v - decay * (PI * x / 2.0).sin()).abs() < 1e-5);
        }
        let asym = BoundaryMotion::separable(SeparableParams::fixed(2.0).with_drift(0.5, 0.0)).unwrap();
        assert_eq!(solve_w(&asym, &unit(), &w0, &SolverConfig::uniform(400, 1e-3), &[1.0]), Err(NumericError::Asymmetric));
    }

    #[test]
    fn u_and_w_solvers_agree_on_a_critical_motion() {
        let phys = unit();
        let m = BoundaryMotion::critical(1.3, Default::default(), 1.5, &phys).unwrap();
        let l0 = m.l0();
        let n = 1600;
        let grid = nodes(l0, n);
        let u0 = sample(&grid, |x| (PI * x / l0).sin() * (1.0 + 0.2 * x));
        let cfg = SolverConfig::uniform(n, 5e-4);
        let times = [0.5, 1.5];
        let su = solve_u(&m, &phys, &u0, &cfg, &times).unwrap();
        let w0 = GridSolution {
            grid: grid.clone(),
            times: vec![0.0],
            field: vec![u0.clone()],
            meta: su.meta.clone(),
        }
        .remap(&m, &phys, Representation::W)
        .unwrap();
        let sw = solve_w(&m, &phys, &w0.field[0], &cfg, &times).unwrap();
        let mapped = su.remap(&m, &phys, Representation::W).unwrap();
        for k in 0..times.len() {
            let scale = sw.field[k].iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let err = mapped.field[k].iter().zip(&sw.field[k]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-6 * scale, "{err} vs {scale}");
        }
    }

    #[test]
    fn matches_series_on_each_family() {
        let cases = [
            SeparableParams::fixed(1.0).with_drift(0.5, 0.0).with_gamma1(0.3),
            SeparableParams::linear(1.0, 0.7).with_drift(-0.3, 0.0).with_gamma1(0.2),
            SeparableParams::sqrt(1.0, 0.5).with_drift(0.2, 0.0).with_gamma1(0.1),
            SeparableParams::quadratic(0.5, 1.0, 1.0).with_drift(0.1, 0.0).with_gamma1(0.2),
            SeparableParams::quadratic(1.0, 0.2, 1.0).with_drift(-0.2, 0.0).with_gamma1(0.3),
        ];
        for p in cases {
            let m = BoundaryMotion::separable(p).unwrap();
            let u0 = |x: f64| (PI * x).sin() * (1.0 + x);
            let series = SeriesSolution::build(m.clone(), unit(), u0, 512, 32).unwrap();
            let n = 1024;
            let init = sample(&nodes(1.0, n), u0);
            let sol = solve_u(&m, &unit(), &init, &SolverConfig::uniform(n, 5e-4), &[1.0]).unwrap();
            let exact: Vec<f64> = sol.grid.iter().map(|&x| series.u(x, 1.0).unwrap()).collect();
            let scale = exact.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let err = exact.iter().zip(&sol.field[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-4 * scale, "{:?}: {}", series.kind(), err / scale);
        }
    }

    #[test]
    fn second_order_in_space_and_time() {
        let m = BoundaryMotion::separable(SeparableParams::linear(1.0, 0.5).with_drift(0.3, 0.0)).unwrap();
        let u0 = |x: f64| (PI * x).sin();
        let run = |n: usize, dt: f64| {
            let init = sample(&nodes(1.0, n), u0);
            solve_u(&m, &unit(), &init, &SolverConfig::uniform(n, dt), &[0.5]).unwrap()
        };
        let at = |s: &GridSolution| s.value_at(0, 0.5);
        let (a, b, c) = (at(&run(64, 1e-4)), at(&run(128, 1e-4)), at(&run(256, 1e-4)));
        let order_h = ((a - b) / (b - c)).abs().log2();
        assert!((1.8..=2.2).contains(&order_h), "h order {order_h}");
        let (a, b, c) = (at(&run(256, 0.05)), at(&run(256, 0.025)), at(&run(256, 0.0125)));
        let order_t = ((a - b) / (b - c)).abs().log2();
        assert!((1.8..=2.2).contains(&order_t), "dt order {order_t}");
    }

    #[test]
    fn peclet_guard() {
        let m = BoundaryMotion::separable(SeparableParams::fixed(1.0).with_drift(50.0, 0.0)).unwrap();
        let init = sample(&nodes(1.0, 16), |x| (PI * x).sin());
        let r = solve_u(&m, &unit(), &init, &SolverConfig::uniform(16, 1e-3), &[0.1]);
        assert!(matches!(r, Err(NumericError::Peclet { .. })));
    }

    #[test]
    fn horizon_and_argument_checks() {
        let m = BoundaryMotion::separable(SeparableParams::sqrt(1.0, -1.0)).unwrap();
        let init = vec![0.0; 65];
        let cfg = SolverConfig::uniform(64, 1e-3);
        assert!(matches!(solve_u(&m, &unit(), &init, &cfg, &[0.5]), Err(NumericError::Horizon { .. })));
        assert!(solve_u(&m, &unit(), &init, &cfg, &[0.4]).is_ok());
        assert_eq!(solve_u(&m, &unit(), &init, &cfg, &[0.3, 0.2]), Err(NumericError::BadTimes));
        assert!(matches!(solve_u(&m, &unit(), &init[1..], &cfg, &[0.3]), Err(NumericError::GridMismatch { .. })));
        assert!(matches!(solve_u(&m, &unit(), &init, &SolverConfig::uniform(64, -1.0), &[0.3]), Err(NumericError::BadSteps(_))));
        assert_eq!(solve_radial(&m, &unit(), &init, 4, &cfg, &[0.1]), Err(NumericError::BadDimension(4)));
    }

    #[test]
    fn positivity_and_determinism() {
        let m = BoundaryMotion::separable(SeparableParams::quadratic(1.0, -0.5, 1.0).with_drift(0.4, 0.0)).unwrap();
        let init = sample(&nodes(1.0, 128), |x| x * (1.0 - x) * (1.0 + 3.0 * x));
        let cfg = SolverConfig::geometric(128, 1e-4, 1.05, 1e-2);
        let a = solve_u(&m, &unit(), &init, &cfg, &[0.1, 1.0, 3.0]).unwrap();
        let b = solve_u(&m, &unit(), &init, &cfg, &[0.1, 1.0, 3.0]).unwrap();
        assert_eq!(a, b);
        let max = a.max_abs();
        assert!(a.field.iter().flatten().all(|&v| v >= -1e-10 * max));
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.manifest(&m, &unit()), b.manifest(&m, &unit()));
    }

    #[test]
    fn comparison_for_nested_domains() {
        // Inner fixed interval [0.25, 0.75] sits inside the growing [0, 1 + t].
        let phys = unit();
        let inner = BoundaryMotion::separable(SeparableParams::fixed(0.5).with_drift(0.0, 0.25)).unwrap();
        let outer = BoundaryMotion::separable(SeparableParams::linear(1.0, 1.0)).unwrap();
        let n = 256;
        let f = |x: f64| if (0.25..=0.75).contains(&x) { (2.0 * PI * (x - 0.25)).sin() } else { 0.0 };
        let init_in = sample(&nodes(0.5, n), |xi| f(xi + 0.25));
        let init_out = sample(&nodes(1.0, n), |xi| f(xi) + 0.1 * (PI * xi).sin());
        let times = [0.2, 0.6, 1.0];
        let cfg = SolverConfig::uniform(n, 1e-3);
        let a = solve_u(&inner, &phys, &init_in, &cfg, &times).unwrap();
        let b = solve_u(&outer, &phys, &init_out, &cfg, &times).unwrap();
        for (k, &t) in times.iter().enumerate() {
            let lb = outer.kinematics(t).unwrap().l;
            for (xi, v) in a.grid.iter().zip(&a.field[k]) {
                let x = 0.25 + xi;
                let outer_val = b.value_at(k, x * 1.0 / lb);
                assert!(*v <= outer_val + 1e-8, "t={t} x={x}");
            }
        }
    }

    #[test]
    fn radial_three_ball_mode() {
        let m = BoundaryMotion::separable(SeparableParams::fixed(2.0)).unwrap();
        let n = 400;
        let grid = nodes(1.0, n);
        let f = |r: f64| if r == 0.0 { PI } else { (PI * r).sin() / r };
        let w0: Vec<f64> = grid.iter().map(|&r| if r == 1.0 { 0.0 } else { f(r) }).collect();
        let sol = solve_radial(&m, &unit(), &w0, 3, &SolverConfig::uniform(n, 1e-3), &[0.2]).unwrap();
        let decay = (-PI * PI * 0.2).exp();
        for (r, v) in sol.grid.iter().zip(&sol.field[0]) {
            let want = if *r == 1.0 { 0.0 } else { decay * f(*r) };
            assert!((v - want).abs() < 1e-5 * PI, "r={r}: {v} vs {want}");
        }
    }

    #[test]
    fn radial_one_dim_matches_interval() {
        let phys = unit();
        let m = BoundaryMotion::critical(1.0, Default::default(), 2.0, &phys).unwrap();
        let n = 200;
        let full = sample(&nodes(2.0, 2 * n), |x| (PI * x / 2.0).sin() + 0.3 * (3.0 * PI * x / 2.0).sin());
        let half: Vec<f64> = full[n..].to_vec();
        let cfg1 = SolverConfig::uniform(2 * n, 1e-3);
        let cfg2 = SolverConfig::uniform(n, 1e-3);
        let a = solve_w(&m, &phys, &full, &cfg1, &[0.5, 2.0]).unwrap();
        let b = solve_radial(&m, &phys, &half, 1, &cfg2, &[0.5, 2.0]).unwrap();
        for k in 0..2 {
            for i in 0..=n {
                assert!((a.field[k][n + i] - b.field[k][i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn radial_matches_exact_ball_series() {
        let phys = PhysicsParams::new(0.8, 1.0).unwrap();
        let (a, b, r0) = (1.0, 0.5, 1.0);
        let psi0 = |r: f64| (1.0 - r * r) * (1.0 + 0.5 * r * r);
        let series = RadialSeries::build(a, b, r0, 3, phys, psi0, 1024, 32).unwrap();
        let motion = BoundaryMotion::separable(SeparableParams::quadratic(4.0 * a, 4.0 * b, 2.0 * r0)).unwrap();
        let n = 800;
        let grid = nodes(r0, n);
        let w0: Vec<f64> = grid.iter().map(|&z| if z == r0 { 0.0 } else { series.w(z, 0.0).unwrap() }).collect();
        let times = [0.5, 2.0];
        let sol = solve_radial(&motion, &phys, &w0, 3, &SolverConfig::uniform(n, 5e-4), &times).unwrap();
        for (k, &t) in times.iter().enumerate() {
            let exact: Vec<f64> = grid.iter().map(|&z| series.w(z, t).unwrap()).collect();
            let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let err = exact.iter().zip(&sol.field[k]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-4 * scale, "t={t}: {}", err / scale);
        }
    }
}
