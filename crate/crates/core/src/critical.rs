//! Comparison bounds and the critical-boundary machinery.
//!
//! For a symmetric motion `w` obeys
//! `w_t = D L0²/L² (w_ξξ + P (ξ/L0)(ξ/L0 - 1) w/L0²)`, `P = L̈ L³/(4D²)`.
//! When `P ≥ 0` the decaying sine is a supersolution; once `P` is large and
//! nondecreasing an Airy boundary-layer profile times `a(t)` is a
//! subsolution. Together they pin the solution to order `ξ` near the wall.

use crate::eigen::{self, EigenError};
use crate::exact::{integral_adot_sq, log_w_over_u, transform_ic, expand, ExactError};
use crate::io;
use crate::motion::{BoundaryMotion, MotionError, PhysicsParams};
use crate::numeric::{self, GridSolution, NumericError, Representation, SolverConfig};
use crate::quad::{self, QuadError, Tolerance};
use crate::specfun::{airy_ai, airy_first_zero, AI0, AIP0};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;
use thiserror::Error;

/// Allowed negative slack in envelope ordering, relative to `max |w|`.
pub const ENVELOPE_SLACK: f64 = 1e-8;
const ONSET_SAMPLES: usize = 4000;
const A_TOL: Tolerance = Tolerance { abs: 1e-10, rel: 1e-10 };
/// First zero of `J0`.
const J0_ZERO: f64 = 2.404_825_557_695_773;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("supersolution needs P >= 0, but P({t}) = {p}")]
    NegativePotential { t: f64, p: f64 },
    #[error("subsolution hypotheses (P large, P' >= 0) do not hold at t = {t}; onset is {onset:?}")]
    BeforeOnset { t: f64, onset: Option<f64> },
    #[error("motion must be symmetric (A = -L/2 up to translation)")]
    Asymmetric,
    #[error("envelope violated: slack {slack:e} at xi = {xi}, t = {t}")]
    EnvelopeViolation { slack: f64, xi: f64, t: f64 },
    #[error("radial sub/supersolutions exist only for n_dim <= 3 (higher dimensions are conjectural)")]
    DimensionUnsupported(u32),
    #[error("fit window [{lo}, {hi}] is invalid: {reason}")]
    BadWindow { lo: f64, hi: f64, reason: String },
    #[error("{0}")]
    BadInput(String),
    #[error("gamma bound violated: {name} = {value} outside [{lo}, {hi}] at t = {t}")]
    BoundViolation { name: &'static str, value: f64, lo: f64, hi: f64, t: f64 },
    #[error("probe value is not positive at t = {t}, y = {y}")]
    NonPositiveProbe { t: f64, y: f64 },
}

/// `κ = -Ai(0)/Ai'(0) - c1`, the width (in `P^{1/3} ξ/L0`) of Regions I–II.
pub fn kappa() -> f64 {
    -AI0 / AIP0 - airy_first_zero()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialTrace {
    pub t: f64,
    /// `L̈ L³/(4D²)` (equals `16 R̈ R³/(4D²)` for a ball of radius `L/2`).
    pub p: f64,
    pub pdot: f64,
}

pub fn potential(motion: &BoundaryMotion, physics: &PhysicsParams, t: f64) -> Result<PotentialTrace, CriticalError> {
    let k = motion.kinematics(t)?;
    let jerk = motion.length_jerk(t)?;
    let d2 = 4.0 * physics.d * physics.d;
    Ok(PotentialTrace {
        t,
        p: k.lddot * k.l.powi(3) / d2,
        pdot: (jerk * k.l.powi(3) + 3.0 * k.lddot * k.l * k.l * k.ldot) / d2,
    })
}

/// First sampled time on `[0, t_max]` after which `P ≥ p_min` and `Ṗ ≥ 0` at
/// every sample. `None` if the conditions fail at `t_max`.
pub fn potential_onset(motion: &BoundaryMotion, physics: &PhysicsParams, t_max: f64, p_min: f64) -> Result<Option<f64>, CriticalError> {
    let mut onset = Some(0.0);
    for i in 0..=ONSET_SAMPLES {
        let f = i as f64 / ONSET_SAMPLES as f64;
        let t = t_max * f * f;
        let tr = potential(motion, physics, t)?;
        if tr.p < p_min || tr.pdot < 0.0 {
            onset = None;
        } else if onset.is_none() {
            onset = Some(t);
        }
    }
    Ok(onset)
}

fn check_supersolution(motion: &BoundaryMotion, physics: &PhysicsParams, t: f64) -> Result<(), CriticalError> {
    for i in 0..=64 {
        let s = t * i as f64 / 64.0;
        let tr = potential(motion, physics, s)?;
        if tr.p < 0.0 {
            return Err(CriticalError::NegativePotential { t: s, p: tr.p });
        }
    }
    Ok(())
}

/// `w̄ = sin(π ξ/L0) exp(-D π² s(t)/L0²)`.
pub fn supersolution(motion: &BoundaryMotion, physics: &PhysicsParams, xi: f64, t: f64) -> Result<f64, CriticalError> {
    check_supersolution(motion, physics, t)?;
    super_value(motion, physics, xi, t)
}

fn super_value(motion: &BoundaryMotion, physics: &PhysicsParams, xi: f64, t: f64) -> Result<f64, CriticalError> {
    let l0 = motion.l0();
    let s = motion.time_rescale(t)?;
    Ok((PI * xi / l0).sin() * (-physics.d * PI * PI * s / (l0 * l0)).exp())
}

/// The Airy profile `w_(ξ; P)` of Regions I–III (without `a(t)`), plus its
/// first and second `ξ`-derivatives.
pub fn airy_profile(xi: f64, l0: f64, p: f64) -> [f64; 3] {
    let c1 = airy_first_zero();
    let q = p.cbrt();
    let x = q * xi / l0 + c1;
    if x <= 0.0 {
        let v = airy_ai(x);
        [v.ai / q, v.aip / l0, q * x * v.ai / (l0 * l0)]
    } else if x <= -AI0 / AIP0 {
        [(AI0 + AIP0 * x) / q, AIP0 / l0, 0.0]
    } else {
        [0.0; 3]
    }
}

fn radial_h0(n_dim: u32, r: f64) -> (f64, f64) {
    match n_dim {
        1 => ((0.5 * PI * r).cos(), PI * PI / 4.0),
        2 => (bessel_j0(J0_ZERO * r), J0_ZERO * J0_ZERO),
        _ => (if r == 0.0 { 1.0 } else { (PI * r).sin() / (PI * r) }, PI * PI),
    }
}

/// `J0` by its power series (adequate for the arguments used here, `|x| ≤ 3`).
fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// Super- and subsolutions for one critical configuration, with the onset
/// computed once.
#[derive(Debug, Clone)]
pub struct Envelope {
    motion: BoundaryMotion,
    physics: PhysicsParams,
    n_dim: Option<u32>,
    onset: Option<f64>,
    t_max: f64,
}

impl Envelope {
    /// Interval envelope on `[0, t_max]`.
    pub fn new(motion: BoundaryMotion, physics: PhysicsParams, t_max: f64) -> Result<Self, CriticalError> {
        Self::build(motion, physics, None, t_max)
    }

    /// Ball envelope with radius `L/2`.
    pub fn radial(motion: BoundaryMotion, physics: PhysicsParams, n_dim: u32, t_max: f64) -> Result<Self, CriticalError> {
        if !(1..=3).contains(&n_dim) {
            return Err(CriticalError::DimensionUnsupported(n_dim));
        }
        Self::build(motion, physics, Some(n_dim), t_max)
    }

    fn build(motion: BoundaryMotion, physics: PhysicsParams, n_dim: Option<u32>, t_max: f64) -> Result<Self, CriticalError> {
        physics.validate()?;
        if !motion.is_symmetric() {
            return Err(CriticalError::Asymmetric);
        }
        check_supersolution(&motion, &physics, t_max)?;
        // The profile support must fit inside [0, L0] (or [0, L0/2] for a ball).
        let width = if n_dim.is_some() { 2.0 } else { 1.0 };
        let onset = potential_onset(&motion, &physics, t_max, (width * kappa()).powi(3))?;
        Ok(Envelope {
            motion,
            physics,
            n_dim,
            onset,
            t_max,
        })
    }

    pub fn onset(&self) -> Option<f64> {
        self.onset
    }

    pub fn motion(&self) -> &BoundaryMotion {
        &self.motion
    }

    fn check_time(&self, t: f64) -> Result<f64, CriticalError> {
        match self.onset {
            Some(on) if t >= on && t <= self.t_max => Ok(on),
            _ => Err(CriticalError::BeforeOnset { t, onset: self.onset }),
        }
    }

    /// `a(t) = exp(-κ ∫_{onset}^t D P^{2/3}/L² dζ)`.
    pub fn a(&self, t: f64) -> Result<f64, CriticalError> {
        let on = self.check_time(t)?;
        let d = self.physics.d;
        let f = |z: f64| {
            potential(&self.motion, &self.physics, z)
                .and_then(|tr| Ok(d * tr.p.max(0.0).powf(2.0 / 3.0) / self.motion.kinematics(z)?.l.powi(2)))
                .unwrap_or(f64::NAN)
        };
        Ok((-kappa() * quad::integrate(f, on, t, A_TOL)?).exp())
    }

    /// `w̃ = w_(ξ, t) a(t)`.
    pub fn sub(&self, xi: f64, t: f64) -> Result<f64, CriticalError> {
        let a = self.a(t)?;
        let p = potential(&self.motion, &self.physics, t)?.p;
        Ok(a * airy_profile(xi, self.motion.l0(), p)[0])
    }

    pub fn sup(&self, xi: f64, t: f64) -> Result<f64, CriticalError> {
        super_value(&self.motion, &self.physics, xi, t)
    }

    /// `∂_t w̃ - D L0²/L² (w̃_ξξ + P (ξ/L0)(ξ/L0 - 1) w̃/L0²)` from analytic
    /// derivatives. Nonpositive wherever the subsolution hypotheses hold.
    pub fn sub_residual(&self, xi: f64, t: f64) -> Result<f64, CriticalError> {
        let a = self.a(t)?;
        let tr = potential(&self.motion, &self.physics, t)?;
        let k = self.motion.kinematics(t)?;
        let l0 = self.motion.l0();
        let d = self.physics.d;
        let [w, wx, wxx] = airy_profile(xi, l0, tr.p);
        let dt = a * (tr.pdot / (3.0 * tr.p) * (xi * wx - w) - kappa() * d * tr.p.powf(2.0 / 3.0) / (k.l * k.l) * w);
        let xl = xi / l0;
        let rhs = d * l0 * l0 / (k.l * k.l) * a * (wxx + tr.p * xl * (xl - 1.0) * w / (l0 * l0));
        Ok(dt - rhs)
    }

    /// Supersolution residual, nonnegative when `P ≥ 0`.
    pub fn super_residual(&self, xi: f64, t: f64) -> Result<f64, CriticalError> {
        let tr = potential(&self.motion, &self.physics, t)?;
        let k = self.motion.kinematics(t)?;
        let l0 = self.motion.l0();
        let w = self.sup(xi, t)?;
        let xl = xi / l0;
        Ok(-self.physics.d / (k.l * k.l) * tr.p * xl * (xl - 1.0) * w)
    }

    /// Ball subsolution `ŵ(r, t) = w̃(R0 - r, t)/r^{(n-1)/2}`.
    pub fn radial_sub(&self, r: f64, t: f64) -> Result<f64, CriticalError> {
        let n = self.n_dim.ok_or_else(|| CriticalError::BadInput("not a radial envelope".into()))?;
        let r0 = 0.5 * self.motion.l0();
        let w1 = self.sub(r0 - r, t)?;
        // Past onset the support ends at or before the centre.
        Ok(if w1 == 0.0 || r <= 0.0 { 0.0 } else { w1 / r.powf(0.5 * (n as f64 - 1.0)) })
    }

    /// Ball supersolution `h0(r/R0) exp(-D λ0 ∫ 1/R²)`.
    pub fn radial_sup(&self, r: f64, t: f64) -> Result<f64, CriticalError> {
        let n = self.n_dim.ok_or_else(|| CriticalError::BadInput("not a radial envelope".into()))?;
        let l0 = self.motion.l0();
        let r0 = 0.5 * l0;
        // ∫ 1/R² = 4 ∫ 1/L² = 4 s/L0².
        let int = 4.0 * self.motion.time_rescale(t)? / (l0 * l0);
        let (h, lambda) = radial_h0(n, r / r0);
        Ok(h * (-self.physics.d * lambda * int / (r0 * r0) * r0 * r0).exp())
    }
}

/// One-shot subsolution; the onset is sampled over `[0, t]`.
pub fn subsolution(motion: &BoundaryMotion, physics: &PhysicsParams, xi: f64, t: f64) -> Result<f64, CriticalError> {
    Envelope::new(motion.clone(), *physics, t)?.sub(xi, t)
}

/// One-shot radial subsolution.
pub fn radial_subsolution(motion: &BoundaryMotion, physics: &PhysicsParams, n_dim: u32, r: f64, t: f64) -> Result<f64, CriticalError> {
    Envelope::radial(motion.clone(), *physics, n_dim, t)?.radial_sub(r, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSample {
    pub t: f64,
    pub xi: f64,
    pub sub: f64,
    pub w: f64,
    #[serde(rename = "super")]
    pub sup: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePair {
    pub t_cal: f64,
    /// `None` when the subsolution hypotheses never hold during the run.
    pub c1: Option<f64>,
    pub c2: f64,
    pub worst_slack: f64,
    pub worst_xi: f64,
    pub worst_t: f64,
    pub samples: Vec<EnvelopeSample>,
}

impl EnvelopePair {
    pub fn holds(&self) -> bool {
        self.worst_slack >= -ENVELOPE_SLACK
    }

    pub fn ensure(&self) -> Result<(), CriticalError> {
        if self.holds() {
            Ok(())
        } else {
            Err(CriticalError::EnvelopeViolation {
                slack: self.worst_slack,
                xi: self.worst_xi,
                t: self.worst_t,
            })
        }
    }

    pub fn to_csv(&self) -> String {
        io::csv_string(
            &["t", "xi", "sub", "w", "super", "slack"],
            self.samples.iter().map(|s| [s.t, s.xi, s.sub, s.w, s.sup, s.slack]),
        )
    }
}

/// Calibrates `C1`, `C2` at the first output time past the onset (or the
/// first output time when only the supersolution applies) and checks
/// `C1 w̃ ≤ w ≤ C2 w̄` at every later output.
pub fn verify_envelope(motion: &BoundaryMotion, physics: &PhysicsParams, w: &GridSolution) -> Result<EnvelopePair, CriticalError> {
    let t_end = *w.times.last().ok_or_else(|| CriticalError::BadInput("empty run".into()))?;
    let (env, radial) = match w.meta.representation {
        Representation::W => (Envelope::new(motion.clone(), *physics, t_end)?, false),
        Representation::RadialW => {
            let n = w.meta.n_dim.unwrap_or(1);
            (Envelope::radial(motion.clone(), *physics, n, t_end)?, true)
        }
        Representation::U => return Err(CriticalError::BadInput("envelope needs the w representation".into())),
    };
    let sup = |x: f64, t: f64| if radial { env.radial_sup(x, t) } else { env.sup(x, t) };
    let sub = |x: f64, t: f64| if radial { env.radial_sub(x, t) } else { env.sub(x, t) };
    let with_sub = env.onset().is_some();
    let start = env.onset().unwrap_or(0.0);
    let k_cal = w
        .times
        .iter()
        .position(|&t| t >= start)
        .ok_or_else(|| CriticalError::BadInput("no output time after the onset".into()))?;
    let t_cal = w.times[k_cal];
    let nodes = w.grid.len();
    let interior = if radial { 0..nodes - 1 } else { 1..nodes - 1 };
    let mut c2 = 0.0f64;
    let mut c1 = f64::INFINITY;
    for i in interior.clone() {
        let x = w.grid[i];
        let v = w.field[k_cal][i];
        let s = sup(x, t_cal)?;
        if s > 0.0 {
            c2 = c2.max(v / s);
        }
        if with_sub {
            let b = sub(x, t_cal)?;
            if b > 0.0 {
                c1 = c1.min(v / b);
            }
        }
    }
    let c1 = if with_sub && c1.is_finite() { Some(c1) } else { None };
    let mut samples = Vec::new();
    let (mut worst, mut wx, mut wt) = (f64::INFINITY, 0.0, t_cal);
    for k in k_cal..w.times.len() {
        let t = w.times[k];
        let scale = w.field[k].iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for i in interior.clone() {
            let x = w.grid[i];
            let v = w.field[k][i];
            let s = c2 * sup(x, t)?;
            let b = match c1 {
                Some(c) => c * sub(x, t)?,
                None => f64::NEG_INFINITY,
            };
            let slack = (s - v).min(v - b) / scale;
            if slack < worst {
                worst = slack;
                wx = x;
                wt = t;
            }
            samples.push(EnvelopeSample {
                t,
                xi: x,
                sub: if c1.is_some() { b } else { 0.0 },
                w: v,
                sup: s,
                slack,
            });
        }
    }
    Ok(EnvelopePair {
        t_cal,
        c1,
        c2,
        worst_slack: worst,
        worst_xi: wx,
        worst_t: wt,
        samples,
    })
}

/// Solves from `w0 = sin(π ξ/L0)` (or `1 - r²/R0²` on the ball) and checks
/// the envelope at `times`.
pub fn envelope_run(
    motion: &BoundaryMotion,
    physics: &PhysicsParams,
    n_dim: u32,
    solver: &SolverConfig,
    times: &[f64],
) -> Result<EnvelopePair, CriticalError> {
    let sol = transformed_run(motion, physics, n_dim, solver, times)?;
    verify_envelope(motion, physics, &sol)
}

fn transformed_run(
    motion: &BoundaryMotion,
    physics: &PhysicsParams,
    n_dim: u32,
    solver: &SolverConfig,
    times: &[f64],
) -> Result<GridSolution, CriticalError> {
    let n = solver.grid_size;
    Ok(if n_dim == 1 {
        let w0: Vec<f64> = (0..=n).map(|i| (PI * i as f64 / n as f64).sin()).collect();
        numeric::solve_w(motion, physics, &w0, solver, times)?
    } else {
        let w0: Vec<f64> = (0..=n).map(|i| 1.0 - (i as f64 / n as f64).powi(2)).collect();
        numeric::solve_radial(motion, physics, &w0, n_dim, solver, times)?
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub solver: SolverConfig,
    pub t_window: [f64; 2],
    #[serde(default = "default_probes")]
    pub y_probes: Vec<f64>,
    #[serde(default = "default_fit_samples")]
    pub samples: usize,
}

fn default_probes() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_fit_samples() -> usize {
    40
}

impl FitConfig {
    pub fn new(grid_size: usize, t_window: [f64; 2]) -> Self {
        FitConfig {
            solver: SolverConfig::geometric(grid_size, 1e-4, 1.02, 0.5),
            t_window,
            y_probes: default_probes(),
            samples: default_fit_samples(),
        }
    }
}

/// Largest `t_hi` accepted by [`fit_exponent`].
pub const MAX_FIT_TIME: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalFitReport {
    pub alpha: f64,
    pub n_dim: u32,
    pub predicted_exponent: f64,
    pub fitted_exponent: f64,
    pub per_probe: Vec<f64>,
    pub t_window: [f64; 2],
    /// RMS residual of the log-log fits.
    pub residual: f64,
    pub y_probes: Vec<f64>,
    /// `(t, ∂ψ/∂n)` at the wall over the window.
    pub gradient: Vec<[f64; 2]>,
    /// Range of the wall gradient over the last decade of the window.
    pub gradient_band: [f64; 2],
}

impl CriticalFitReport {
    pub fn error(&self) -> f64 {
        (self.fitted_exponent - self.predicted_exponent).abs()
    }

    pub fn to_json(&self) -> Value {
        io::manifest("critical_fit", serde_json::to_value(self).expect("json"))
    }
}

/// Ordinary least-squares slope and RMS residual.
pub fn ols_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

/// `∫_0^t (f0 - L̇²/(16D))` at each time (the growth left after the
/// transform, `∫ (f0 - Ṙ²/4D)` for a ball of radius `L/2`).
fn growth_integrals(motion: &BoundaryMotion, physics: &PhysicsParams, times: &[f64]) -> Result<Vec<f64>, CriticalError> {
    let (f0, d) = (physics.f0, physics.d);
    let f = |z: f64| motion.kinematics(z).map(|k| f0 - k.ldot * k.ldot / (16.0 * d)).unwrap_or(f64::NAN);
    Ok(quad::cumulative(f, 0.0, times, Tolerance { abs: 1e-11, rel: 1e-12 })?)
}

/// Output times log-spaced over the window.
pub fn log_times(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo * (hi / lo).powf(i as f64 / (count - 1) as f64)
            }
        })
        .collect()
}

/// Runs the transformed solver for a critical motion and fits the power of
/// `t` in `ψ(wall + y, t)` by least squares on log-log axes.
pub fn fit_exponent(motion: &BoundaryMotion, physics: &PhysicsParams, n_dim: u32, cfg: &FitConfig) -> Result<CriticalFitReport, CriticalError> {
    let alpha = motion
        .critical_params()
        .ok_or_else(|| CriticalError::BadInput("exponent fits need a critical motion".into()))?
        .alpha;
    if !(1..=3).contains(&n_dim) {
        return Err(CriticalError::DimensionUnsupported(n_dim));
    }
    let [lo, hi] = cfg.t_window;
    let bad = |reason: &str| CriticalError::BadWindow {
        lo,
        hi,
        reason: reason.into(),
    };
    if !(lo > 0.0 && hi > lo) {
        return Err(bad("need 0 < t_lo < t_hi"));
    }
    if hi / lo < 10f64.powf(1.5) {
        return Err(bad("window must span at least 1.5 decades"));
    }
    if hi > MAX_FIT_TIME {
        return Err(bad(&format!("t_hi beyond {MAX_FIT_TIME:e} is too expensive; shorten the window")));
    }
    if cfg.samples < 3 || cfg.y_probes.is_empty() || cfg.y_probes.iter().any(|y| y.is_nan() || *y <= 0.0) {
        return Err(CriticalError::BadInput("need >= 3 samples and positive y probes".into()));
    }
    let times = log_times(lo, hi, cfg.samples);
    let l0 = motion.l0();
    let n = cfg.solver.grid_size;
    let sol = transformed_run(motion, physics, n_dim, &cfg.solver, &times)?;
    let r0 = if n_dim == 1 { l0 } else { 0.5 * l0 };
    let growth = growth_integrals(motion, physics, &times)?;
    let d = physics.d;
    let nd = n_dim as f64;
    let mut logs = vec![Vec::with_capacity(times.len()); cfg.y_probes.len()];
    let mut gradient = Vec::with_capacity(times.len());
    let h = sol.spacing();
    for (k, &t) in times.iter().enumerate() {
        let kin = motion.kinematics(t)?;
        // Radius (or length) now, scaled like the computational domain.
        let big = if n_dim == 1 { kin.l } else { 0.5 * kin.l };
        let big_dot = if n_dim == 1 { kin.ldot } else { 0.5 * kin.ldot };
        let scale = (r0 / big).powf(0.5 * nd) * growth[k].exp();
        for (j, &y) in cfg.y_probes.iter().enumerate() {
            let v = if n_dim == 1 {
                let xi = y * l0 / kin.l;
                sol.value_at(k, xi) * scale * (-xi * (xi - l0) * kin.ldot * kin.l / (4.0 * d * l0 * l0)).exp()
            } else {
                let z = r0 - y * r0 / big;
                sol.value_at(k, z) * scale * (-big_dot * big * (z * z - r0 * r0) / (4.0 * d * r0 * r0)).exp()
            };
            if v.is_nan() || v <= 0.0 {
                return Err(CriticalError::NonPositiveProbe { t, y });
            }
            logs[j].push(v.ln());
        }
        // One-sided second-order derivative at the wall node.
        let row = &sol.field[k];
        let wall = if n_dim == 1 {
            (4.0 * row[1] - row[2]) / (2.0 * h)
        } else {
            (4.0 * row[n - 1] - row[n - 2]) / (2.0 * h)
        };
        gradient.push([t, wall * (r0 / big) * scale]);
    }
    let lt: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let mut per_probe = Vec::new();
    let mut residual = 0.0;
    for l in &logs {
        let (s, r) = ols_slope(&lt, l);
        per_probe.push(s);
        residual += r * r;
    }
    let fitted = per_probe.iter().sum::<f64>() / per_probe.len() as f64;
    let last = gradient.iter().filter(|g| g[0] >= hi / 10.0);
    let band = last.fold([f64::INFINITY, f64::NEG_INFINITY], |b, g| [b[0].min(g[1]), b[1].max(g[1])]);
    Ok(CriticalFitReport {
        alpha,
        n_dim,
        predicted_exponent: -1.0 - 0.5 * nd + alpha * physics.c_star() / (2.0 * d),
        fitted_exponent: fitted,
        per_probe,
        t_window: cfg.t_window,
        residual: (residual / logs.len() as f64).sqrt(),
        y_probes: cfg.y_probes.clone(),
        gradient,
        gradient_band: band,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaBounds {
    pub gamma0_lo: f64,
    pub gamma0_hi: f64,
    pub gamma1_lo: f64,
    pub gamma1_hi: f64,
}

/// Samples `L̈ L³` and `Ä L³` on `[0, t_max]` (1000 uniform points plus any
/// tabulated knots) and returns their ranges.
pub fn sample_gamma_bounds(motion: &BoundaryMotion, t_max: f64) -> Result<GammaBounds, CriticalError> {
    let mut g = GammaBounds {
        gamma0_lo: f64::INFINITY,
        gamma0_hi: f64::NEG_INFINITY,
        gamma1_lo: f64::INFINITY,
        gamma1_hi: f64::NEG_INFINITY,
    };
    for t in gamma_sample_times(motion, t_max) {
        let k = motion.kinematics(t)?;
        let (g0, g1) = (k.lddot * k.l.powi(3), k.addot * k.l.powi(3));
        g.gamma0_lo = g.gamma0_lo.min(g0);
        g.gamma0_hi = g.gamma0_hi.max(g0);
        g.gamma1_lo = g.gamma1_lo.min(g1);
        g.gamma1_hi = g.gamma1_hi.max(g1);
    }
    Ok(g)
}

fn gamma_sample_times(motion: &BoundaryMotion, t_max: f64) -> Vec<f64> {
    let mut ts: Vec<f64> = (0..=1000).map(|i| t_max * i as f64 / 1000.0).collect();
    if let crate::motion::MotionSpec::Tabulated(p) = motion.spec() {
        ts.extend(p.t.iter().copied().filter(|&t| t <= t_max));
    }
    ts
}

/// Series bound `u± = exp(-ln(w/u)) Σ c_n e^{σ_n s} g_n` built with the
/// Sturm–Liouville pairs for one corner of the γ box and the true motion's
/// transform.
#[derive(Debug, Clone)]
pub struct BoundSeries {
    motion: BoundaryMotion,
    physics: PhysicsParams,
    pub gamma0: f64,
    pub gamma1: f64,
    eigen: eigen::EigenSystem,
    coeffs: Vec<f64>,
}

impl BoundSeries {
    pub fn u(&self, xi: f64, t: f64) -> Result<f64, CriticalError> {
        let k = self.motion.kinematics(t)?;
        let s = self.motion.time_rescale(t)?;
        let ia = integral_adot_sq(&self.motion, t)?;
        let g = self.eigen.modes_at(xi);
        let w: f64 = self
            .coeffs
            .iter()
            .zip(&g)
            .zip(&self.eigen.sigmas)
            .map(|((c, g), sg)| c * g * (sg * s).exp())
            .sum();
        Ok(w * (-log_w_over_u(&k, &self.physics, self.motion.l0(), t, ia, xi)).exp())
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonPair {
    pub bounds: GammaBounds,
    pub upper: BoundSeries,
    pub lower: BoundSeries,
}

/// Upper and lower series bounds for a motion with `L̈L³ ∈ [γ0⁻, γ0⁺]`,
/// `ÄL³ ∈ [γ1⁻, γ1⁺]` on `[0, t_max]`. Supplied bounds are checked against
/// samples; when omitted the sampled ranges are used.
pub fn envelope_bounds_general<F: Fn(f64) -> f64>(
    motion: &BoundaryMotion,
    physics: &PhysicsParams,
    u0: F,
    bounds: Option<GammaBounds>,
    t_max: f64,
    grid_size: usize,
    num_modes: usize,
) -> Result<ComparisonPair, CriticalError> {
    physics.validate()?;
    motion.kinematics(t_max)?;
    let bounds = match bounds {
        None => sample_gamma_bounds(motion, t_max)?,
        Some(b) => {
            for t in gamma_sample_times(motion, t_max) {
                let k = motion.kinematics(t)?;
                let checks = [
                    ("gamma0", k.lddot * k.l.powi(3), b.gamma0_lo, b.gamma0_hi),
                    ("gamma1", k.addot * k.l.powi(3), b.gamma1_lo, b.gamma1_hi),
                ];
                for (name, value, lo, hi) in checks {
                    if value < lo || value > hi {
                        return Err(CriticalError::BoundViolation { name, value, lo, hi, t });
                    }
                }
            }
            b
        }
    };
    let l0 = motion.l0();
    let grid: Vec<f64> = (0..=grid_size).map(|i| l0 * i as f64 / grid_size as f64).collect();
    let nodes: Vec<f64> = grid.iter().enumerate().map(|(i, &x)| if i == 0 || i == grid_size { 0.0 } else { u0(x) }).collect();
    if nodes.iter().any(|v| *v < 0.0) {
        return Err(CriticalError::BadInput("comparison bounds need nonnegative initial data".into()));
    }
    let w0 = transform_ic(&nodes, &grid, motion, physics)?;
    let build = |g0: f64, g1: f64| -> Result<BoundSeries, CriticalError> {
        let coarse = eigen::solve_sl(physics.d, l0, g0, g1, grid_size, num_modes)?;
        let fine = eigen::solve_sl(physics.d, l0, g0, g1, 2 * grid_size, num_modes)?;
        let sig = eigen::richardson(&coarse.sigmas, &fine.sigmas);
        let eig = coarse.with_sigmas(sig);
        let coeffs = expand(&w0, &eig)?;
        Ok(BoundSeries {
            motion: motion.clone(),
            physics: *physics,
            gamma0: g0,
            gamma1: g1,
            eigen: eig,
            coeffs,
        })
    };
    Ok(ComparisonPair {
        bounds,
        upper: build(bounds.gamma0_hi, bounds.gamma1_hi)?,
        lower: build(bounds.gamma0_lo, bounds.gamma1_lo)?,
    })
}

/// Tabulated `L = L0 + t + sin(t)/10`, `A = -L/2` on `[0, t_max]` with
/// knots every `0.01`. Neither `L̈L³` nor `ÄL³` is constant.
pub fn perturbed_motion(l0: f64, t_max: f64) -> Result<BoundaryMotion, CriticalError> {
    let n = (t_max / 0.01).ceil() as usize;
    let t: Vec<f64> = (0..=n).map(|i| t_max * i as f64 / n as f64).collect();
    let l: Vec<f64> = t.iter().map(|t| l0 + t + t.sin() / 10.0).collect();
    let a: Vec<f64> = l.iter().map(|l| -0.5 * l).collect();
    Ok(BoundaryMotion::tabulated(t, a, l)?)
}

/// JSON report bundling a fit and an envelope check.
pub fn report(fit: &CriticalFitReport, envelope: Option<&EnvelopePair>) -> Value {
    io::manifest(
        "critical",
        json!({
            "fit": fit,
            "envelope": envelope.map(|e| json!({
                "t_cal": e.t_cal,
                "c1": e.c1,
                "c2": e.c2,
                "worst_slack": e.worst_slack,
                "worst_xi": e.worst_xi,
                "worst_t": e.worst_t,
                "holds": e.holds(),
            })),
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::SeriesSolution;
    use crate::motion::{EtaSpec, SeparableParams};

    fn unit() -> PhysicsParams {
        PhysicsParams::new(1.0, 1.0).unwrap()
    }

    fn critical(alpha: f64) -> BoundaryMotion {
        BoundaryMotion::critical(alpha, EtaSpec::default(), 2.0, &unit()).unwrap()
    }

    #[test]
    fn potential_grows_linearly() {
        let phys = unit();
        let alpha = 1.5;
        let m = critical(alpha);
        let cs = phys.c_star();
        let slope = 4.0 * alpha * cs.powi(3);
        let tr = potential(&m, &phys, 2e3).unwrap();
        assert!((tr.p / (slope * 2e3) - 1.0).abs() < 0.05, "{}", tr.p / (slope * 2e3));
        assert!((tr.pdot / slope - 1.0).abs() < 0.05);
        let h = 1e-3;
        let fd = (potential(&m, &phys, 5.0 + h).unwrap().p - potential(&m, &phys, 5.0 - h).unwrap().p) / (2.0 * h);
        assert!((fd - potential(&m, &phys, 5.0).unwrap().pdot).abs() < 1e-5 * fd.abs());
        let on = potential_onset(&m, &phys, 100.0, kappa().powi(3)).unwrap().unwrap();
        assert!(on > 0.0 && on < 100.0);
        assert!(potential(&m, &phys, on).unwrap().p >= kappa().powi(3));
    }

    #[test]
    fn supersolution_examples() {
        let phys = unit();
        let m = BoundaryMotion::separable(SeparableParams::fixed(2.0)).unwrap();
        let v = supersolution(&m, &phys, 0.7, 0.3).unwrap();
        assert!((v - (PI * 0.35).sin() * (-PI * PI * 0.3 / 4.0).exp()).abs() < 1e-15);
        assert_eq!(supersolution(&m, &phys, 0.0, 0.3).unwrap(), 0.0);
        let c = critical(1.5);
        let a = supersolution(&c, &phys, 1.0, 1e3).unwrap();
        let b = supersolution(&c, &phys, 1.0, 1e4).unwrap();
        assert!(b > 0.0 && (a - b) / a < 1e-2);
        let neg = BoundaryMotion::separable(SeparableParams::quadratic(1.0, 2.0, 1.0)).unwrap();
        assert!(matches!(supersolution(&neg, &phys, 0.5, 0.5), Err(CriticalError::NegativePotential { .. })));
    }

    #[test]
    fn airy_profile_regions() {
        let l0 = 2.0;
        let p: f64 = 1000.0;
        let q = p.cbrt();
        let c1 = airy_first_zero();
        let edge = -c1 * l0 / q;
        let lo = airy_profile(edge - 1e-12, l0, p);
        let hi = airy_profile(edge + 1e-12, l0, p);
        assert!((lo[0] - hi[0]).abs() < 1e-12);
        assert!((lo[1] - hi[1]).abs() < 1e-8);
        let end = kappa() * l0 / q;
        assert!(airy_profile(end - 1e-12, l0, p)[1] < 0.0);
        assert_eq!(airy_profile(end + 1e-9, l0, p), [0.0; 3]);
        let xi = 1e-6;
        let ratio = airy_profile(xi, l0, p)[0] / xi;
        assert!((ratio - airy_ai(c1).aip / l0).abs() < 1e-5);
        assert!(airy_ai(c1).aip > 0.0);
    }

    #[test]
    fn residual_signs() {
        let phys = unit();
        let env = Envelope::new(critical(1.5), phys, 200.0).unwrap();
        let on = env.onset().unwrap();
        let l0 = env.motion().l0();
        for i in 0..200 {
            let t = on + (200.0 - on) * (i as f64 + 0.5) / 200.0;
            let p = potential(env.motion(), &phys, t).unwrap().p;
            let xi = kappa() * l0 / p.cbrt() * ((i * 37 % 200) as f64 + 0.5) / 200.0;
            assert!(env.sub_residual(xi, t).unwrap() <= 1e-12);
            assert!(env.super_residual(l0 * (i as f64 + 0.5) / 200.0, t).unwrap() >= 0.0);
        }
        assert!(matches!(env.sub(0.1, 0.5 * on), Err(CriticalError::BeforeOnset { .. })));
    }

    #[test]
    fn a_converges() {
        let env = Envelope::new(critical(1.5), unit(), 1e5).unwrap();
        let a3 = env.a(1e3).unwrap();
        let a4 = env.a(1e4).unwrap();
        let a5 = env.a(1e5).unwrap();
        assert!(a5 > 0.0 && a4 > a5 && a3 > a4);
        assert!((a4 - a5) < (a3 - a4));
    }

    #[test]
    fn envelope_on_critical_run() {
        let phys = unit();
        let m = critical(1.5);
        let n = 512;
        let w0: Vec<f64> = (0..=n).map(|i| (PI * i as f64 / n as f64).sin()).collect();
        let times = log_times(1.0, 200.0, 24);
        let sol = numeric::solve_w(&m, &phys, &w0, &SolverConfig::geometric(n, 1e-4, 1.02, 0.25), &times).unwrap();
        let pair = verify_envelope(&m, &phys, &sol).unwrap();
        assert!(pair.c1.is_some());
        assert!(pair.holds(), "{}", pair.worst_slack);
        assert!(pair.to_csv().starts_with("t,xi,sub,w,super,slack\n"));
    }

    #[test]
    fn degenerate_supersolution_start() {
        let phys = unit();
        let p = SeparableParams::quadratic(2.0, 0.5, 1.0);
        let p = p.with_gamma1(-0.5 * p.gamma0());
        let m = BoundaryMotion::separable(p).unwrap();
        assert!(m.is_symmetric());
        let n = 256;
        let w0: Vec<f64> = (0..=n).map(|i| (PI * i as f64 / n as f64).sin()).collect();
        let sol = numeric::solve_w(&m, &phys, &w0, &SolverConfig::uniform(n, 1e-3), &[0.0, 0.5, 1.0, 2.0]).unwrap();
        let pair = verify_envelope(&m, &phys, &sol).unwrap();
        assert!((pair.c2 - 1.0).abs() < 1e-12);
        assert!(pair.holds(), "{}", pair.worst_slack);
    }

    #[test]
    fn radial_subsolution_examples() {
        let phys = unit();
        let m = critical(2.5);
        let t = 50.0;
        let env = Envelope::radial(m.clone(), phys, 1, t).unwrap();
        let r0 = 0.5 * m.l0();
        let three = Envelope::radial(m.clone(), phys, 3, t).unwrap();
        for &r in &[0.9, 0.95, 0.99] {
            let a = env.radial_sub(r, t).unwrap();
            assert_eq!(a, env.sub(r0 - r, t).unwrap());
            assert!((three.radial_sub(r, t).unwrap() - a / r).abs() <= 1e-15 * a.abs());
        }
        assert!(env.radial_sub(r0, t).unwrap().abs() < 1e-15);
        assert_eq!(three.radial_sub(0.0, t).unwrap(), 0.0);
        assert!(matches!(radial_subsolution(&m, &phys, 4, 0.5, t), Err(CriticalError::DimensionUnsupported(4))));
    }

    #[test]
    fn radial_envelope_holds() {
        let phys = unit();
        let m = critical(2.5);
        let times = log_times(1.0, 1e3, 30);
        let pair = envelope_run(&m, &phys, 3, &SolverConfig::geometric(512, 1e-4, 1.02, 0.5), &times).unwrap();
        assert!(pair.c1.is_some());
        assert!(pair.holds(), "{} at {} {}", pair.worst_slack, pair.worst_xi, pair.worst_t);
    }

    #[test]
    fn exponent_fit_error_paths() {
        let m = critical(1.5);
        let cfg = FitConfig::new(64, [10.0, 50.0]);
        assert!(matches!(fit_exponent(&m, &unit(), 1, &cfg), Err(CriticalError::BadWindow { .. })));
        let cfg = FitConfig::new(64, [10.0, 1e7]);
        assert!(matches!(fit_exponent(&m, &unit(), 1, &cfg), Err(CriticalError::BadWindow { .. })));
        let sep = BoundaryMotion::separable(SeparableParams::fixed(1.0)).unwrap();
        assert!(fit_exponent(&sep, &unit(), 1, &FitConfig::new(64, [1.0, 100.0])).is_err());
    }

    #[test]
    fn ols_recovers_a_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (s, r) = ols_slope(&x, &y);
        assert!((s + 0.5).abs() < 1e-14 && r < 1e-14);
    }

    #[test]
    fn bounds_are_tight_for_separable_motion() {
        let phys = unit();
        let p = SeparableParams::quadratic(0.5, 1.0, 1.0).with_gamma1(0.3).with_drift(0.2, 0.0);
        let m = BoundaryMotion::separable(p).unwrap();
        let u0 = |x: f64| (PI * x).sin();
        let pair = envelope_bounds_general(&m, &phys, u0, None, 2.0, 256, 16).unwrap();
        assert!((pair.bounds.gamma0_hi - pair.bounds.gamma0_lo).abs() < 1e-9);
        let exact = SeriesSolution::build(m.clone(), phys, u0, 256, 16).unwrap();
        for &(xi, t) in &[(0.3, 0.5), (0.6, 1.5)] {
            let e = exact.u(xi, t).unwrap();
            assert!((pair.upper.u(xi, t).unwrap() - e).abs() < 1e-7 * e.abs());
            assert!((pair.lower.u(xi, t).unwrap() - e).abs() < 1e-7 * e.abs());
        }
        let tight = GammaBounds {
            gamma0_lo: 0.0,
            gamma0_hi: 0.0,
            gamma1_lo: 0.0,
            gamma1_hi: 0.0,
        };
        assert!(matches!(
            envelope_bounds_general(&m, &phys, u0, Some(tight), 2.0, 256, 16),
            Err(CriticalError::BoundViolation { .. })
        ));
    }

    #[test]
    fn bessel_zero_is_a_root() {
        assert!(bessel_j0(J0_ZERO).abs() < 1e-15);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
    }
}
