//! Exact eigenfunction-series solutions for separable motions.
//!
//! With `w = u (L/L0)^{1/2} exp(-f0 t + ∫Ȧ²/4D + ξ² L̇ L/(4 D L0²) + ξ Ȧ L/(2 D L0))`
//! and `s = ∫ L0²/L²`, the problem for `w` reduces to a fixed Sturm–Liouville
//! problem whenever `L̈ L³ = γ0` and `Ä L³ = γ1` are constant, so
//! `u = Σ c_n exp(σ_n s) g_n(ξ) × (common factor)`.
//!
//! Two evaluators are provided: a generic one that assembles the common factor
//! from the motion's kinematics with `s` and `∫Ȧ²` by quadrature, and per-case
//! closed forms. They are independent and are cross-checked.

use crate::eigen::{self, EigenError, EigenParams, EigenSystem};
use crate::io;
use crate::motion::{BoundaryMotion, CaseKind, Kinematics, MotionError, PhysicsParams, SeparableParams};
use crate::quad::{self, QuadError, Tolerance};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

/// Relative size of the last retained term above which a result is flagged.
pub const TRUNCATION_WARNING: f64 = 1e-8;

const INTEGRAL_TOL: Tolerance = Tolerance { abs: 1e-12, rel: 1e-13 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("motion is not separable; exact series need the separable family")]
    NotSeparable,
    #[error("initial data must vanish at both endpoints (found {left} and {right})")]
    EndpointViolation { left: f64, right: f64 },
    #[error("grid mismatch: expected {expected} nodes, got {got}")]
    GridMismatch { expected: usize, got: usize },
    #[error("eigen system does not match the motion: {0}")]
    ParamMismatch(String),
    #[error("point {x} lies outside [{lo}, {hi}] at t = {t}")]
    OutsideDomain { x: f64, lo: f64, hi: f64, t: f64 },
}

/// `ln(w/u)` at `(ξ, t)` given the kinematics and `∫_0^t Ȧ²`.
pub fn log_w_over_u(k: &Kinematics, physics: &PhysicsParams, l0: f64, t: f64, int_adot_sq: f64, xi: f64) -> f64 {
    let d = physics.d;
    0.5 * (k.l / l0).ln() - physics.f0 * t
        + int_adot_sq / (4.0 * d)
        + xi * xi * k.ldot * k.l / (4.0 * d * l0 * l0)
        + xi * k.adot * k.l / (2.0 * d * l0)
}

/// `∫_0^t Ȧ(ζ)² dζ` by adaptive quadrature.
pub fn integral_adot_sq(motion: &BoundaryMotion, t: f64) -> Result<f64, ExactError> {
    motion.kinematics(t)?;
    let f = |z: f64| motion.kinematics(z).map(|k| k.adot * k.adot).unwrap_or(f64::NAN);
    Ok(quad::integrate(f, 0.0, t, INTEGRAL_TOL)?)
}

/// Maps `u(ξ, 0)` on the eigen grid to `w(ξ, 0)`.
pub fn transform_ic(u0: &[f64], grid: &[f64], motion: &BoundaryMotion, physics: &PhysicsParams) -> Result<Vec<f64>, ExactError> {
    if u0.len() != grid.len() {
        return Err(ExactError::GridMismatch {
            expected: grid.len(),
            got: u0.len(),
        });
    }
    let scale = u0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (left, right) = (u0[0], u0[u0.len() - 1]);
    if left.abs() > 1e-12 * scale || right.abs() > 1e-12 * scale {
        return Err(ExactError::EndpointViolation { left, right });
    }
    let k = motion.kinematics(0.0)?;
    let l0 = motion.l0();
    Ok(u0
        .iter()
        .zip(grid)
        .map(|(u, &xi)| u * log_w_over_u(&k, physics, l0, 0.0, 0.0, xi).exp())
        .collect())
}

/// Expansion coefficients `c_n = ⟨w0, g_n⟩`.
pub fn expand(w0: &[f64], eigen: &EigenSystem) -> Result<Vec<f64>, ExactError> {
    if w0.len() != eigen.grid.len() {
        return Err(ExactError::GridMismatch {
            expected: eigen.grid.len(),
            got: w0.len(),
        });
    }
    Ok(eigen.modes.iter().map(|g| eigen.inner(w0, g)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Magnitude of the last retained term.
    pub last_term: f64,
    pub truncation_warning: bool,
}

/// One row of a field dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: f64,
    pub xi: f64,
    pub t: f64,
    pub psi: f64,
    pub u: f64,
    pub w: f64,
}

#[derive(Debug, Clone)]
pub struct SeriesSolution {
    motion: BoundaryMotion,
    physics: PhysicsParams,
    eigen: EigenSystem,
    coeffs: Vec<f64>,
    params: SeparableParams,
    kind: CaseKind,
}

fn check_match(eigen: &EigenSystem, p: &SeparableParams, physics: &PhysicsParams) -> Result<(), ExactError> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300);
    match eigen.params {
        EigenParams::Interval { d, l0, gamma0, gamma1 } => {
            let want = [("D", d, physics.d), ("L0", l0, p.l0), ("gamma0", gamma0, p.gamma0()), ("gamma1", gamma1, p.gamma1)];
            for (name, got, exp) in want {
                if !(close(got, exp) || (got == 0.0 && exp.abs() < 1e-14)) {
                    return Err(ExactError::ParamMismatch(format!("{name}: eigen {got} vs motion {exp}")));
                }
            }
            Ok(())
        }
        EigenParams::Radial { .. } => Err(ExactError::ParamMismatch("radial eigen system on an interval".into())),
    }
}

impl SeriesSolution {
    pub fn new(motion: BoundaryMotion, physics: PhysicsParams, eigen: EigenSystem, coeffs: Vec<f64>) -> Result<Self, ExactError> {
        let params = *motion.separable_params().ok_or(ExactError::NotSeparable)?;
        let kind = motion.classify()?.kind;
        physics.validate()?;
        check_match(&eigen, &params, &physics)?;
        if coeffs.len() != eigen.num_modes() {
            return Err(ExactError::GridMismatch {
                expected: eigen.num_modes(),
                got: coeffs.len(),
            });
        }
        Ok(SeriesSolution {
            motion,
            physics,
            eigen,
            coeffs,
            params,
            kind,
        })
    }

    /// Builds the series from node values of `u(ξ, 0)` on `eigen.grid`.
    pub fn from_initial(motion: BoundaryMotion, physics: PhysicsParams, u0: &[f64], eigen: EigenSystem) -> Result<Self, ExactError> {
        let w0 = transform_ic(u0, &eigen.grid, &motion, &physics)?;
        let coeffs = expand(&w0, &eigen)?;
        Self::new(motion, physics, eigen, coeffs)
    }

    /// Solves the eigenproblem on `grid_size` intervals (eigenvalues
    /// Richardson-refined with a grid twice as fine) and expands `u0`.
    pub fn build<F: Fn(f64) -> f64>(
        motion: BoundaryMotion,
        physics: PhysicsParams,
        u0: F,
        grid_size: usize,
        num_modes: usize,
    ) -> Result<Self, ExactError> {
        let p = *motion.separable_params().ok_or(ExactError::NotSeparable)?;
        let ep = EigenParams::Interval {
            d: physics.d,
            l0: p.l0,
            gamma0: p.gamma0(),
            gamma1: p.gamma1,
        };
        let coarse = eigen::solve_sl(physics.d, p.l0, p.gamma0(), p.gamma1, grid_size, num_modes)?;
        let fine = eigen::solve_sl(physics.d, p.l0, p.gamma0(), p.gamma1, 2 * grid_size, num_modes)?;
        debug_assert_eq!(coarse.params, ep);
        let sig = eigen::richardson(&coarse.sigmas, &fine.sigmas);
        let eigen = coarse.with_sigmas(sig);
        let nodes: Vec<f64> = eigen.grid.iter().map(|&x| u0(x)).collect();
        Self::from_initial(motion, physics, &nodes, eigen)
    }

    pub fn motion(&self) -> &BoundaryMotion {
        &self.motion
    }

    pub fn physics(&self) -> &PhysicsParams {
        &self.physics
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eigen
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn kind(&self) -> CaseKind {
        self.kind
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// `ln Θ_n(t)` per mode, from the per-case closed forms.
    fn log_theta(&self, t: f64) -> Vec<f64> {
        let p = &self.params;
        let (l0, d, g1) = (p.l0, self.physics.d, p.gamma1);
        let sig = &self.eigen.sigmas;
        match self.kind {
            CaseKind::FixedLength => sig.iter().map(|s| s * t).collect(),
            CaseKind::LinearLength => {
                let alpha = p.b / l0;
                let r = l0 * t / (l0 + alpha * t);
                sig.iter().map(|s| s * r).collect()
            }
            CaseKind::SqrtLength => {
                let rho = p.b;
                let lx = (2.0 * rho * t / (l0 * l0)).ln_1p();
                sig.iter().map(|s| s * l0 * l0 / (2.0 * rho) * lx).collect()
            }
            CaseKind::QuadNeg => {
                let (a, b) = (p.a, p.b);
                let r = (b * b - a * l0 * l0).sqrt();
                let lr = (2.0 * r * a * t / ((b - r) * (a * t + b + r))).ln_1p();
                sig.iter()
                    .map(|s| (s * l0 * l0 / (2.0 * r) - g1 * g1 / (8.0 * d * r.powi(3))) * lr)
                    .collect()
            }
            CaseKind::QuadPos => {
                let (a, b) = (p.a, p.b);
                let q = (a * l0 * l0 - b * b).sqrt();
                let delta = ((a * t + b) / q).atan() - (b / q).atan();
                sig.iter()
                    .map(|s| (s * l0 * l0 / q + g1 * g1 / (4.0 * d * q.powi(3))) * delta)
                    .collect()
            }
            CaseKind::CriticalCase | CaseKind::General => unreachable!(),
        }
    }

    /// Mode-independent log factor of the per-case closed forms.
    fn log_common(&self, xi: f64, t: f64) -> f64 {
        let p = &self.params;
        let (l0, d, f0, g1, c) = (p.l0, self.physics.d, self.physics.f0, p.gamma1, p.c);
        match self.kind {
            CaseKind::FixedLength => {
                f0 * t
                    - (g1 * g1 * t.powi(3) / (3.0 * l0.powi(6)) + c * g1 * t * t / l0.powi(3) + c * c * t) / (4.0 * d)
                    - xi / (2.0 * d * l0) * (g1 * t / (l0 * l0) + c * l0)
            }
            CaseKind::LinearLength => {
                let alpha = p.b / l0;
                let l = l0 + alpha * t;
                0.5 * (l0 / l).ln() + f0 * t
                    - (c * c * t - c * g1 * t / (alpha * l0 * l) - g1 * g1 / (12.0 * alpha.powi(3)) * (l.powi(-3) - l0.powi(-3)))
                        / (4.0 * d)
                    - xi * xi * alpha * l / (4.0 * d * l0 * l0)
                    - xi * c * l / (2.0 * d * l0)
                    + xi * g1 / (4.0 * d * l0 * alpha * l)
            }
            CaseKind::SqrtLength => {
                let rho = p.b;
                let lx = (2.0 * rho * t / (l0 * l0)).ln_1p();
                let l = l0 * (0.5 * lx).exp();
                (-0.25 - g1 * g1 / (8.0 * rho.powi(3) * d)) * lx + f0 * t - c * c * t / (4.0 * d)
                    + c * g1 / (2.0 * rho * rho * d) * (l - l0)
                    - xi * xi * rho / (4.0 * d * l0 * l0)
                    + xi * g1 / (2.0 * d * l0 * rho)
                    - xi * c * l / (2.0 * d * l0)
            }
            CaseKind::QuadNeg | CaseKind::QuadPos => {
                let (a, b) = (p.a, p.b);
                let r2 = b * b - a * l0 * l0;
                let l_sq = a * t * t + 2.0 * b * t + l0 * l0;
                let l = l_sq.sqrt();
                0.25 * (l0 * l0 / l_sq).ln() + f0 * t - (g1 * g1 * a / (r2 * r2) + c * c) * t / (4.0 * d)
                    + c * g1 / (2.0 * d * r2) * (l - l0)
                    - xi * xi * (a * t + b) / (4.0 * d * l0 * l0)
                    + xi * g1 * (a * t + b) / (2.0 * d * l0 * r2)
                    - xi * c * l / (2.0 * d * l0)
            }
            CaseKind::CriticalCase | CaseKind::General => unreachable!(),
        }
    }

    fn check_xi(&self, xi: f64, t: f64) -> Result<(), ExactError> {
        let l0 = self.params.l0;
        if (0.0..=l0).contains(&xi) {
            Ok(())
        } else {
            Err(ExactError::OutsideDomain { x: xi, lo: 0.0, hi: l0, t })
        }
    }

    fn sum(&self, g: &[f64], log_theta: &[f64], common: f64) -> SeriesValue {
        let mut value = 0.0;
        let mut last = 0.0;
        for ((c, g), th) in self.coeffs.iter().zip(g).zip(log_theta) {
            last = c * g * (th + common).exp();
            value += last;
        }
        let last_term = last.abs();
        SeriesValue {
            value,
            last_term,
            truncation_warning: last_term > TRUNCATION_WARNING * value.abs(),
        }
    }

    /// `u(ξ, t)` from the per-case closed forms.
    pub fn eval_series(&self, xi: f64, t: f64) -> Result<SeriesValue, ExactError> {
        self.motion.kinematics(t)?;
        self.check_xi(xi, t)?;
        let g = self.eigen.modes_at(xi);
        Ok(self.sum(&g, &self.log_theta(t), self.log_common(xi, t)))
    }

    pub fn u(&self, xi: f64, t: f64) -> Result<f64, ExactError> {
        self.eval_series(xi, t).map(|v| v.value)
    }

    /// `u(ξ, t)` assembled from the generic mode formula with `s(t)` and
    /// `∫Ȧ²` computed by quadrature.
    pub fn eval_generic(&self, xi: f64, t: f64) -> Result<f64, ExactError> {
        let k = self.motion.kinematics(t)?;
        self.check_xi(xi, t)?;
        let l0 = self.params.l0;
        let s = quad::integrate(
            |z| {
                let l = self.motion.kinematics(z).map(|k| k.l).unwrap_or(f64::NAN);
                l0 * l0 / (l * l)
            },
            0.0,
            t,
            INTEGRAL_TOL,
        )?;
        let ia = integral_adot_sq(&self.motion, t)?;
        let common = -log_w_over_u(&k, &self.physics, l0, t, ia, xi);
        let theta: Vec<f64> = self.eigen.sigmas.iter().map(|sg| sg * s).collect();
        let g = self.eigen.modes_at(xi);
        Ok(self.sum(&g, &theta, common).value)
    }

    /// Relative difference between the closed-form and generic evaluators.
    pub fn cross_check(&self, xi: f64, t: f64) -> Result<f64, ExactError> {
        let a = self.u(xi, t)?;
        let b = self.eval_generic(xi, t)?;
        let scale = a.abs().max(b.abs());
        Ok(if scale == 0.0 { 0.0 } else { (a - b).abs() / scale })
    }

    /// `w(ξ, t) = Σ c_n exp(σ_n s) g_n(ξ)`.
    pub fn w(&self, xi: f64, t: f64) -> Result<f64, ExactError> {
        self.check_xi(xi, t)?;
        let s = self.motion.time_rescale(t)?;
        let g = self.eigen.modes_at(xi);
        Ok(self
            .coeffs
            .iter()
            .zip(&g)
            .zip(&self.eigen.sigmas)
            .map(|((c, g), sg)| c * g * (sg * s).exp())
            .sum())
    }

    /// `ψ(x, t)` in physical coordinates.
    pub fn eval_physical(&self, x: f64, t: f64) -> Result<f64, ExactError> {
        let k = self.motion.kinematics(t)?;
        let (lo, hi) = (k.a, k.a + k.l);
        let slack = 1e-12 * k.l;
        if x < lo - slack || x > hi + slack {
            return Err(ExactError::OutsideDomain { x, lo, hi, t });
        }
        let xi = ((x - k.a) * self.params.l0 / k.l).clamp(0.0, self.params.l0);
        self.u(xi, t)
    }

    /// Field samples on the eigen grid nodes at each time (rows `x, xi, t, psi, u, w`).
    pub fn field(&self, times: &[f64]) -> Result<Vec<FieldSample>, ExactError> {
        let mut out = Vec::with_capacity(times.len() * self.eigen.grid.len());
        let l0 = self.params.l0;
        for &t in times {
            let k = self.motion.kinematics(t)?;
            let s = self.motion.time_rescale(t)?;
            let theta = self.log_theta(t);
            for (i, &xi) in self.eigen.grid.iter().enumerate() {
                let g: Vec<f64> = self.eigen.modes.iter().map(|m| m[i]).collect();
                let u = self.sum(&g, &theta, self.log_common(xi, t)).value;
                let w: f64 = self
                    .coeffs
                    .iter()
                    .zip(&g)
                    .zip(&self.eigen.sigmas)
                    .map(|((c, g), sg)| c * g * (sg * s).exp())
                    .sum();
                out.push(FieldSample {
                    x: k.a + xi * k.l / l0,
                    xi,
                    t,
                    psi: u,
                    u,
                    w,
                });
            }
        }
        Ok(out)
    }

    pub fn manifest(&self) -> Value {
        io::manifest(
            "exact",
            json!({
                "motion": self.motion.spec(),
                "physics": self.physics,
                "case": format!("{:?}", self.kind),
                "truncation": self.truncation(),
                "grid_size": self.eigen.grid_size,
                "eigenvalues": self.eigen.sigmas,
                "coefficients": self.coeffs,
            }),
        )
    }
}

pub fn field_csv(samples: &[FieldSample]) -> String {
    io::csv_string(
        &["x", "xi", "t", "psi", "u", "w"],
        samples.iter().map(|s| [s.x, s.xi, s.t, s.psi, s.u, s.w]),
    )
}

/// Free-function form of [`SeriesSolution::eval_series`].
pub fn eval_series(sol: &SeriesSolution, xi: f64, t: f64) -> Result<SeriesValue, ExactError> {
    sol.eval_series(xi, t)
}

pub fn eval_physical(sol: &SeriesSolution, x: f64, t: f64) -> Result<f64, ExactError> {
    sol.eval_physical(x, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GrowthRegion {
    /// Open `ξ`-interval with exponential growth.
    Grows { lo: f64, hi: f64 },
    /// Decay everywhere in `(0, L0)`.
    Decays,
    /// The domain collapses at `horizon`, and the solution tends to zero.
    Collapse { horizon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub region: GrowthRegion,
    /// For fixed length with `γ1 = 0`: `D π²/L0² + c²/(4D)`.
    pub fixed_threshold: Option<f64>,
}

/// Region of asymptotic exponential growth in `ξ`.
pub fn growth_region(motion: &BoundaryMotion, physics: &PhysicsParams) -> Result<GrowthReport, ExactError> {
    let p = *motion.separable_params().ok_or(ExactError::NotSeparable)?;
    let kind = motion.classify()?.kind;
    let cs = physics.c_star();
    let (l0, c, d, f0) = (p.l0, p.c, physics.d, physics.f0);
    let horizon = motion.validity_horizon();
    if horizon.is_finite() {
        return Ok(GrowthReport {
            region: GrowthRegion::Collapse { horizon },
            fixed_threshold: None,
        });
    }
    let window = |speed: f64, shift: f64| {
        // growth where -c* < c - shift + ξ speed / L0 < c*
        let lo = (l0 / speed * (-cs - c + shift)).max(0.0);
        let hi = (l0 / speed * (cs - c + shift)).min(l0);
        if lo < hi {
            GrowthRegion::Grows { lo, hi }
        } else {
            GrowthRegion::Decays
        }
    };
    let whole = |grows: bool| {
        if grows {
            GrowthRegion::Grows { lo: 0.0, hi: l0 }
        } else {
            GrowthRegion::Decays
        }
    };
    let report = match kind {
        CaseKind::FixedLength => {
            if p.gamma1 != 0.0 {
                GrowthReport {
                    region: GrowthRegion::Decays,
                    fixed_threshold: None,
                }
            } else {
                let threshold = d * std::f64::consts::PI.powi(2) / (l0 * l0) + c * c / (4.0 * d);
                GrowthReport {
                    region: whole(f0 > threshold),
                    fixed_threshold: Some(threshold),
                }
            }
        }
        CaseKind::LinearLength => GrowthReport {
            region: window(p.b / l0, 0.0),
            fixed_threshold: None,
        },
        CaseKind::SqrtLength => GrowthReport {
            region: whole(f0 > c * c / (4.0 * d)),
            fixed_threshold: None,
        },
        CaseKind::QuadNeg | CaseKind::QuadPos => {
            let sa = p.a.sqrt();
            let shift = p.gamma1 * sa / (p.b * p.b - p.a * l0 * l0);
            GrowthReport {
                region: window(sa, shift),
                fixed_threshold: None,
            }
        }
        CaseKind::CriticalCase | CaseKind::General => return Err(ExactError::NotSeparable),
    };
    Ok(report)
}

/// Radially symmetric exact solution on the ball `|x - A0| < R(t)`,
/// `R² = a t² + 2 b t + R0²`, with a fixed centre.
#[derive(Debug, Clone)]
pub struct RadialSeries {
    motion: BoundaryMotion,
    physics: PhysicsParams,
    n_dim: u32,
    eigen: EigenSystem,
    coeffs: Vec<f64>,
}

impl RadialSeries {
    /// `psi0` is the initial profile as a function of radius.
    pub fn build<F: Fn(f64) -> f64>(
        a: f64,
        b: f64,
        r0: f64,
        n_dim: u32,
        physics: PhysicsParams,
        psi0: F,
        grid_size: usize,
        num_modes: usize,
    ) -> Result<Self, ExactError> {
        let motion = BoundaryMotion::separable(SeparableParams::quadratic(a, b, r0))?;
        let g0 = a * r0 * r0 - b * b;
        let coarse = eigen::solve_radial(physics.d, r0, g0, n_dim, grid_size, num_modes)?;
        let fine = eigen::solve_radial(physics.d, r0, g0, n_dim, 2 * grid_size, num_modes)?;
        let sig = eigen::richardson(&coarse.sigmas, &fine.sigmas);
        let eigen = coarse.with_sigmas(sig);
        let rdot0 = b / r0;
        let w0: Vec<f64> = eigen
            .grid
            .iter()
            .map(|&r| psi0(r) * (rdot0 * r * r / (4.0 * physics.d * r0)).exp())
            .collect();
        let coeffs = expand(&w0, &eigen)?;
        Ok(RadialSeries {
            motion,
            physics,
            n_dim,
            eigen,
            coeffs,
        })
    }

    pub fn motion(&self) -> &BoundaryMotion {
        &self.motion
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eigen
    }

    /// `W(z, t)` in the form whose potential vanishes on the boundary,
    /// `W_t = D R0²/R² (∇²W + Q (z²/R0² - 1) W/R0²)` with `W(·, 0) = Σ c_l v_l`.
    pub fn w(&self, z: f64, t: f64) -> Result<f64, ExactError> {
        let r0 = self.motion.l0();
        if !(0.0..=r0).contains(&z) {
            return Err(ExactError::OutsideDomain { x: z, lo: 0.0, hi: r0, t });
        }
        let s = self.motion.time_rescale(t)?;
        let shift = self.motion.separable_params().map_or(0.0, |p| p.gamma0()) / (4.0 * self.physics.d * r0 * r0);
        let g = self.eigen.modes_at(z);
        Ok(self
            .coeffs
            .iter()
            .zip(&g)
            .zip(&self.eigen.sigmas)
            .map(|((c, g), sg)| c * g * ((sg - shift) * s).exp())
            .sum())
    }

    /// `ψ` at fixed-domain radius `z ∈ [0, R0]` (physical radius `z R(t)/R0`).
    pub fn psi(&self, z: f64, t: f64) -> Result<f64, ExactError> {
        let k = self.motion.kinematics(t)?;
        let r0 = self.motion.l0();
        if !(0.0..=r0).contains(&z) {
            return Err(ExactError::OutsideDomain { x: z, lo: 0.0, hi: r0, t });
        }
        let s = self.motion.time_rescale(t)?;
        let d = self.physics.d;
        let common = 0.5 * self.n_dim as f64 * (r0 / k.l).ln() + self.physics.f0 * t
            - k.ldot * k.l * z * z / (4.0 * d * r0 * r0);
        let g = self.eigen.modes_at(z);
        Ok(self
            .coeffs
            .iter()
            .zip(&g)
            .zip(&self.eigen.sigmas)
            .map(|((c, g), sg)| c * g * (sg * s + common).exp())
            .sum())
    }
}
