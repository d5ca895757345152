//! Prescribed boundary motions `x ∈ [A(t), A(t) + L(t)]`.
//!
//! Three families are supported:
//! - `Separable`: `L(t)² = a t² + 2 b t + L0²` with `A` chosen so that
//!   `Ä L³ = γ1`, the motions for which the transformed problem separates.
//! - `Critical`: the symmetric critical motion `A = -L/2` with
//!   `L/2 ≈ c* t - α ln(1 + t) - η(t)`.
//! - `Tabulated`: sampled `A`, `L` interpolated by not-a-knot cubic splines.

use crate::quad::{self, QuadError, Tolerance};
use crate::spline::CubicSpline;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

/// Relative threshold below which `a L0² - b²` is treated as zero.
pub const LINEAR_DEGENERACY: f64 = 1e-12;

const RESCALE_TOL: Tolerance = Tolerance { abs: 1e-10, rel: 1e-13 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MotionError {
    #[error("invalid physics parameters: {0}")]
    InvalidPhysics(String),
    #[error("invalid motion parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("domain collapsed: t = {t} is outside the validity horizon {horizon}")]
    DomainCollapsed { t: f64, horizon: f64 },
    #[error("negative or non-finite time t = {0}")]
    BadTime(f64),
    #[error("motion cannot be classified into an exactly solvable case ({tag:?})")]
    Unclassifiable { tag: CaseKind },
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("motion document: {0}")]
    Document(String),
}

fn invalid(name: &'static str, reason: impl Into<String>) -> MotionError {
    MotionError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsParams {
    #[serde(rename = "D")]
    pub d: f64,
    pub f0: f64,
}

impl PhysicsParams {
    pub fn new(d: f64, f0: f64) -> Result<Self, MotionError> {
        let p = PhysicsParams { d, f0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MotionError> {
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(MotionError::InvalidPhysics(format!("D must be positive, got {}", self.d)));
        }
        if !(self.f0.is_finite() && self.f0 > 0.0) {
            return Err(MotionError::InvalidPhysics(format!("f0 must be positive, got {}", self.f0)));
        }
        Ok(())
    }

    /// Critical spreading speed `2 sqrt(D f0)`.
    pub fn c_star(&self) -> f64 {
        2.0 * (self.d * self.f0).sqrt()
    }
}

/// `L² = a t² + 2 b t + L0²`, `A` fixed by `γ1`, drift `c` and offset `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableParams {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "L0")]
    pub l0: f64,
    #[serde(default)]
    pub gamma1: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub d: f64,
}

impl SeparableParams {
    pub fn fixed(l0: f64) -> Self {
        SeparableParams { a: 0.0, b: 0.0, l0, gamma1: 0.0, c: 0.0, d: 0.0 }
    }

    /// `L = L0 + α t`.
    pub fn linear(l0: f64, alpha: f64) -> Self {
        SeparableParams { a: alpha * alpha, b: alpha * l0, l0, gamma1: 0.0, c: 0.0, d: 0.0 }
    }

    /// `L = sqrt(L0² + 2 ρ t)`.
    pub fn sqrt(l0: f64, rho: f64) -> Self {
        SeparableParams { a: 0.0, b: rho, l0, gamma1: 0.0, c: 0.0, d: 0.0 }
    }

    pub fn quadratic(a: f64, b: f64, l0: f64) -> Self {
        SeparableParams { a, b, l0, gamma1: 0.0, c: 0.0, d: 0.0 }
    }

    pub fn with_drift(mut self, c: f64, d: f64) -> Self {
        self.c = c;
        self.d = d;
        self
    }

    pub fn with_gamma1(mut self, gamma1: f64) -> Self {
        self.gamma1 = gamma1;
        self
    }

    pub fn gamma0(&self) -> f64 {
        self.a * self.l0 * self.l0 - self.b * self.b
    }
}

/// `η(t) = η0 + k (1 + t)^p` with `p < 0` whenever `k ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EtaSpec {
    #[serde(default)]
    pub eta0: f64,
    #[serde(default)]
    pub k: f64,
    #[serde(default = "default_eta_power")]
    pub p: f64,
}

fn default_eta_power() -> f64 {
    -1.0
}

impl EtaSpec {
    /// `[η, η', η'', η''']` at `τ`.
    fn derivatives(&self, tau: f64) -> [f64; 4] {
        if self.k == 0.0 {
            return [self.eta0, 0.0, 0.0, 0.0];
        }
        let (k, p) = (self.k, self.p);
        let x = 1.0 + tau;
        let v = x.powf(p);
        [
            self.eta0 + k * v,
            k * p * v / x,
            k * p * (p - 1.0) * v / (x * x),
            k * p * (p - 1.0) * (p - 2.0) * v / (x * x * x),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalParams {
    pub alpha: f64,
    #[serde(default)]
    pub eta: EtaSpec,
    #[serde(rename = "L0_offset")]
    pub l0_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedParams {
    pub t: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "L")]
    pub l: Vec<f64>,
}

/// Serializable description of a motion (the `family` tag plus parameters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MotionSpec {
    Separable(SeparableParams),
    Critical(CriticalParams),
    Tabulated(TabulatedParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseKind {
    FixedLength,
    LinearLength,
    SqrtLength,
    QuadNeg,
    QuadPos,
    CriticalCase,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseTag {
    pub kind: CaseKind,
    pub gamma0: Option<f64>,
}

/// Values of `A`, `L` and their first two derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub l: f64,
    pub ldot: f64,
    pub lddot: f64,
    pub a: f64,
    pub adot: f64,
    pub addot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionState {
    pub t: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "Ldot")]
    pub ldot: f64,
    #[serde(rename = "Lddot")]
    pub lddot: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "Adot")]
    pub adot: f64,
    #[serde(rename = "Addot")]
    pub addot: f64,
    pub s: f64,
}

#[derive(Debug, Clone)]
struct CriticalState {
    params: CriticalParams,
    c_star: f64,
    t0: f64,
    ell_t0: f64,
}

impl CriticalState {
    /// `ℓ(τ) = 2 (c* τ - α ln(1+τ) - η(τ))` and its first three derivatives.
    fn ell(&self, tau: f64) -> [f64; 4] {
        let a = self.params.alpha;
        let e = self.params.eta.derivatives(tau);
        let x = 1.0 + tau;
        [
            2.0 * (self.c_star * tau - a * tau.ln_1p() - e[0]),
            2.0 * (self.c_star - a / x - e[1]),
            2.0 * (a / (x * x) - e[2]),
            2.0 * (-2.0 * a / (x * x * x) - e[3]),
        ]
    }
}

#[derive(Debug, Clone)]
enum Imp {
    Separable { p: SeparableParams, kind: CaseKind },
    Critical(CriticalState),
    Tabulated { a: CubicSpline, l: CubicSpline },
}

/// A validated boundary motion. Immutable once built.
#[derive(Debug, Clone)]
pub struct BoundaryMotion {
    spec: MotionSpec,
    imp: Imp,
}

fn finite(name: &'static str, v: f64) -> Result<(), MotionError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, "must be finite"))
    }
}

fn classify_separable(p: &SeparableParams) -> CaseKind {
    let g0 = p.gamma0();
    if p.a == 0.0 {
        if p.b == 0.0 {
            CaseKind::FixedLength
        } else {
            CaseKind::SqrtLength
        }
    } else {
        let scale = (p.a * p.l0 * p.l0).abs().max(p.b * p.b);
        if g0.abs() < LINEAR_DEGENERACY * scale {
            CaseKind::LinearLength
        } else if g0 < 0.0 {
            CaseKind::QuadNeg
        } else {
            CaseKind::QuadPos
        }
    }
}

/// Last root of `ℓ'(τ)` on `[0, ∞)`, or 0 when `ℓ' ≥ 0` throughout.
fn critical_start(state: &CriticalState) -> Result<f64, MotionError> {
    let g = |tau: f64| state.ell(tau)[1];
    // Scan in u = ln(1 + τ) up to τ ≈ e^40.
    let n = 4000;
    let u_max = 40.0;
    let tau_at = |i: usize| (u_max * i as f64 / n as f64).exp_m1();
    let mut last_neg = None;
    for i in 0..=n {
        if g(tau_at(i)) < 0.0 {
            last_neg = Some(i);
        }
    }
    match last_neg {
        None => Ok(0.0),
        Some(i) if i == n => Err(invalid("alpha", "L(t) is not eventually increasing")),
        Some(i) => {
            let (mut lo, mut hi) = (tau_at(i), tau_at(i + 1));
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(hi)
        }
    }
}

impl BoundaryMotion {
    pub fn new(spec: MotionSpec, physics: &PhysicsParams) -> Result<Self, MotionError> {
        physics.validate()?;
        let imp = match &spec {
            MotionSpec::Separable(p) => return Self::separable(*p),
            MotionSpec::Critical(p) => {
                finite("alpha", p.alpha)?;
                finite("L0_offset", p.l0_offset)?;
                finite("eta.eta0", p.eta.eta0)?;
                finite("eta.k", p.eta.k)?;
                finite("eta.p", p.eta.p)?;
                if p.l0_offset <= 0.0 {
                    return Err(invalid("L0_offset", "must be positive"));
                }
                if p.eta.k != 0.0 && p.eta.p >= 0.0 {
                    return Err(invalid("eta.p", "must be negative when eta.k is non-zero"));
                }
                let mut st = CriticalState {
                    params: *p,
                    c_star: physics.c_star(),
                    t0: 0.0,
                    ell_t0: 0.0,
                };
                st.t0 = critical_start(&st)?;
                st.ell_t0 = st.ell(st.t0)[0];
                Imp::Critical(st)
            }
            MotionSpec::Tabulated(p) => {
                if p.t.first() != Some(&0.0) {
                    return Err(invalid("t", "samples must start at t = 0"));
                }
                let a = CubicSpline::new(p.t.clone(), p.a.clone()).map_err(|e| invalid("A", e))?;
                let l = CubicSpline::new(p.t.clone(), p.l.clone()).map_err(|e| invalid("L", e))?;
                // Positivity of the interpolant, checked on a refined sampling.
                for w in p.t.windows(2) {
                    for j in 0..=8 {
                        let t = w[0] + (w[1] - w[0]) * j as f64 / 8.0;
                        if l.eval(t)[0] <= 0.0 {
                            return Err(invalid("L", format!("interpolated length is not positive at t = {t}")));
                        }
                    }
                }
                Imp::Tabulated { a, l }
            }
        };
        Ok(BoundaryMotion { spec, imp })
    }

    pub fn separable(p: SeparableParams) -> Result<Self, MotionError> {
        for (name, v) in [("a", p.a), ("b", p.b), ("L0", p.l0), ("gamma1", p.gamma1), ("c", p.c), ("d", p.d)] {
            finite(name, v)?;
        }
        if p.l0 <= 0.0 {
            return Err(invalid("L0", "must be positive"));
        }
        let kind = classify_separable(&p);
        Ok(BoundaryMotion {
            spec: MotionSpec::Separable(p),
            imp: Imp::Separable { p, kind },
        })
    }

    pub fn critical(alpha: f64, eta: EtaSpec, l0_offset: f64, physics: &PhysicsParams) -> Result<Self, MotionError> {
        Self::new(MotionSpec::Critical(CriticalParams { alpha, eta, l0_offset }), physics)
    }

    pub fn tabulated(t: Vec<f64>, a: Vec<f64>, l: Vec<f64>) -> Result<Self, MotionError> {
        // Physics does not enter tabulated motions.
        let dummy = PhysicsParams { d: 1.0, f0: 1.0 };
        Self::new(MotionSpec::Tabulated(TabulatedParams { t, a, l }), &dummy)
    }

    pub fn spec(&self) -> &MotionSpec {
        &self.spec
    }

    pub fn separable_params(&self) -> Option<&SeparableParams> {
        match &self.imp {
            Imp::Separable { p, .. } => Some(p),
            _ => None,
        }
    }

    pub fn critical_params(&self) -> Option<&CriticalParams> {
        match &self.imp {
            Imp::Critical(st) => Some(&st.params),
            _ => None,
        }
    }

    /// Start-time shift applied to a critical motion (0 for other families).
    pub fn start_shift(&self) -> f64 {
        match &self.imp {
            Imp::Critical(st) => st.t0,
            _ => 0.0,
        }
    }

    pub fn l0(&self) -> f64 {
        match &self.imp {
            Imp::Separable { p, .. } => p.l0,
            Imp::Critical(st) => st.params.l0_offset,
            Imp::Tabulated { l, .. } => l.values()[0],
        }
    }

    /// True when `Ȧ = -L̇/2` holds identically, i.e. the interval is
    /// `[-L/2, L/2]` up to a fixed translation.
    pub fn is_symmetric(&self) -> bool {
        match &self.imp {
            Imp::Critical(_) => true,
            Imp::Separable { p, .. } => {
                let tol = 1e-13;
                let k = match self.kinematics(0.0) {
                    Ok(k) => k,
                    Err(_) => return false,
                };
                let scale = 1.0 + k.ldot.abs() + p.gamma0().abs();
                (k.adot + 0.5 * k.ldot).abs() <= tol * scale && (p.gamma1 + 0.5 * p.gamma0()).abs() <= tol * scale
            }
            Imp::Tabulated { a, l } => {
                let shift = a.values()[0] + 0.5 * l.values()[0];
                a.values()
                    .iter()
                    .zip(l.values())
                    .all(|(a, l)| (a + 0.5 * l - shift).abs() <= 1e-14 * l.abs().max(1.0))
            }
        }
    }

    pub fn classify(&self) -> Result<CaseTag, MotionError> {
        match &self.imp {
            Imp::Separable { p, kind } => Ok(CaseTag {
                kind: *kind,
                gamma0: Some(p.gamma0()),
            }),
            Imp::Critical(_) => Ok(CaseTag {
                kind: CaseKind::CriticalCase,
                gamma0: None,
            }),
            Imp::Tabulated { .. } => Err(MotionError::Unclassifiable { tag: CaseKind::General }),
        }
    }

    /// Smallest positive time at which `L` vanishes, or the end of the data.
    pub fn validity_horizon(&self) -> f64 {
        match &self.imp {
            Imp::Separable { p, kind } => match kind {
                CaseKind::FixedLength | CaseKind::QuadPos => f64::INFINITY,
                CaseKind::LinearLength => {
                    let alpha = p.b / p.l0;
                    if alpha < 0.0 {
                        -p.l0 / alpha
                    } else {
                        f64::INFINITY
                    }
                }
                CaseKind::SqrtLength => {
                    if p.b < 0.0 {
                        -p.l0 * p.l0 / (2.0 * p.b)
                    } else {
                        f64::INFINITY
                    }
                }
                _ => quadratic_first_root(p.a, p.b, p.l0),
            },
            Imp::Critical(_) => f64::INFINITY,
            Imp::Tabulated { l, .. } => l.domain().1,
        }
    }

    fn check_time(&self, t: f64) -> Result<(), MotionError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(MotionError::BadTime(t));
        }
        let h = self.validity_horizon();
        let inside = match self.imp {
            Imp::Tabulated { .. } => t <= h,
            _ => t < h,
        };
        if inside {
            Ok(())
        } else {
            Err(MotionError::DomainCollapsed { t, horizon: h })
        }
    }

    /// `A`, `L` and derivatives at `t` (horizon-checked).
    pub fn kinematics(&self, t: f64) -> Result<Kinematics, MotionError> {
        self.check_time(t)?;
        Ok(self.kinematics_unchecked(t))
    }

    fn kinematics_unchecked(&self, t: f64) -> Kinematics {
        match &self.imp {
            Imp::Separable { p, kind } => {
                let g0 = p.gamma0();
                let (l, ldot) = match kind {
                    CaseKind::FixedLength => (p.l0, 0.0),
                    CaseKind::LinearLength => {
                        let alpha = p.b / p.l0;
                        (p.l0 + alpha * t, alpha)
                    }
                    _ => {
                        let l = (p.l0 * p.l0 + t * (2.0 * p.b + p.a * t)).sqrt();
                        (l, (p.a * t + p.b) / l)
                    }
                };
                let l3 = l * l * l;
                let lddot = if *kind == CaseKind::LinearLength { 0.0 } else { g0 / l3 };
                let addot = p.gamma1 / l3;
                let (a, adot) = match kind {
                    CaseKind::FixedLength => {
                        let k = p.gamma1 / l3;
                        (0.5 * k * t * t + p.c * t + p.d, k * t + p.c)
                    }
                    CaseKind::LinearLength => {
                        let alpha = p.b / p.l0;
                        (
                            p.gamma1 / (2.0 * alpha * alpha * l) + p.c * t + p.d,
                            -p.gamma1 / (2.0 * alpha * l * l) + p.c,
                        )
                    }
                    _ => (p.gamma1 * l / g0 + p.c * t + p.d, p.gamma1 * ldot / g0 + p.c),
                };
                Kinematics { l, ldot, lddot, a, adot, addot }
            }
            Imp::Critical(st) => {
                let e = st.ell(t + st.t0);
                let l = st.params.l0_offset + e[0] - st.ell_t0;
                Kinematics {
                    l,
                    ldot: e[1],
                    lddot: e[2],
                    a: -0.5 * l,
                    adot: -0.5 * e[1],
                    addot: -0.5 * e[2],
                }
            }
            Imp::Tabulated { a, l } => {
                let la = l.eval(t);
                let aa = a.eval(t);
                Kinematics {
                    l: la[0],
                    ldot: la[1],
                    lddot: la[2],
                    a: aa[0],
                    adot: aa[1],
                    addot: aa[2],
                }
            }
        }
    }

    /// Third derivative of `L`.
    pub fn length_jerk(&self, t: f64) -> Result<f64, MotionError> {
        self.check_time(t)?;
        Ok(match &self.imp {
            Imp::Separable { p, kind } => {
                if *kind == CaseKind::LinearLength {
                    0.0
                } else {
                    let k = self.kinematics_unchecked(t);
                    -3.0 * p.gamma0() * k.ldot / k.l.powi(4)
                }
            }
            Imp::Critical(st) => st.ell(t + st.t0)[3],
            Imp::Tabulated { l, .. } => l.eval(t)[3],
        })
    }

    /// `s(t) = ∫_0^t L0² / L(ζ)² dζ`.
    pub fn time_rescale(&self, t: f64) -> Result<f64, MotionError> {
        self.check_time(t)?;
        match &self.imp {
            Imp::Separable { p, kind } => Ok(separable_rescale(p, *kind, t)),
            _ => {
                let l0 = self.l0();
                let f = |z: f64| {
                    let l = self.kinematics_unchecked(z).l;
                    l0 * l0 / (l * l)
                };
                Ok(quad::integrate(f, 0.0, t, RESCALE_TOL)?)
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<MotionState, MotionError> {
        let k = self.kinematics(t)?;
        let s = self.time_rescale(t)?;
        Ok(MotionState {
            t,
            l: k.l,
            ldot: k.ldot,
            lddot: k.lddot,
            a: k.a,
            adot: k.adot,
            addot: k.addot,
            s,
        })
    }
}

fn separable_rescale(p: &SeparableParams, kind: CaseKind, t: f64) -> f64 {
    let l0 = p.l0;
    match kind {
        CaseKind::FixedLength => t,
        CaseKind::LinearLength => {
            let alpha = p.b / l0;
            l0 * t / (l0 + alpha * t)
        }
        CaseKind::SqrtLength => {
            let rho = p.b;
            l0 * l0 / (2.0 * rho) * (2.0 * rho * t / (l0 * l0)).ln_1p()
        }
        CaseKind::QuadNeg => {
            let (a, b) = (p.a, p.b);
            let r = (-p.gamma0()).sqrt();
            let x = 2.0 * r * a * t / ((b - r) * (a * t + b + r));
            l0 * l0 / (2.0 * r) * x.ln_1p()
        }
        CaseKind::QuadPos => {
            let (a, b) = (p.a, p.b);
            let q = p.gamma0().sqrt();
            l0 * l0 / q * (((a * t + b) / q).atan() - (b / q).atan())
        }
        CaseKind::CriticalCase | CaseKind::General => unreachable!("not a separable case"),
    }
}

/// Smallest positive root of `a t² + 2 b t + L0²`, or `+∞`.
fn quadratic_first_root(a: f64, b: f64, l0: f64) -> f64 {
    let disc = b * b - a * l0 * l0;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    let r = disc.sqrt();
    // Roots of a t² + 2 b t + c: q = -(b + sign(b) r), t = q/a and c/q.
    let q = -(b + b.signum() * r);
    let c = l0 * l0;
    let mut roots = Vec::with_capacity(2);
    if q != 0.0 {
        roots.push(q / a);
        roots.push(c / q);
    } else {
        roots.push(r / a);
        roots.push(-r / a);
    }
    roots
        .into_iter()
        .filter(|&t| t > 0.0)
        .fold(f64::INFINITY, f64::min)
}

/// Free-function forms of the motion API.
pub fn classify(m: &BoundaryMotion) -> Result<CaseTag, MotionError> {
    m.classify()
}

pub fn eval_motion(m: &BoundaryMotion, t: f64) -> Result<MotionState, MotionError> {
    m.eval(t)
}

pub fn time_rescale(m: &BoundaryMotion, t: f64) -> Result<f64, MotionError> {
    m.time_rescale(t)
}

pub fn validity_horizon(m: &BoundaryMotion) -> f64 {
    m.validity_horizon()
}

/// JSON document `{family, params…, physics: {D, f0}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionDocument {
    pub motion: MotionSpec,
    pub physics: PhysicsParams,
}

impl MotionDocument {
    pub fn from_value(v: Value) -> Result<Self, MotionError> {
        let mut map = match v {
            Value::Object(m) => m,
            _ => return Err(MotionError::Document("expected a JSON object".into())),
        };
        let physics = map
            .remove("physics")
            .ok_or_else(|| MotionError::Document("missing field `physics`".into()))?;
        let physics: PhysicsParams =
            serde_json::from_value(physics).map_err(|e| MotionError::Document(format!("physics: {e}")))?;
        physics.validate()?;
        let motion: MotionSpec =
            serde_json::from_value(Value::Object(map)).map_err(|e| MotionError::Document(e.to_string()))?;
        Ok(MotionDocument { motion, physics })
    }

    pub fn from_json(text: &str) -> Result<Self, MotionError> {
        let v: Value = serde_json::from_str(text).map_err(|e| MotionError::Document(e.to_string()))?;
        Self::from_value(v)
    }

    pub fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(&self.motion).expect("motion spec serializes");
        let map: &mut Map<String, Value> = v.as_object_mut().expect("tagged enum is an object");
        map.insert(
            "physics".into(),
            serde_json::to_value(self.physics).expect("physics serializes"),
        );
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("serializable")
    }

    pub fn build(&self) -> Result<BoundaryMotion, MotionError> {
        BoundaryMotion::new(self.motion.clone(), &self.physics)
    }
}
