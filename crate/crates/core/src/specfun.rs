//! Airy function Ai and its derivative on the real line.
//!
//! Three branches:
//! - `|x| <= 4.5`: Maclaurin series `Ai = Ai(0) f(x) + Ai'(0) g(x)`, 40 terms.
//! - `x > 4.5`: `Ai(x) = sqrt(x/3) K_{1/3}(ζ) / π` with `K_ν` from its
//!   `cosh` integral representation, summed by the trapezoidal rule (which
//!   converges geometrically for this entire, doubly decaying integrand).
//! - `x < -4.5`: the oscillatory asymptotic expansion.
//!
//! Only `Ai`, `Ai'` are provided.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// `Ai(0) = 3^{-2/3} / Γ(2/3)`.
pub const AI0: f64 = 0.355_028_053_887_817_239_26;
/// `Ai'(0) = -3^{-1/3} / Γ(1/3)`.
pub const AIP0: f64 = -0.258_819_403_792_806_798_41;

const SERIES_TERMS: usize = 40;
const SERIES_LIMIT: f64 = 4.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryValue {
    pub x: f64,
    pub ai: f64,
    pub aip: f64,
}

/// `Ai(x)` and `Ai'(x)`.
pub fn airy_ai(x: f64) -> AiryValue {
    let (ai, aip) = if x.abs() <= SERIES_LIMIT {
        maclaurin(x)
    } else if x > 0.0 {
        bessel_integral(x)
    } else {
        oscillatory_asymptotic(-x)
    };
    AiryValue { x, ai, aip }
}

/// Maclaurin branch, exposed so the branches can be compared on their overlap.
pub fn airy_series(x: f64) -> (f64, f64) {
    maclaurin(x)
}

/// Exponentially decaying branch (valid for any `x > 0`).
pub fn airy_decaying(x: f64) -> (f64, f64) {
    assert!(x > 0.0);
    bessel_integral(x)
}

fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = Σ 3^k (1/3)_k x^{3k}/(3k)!, g = Σ 3^k (2/3)_k x^{3k+1}/(3k+1)!
    let mut f = 1.0;
    let mut g = x;
    let mut tf = 1.0;
    let mut tg = x;
    // derivatives: f' starts at x²/2, g' starts at 1
    let mut fp = 0.0;
    let mut gp = 1.0;
    let mut tfp = x * x / 2.0;
    let mut tgp = 1.0;
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        f += tf;
        g += tg;
        fp += tfp;
        tfp *= x3 / ((3.0 * kf) * (3.0 * kf + 2.0));
        tgp *= x3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        gp += tgp;
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

/// `e^{z} K_ν(z) = ∫_0^∞ exp(-z (cosh u - 1)) cosh(ν u) du` by the trapezoidal rule.
fn scaled_bessel_k(nu: f64, z: f64) -> f64 {
    const STEP: f64 = 0.125;
    let mut sum = 0.5; // u = 0 term, halved
    let mut k = 1;
    loop {
        let u = k as f64 * STEP;
        let term = (-z * (u.cosh() - 1.0)).exp() * (nu * u).cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        k += 1;
    }
    sum * STEP
}

fn bessel_integral(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let decay = (-zeta).exp();
    let k13 = scaled_bessel_k(1.0 / 3.0, zeta) * decay;
    let k23 = scaled_bessel_k(2.0 / 3.0, zeta) * decay;
    let ai = (x / 3.0).sqrt() * k13 / PI;
    let aip = -x / (PI * 3f64.sqrt()) * k23;
    (ai, aip)
}

fn oscillatory_asymptotic(y: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * y * y.sqrt();
    // u_k and v_k coefficients of the Airy asymptotic series.
    let mut u = [0.0f64; 24];
    let mut v = [0.0f64; 24];
    u[0] = 1.0;
    v[0] = 1.0;
    for k in 1..u.len() {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
    }
    let series = |c: &[f64; 24], odd: bool| {
        let mut sum = 0.0;
        let mut last = f64::INFINITY;
        let mut sign = 1.0;
        let mut j = if odd { 1 } else { 0 };
        while j < c.len() {
            let term = c[j] / zeta.powi(j as i32);
            if term.abs() > last {
                break;
            }
            sum += sign * term;
            last = term.abs();
            sign = -sign;
            j += 2;
        }
        sum
    };
    let phase = zeta + PI / 4.0;
    let (s, c) = phase.sin_cos();
    let ai = (s * series(&u, false) - c * series(&u, true)) / (PI.sqrt() * y.powf(0.25));
    let aip = -y.powf(0.25) / PI.sqrt() * (c * series(&v, false) + s * series(&v, true));
    (ai, aip)
}

/// `Ai''(x)` by a fourth-order central difference of `Ai'`; used to check
/// the defining ODE `Ai'' = x Ai`.
pub fn second_derivative(x: f64) -> f64 {
    let h = 1e-3 * x.abs().max(1.0);
    let d = |k: f64| airy_ai(x + k * h).aip;
    (8.0 * (d(1.0) - d(-1.0)) - (d(2.0) - d(-2.0))) / (12.0 * h)
}

/// Largest real zero `c1` of `Ai` (≈ -2.33811), computed once and cached.
pub fn airy_first_zero() -> f64 {
    static C1: OnceLock<f64> = OnceLock::new();
    *C1.get_or_init(|| {
        let (mut lo, mut hi) = (-2.4, -2.3);
        // Ai(-2.4) < 0 < Ai(-2.3)
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if airy_ai(mid).ai < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..5 {
            let v = airy_ai(x);
            let dx = v.ai / v.aip;
            x -= dx;
            if dx.abs() < 1e-17 {
                break;
            }
        }
        x
    })
}
