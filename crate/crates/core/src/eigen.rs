//! Sturm–Liouville eigenpairs on `[0, L0]` and the radial analogue on `[0, R0]`.
//!
//! Interval problem:
//! `σ g = D g'' + (γ0 ξ²/(4 D L0⁴) + γ1 ξ/(2 D L0³)) g`, `g(0) = g(L0) = 0`.
//!
//! Radial problem in `n` dimensions:
//! `σ v = D (v'' + (n-1)/r v') + γ0 r²/(4 D R0⁴) v`, `v'(0) = 0`, `v(R0) = 0`.
//!
//! Both are discretised on a uniform grid of `N` intervals by a conservative
//! (finite-volume) stencil, symmetrised with the diagonal mass matrix, and
//! solved with [`SymTridiag`]. Modes have unit norm in the discrete inner
//! product `⟨f, g⟩ = Σ M_i f_i g_i` (the trapezoidal rule on the interval).

use crate::io;
use crate::tridiag::SymTridiag;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub const MIN_GRID: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("parameter `{0}` must be positive and finite")]
    NonPositive(&'static str),
    #[error("parameter `{0}` must be finite")]
    NonFinite(&'static str),
    #[error("grid size {0} is below the minimum {MIN_GRID}")]
    GridTooSmall(usize),
    #[error("{requested} modes requested but at most {max} are resolved on this grid")]
    TooManyModes { requested: usize, max: usize },
    #[error("dimension n = {0} is not supported (expected 1, 2 or 3)")]
    BadDimension(u32),
    #[error("rho must be non-zero")]
    ZeroRho,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "snake_case")]
pub enum EigenParams {
    Interval {
        #[serde(rename = "D")]
        d: f64,
        #[serde(rename = "L0")]
        l0: f64,
        gamma0: f64,
        gamma1: f64,
    },
    Radial {
        #[serde(rename = "D")]
        d: f64,
        #[serde(rename = "R0")]
        r0: f64,
        gamma0: f64,
        n_dim: u32,
    },
}

impl EigenParams {
    pub fn extent(&self) -> f64 {
        match *self {
            EigenParams::Interval { l0, .. } => l0,
            EigenParams::Radial { r0, .. } => r0,
        }
    }

    pub fn diffusivity(&self) -> f64 {
        match *self {
            EigenParams::Interval { d, .. } | EigenParams::Radial { d, .. } => d,
        }
    }

    /// Zero-order coefficient of the operator.
    pub fn potential(&self, x: f64) -> f64 {
        match *self {
            EigenParams::Interval { d, l0, gamma0, gamma1 } => {
                gamma0 * x * x / (4.0 * d * l0.powi(4)) + gamma1 * x / (2.0 * d * l0.powi(3))
            }
            EigenParams::Radial { d, r0, gamma0, .. } => gamma0 * x * x / (4.0 * d * r0.powi(4)),
        }
    }

    fn validate(&self) -> Result<(), EigenError> {
        let pos = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(EigenError::NonPositive(name))
            }
        };
        let fin = |name, v: f64| if v.is_finite() { Ok(()) } else { Err(EigenError::NonFinite(name)) };
        match *self {
            EigenParams::Interval { d, l0, gamma0, gamma1 } => {
                pos("D", d)?;
                pos("L0", l0)?;
                fin("gamma0", gamma0)?;
                fin("gamma1", gamma1)
            }
            EigenParams::Radial { d, r0, gamma0, n_dim } => {
                pos("D", d)?;
                pos("R0", r0)?;
                fin("gamma0", gamma0)?;
                if (1..=3).contains(&n_dim) {
                    Ok(())
                } else {
                    Err(EigenError::BadDimension(n_dim))
                }
            }
        }
    }
}

/// Grid-sampled eigenpairs, ordered `σ_1 > σ_2 > …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub params: EigenParams,
    pub grid_size: usize,
    /// `N + 1` uniformly spaced nodes including both ends.
    pub grid: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// Node values of each mode (boundary Dirichlet nodes are exactly 0).
    pub modes: Vec<Vec<f64>>,
    /// Discrete inner-product weights, one per node.
    pub weights: Vec<f64>,
}

/// Discrete operator in symmetric form plus the mass weights.
struct Discretisation {
    matrix: SymTridiag,
    /// Mass of each unknown.
    mass: Vec<f64>,
    /// Node index of the first unknown.
    offset: usize,
}

fn discretise(params: &EigenParams, n: usize) -> Discretisation {
    let ext = params.extent();
    let h = ext / n as f64;
    let d = params.diffusivity();
    match *params {
        EigenParams::Interval { .. } => {
            let m = n - 1;
            let diag = (1..n)
                .map(|i| -2.0 * d / (h * h) + params.potential(i as f64 * h))
                .collect();
            let off = vec![d / (h * h); m - 1];
            Discretisation {
                matrix: SymTridiag::new(diag, off),
                mass: vec![h; m],
                offset: 1,
            }
        }
        EigenParams::Radial { n_dim, .. } => {
            let nd = n_dim as i32;
            let face = |i: usize| (i as f64 + 0.5) * h; // r_{i+1/2}
            let flux_w = |i: usize| face(i).powi(nd - 1);
            let mass: Vec<f64> = (0..n)
                .map(|i| {
                    let hi = face(i).powi(nd);
                    let lo = if i == 0 { 0.0 } else { face(i - 1).powi(nd) };
                    (hi - lo) / nd as f64
                })
                .collect();
            let diag = (0..n)
                .map(|i| {
                    let left = if i == 0 { 0.0 } else { flux_w(i - 1) };
                    (-d * (flux_w(i) + left) / h) / mass[i] + params.potential(i as f64 * h)
                })
                .collect();
            let off = (0..n - 1)
                .map(|i| d * flux_w(i) / h / (mass[i] * mass[i + 1]).sqrt())
                .collect();
            Discretisation {
                matrix: SymTridiag::new(diag, off),
                mass,
                offset: 0,
            }
        }
    }
}

fn check_sizes(grid_size: usize, num_modes: usize) -> Result<(), EigenError> {
    if grid_size < MIN_GRID {
        return Err(EigenError::GridTooSmall(grid_size));
    }
    if num_modes > grid_size / 4 || num_modes == 0 {
        return Err(EigenError::TooManyModes {
            requested: num_modes,
            max: grid_size / 4,
        });
    }
    Ok(())
}

fn solve(params: EigenParams, grid_size: usize, num_modes: usize) -> Result<EigenSystem, EigenError> {
    params.validate()?;
    check_sizes(grid_size, num_modes)?;
    let n = grid_size;
    let h = params.extent() / n as f64;
    let disc = discretise(&params, n);
    let size = disc.matrix.len();
    let mut sigmas = Vec::with_capacity(num_modes);
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(num_modes);
    for k in 0..num_modes {
        let sigma = disc.matrix.eigenvalue(size - 1 - k);
        let y = disc.matrix.eigenvector(sigma, &vecs);
        sigmas.push(sigma);
        vecs.push(y);
    }
    let mut weights = vec![0.0; n + 1];
    for (i, m) in disc.mass.iter().enumerate() {
        weights[i + disc.offset] = *m;
    }
    let modes = vecs
        .iter()
        .map(|y| {
            let mut g = vec![0.0; n + 1];
            for (i, (yi, m)) in y.iter().zip(&disc.mass).enumerate() {
                g[i + disc.offset] = yi / m.sqrt();
            }
            if g[disc.offset] < 0.0 || (g[disc.offset] == 0.0 && g[disc.offset + 1] < 0.0) {
                g.iter_mut().for_each(|v| *v = -*v);
            }
            g
        })
        .collect();
    let grid = (0..=n)
        .map(|i| if i == n { params.extent() } else { i as f64 * h })
        .collect();
    Ok(EigenSystem {
        params,
        grid_size,
        grid,
        sigmas,
        modes,
        weights,
    })
}

/// Eigenpairs of the interval problem.
pub fn solve_sl(d: f64, l0: f64, gamma0: f64, gamma1: f64, grid_size: usize, num_modes: usize) -> Result<EigenSystem, EigenError> {
    solve(EigenParams::Interval { d, l0, gamma0, gamma1 }, grid_size, num_modes)
}

/// Radially symmetric eigenpairs on the `n`-ball of radius `R0`.
pub fn solve_radial(d: f64, r0: f64, gamma0: f64, n_dim: u32, grid_size: usize, num_modes: usize) -> Result<EigenSystem, EigenError> {
    solve(EigenParams::Radial { d, r0, gamma0, n_dim }, grid_size, num_modes)
}

/// Upper bound `-|ρ|/(2 L0²) + γ1²/(4 D ρ² L0²)` on `σ_1` when `γ0 = -ρ²`.
pub fn principal_eigen_bound(rho: f64, gamma1: f64, d: f64, l0: f64) -> Result<f64, EigenError> {
    if rho == 0.0 {
        return Err(EigenError::ZeroRho);
    }
    let l2 = l0 * l0;
    Ok(-rho.abs() / (2.0 * l2) + gamma1 * gamma1 / (4.0 * d * rho * rho * l2))
}

/// Richardson extrapolation of second-order eigenvalues from grids `N` and `2N`.
pub fn richardson(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse.iter().zip(fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

/// Eigenvalues extrapolated from grids `grid_size` and `2 grid_size`.
pub fn refined_sigmas(params: EigenParams, grid_size: usize, num_modes: usize) -> Result<Vec<f64>, EigenError> {
    let coarse = solve(params, grid_size, num_modes)?;
    let fine = solve(params, 2 * grid_size, num_modes)?;
    Ok(richardson(&coarse.sigmas, &fine.sigmas))
}

impl EigenSystem {
    pub fn num_modes(&self) -> usize {
        self.sigmas.len()
    }

    pub fn extent(&self) -> f64 {
        self.params.extent()
    }

    pub fn spacing(&self) -> f64 {
        self.extent() / self.grid_size as f64
    }

    /// Discrete inner product of two node vectors.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights.iter().zip(f).zip(g).map(|((w, a), b)| w * a * b).sum()
    }

    /// Replaces the eigenvalues (e.g. by extrapolated values), keeping the modes.
    pub fn with_sigmas(mut self, sigmas: Vec<f64>) -> Self {
        assert_eq!(sigmas.len(), self.sigmas.len());
        self.sigmas = sigmas;
        self
    }

    /// Mode `k` (0-based) at an arbitrary point by 4-point Lagrange interpolation.
    pub fn mode_at(&self, k: usize, x: f64) -> f64 {
        let ext = self.extent();
        let interval = matches!(self.params, EigenParams::Interval { .. });
        if x >= ext || (interval && x <= 0.0) {
            return 0.0;
        }
        interpolate(&self.modes[k], self.spacing(), x.max(0.0))
    }

    /// Values of every mode at `x` (same as calling [`Self::mode_at`] per mode).
    pub fn modes_at(&self, x: f64) -> Vec<f64> {
        (0..self.num_modes()).map(|k| self.mode_at(k, x)).collect()
    }

    /// CSV with columns `xi, g_1, …, g_k` (or `r, …` for the ball).
    pub fn to_csv(&self) -> String {
        let first = match self.params {
            EigenParams::Interval { .. } => "xi".to_string(),
            EigenParams::Radial { .. } => "r".to_string(),
        };
        let names: Vec<String> = std::iter::once(first)
            .chain((1..=self.num_modes()).map(|k| format!("g_{k}")))
            .collect();
        let header: Vec<&str> = names.iter().map(String::as_str).collect();
        let rows = self.grid.iter().enumerate().map(|(i, x)| {
            let mut r = vec![*x];
            r.extend(self.modes.iter().map(|m| m[i]));
            r
        });
        io::csv_string(&header, rows)
    }

    /// JSON header: sigmas, params and grid size.
    pub fn header_json(&self) -> Value {
        json!({
            "params": self.params,
            "grid_size": self.grid_size,
            "sigmas": self.sigmas,
        })
    }
}

/// Cubic Lagrange interpolation on the uniform node vector `v` with spacing `h`.
pub(crate) fn interpolate(v: &[f64], h: f64, x: f64) -> f64 {
    let n = v.len() - 1;
    let pos = x / h;
    let i = (pos.floor() as isize - 1).clamp(0, n as isize - 3) as usize;
    let u = pos - i as f64;
    // Nodes at u = 0, 1, 2, 3.
    let l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    l0 * v[i] + l1 * v[i + 1] + l2 * v[i + 2] + l3 * v[i + 3]
}
