use crate::config::{CompareConfig, CriticalConfig, EigenConfig, ExactConfig, NumericConfig};
use crate::error::CliError;
use growdiff::critical::{self, log_times};
use growdiff::eigen::{self, EigenParams};
use growdiff::exact::{field_csv, SeriesSolution};
use growdiff::io;
use growdiff::motion::BoundaryMotion;
use growdiff::numeric::{self, Representation, SolverConfig};
use serde_json::{json, Value};
use std::path::Path;

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    Ok(io::write_text(&dir.join(name), text)?)
}

fn write_json(dir: &Path, name: &str, v: &Value) -> Result<(), CliError> {
    Ok(io::write_json(&dir.join(name), v)?)
}

fn sample_u0(u0: &dyn Fn(f64) -> f64, l0: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == 0 || i == n { 0.0 } else { u0(l0 * i as f64 / n as f64) })
        .collect()
}

pub fn eigen(cfg: EigenConfig) -> Result<Value, CliError> {
    let params = match (cfg.n_dim, cfg.l0, cfg.r0) {
        (None, Some(l0), _) => EigenParams::Interval {
            d: cfg.d,
            l0,
            gamma0: cfg.gamma0,
            gamma1: cfg.gamma1,
        },
        (None, None, _) => return Err(CliError::Config("missing field `L0`".into())),
        (Some(n_dim), _, Some(r0)) => EigenParams::Radial {
            d: cfg.d,
            r0,
            gamma0: cfg.gamma0,
            n_dim,
        },
        (Some(_), _, None) => return Err(CliError::Config("missing field `R0` (needed with `n_dim`)".into())),
    };
    let solve = |grid| match params {
        EigenParams::Interval { d, l0, gamma0, gamma1 } => eigen::solve_sl(d, l0, gamma0, gamma1, grid, cfg.modes),
        EigenParams::Radial { d, r0, gamma0, n_dim } => eigen::solve_radial(d, r0, gamma0, n_dim, grid, cfg.modes),
    };
    let mut sys = solve(cfg.grid)?;
    if cfg.refine {
        let fine = solve(2 * cfg.grid)?;
        let sigmas = eigen::richardson(&sys.sigmas, &fine.sigmas);
        sys = sys.with_sigmas(sigmas);
    }
    let mut body = sys.header_json();
    body["richardson"] = json!(cfg.refine);
    let manifest = io::manifest("eigen", body);
    write(&cfg.out, "eigen.csv", &sys.to_csv())?;
    write_json(&cfg.out, "eigen.json", &manifest)?;
    Ok(manifest)
}

pub fn exact(cfg: ExactConfig) -> Result<Value, CliError> {
    let (motion, physics) = cfg.motion.build()?;
    let u0 = cfg.initial.function(&motion, &physics)?;
    let sol = SeriesSolution::build(motion, physics, u0, cfg.grid, cfg.modes)?;
    let samples = sol.field(&cfg.times)?;
    let manifest = sol.manifest();
    write(&cfg.out, "exact_field.csv", &field_csv(&samples))?;
    write_json(&cfg.out, "exact.json", &manifest)?;
    Ok(manifest)
}

pub fn numeric(cfg: NumericConfig) -> Result<Value, CliError> {
    let (motion, physics) = cfg.motion.build()?;
    let u0 = cfg.initial.function(&motion, &physics)?;
    let solver = cfg.solver();
    let init = sample_u0(&*u0, motion.l0(), cfg.grid);
    let sol = match cfg.representation {
        Representation::U => numeric::solve_u(&motion, &physics, &init, &solver, &cfg.times)?,
        Representation::W => {
            let grid: Vec<f64> = (0..=cfg.grid).map(|i| motion.l0() * i as f64 / cfg.grid as f64).collect();
            let w0 = growdiff::exact::transform_ic(&init, &grid, &motion, &physics)?;
            numeric::solve_w(&motion, &physics, &w0, &solver, &cfg.times)?
        }
        Representation::RadialW => {
            return Err(CliError::Config("use the critical command for radial runs".into()));
        }
    };
    let manifest = sol.manifest(&motion, &physics);
    write(&cfg.out, "numeric_field.csv", &sol.to_csv())?;
    write_json(&cfg.out, "numeric.json", &manifest)?;
    Ok(manifest)
}

pub fn compare(cfg: CompareConfig) -> Result<Value, CliError> {
    if !(cfg.tol > 0.0) {
        return Err(CliError::Config("`tol` must be positive".into()));
    }
    let (motion, physics) = cfg.motion.build()?;
    let u0 = cfg.initial.function(&motion, &physics)?;
    let init = sample_u0(&*u0, motion.l0(), cfg.grid);
    let solver = SolverConfig {
        grid_size: cfg.grid,
        steps: cfg.steps,
        theta: cfg.theta,
    };
    let num = numeric::solve_u(&motion, &physics, &init, &solver, &cfg.times)?;
    let exact = SeriesSolution::build(motion.clone(), physics, u0, cfg.exact_grid, cfg.modes)?;
    let mut rows = Vec::with_capacity(cfg.times.len());
    let mut worst = (0.0f64, 0.0, 0.0);
    for (k, &t) in num.times.iter().enumerate() {
        let mut max_abs = 0.0f64;
        let mut scale = 0.0f64;
        let mut at = 0.0;
        for (i, &xi) in num.grid.iter().enumerate() {
            let e = exact.u(xi, t)?;
            scale = scale.max(e.abs());
            let d = (num.field[k][i] - e).abs();
            if d > max_abs {
                max_abs = d;
                at = xi;
            }
        }
        let rel = if scale > 0.0 { max_abs / scale } else { max_abs };
        if rel > worst.0 {
            worst = (rel, at, t);
        }
        rows.push([t, max_abs, rel]);
    }
    write(&cfg.out, "compare.csv", &io::csv_string(&["t", "max_abs", "rel_linf"], &rows))?;
    let manifest = io::manifest(
        "compare",
        json!({
            "exact": exact.manifest(),
            "numeric": num.manifest(&motion, &physics),
            "tol": cfg.tol,
            "worst_rel_linf": worst.0,
            "worst_xi": worst.1,
            "worst_t": worst.2,
            "pass": worst.0 <= cfg.tol,
        }),
    );
    write_json(&cfg.out, "compare.json", &manifest)?;
    if worst.0 > cfg.tol {
        return Err(CliError::Tolerance(format!(
            "relative L-inf error {:e} > {:e}, worst at xi = {}, t = {}",
            worst.0, cfg.tol, worst.1, worst.2
        )));
    }
    Ok(manifest)
}

pub fn critical(cfg: CriticalConfig) -> Result<Value, CliError> {
    let alpha = cfg.alpha()?;
    let motion = BoundaryMotion::critical(alpha, cfg.eta, cfg.l0_offset, &cfg.physics)?;
    let fit = critical::fit_exponent(&motion, &cfg.physics, cfg.n_dim, &cfg.fit())?;
    let envelope = if cfg.envelope && alpha > 0.0 {
        let solver = SolverConfig {
            grid_size: cfg.envelope_grid,
            steps: cfg.steps,
            theta: 0.5,
        };
        let times = log_times(1.0, cfg.envelope_t_max, 30);
        Some(critical::envelope_run(&motion, &cfg.physics, cfg.n_dim, &solver, &times)?)
    } else {
        None
    };
    let report = critical::report(&fit, envelope.as_ref());
    write_json(&cfg.out, "critical_fit.json", &report)?;
    write(
        &cfg.out,
        "gradient.csv",
        &io::csv_string(&["t", "gradient"], &fit.gradient),
    )?;
    if let Some(env) = &envelope {
        write(&cfg.out, "envelope.csv", &env.to_csv())?;
        env.ensure()?;
    }
    if fit.error() > cfg.tol {
        return Err(CliError::Tolerance(format!(
            "fitted exponent {:.4} vs predicted {:.4} (tol {})",
            fit.fitted_exponent, fit.predicted_exponent, cfg.tol
        )));
    }
    Ok(report)
}
