//! `growdiff`: configured runs of the eigen, exact, numeric, compare and
//! critical pipelines. Each command takes an optional JSON config; flags
//! override keys in it.

mod commands;
mod config;
mod error;

use clap::{Args, Parser, Subcommand};
use config::{load, Overrides};
use error::CliError;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "growdiff", version, about = "Growth-diffusion on moving domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sturm–Liouville eigenvalues and modes.
    Eigen {
        #[command(flatten)]
        common: Common,
        #[arg(long = "D")]
        d: Option<f64>,
        #[arg(long = "L0")]
        l0: Option<f64>,
        #[arg(long = "R0")]
        r0: Option<f64>,
        #[arg(long)]
        n_dim: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        gamma0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        gamma1: Option<f64>,
        #[arg(long)]
        modes: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
        /// Skip Richardson extrapolation.
        #[arg(long)]
        no_refine: bool,
    },
    /// Exact series solution sampled on the eigen grid.
    Exact {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: FieldFlags,
        #[arg(long)]
        modes: Option<usize>,
    },
    /// Crank–Nicolson solution in the fixed computational domain.
    Numeric {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: FieldFlags,
        #[arg(long)]
        dt: Option<f64>,
        /// `u` or `w`.
        #[arg(long)]
        representation: Option<String>,
    },
    /// Numeric run checked against the exact series.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: FieldFlags,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        modes: Option<usize>,
        #[arg(long)]
        exact_grid: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Exponent fit and envelope check for a critical motion.
    Critical {
        #[command(flatten)]
        common: Common,
        #[arg(long = "D")]
        d: Option<f64>,
        #[arg(long)]
        f0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// `α` in units of `D/c*`.
        #[arg(long, allow_hyphen_values = true)]
        alpha_dc: Option<f64>,
        #[arg(long = "L0-offset")]
        l0_offset: Option<f64>,
        #[arg(long)]
        n_dim: Option<u32>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        t_lo: Option<f64>,
        #[arg(long)]
        t_hi: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        no_envelope: bool,
    },
}

#[derive(Args)]
struct FieldFlags {
    /// Motion document (JSON file with `family`, parameters and `physics`).
    #[arg(long)]
    motion: Option<PathBuf>,
    #[arg(long)]
    grid: Option<usize>,
    /// Comma-separated output times.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// `sine` or `w_sine`.
    #[arg(long)]
    initial: Option<String>,
}

impl FieldFlags {
    fn apply(&self, o: &mut Overrides) -> Result<(), CliError> {
        if let Some(p) = &self.motion {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            o.set_value("motion", v);
        }
        o.set("grid", self.grid);
        o.set("times", self.times.clone());
        if let Some(k) = &self.initial {
            o.set_value("initial", json!({ "kind": k }));
        }
        Ok(())
    }
}

fn common(o: &mut Overrides, c: &Common) {
    o.set("out", c.out.as_ref().map(|p| p.display().to_string()));
}

fn run(cli: Cli) -> Result<Value, CliError> {
    let mut o = Overrides::default();
    match cli.command {
        Command::Eigen {
            common: c,
            d,
            l0,
            r0,
            n_dim,
            gamma0,
            gamma1,
            modes,
            grid,
            no_refine,
        } => {
            common(&mut o, &c);
            o.set("D", d).set("L0", l0).set("R0", r0).set("n_dim", n_dim);
            o.set("gamma0", gamma0).set("gamma1", gamma1).set("modes", modes).set("grid", grid);
            if no_refine {
                o.set("refine", Some(false));
            }
            commands::eigen(load(c.config.as_deref(), o.into_map())?)
        }
        Command::Exact { common: c, field, modes } => {
            common(&mut o, &c);
            field.apply(&mut o)?;
            o.set("modes", modes);
            commands::exact(load(c.config.as_deref(), o.into_map())?)
        }
        Command::Numeric {
            common: c,
            field,
            dt,
            representation,
        } => {
            common(&mut o, &c);
            field.apply(&mut o)?;
            if let Some(dt) = dt {
                o.set_value("steps", json!({"kind": "uniform", "dt": dt}));
            }
            o.set("representation", representation);
            commands::numeric(load(c.config.as_deref(), o.into_map())?)
        }
        Command::Compare {
            common: c,
            field,
            dt,
            modes,
            exact_grid,
            tol,
        } => {
            common(&mut o, &c);
            field.apply(&mut o)?;
            if let Some(dt) = dt {
                o.set_value("steps", json!({"kind": "uniform", "dt": dt}));
            }
            o.set("modes", modes).set("exact_grid", exact_grid).set("tol", tol);
            commands::compare(load(c.config.as_deref(), o.into_map())?)
        }
        Command::Critical {
            common: c,
            d,
            f0,
            alpha,
            alpha_dc,
            l0_offset,
            n_dim,
            grid,
            t_lo,
            t_hi,
            tol,
            no_envelope,
        } => {
            common(&mut o, &c);
            o.set("alpha", alpha).set("alpha_dc", alpha_dc).set("L0_offset", l0_offset);
            o.set("n_dim", n_dim).set("grid", grid).set("tol", tol);
            if no_envelope {
                o.set("envelope", Some(false));
            }
            let mut map = o.into_map();
            // Physics and window flags patch nested keys of the file config.
            let file: serde_json::Map<String, Value> = match &c.config {
                Some(_) => load(c.config.as_deref(), serde_json::Map::new())?,
                None => serde_json::Map::new(),
            };
            if d.is_some() || f0.is_some() {
                let mut phys = file.get("physics").cloned().unwrap_or_else(|| json!({}));
                if let Some(d) = d {
                    phys["D"] = json!(d);
                }
                if let Some(f0) = f0 {
                    phys["f0"] = json!(f0);
                }
                map.insert("physics".into(), phys);
            }
            if t_lo.is_some() || t_hi.is_some() {
                let w = file.get("t_window").cloned().unwrap_or_else(|| json!([1e3, 1e5]));
                let lo = t_lo.or_else(|| w[0].as_f64()).unwrap_or(1e3);
                let hi = t_hi.or_else(|| w[1].as_f64()).unwrap_or(1e5);
                map.insert("t_window".into(), json!([lo, hi]));
            }
            commands::critical(load(c.config.as_deref(), map)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(manifest) => {
            println!("{}", serde_json::to_string_pretty(&manifest).expect("json"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("growdiff: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
