//! Command-line front end.

mod config;

pub use config::{Modes, ProfileSpec, RunConfig, SweepSpec, SweepVariable};

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::emission::{fieldfree_curve, general_rate_curve, total_rate, RateCurve, TotalRate, TransitionContext};
use crate::ermakov::{ErmakovTrajectory, DEFAULT_REL_TOL};
use crate::error::{Error, Result};
use crate::units::{derive_kinematics, normalized_frequency_to_hz};
use crate::verify::{run_all, SuiteReport, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "twistrad",
    version,
    about = "Spontaneous emission of paraxial twisted electrons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV; overrides `run.output`. Without either, CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the envelope equation and write the trajectory.
    Ermakov {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Compute the angular rate curve of one channel.
    Rate {
        #[command(flatten)]
        io: IoArgs,
        /// Use the closed field-free form.
        #[arg(long)]
        fieldfree: bool,
        /// Set the photon momentum to zero in the form factors.
        #[arg(long)]
        dipole: bool,
    },
    /// Total rate as a function of one parameter.
    Sweep {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        fieldfree: bool,
        #[arg(long)]
        dipole: bool,
    },
    /// Run the oracle suites.
    Verify {
        /// Reduced grids.
        #[arg(long)]
        quick: bool,
    },
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

/// Envelope of the configured profile over its whole domain.
pub fn cmd_ermakov(cfg: &RunConfig) -> Result<ErmakovTrajectory> {
    let (_, profile) = cfg.resolve()?;
    let (z_min, z_max) = profile.domain();
    ErmakovTrajectory::integrate_from(&profile, cfg.z_ref, cfg.b0, cfg.b0_prime, z_min, z_max, DEFAULT_REL_TOL)
}

fn fieldfree_ell(cfg: &RunConfig) -> Result<u32> {
    let reject = |msg: &str| {
        Err(Error::Config {
            line: 0,
            msg: msg.into(),
        })
    };
    if cfg.profile != ProfileSpec::Zero {
        return reject("the closed field-free form needs `profile.kind = zero`");
    }
    if cfg.b0_prime != 0.0 || cfg.z_ref != 0.0 {
        return reject("the closed field-free form assumes the waist at z = 0 (b0_prime = 0, z_ref = 0)");
    }
    match cfg.modes {
        Modes::Shorthand(l) => Ok(l),
        Modes::Explicit { .. } => reject("the closed field-free form needs the `ell_i` shorthand"),
    }
}

/// Channel context for the general path.
pub fn build_context(cfg: &RunConfig) -> Result<TransitionContext> {
    let (setup, profile) = cfg.resolve()?;
    let kin = derive_kinematics(&setup)?;
    let half = 0.5 * cfg.length;
    let traj =
        ErmakovTrajectory::integrate_from(&profile, cfg.z_ref, cfg.b0, cfg.b0_prime, -half, half, DEFAULT_REL_TOL)?;
    let (initial, final_mode) = cfg.modes.labels();
    Ok(TransitionContext::new(initial, final_mode, kin, cfg.length, Arc::new(traj))?.with_branch(cfg.branch))
}

/// Rate curve of the configured channel, plus the photon frequency in Hz.
pub fn cmd_rate(cfg: &RunConfig) -> Result<(RateCurve, f64)> {
    let grid = cfg.theta_grid();
    if cfg.fieldfree {
        let ell = fieldfree_ell(cfg)?;
        let (setup, _) = cfg.resolve()?;
        let kin = derive_kinematics(&setup)?;
        if ell == 0 {
            return Err(Error::DarkChannel { bracket: 0.0 });
        }
        let nu = normalized_frequency_to_hz(0.5 * kin.beta / (cfg.b0 * cfg.b0), &kin);
        Ok((fieldfree_curve(&grid, cfg.length, cfg.b0, ell, &kin)?, nu))
    } else {
        let ctx = build_context(cfg)?;
        let curve = general_rate_curve(&ctx, &grid, cfg.phi_samples, cfg.dipole)?;
        let nu = normalized_frequency_to_hz(ctx.photon(0.0, 0.0, 1)?.omega_norm, ctx.kin());
        Ok((curve, nu))
    }
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: std::result::Result<TotalRate, String>,
}

fn apply_sweep_value(cfg: &RunConfig, variable: SweepVariable, value: f64) -> Result<RunConfig> {
    let mut c = cfg.clone();
    match variable {
        SweepVariable::B0 => c.b0 = value,
        SweepVariable::Length => c.length = value,
        SweepVariable::BMax => c.b_max_tesla = Some(value),
        SweepVariable::Energy => c.energy_kev = value,
        SweepVariable::EllI => {
            if value < 0.0 || value.fract() != 0.0 || value > u32::MAX as f64 {
                return Err(Error::param("ell_i", value, "must be a non-negative integer"));
            }
            c.modes = Modes::Shorthand(value as u32);
        }
    }
    c.sweep = None;
    Ok(c)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config {
        line: 0,
        msg: "sweep needs a `[sweep]` section".into(),
    })?;
    if sweep.values.is_empty() {
        return Err(Error::Config {
            line: 0,
            msg: "sweep value list is empty".into(),
        });
    }
    Ok(sweep
        .values
        .par_iter()
        .map(|&value| {
            let result = apply_sweep_value(cfg, sweep.variable, value)
                .and_then(|c| cmd_rate(&c))
                .map(|(curve, _)| total_rate(&curve))
                .map_err(|e| e.to_string());
            SweepRow { value, result }
        })
        .collect())
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn sweep_csv(cfg: &RunConfig, rows: &[SweepRow]) -> String {
    let mut s = String::new();
    let variable = cfg.sweep.as_ref().map_or("", |sw| sw.variable.name());
    let _ = writeln!(s, "# variable = {variable}");
    let _ = writeln!(
        s,
        "# method = {}",
        if cfg.fieldfree { "closed_form" } else { "quadrature" }
    );
    let _ = writeln!(
        s,
        "value,total_rate_norm,total_rate_si,refinement_change,undersampled,error"
    );
    for row in rows {
        match &row.result {
            Ok(t) => {
                let _ = writeln!(
                    s,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{},",
                    row.value, t.norm, t.si, t.refinement_change, t.undersampled
                );
            }
            Err(e) => {
                let _ = writeln!(s, "{:.16e},,,,,{}", row.value, quote(e));
            }
        }
    }
    s
}

pub fn cmd_verify(quick: bool) -> Vec<SuiteReport> {
    run_all(&VerifyOptions {
        quick,
        ..Default::default()
    })
}

fn emit(path: Option<&Path>, content: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .write_all(content)
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn load(io: &IoArgs) -> Result<(RunConfig, Option<PathBuf>)> {
    let cfg = RunConfig::load(&io.config)?;
    let out = io.out.clone().or_else(|| cfg.output.clone());
    Ok((cfg, out))
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Ermakov { io } => {
            let (cfg, out) = load(&io)?;
            let traj = cmd_ermakov(&cfg)?;
            let mut buf = Vec::new();
            traj.write_csv(&mut buf).map_err(|e| Error::io("<buffer>", e))?;
            emit(out.as_deref(), &buf)?;
            eprintln!(
                "nodes {}  min b {:.10}  max b {:.10}  total Lewis phase {:.10}  total Larmor phase {:.10}",
                traj.len(),
                traj.min_b(),
                traj.max_b(),
                traj.total_lewis_phase(),
                traj.total_larmor_phase()
            );
        }
        Command::Rate { io, fieldfree, dipole } => {
            let (mut cfg, out) = load(&io)?;
            cfg.fieldfree |= fieldfree;
            cfg.dipole |= dipole;
            let (curve, nu) = cmd_rate(&cfg)?;
            let total = total_rate(&curve);
            emit(out.as_deref(), curve.to_csv_string().as_bytes())?;
            eprintln!(
                "photon frequency {:.6e} Hz  total rate {:.6e} 1/s ({:.6e} m_e)",
                nu, total.si, total.norm
            );
            if total.undersampled {
                eprintln!(
                    "warning: theta grid undersampled, half-resolution total differs by {:.3e}",
                    total.refinement_change
                );
            }
        }
        Command::Sweep { io, fieldfree, dipole } => {
            let (mut cfg, out) = load(&io)?;
            cfg.fieldfree |= fieldfree;
            cfg.dipole |= dipole;
            let rows = cmd_sweep(&cfg)?;
            emit(out.as_deref(), sweep_csv(&cfg, &rows).as_bytes())?;
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            eprintln!("{} points, {} failed", rows.len(), failed);
        }
        Command::Verify { quick } => {
            let reports = cmd_verify(quick);
            for r in &reports {
                println!("{r}");
            }
            if let Some(bad) = reports.iter().find(|r| !r.passed) {
                eprintln!("verification failed: {}", bad.name);
                return Ok(EXIT_VERIFY);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
