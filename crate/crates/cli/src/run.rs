//! Scenario dispatch.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rhsim_core::analytic::{equilibrium, stationary_residual, u_exact, v_exact};
use rhsim_core::colonization::ColonizationStepper;
use rhsim_core::epidemic::{EpidemicState, EpidemicStepper};
use rhsim_core::grid::integrate_position;
use rhsim_core::kernels::chi_kernel;
use rhsim_core::model::{home_distribution, total_distribution};
use rhsim_core::trajectory::Trajectory;
use rhsim_core::{CoreState, CoreStepper, ScalarField, Snapshot};

use crate::config::{Config, ModelKind};
use crate::error::CliError;
use crate::output::{diagnostics_csv, epidemic_curve_csv, Emitter, ManifestEntry};

pub const OUTPUT_ENV: &str = "RHSIM_OUTPUT_DIR";

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
    /// Human-readable report (equilibrium runs).
    pub report: Option<String>,
}

/// `RHSIM_OUTPUT_DIR` wins over the configured directory.
pub fn output_dir(config: &Config) -> PathBuf {
    match std::env::var_os(OUTPUT_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => config.output.directory.clone(),
    }
}

/// Runs `config` into `out`, with init files resolved against `base`.
pub fn run(config: &Config, base: &Path, out: &Path) -> Result<RunSummary, CliError> {
    match config.model {
        ModelKind::Core | ModelKind::Colonization => run_core(config, base, out),
        ModelKind::Epidemic => run_epidemic(config, base, out),
        ModelKind::Oracle => run_oracle(config, base, out),
        ModelKind::Equilibrium => run_equilibrium(config, base, out),
    }
}

fn emitter(config: &Config, out: &Path) -> Result<Emitter, CliError> {
    Emitter::create(out, &config.output.formats)
}

fn run_core(config: &Config, base: &Path, out: &Path) -> Result<RunSummary, CliError> {
    let grid = config.grid()?;
    let params = config.core_params()?;
    let schedule = config.schedule()?;
    let (u0, v0) = config.init.build(grid, base)?;
    let state0 = CoreState::new(u0, v0)?;
    let traj: Trajectory<CoreState> = if config.model == ModelKind::Colonization {
        let ext = config.colonization_params()?;
        ColonizationStepper::new(params, ext, grid)?.simulate(&state0, schedule.duration, schedule.dt, schedule.sample_every)?
    } else {
        CoreStepper::new(params, grid)?.simulate(&state0, schedule.duration, schedule.dt, schedule.sample_every)?
    };
    let mut em = emitter(config, out)?;
    for (k, s) in traj.states.iter().enumerate() {
        em.snapshot(&format!("u_{k:04}"), s.t, &s.u.clone().into())?;
        em.snapshot(&format!("v_{k:04}"), s.t, &s.v.clone().into())?;
        em.snapshot(&format!("wbar_{k:04}"), s.t, &total_distribution(s, params.sigma)?.into())?;
    }
    let t_end = traj.last().t;
    em.table("diagnostics.csv", t_end, &diagnostics_csv(&traj.diagnostics))?;
    finish(em, t_end, None)
}

fn run_epidemic(config: &Config, base: &Path, out: &Path) -> Result<RunSummary, CliError> {
    let grid = config.grid()?;
    let params = config.epidemic_params()?;
    let schedule = config.schedule()?;
    let (s1, s2) = config.init.build(grid, base)?;
    let (i1, i2) = match &config.seed {
        Some(seed) => seed.build(grid, base)?,
        None => {
            log::warn!("no [seed] section: the run is disease-free");
            (ScalarField::zeros(grid), rhsim_core::TravelerField::zeros(grid, rhsim_core::Frame::Eulerian))
        }
    };
    let state0 = EpidemicState::new(s1, i1, s2, i2)?;
    let traj = EpidemicStepper::new(params, grid)?.simulate(&state0, schedule.duration, schedule.dt, schedule.sample_every)?;
    let mut em = emitter(config, out)?;
    let mut curve = Vec::with_capacity(traj.states.len());
    for (k, s) in traj.states.iter().enumerate() {
        em.snapshot(&format!("s1_{k:04}"), s.t, &s.s1.clone().into())?;
        em.snapshot(&format!("i1_{k:04}"), s.t, &s.i1.clone().into())?;
        em.snapshot(&format!("s2_{k:04}"), s.t, &s.s2.clone().into())?;
        em.snapshot(&format!("i2_{k:04}"), s.t, &s.i2.clone().into())?;
        curve.push((s.t, s.totals()));
    }
    let t_end = traj.last().t;
    em.table("diagnostics.csv", t_end, &diagnostics_csv(&traj.diagnostics))?;
    em.table("epidemic_curve.csv", t_end, &epidemic_curve_csv(&curve))?;
    finish(em, t_end, None)
}

fn run_oracle(config: &Config, base: &Path, out: &Path) -> Result<RunSummary, CliError> {
    let grid = config.grid()?;
    let params = config.core_params()?;
    let times = config.oracle_times()?;
    let (u0, v0) = config.init.build(grid, base)?;
    let h0 = home_distribution(&CoreState::new(u0.clone(), v0.clone())?);
    let mut em = emitter(config, out)?;
    for (k, &t) in times.iter().enumerate() {
        let u: Snapshot = u_exact(t, &u0, &h0, &params)?.into();
        let v: Snapshot = v_exact(t, &u0, &v0, &h0, &params)?.into();
        em.snapshot(&format!("u_{k:04}"), t, &u)?;
        em.snapshot(&format!("v_{k:04}"), t, &v)?;
    }
    let t_end = times.iter().cloned().fold(0.0, f64::max);
    finish(em, t_end, None)
}

/// Equilibrium of the home distribution given by `[init]`.
pub fn run_equilibrium(config: &Config, base: &Path, out: &Path) -> Result<RunSummary, CliError> {
    let grid = config.grid()?;
    let params = config.core_params()?;
    let (u0, v0) = config.init.build(grid, base)?;
    let h0 = home_distribution(&CoreState::new(u0, v0)?);
    let eq = equilibrium(&h0, &params)?;
    let residual = stationary_residual(&eq, &params)?;
    let home_err = eq
        .u_bar
        .axpby(1.0, &integrate_position(&eq.v_bar)?, 1.0)?
        .max_abs_diff(&h0);
    let chi_mass = chi_kernel(&params, grid).integral();
    let mut report = String::new();
    writeln!(report, "stationary_residual_sup = {residual:.16e}").unwrap();
    writeln!(report, "home_identity_error_sup = {home_err:.16e}").unwrap();
    writeln!(report, "chi_mass = {chi_mass:.16e}").unwrap();
    writeln!(report, "chi_mass_expected = {:.16e}", params.gamma / params.alpha).unwrap();
    let t = f64::INFINITY;
    let mut em = emitter(config, out)?;
    em.snapshot("u_bar", t, &eq.u_bar.into())?;
    em.snapshot("v_bar", t, &eq.v_bar.into())?;
    em.table("equilibrium_report.txt", t, &report)?;
    finish(em, t, Some(report))
}

fn finish(em: Emitter, t: f64, report: Option<String>) -> Result<RunSummary, CliError> {
    let dir = em.dir().to_path_buf();
    let entries = em.finish(t)?;
    Ok(RunSummary { dir, entries, report })
}
