use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rhsim_cli::config::Config;
use rhsim_cli::output::{read_manifest, MANIFEST};
use rhsim_cli::render::{render_snapshot, Reduce};
use rhsim_cli::run::{output_dir, run, run_equilibrium};
use rhsim_cli::CliError;
use rhsim_core::Snapshot;
use rhsim_verify::{run_all, Level};

/// Return-to-home dispersal simulator.
#[derive(Parser)]
#[command(name = "rhsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Run the acceptance criteria (quick by default).
    Verify {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
    },
    /// Render a snapshot to PNG.
    Render {
        snapshot: PathBuf,
        out: PathBuf,
        /// Reduction for traveler fields: home | position | slice:I,J
        #[arg(long, default_value = "home")]
        reduce: Reduce,
    },
    /// Compute the equilibrium of the config's initial home distribution.
    Equilibrium { config: PathBuf },
}

fn load(path: &Path) -> Result<(Config, PathBuf), CliError> {
    let config = Config::load(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config } => {
            let (config, base) = load(&config)?;
            let summary = run(&config, &base, &output_dir(&config))?;
            if let Some(report) = &summary.report {
                print!("{report}");
            }
            println!("wrote {} files to {}", summary.entries.len(), summary.dir.display());
        }
        Command::Equilibrium { config } => {
            let (config, base) = load(&config)?;
            let summary = run_equilibrium(&config, &base, &output_dir(&config))?;
            print!("{}", summary.report.unwrap_or_default());
            println!("wrote {} files to {}", summary.entries.len(), summary.dir.display());
        }
        Command::Verify { full, .. } => {
            let level = if full { Level::Full } else { Level::Quick };
            let reports = run_all(level, |r| println!("{r}"));
            let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
            if !failed.is_empty() {
                return Err(CliError::Verification(failed));
            }
            println!("all {} criteria passed", reports.len());
        }
        Command::Render { snapshot, out, reduce } => {
            let snap = Snapshot::load(&snapshot)
                .map_err(|e| CliError::Config(format!("cannot load {}: {e}", snapshot.display())))?;
            let title = snapshot.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let summary = render_snapshot(&snap, &out, reduce, &title)?;
            println!(
                "integral = {:.16e}  min = {:.16e}  max = {:.16e}",
                summary.integral, summary.min, summary.max
            );
            // a single home slice carries only part of the total
            if !matches!(reduce, Reduce::Slice(..)) {
                cross_check(&snapshot, summary.integral);
            }
        }
    }
    Ok(())
}

/// Compares a rendered integral with the one recorded next to the snapshot.
fn cross_check(snapshot: &Path, integral: f64) {
    let Some(dir) = snapshot.parent() else { return };
    let Ok(entries) = read_manifest(&dir.join(MANIFEST)) else { return };
    let name = snapshot.file_name().map(|s| s.to_string_lossy().into_owned());
    if let Some(e) = entries.iter().find(|e| Some(&e.file) == name.as_ref()) {
        if let Some(recorded) = e.integral {
            let rel = (integral - recorded).abs() / recorded.abs().max(f64::MIN_POSITIVE);
            let verdict = if rel <= 1e-12 || integral == recorded { "match" } else { "MISMATCH" };
            println!("manifest integral = {recorded:.16e} at t = {} ({verdict})", e.t);
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rhsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
