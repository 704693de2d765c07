//! `perversity`: equilibrium and welfare analysis of two-strategy
//! population games with altruistic and selfish sub-populations.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use perversity_cli::output::{emit, json_document};
use perversity_cli::{
    analysis_csv, analyze, dynamics_run, landscape, landscape_csv, pi_sweep, run_verify, sweep_csv,
    trajectory_csv, GameSpecFile, VerifySuite, DEFAULT_GRID,
};
use perversity_core::{dynamics, oracle, Error, GameInstance};

#[derive(Parser)]
#[command(
    name = "perversity",
    version,
    about = "Analyze altruistic perversity in two-strategy population games",
    long_about = "Enumerates Nash equilibria of heterogeneous two-strategy population games, \
                  computes the perversity index, sweeps it over the altruist mass, emits payoff \
                  landscapes, integrates a projected payoff-difference flow, and runs seeded \
                  verification campaigns."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Theorem1,
    Cases,
    Proposition1,
    Oracle,
}

impl From<SuiteArg> for VerifySuite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Theorem1 => VerifySuite::Theorem1,
            SuiteArg::Cases => VerifySuite::Cases,
            SuiteArg::Proposition1 => VerifySuite::Proposition1,
            SuiteArg::Oracle => VerifySuite::Oracle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis of one game: curvature, equilibria, perversity index.
    Analyze {
        /// Game file (KEY = VALUE lines or JSON).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perversity index as a function of the altruist mass.
    PiSweep {
        #[arg(long)]
        spec: PathBuf,
        /// Number of evenly spaced altruist masses.
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Welfare and payoff functions tabulated over the utilization level.
    Landscape {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded verification campaign; exits 1 on any violation.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Number of sampled games (suite-specific default).
        #[arg(long)]
        trials: Option<u64>,
        /// Campaign seed; falls back to PERVERSITY_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Grid spacing for the oracle suite.
        #[arg(long, default_value_t = oracle::DEFAULT_GRID_STEP)]
        grid_step: f64,
        /// Payoff tolerance for the oracle suite.
        #[arg(long, default_value_t = oracle::DEFAULT_PAYOFF_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the projected payoff-difference flow from an initial state.
    DynamicsRun {
        #[arg(long)]
        spec: PathBuf,
        /// Initial altruist cooperator mass (default p_a / 2).
        #[arg(long)]
        x_a: Option<f64>,
        /// Initial selfish cooperator mass (default p_s / 2).
        #[arg(long)]
        x_s: Option<f64>,
        /// Integration step size.
        #[arg(long, default_value_t = dynamics::DEFAULT_DT)]
        dt: f64,
        #[arg(long, default_value_t = dynamics::DEFAULT_MAX_STEPS)]
        max_steps: u64,
        /// Convergence threshold on the per-step movement divided by dt.
        #[arg(long, default_value_t = dynamics::DEFAULT_RESIDUAL_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn resolve_seed(cli_seed: Option<u64>) -> anyhow::Result<u64> {
    if let Some(seed) = cli_seed {
        return Ok(seed);
    }
    match std::env::var("PERVERSITY_SEED") {
        Ok(value) => value.trim().parse().with_context(|| {
            format!("PERVERSITY_SEED must be a nonnegative integer, got `{value}`")
        }),
        Err(_) => Ok(0),
    }
}

fn load_instance(spec: &Path) -> anyhow::Result<(GameSpecFile, GameInstance)> {
    let file = GameSpecFile::load(spec)?;
    let instance = file.to_instance().context("invalid game")?;
    Ok((file, instance))
}

fn run() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Analyze { spec, format, out } => {
            let file = GameSpecFile::load(&spec)?;
            let doc = analyze(&file).context("analysis failed")?;
            let text = match format {
                Format::Json => json_document(&doc)?,
                Format::Csv => analysis_csv(&doc),
            };
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::PiSweep {
            spec,
            grid,
            format,
            out,
        } => {
            let (_, instance) = load_instance(&spec)?;
            let rows = pi_sweep(&instance.matrix, grid).context("sweep failed")?;
            let text = match format {
                Format::Csv => sweep_csv(&rows),
                Format::Json => json_document(&rows)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Landscape {
            spec,
            grid,
            format,
            out,
        } => {
            let (_, instance) = load_instance(&spec)?;
            let rows = landscape(&instance, grid).context("landscape failed")?;
            let text = match format {
                Format::Csv => landscape_csv(&rows),
                Format::Json => json_document(&rows)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            suite,
            trials,
            seed,
            grid_step,
            tol,
            out,
        } => {
            let seed = resolve_seed(seed)?;
            match run_verify(suite.into(), trials, seed, grid_step, tol) {
                Ok(summary) => {
                    emit(out.as_deref(), &json_document(&summary)?)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::VerificationFailure(summary)) => {
                    emit(out.as_deref(), &json_document(&*summary)?)?;
                    eprintln!(
                        "verification failed: {} of {} trials violated the property",
                        summary.failures, summary.trials
                    );
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::DynamicsRun {
            spec,
            x_a,
            x_s,
            dt,
            max_steps,
            tol,
            format,
            out,
        } => {
            let (_, instance) = load_instance(&spec)?;
            let initial = match (x_a, x_s) {
                (None, None) => None,
                (a, s) => Some((
                    a.unwrap_or(instance.altruist_mass / 2.0),
                    s.unwrap_or(instance.selfish_mass() / 2.0),
                )),
            };
            let trajectory = dynamics_run(&instance, initial, dt, max_steps, tol)
                .context("integration failed")?;
            if !trajectory.converged {
                eprintln!(
                    "did not converge within {max_steps} steps (final residual {:e})",
                    trajectory.final_residual
                );
            }
            let text = match format {
                Format::Csv => trajectory_csv(&trajectory),
                Format::Json => json_document(&trajectory)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
