use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use funrec_cli::commands::{self, FitOptions};
use funrec_cli::{run_study, CliError, ExperimentConfig, StudyKind};

#[derive(Parser)]
#[command(
    name = "funrec",
    version,
    about = "Recursive functional kernel regression experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print M0, M1, M2, alpha and beta as CSV.
    Constants {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a dataset from a scenario file.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the scenario's query curves.
        #[arg(long)]
        points_out: Option<PathBuf>,
    },
    /// Run a Monte Carlo study and write its reports.
    Run {
        #[arg(long, value_enum)]
        study: Option<StudyKind>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        slack_as_bound: Option<f64>,
        #[arg(long)]
        slack_variance: Option<f64>,
        #[arg(long)]
        slack_bias: Option<f64>,
    },
    /// Evaluate the estimator on a dataset at the given points.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        snapshot_in: Option<PathBuf>,
        #[arg(long)]
        snapshot_out: Option<PathBuf>,
        #[arg(long)]
        n_pilot: Option<usize>,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Constants { config, out } => {
            commands::constants(&config, out.as_deref())?;
        }
        Cmd::Simulate {
            scenario,
            n,
            out,
            seed,
            points_out,
        } => {
            commands::simulate(&scenario, n, &out, seed, points_out.as_deref())?;
        }
        Cmd::Run {
            study,
            config,
            out,
            seed,
            replications,
            slack_as_bound,
            slack_variance,
            slack_bias,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = study {
                cfg.study = s;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(r) = replications {
                cfg.replications = r;
            }
            if let Some(v) = slack_as_bound {
                cfg.slack.as_bound = v;
            }
            if let Some(v) = slack_variance {
                cfg.slack.variance = v;
            }
            if let Some(v) = slack_bias {
                cfg.slack.bias = v;
            }
            let report = run_study(&cfg)?;
            eprintln!(
                "{}: wrote {} result rows and {} summary rows to {}",
                report.study,
                report.results.len(),
                report.summary.len(),
                cfg.output_dir.display()
            );
        }
        Cmd::Fit {
            data,
            points,
            config,
            out,
            snapshot_in,
            snapshot_out,
            n_pilot,
        } => {
            let opts = FitOptions {
                out: out.as_deref(),
                snapshot_in: snapshot_in.as_deref(),
                snapshot_out: snapshot_out.as_deref(),
                n_pilot,
            };
            commands::fit(&data, &points, &config, &opts)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("funrec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
