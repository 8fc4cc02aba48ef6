//! `olmr`: run online multi-label ranking boosters over datasets or
//! synthetic adversaries, certify the weak-learning condition, and dump
//! potential tables.

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use olmr_cli::config::{summary_path, Algo, CertifyArgs, DumpArgs, RunArgs, SimulateArgs, SyntheticLearnerKind};
use olmr_cli::error::CliError;
use olmr_cli::runner::{self, RunOutput};
use olmr_core::losses::LossKind;

#[derive(Parser)]
#[command(name = "olmr", version, about = "Online boosting for multi-label ranking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train progressively over a dataset and record test-round metrics.
    Run(RunArgs),
    /// Stream a synthetic adversary against clairvoyant learners.
    Simulate(SimulateArgs),
    /// Certify the online weak-learning condition over seeded streams.
    CertifyWlc(CertifyArgs),
    /// Tabulate zero-state potentials and their loss bounds.
    DumpPotentials(DumpArgs),
}

fn write_run_output(output: &RunOutput, out: Option<&std::path::Path>) -> Result<(), CliError> {
    for (path, bytes) in &output.files {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(path, bytes)?;
    }
    if let Some(out) = out {
        if let Some(parent) = out.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(summary_path(out), output.summary_csv.as_bytes())?;
    }
    for line in &output.human {
        println!("{line}");
    }
    Ok(())
}

fn warn_bmr_assumptions(gamma_desc: &str, loss: LossKind, distribution_valued: bool) {
    eprintln!(
        "note: the potential-based booster assumes every weak learner beats the \
         edge-over-random baseline by {gamma_desc}; its loss guarantee is vacuous otherwise"
    );
    if loss == LossKind::Rank && distribution_valued {
        eprintln!(
            "warning: rank-loss potentials assume single-label weak predictions; \
             distribution-valued learners should use --loss hinge"
        );
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            if cfg.algo == Algo::Bmr {
                // the built-in trainable learners emit distributions
                let desc = match (cfg.gamma, cfg.gamma_grid) {
                    (Some(g), _) => format!("gamma={g}"),
                    (None, Some(_)) => "each grid gamma".to_string(),
                    (None, None) => "gamma".to_string(),
                };
                warn_bmr_assumptions(&desc, cfg.loss, true);
            }
            let started = Instant::now();
            let output = runner::run_dataset(&cfg)?;
            write_run_output(&output, cfg.out.as_deref())?;
            println!("done in {:.2}s", started.elapsed().as_secs_f64());
            Ok(())
        }
        Command::Simulate(args) => {
            let cfg = args.resolve()?;
            if cfg.algo == Algo::Bmr {
                let distribution_valued = cfg.learner == SyntheticLearnerKind::Baseline;
                warn_bmr_assumptions(&format!("gamma={}", cfg.gamma), cfg.loss, distribution_valued);
            }
            let started = Instant::now();
            let output = runner::run_simulation(&cfg)?;
            write_run_output(&output, cfg.out.as_deref())?;
            println!("done in {:.2}s", started.elapsed().as_secs_f64());
            Ok(())
        }
        Command::CertifyWlc(args) => {
            let cfg = args.resolve()?;
            let report = runner::run_certification(&cfg)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            if let Some(out) = &cfg.out {
                if let Some(parent) = out.parent() {
                    if !parent.as_os_str().is_empty() {
                        fs::create_dir_all(parent)?;
                    }
                }
                fs::write(out, json.as_bytes())?;
            }
            println!("{json}");
            Ok(())
        }
        Command::DumpPotentials(args) => {
            let cfg = args.resolve()?;
            let csv = runner::dump_potentials_csv(&cfg)?;
            match &cfg.out {
                Some(out) => {
                    if let Some(parent) = out.parent() {
                        if !parent.as_os_str().is_empty() {
                            fs::create_dir_all(parent)?;
                        }
                    }
                    fs::write(out, csv.as_bytes())?;
                    println!("wrote {} rows to {}", cfg.n_max + 1, out.display());
                }
                None => {
                    std::io::stdout().write_all(csv.as_bytes())?;
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            let payload = serde_json::json!({ "error": error.kind(), "message": error.to_string() });
            eprintln!("{payload}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
