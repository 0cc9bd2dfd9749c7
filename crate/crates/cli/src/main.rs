use std::path::PathBuf;
use std::process::ExitCode;

use anderson_lab::{default_out, replay, run, Experiment, RunConfig, RunOptions};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "lab", version, about = "Anderson model experiments on random regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Q_I ladders from exact eigendecompositions.
    QiSweep(RunArgs),
    /// Population dynamics for the cavity recursion.
    Cavity(RunArgs),
    /// Deterministic resolvent bounds.
    CtAudit(RunArgs),
    /// Spread of F_s across realizations.
    ConcAudit(RunArgs),
    /// Graph density of states against the cavity density.
    DosCompare(RunArgs),
    /// Crossover estimate from Q_I ladders.
    PhaseReport(RunArgs),
    /// Rerun a manifest and compare output digests.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn run_experiment(experiment: Experiment, args: RunArgs) -> u8 {
    let cfg = match RunConfig::load(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    let cfg = match args.seed {
        Some(seed) => cfg.with_seed(seed),
        None => cfg,
    };
    let out = args.out.unwrap_or_else(|| default_out(experiment, &cfg));
    let mut opts = RunOptions::new(out);
    if let Some(w) = args.workers {
        opts = opts.with_workers(w);
    }
    match run(experiment, &cfg, &opts) {
        Ok(outcome) => {
            let m = &outcome.manifest;
            for t in m.tasks.iter().filter(|t| !t.ok) {
                eprintln!("task {} ({}) failed: {}", t.index, t.label, t.error.as_deref().unwrap_or("?"));
            }
            println!(
                "{experiment}: {}/{} tasks completed, output in {}",
                m.completed,
                m.tasks.len(),
                outcome.out.display()
            );
            outcome.exit_code() as u8
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code() as u8
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::QiSweep(a) => run_experiment(Experiment::QiSweep, a),
        Command::Cavity(a) => run_experiment(Experiment::Cavity, a),
        Command::CtAudit(a) => run_experiment(Experiment::CtAudit, a),
        Command::ConcAudit(a) => run_experiment(Experiment::ConcAudit, a),
        Command::DosCompare(a) => run_experiment(Experiment::DosCompare, a),
        Command::PhaseReport(a) => run_experiment(Experiment::PhaseReport, a),
        Command::Replay { manifest, out, workers } => {
            let out = out.unwrap_or_else(|| manifest.parent().unwrap_or(std::path::Path::new(".")).join("replay"));
            let workers = workers.unwrap_or_else(anderson_lab::runner::default_workers);
            match replay(&manifest, &out, workers) {
                Ok(report) => {
                    for (name, want, got) in &report.files {
                        let status = if got.as_deref() == Some(want.as_str()) { "identical" } else { "DIFFERS" };
                        println!("{name}: {status}");
                    }
                    if report.identical() {
                        0
                    } else {
                        2
                    }
                }
                Err(e) => {
                    eprintln!("{e}");
                    e.exit_code() as u8
                }
            }
        }
    };
    ExitCode::from(code)
}
