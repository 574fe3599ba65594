//! `alap`: run scenarios, list and run the built-in corpus, and check Young
//! functions and operator structure from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alaplace::scenario::{
    check_structure, check_young, corpus_with_overrides, list_corpus, load_scenario, run_scenario, write_artifacts,
    ScenarioConfig, ScenarioReport,
};
use clap::{Parser, Subcommand};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "alap", version, about = "Quasilinear A-Laplacian Dirichlet solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one or more scenario files.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Output root; each scenario writes into `<out>/<name>/`.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Number of scenarios run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Built-in scenario corpus.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// Checks that do not solve anything.
    Check {
        #[command(subcommand)]
        command: CheckCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Print corpus ids and descriptions.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Solve a corpus entry.
    Run {
        id: String,
        /// Mesh width override.
        #[arg(long)]
        h: Option<f64>,
        /// JSON merge patch applied to the entry.
        #[arg(long)]
        overrides: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Index bounds, doubling constants and conjugate samples.
    Young { config: PathBuf },
    /// Ellipticity and growth inequalities on random samples.
    Structure { config: PathBuf },
}

/// Exit status for a failed check; clap itself uses 2 for usage errors.
const FAILED: u8 = 1;
const ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ERROR)
        }
    }
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn dispatch(command: Command) -> CliResult<bool> {
    match command {
        Command::Run { configs, out, jobs } => {
            let cfgs = configs.iter().map(load_scenario).collect::<Result<Vec<_>, _>>()?;
            run_many(&cfgs, &out, jobs)
        }
        Command::Corpus { command: CorpusCommand::List { json } } => {
            let rows = list_corpus();
            if json {
                let v: Vec<Value> = rows
                    .iter()
                    .map(|(id, d)| serde_json::json!({"id": id, "description": d}))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                for (id, d) in rows {
                    println!("{id:<16} {d}");
                }
            }
            Ok(true)
        }
        Command::Corpus {
            command: CorpusCommand::Run { id, h, overrides, out },
        } => {
            let patch = overrides
                .map(|p| -> CliResult<Value> { Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?) })
                .transpose()?;
            let cfg = corpus_with_overrides(&id, patch.as_ref(), h)?;
            run_many(std::slice::from_ref(&cfg), &out, 1)
        }
        Command::Check { command: CheckCommand::Young { config } } => {
            let report = check_young(&load_scenario(config)?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.passed)
        }
        Command::Check {
            command: CheckCommand::Structure { config },
        } => {
            let report = check_structure(&load_scenario(config)?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.passed)
        }
    }
}

fn run_one(cfg: &ScenarioConfig, out: &Path) -> CliResult<ScenarioReport> {
    let outcome = run_scenario(cfg)?;
    write_artifacts(&outcome, &out.join(&cfg.name))?;
    Ok(outcome.report)
}

fn run_many(cfgs: &[ScenarioConfig], out: &Path, jobs: usize) -> CliResult<bool> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let results: Vec<_> = pool.install(|| {
        use rayon::prelude::*;
        cfgs.par_iter()
            .map(|c| run_one(c, out).map_err(|e| e.to_string()))
            .collect()
    });
    let mut all = true;
    for (cfg, r) in cfgs.iter().zip(results) {
        match r {
            Ok(rep) => {
                let status = if rep.passed { "PASS" } else { "FAIL" };
                let mut line = format!("{status} {}", rep.name);
                if let Some(s) = &rep.solve {
                    line += &format!(" outer={} residual={:.3e}", s.outer_iterations, s.residual);
                }
                if !rep.failed_checks.is_empty() {
                    line += &format!(" failed=[{}]", rep.failed_checks.join(","));
                }
                if let Some(e) = &rep.error {
                    line += &format!(" error={e}");
                }
                println!("{line}");
                for w in &rep.warnings {
                    println!("  warning: {w}");
                }
                all &= rep.passed;
            }
            Err(e) => {
                println!("FAIL {} error={e}", cfg.name);
                all = false;
            }
        }
    }
    Ok(all)
}
