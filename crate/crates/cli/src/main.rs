//! `qbailey`: verification sweeps, series evaluation and transform audits.

mod config;
mod eval;
mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::SweepConfig;
use sweep::{expand, run_jobs, Job, Output, SweepResult};

use qbailey_core::bailey::audit_transforms;
use qbailey_core::{rat, VerificationReport};

const CONFIG_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "qbailey",
    version,
    about = "Exact verification of conjugate Bailey pair identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expands a TOML sweep config into cells and verifies each one.
    Run {
        config: PathBuf,
        /// Overrides the config's worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Prints one named series as a coefficient table.
    Eval {
        /// Series name; `qbailey eval list` shows all names.
        name: String,
        /// Parameters as key=value; `order` may be `a/b`.
        params: Vec<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: eval::Format,
    },
    /// Re-checks the Bailey relation after randomized transforms.
    AuditTransforms {
        /// Cases per transform.
        #[arg(long, default_value_t = 50)]
        cases: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Truncation order in powers of q.
        #[arg(long, default_value_t = 20)]
        order: i64,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn emit(result: &SweepResult, output: Option<&Path>) -> io::Result<()> {
    match output {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            result.write_reports(&mut w)?;
            w.flush()
        }
        None => {
            let mut w = io::stdout().lock();
            result.write_reports(&mut w)?;
            w.flush()
        }
    }
}

fn finish(result: &SweepResult, output: Option<&Path>) -> ExitCode {
    if let Err(e) = emit(result, output) {
        eprintln!("cannot write reports: {e}");
        return ExitCode::from(CONFIG_ERROR);
    }
    eprintln!("{}", result.summary());
    ExitCode::from(result.exit_code() as u8)
}

fn run(path: &Path, workers: Option<usize>) -> ExitCode {
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let cfg = match SweepConfig::parse(&src) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let jobs = match expand(&cfg, &src) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let result = run_jobs(jobs, workers.or(cfg.workers), cfg.timing);
    if let Some(t) = &cfg.tables {
        let written = File::create(t).map_err(|e| e.to_string()).and_then(|f| {
            result
                .write_tables(BufWriter::new(f))
                .map_err(|e| e.to_string())
        });
        if let Err(e) = written {
            eprintln!("cannot write tables to {}: {e}", t.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    }
    finish(&result, cfg.output.as_deref())
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, workers } => run(&config, workers),
        Command::Eval {
            name,
            params,
            format,
        } => {
            if name == "list" {
                let mut out = io::stdout().lock();
                for (n, p) in eval::SERIES {
                    if writeln!(out, "{n}: {p}").is_err() {
                        break;
                    }
                }
                return ExitCode::SUCCESS;
            }
            let written = eval::evaluate(&name, &params)
                .and_then(|(s, b)| eval::write(&s, b, format, io::stdout().lock()));
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("eval {name}: {e}");
                    ExitCode::from(CONFIG_ERROR)
                }
            }
        }
        Command::AuditTransforms {
            cases,
            seed,
            order,
            workers,
        } => {
            if order < 1 || workers == Some(0) {
                eprintln!("order and workers must be >= 1");
                return ExitCode::from(CONFIG_ERROR);
            }
            let bound = rat(order, 1);
            let template = VerificationReport::new("transform-audit", bound)
                .with("cases", cases)
                .with("seed", seed);
            let job = Job::Run {
                template,
                work: Box::new(move || Output {
                    reports: audit_transforms(cases, seed, bound),
                    tables: Vec::new(),
                }),
            };
            finish(&run_jobs(vec![job], workers, false), None)
        }
    }
}
