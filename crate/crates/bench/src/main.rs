use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use nlkit::solvers::ALGORITHM_NAMES;
use nlkit::SolveOptions;
use nlkit_bench::*;

#[derive(Parser)]
#[command(name = "nlkit", about = "Nonlinear solver benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one problem and print the result as JSON.
    Solve {
        problem: String,
        algorithm: String,
        #[arg(long, default_value_t = 1e-8)]
        abstol: f64,
        #[arg(long, default_value_t = 1000)]
        maxiters: usize,
        #[arg(long)]
        precond: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Work-precision sweep: median runtime per (problem, algorithm, abstol).
    Wp {
        #[arg(long, value_delimiter = ',', required = true)]
        problems: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        algorithms: Vec<String>,
        /// `1e-2..1e-10` or a comma list, largest first.
        #[arg(long, default_value = "1e-2..1e-10")]
        tols: String,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 1000)]
        maxiters: usize,
        #[arg(long)]
        precond: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runtime against problem size for one family.
    Scaling {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "8,16,32,64")]
        sizes: String,
        #[arg(long, value_delimiter = ',', required = true)]
        algorithms: Vec<String>,
        #[arg(long, default_value_t = 1e-6)]
        abstol: f64,
        #[arg(long, default_value_t = 1000)]
        maxiters: usize,
        #[arg(long, default_value_t = 600.0)]
        timeout_s: f64,
        #[arg(long)]
        precond: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print known problem ids or algorithm names.
    List { what: ListWhat },
}

#[derive(Clone, Copy, ValueEnum)]
enum ListWhat {
    Problems,
    Algorithms,
}

fn precond(p: Option<String>) -> Result<Option<nlkit::linalg::PrecondChoice>> {
    p.as_deref().map(parse_precond).transpose()
}

fn emit<R: serde::Serialize>(header: &str, rows: &[R], out: Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => write_csv(header, rows, BufWriter::new(File::create(path)?)),
        None => write_csv(header, rows, io::stdout().lock()),
    }
}

fn main_inner(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Solve {
            problem,
            algorithm,
            abstol,
            maxiters,
            precond: pc,
            seed,
        } => {
            let opts = SolveOptions::default()
                .with_abstol(abstol)
                .with_maxiters(maxiters);
            let (r, resid_inf) = cmd_solve(
                &problem,
                &algorithm,
                &opts,
                precond(pc)?,
                seed_from_env(seed)?,
            )?;
            let report = SolveReport {
                problem: &problem,
                algorithm: &algorithm,
                resid_inf,
                result: &r,
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(r.is_success())
        }
        Cmd::Wp {
            problems,
            algorithms,
            tols,
            reps,
            maxiters,
            precond: pc,
            seed,
            jobs,
            out,
        } => {
            let config = WpConfig {
                problems,
                algorithms,
                tols: parse_tols(&tols)?,
                reps,
                maxiters,
                precond: precond(pc)?,
                seed: seed_from_env(seed)?,
                jobs,
            };
            emit(WP_HEADER, &cmd_wp(&config)?, out)?;
            Ok(true)
        }
        Cmd::Scaling {
            family,
            sizes,
            algorithms,
            abstol,
            maxiters,
            timeout_s,
            precond: pc,
            seed,
            jobs,
            out,
        } => {
            let timeout = Duration::try_from_secs_f64(timeout_s)
                .map_err(|_| BenchError::Config(format!("bad timeout {timeout_s}")))?;
            let config = ScalingConfig {
                family: family.parse()?,
                sizes: parse_sizes(&sizes)?,
                algorithms,
                abstol,
                maxiters,
                timeout,
                precond: precond(pc)?,
                seed: seed_from_env(seed)?,
                jobs,
            };
            emit(SCALING_HEADER, &cmd_scaling(&config)?, out)?;
            Ok(true)
        }
        Cmd::List { what } => {
            let mut out = io::stdout().lock();
            match what {
                ListWhat::Problems => {
                    for d in nlkit::list_problems() {
                        writeln!(out, "{}\t{}", d.id, d.n)?;
                    }
                }
                ListWhat::Algorithms => {
                    for a in ALGORITHM_NAMES {
                        writeln!(out, "{a}")?;
                    }
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(BenchError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
