use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use curvezeta::equitree::parse_tree_json;
use curvezeta::fuzz::{self, FuzzConfig};
use curvezeta::report::{report_poly, report_tree, Report};
use curvezeta::Error;

/// Topological zeta functions and monodromy of plane curve singularities.
#[derive(Parser)]
#[command(name = "curvezeta", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report for an equisingularity tree given as a JSON file.
    Tree {
        path: PathBuf,
        #[arg(long)]
        json: bool,
        /// Recompute everything from the resolution graph and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Report for a Newton-nondegenerate polynomial, e.g. "y^2 - x^3".
    Poly {
        expr: String,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        oracle: bool,
    },
    /// Differential checks on seeded random trees.
    Fuzz {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        max_depth: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        max_k: u64,
        #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u32).range(3..))]
        max_ab: u32,
        /// Where failing trees are written.
        #[arg(long, default_value = "fuzz-failures")]
        dump_dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_CONSISTENCY: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Degenerate { .. } => EXIT_DEGENERATE,
        Error::Consistency(_) | Error::NotPolynomial { .. } | Error::DivisionByZero | Error::NotRepresentable(_) => {
            EXIT_CONSISTENCY
        }
        _ => EXIT_INVALID,
    }
}

fn emit(report: Report, json: bool) -> ExitCode {
    if json {
        println!("{}", report.to_json_string());
    } else {
        print!("{}", report.to_text());
    }
    if report.oracle_failed() {
        ExitCode::from(EXIT_CONSISTENCY)
    } else {
        ExitCode::SUCCESS
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Tree { path, json, oracle } => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => return fail(Error::Input(format!("{}: {e}", path.display()))),
            };
            match parse_tree_json(&text).and_then(|t| report_tree(&t, oracle)) {
                Ok(r) => emit(r, json),
                Err(e) => fail(e),
            }
        }
        Command::Poly { expr, json, oracle } => match report_poly(&expr, oracle) {
            Ok(r) => emit(r, json),
            Err(e) => fail(e),
        },
        Command::Fuzz { count, seed, max_depth, max_k, max_ab, dump_dir, json } => {
            let cfg = FuzzConfig {
                count: count as usize,
                seed,
                max_depth: max_depth as usize,
                max_k: max_k as usize,
                max_ab,
                ..FuzzConfig::default()
            };
            match fuzz::run(&cfg, Some(&dump_dir)) {
                Ok(summary) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
                    } else {
                        print!("{}", summary.to_text());
                    }
                    if summary.all_passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_CONSISTENCY)
                    }
                }
                Err(e) => fail(e),
            }
        }
    }
}
