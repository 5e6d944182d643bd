//! `vsqe`: decide closed real-arithmetic formulas by virtual substitution.
//!
//! Exit codes: 0 decided (sat/unsat), 1 unknown, 2 error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;

use vsqe::engine::Algorithm;
use vsqe::frontend::bench::{run_dir, run_one, BenchOptions, NegationCheck};
use vsqe::frontend::native::print_native;
use vsqe::frontend::{format_for_path, parse_problem, Answer, SourceFormat};

#[derive(Parser)]
#[command(
    name = "vsqe",
    about = "Quantifier elimination for real arithmetic by virtual substitution",
    version
)]
struct Cli {
    /// Problem file (.smt2 or native .vs); omit when using --bench
    file: Option<PathBuf>,

    /// Elimination algorithm
    #[arg(long, default_value = "leg", value_parser = parse_algorithm)]
    algorithm: Algorithm,

    /// Input format; default chosen by file extension
    #[arg(long, value_parser = parse_format)]
    format: Option<SourceFormat>,

    /// Per-problem timeout in seconds (env VSQE_TIMEOUT overrides the default)
    #[arg(long)]
    timeout: Option<u64>,

    /// Print the residual formula when the answer is unknown
    #[arg(long)]
    print_residual: bool,

    /// Batch mode: run every problem in the directory
    #[arg(long, value_name = "DIR")]
    bench: Option<PathBuf>,

    /// Emit batch records as JSON instead of CSV
    #[arg(long)]
    json: bool,

    /// Also run the formula's negation and flag contradictions
    #[arg(long)]
    check_negation: bool,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<SourceFormat, String> {
    match s {
        "smtlib" => Ok(SourceFormat::Smtlib),
        "native" => Ok(SourceFormat::Native),
        other => Err(format!("unknown format `{other}` (expected smtlib or native)")),
    }
}

fn default_timeout() -> u64 {
    std::env::var("VSQE_TIMEOUT")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(30)
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let timeout = Duration::from_secs(cli.timeout.unwrap_or_else(default_timeout));
    let opts = BenchOptions {
        algorithm: cli.algorithm,
        timeout,
        check_negation: cli.check_negation,
    };

    if let Some(dir) = &cli.bench {
        let outcome = match run_dir(dir, &opts) {
            Ok(o) => o,
            Err(e) => return fail(e),
        };
        if cli.json {
            println!("{}", outcome.json());
        } else {
            print!("{}", outcome.csv());
        }
        eprintln!("{}", outcome.summary());
        return if outcome.contradictions().is_empty() && outcome.expected_mismatches().is_empty()
        {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(2)
        };
    }

    let Some(file) = &cli.file else {
        return fail("no input file (pass a problem file or --bench <dir>)");
    };
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", file.display())),
    };
    let format = cli.format.unwrap_or_else(|| format_for_path(file));
    let name = file
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("problem")
        .to_string();
    let problem = match parse_problem(&name, &text, format) {
        Ok(p) => p,
        Err(e) => return fail(format!("{}:{e}", file.display())),
    };

    let result = run_one(&problem, &opts);
    println!("{}", result.record.answer);
    if let Some(neg) = result.negation_answer {
        println!("negation: {neg}");
        match result.negation_check {
            Some(NegationCheck::Consistent) => println!("negation-check: consistent"),
            Some(NegationCheck::Contradictory) => println!("negation-check: CONTRADICTION"),
            Some(NegationCheck::Undecided) | None => println!("negation-check: undecided"),
        }
    }
    if result.record.answer == Answer::Unknown && cli.print_residual {
        // re-run to recover the residual formula for display
        let (_, report) = vsqe::frontend::bench::run_problem(&problem, cli.algorithm, timeout);
        println!("residual: {}", print_native(&report.result));
    }
    match result.record.answer {
        Answer::Unknown => ExitCode::from(1),
        _ => {
            if result.negation_check == Some(NegationCheck::Contradictory) {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
