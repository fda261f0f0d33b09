use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use halftwist::field::{format_rational, parse_rational};
use halftwist::hodge::HodgeError;
use halftwist::ks::{full_report, KsError, Level};
use halftwist::quat::{splitting_witness, QuatAlg};
use halftwist::selftest::{self, DEFAULT_SEED};
use halftwist::{ext_power_k, half_twist, tate_twist, tensor_k_halfmodule, validate, HodgeTable, QuadFormDiag};

/// Exact computations with half twists of CM-type Hodge structures.
#[derive(Debug, Parser)]
#[command(name = "halftwist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Verification level for `ks`.
    #[arg(long, value_enum, default_value = "fast", global = true)]
    level: LevelArg,
    /// Search bound for norm-equation witnesses.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    bound: u64,
    /// Seed for randomized runs.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Allow the exact level at m = 6 (slow).
    #[arg(long, global = true)]
    allow_m6: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Exact,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the weight, symmetry and multiplicity invariants of a table.
    Validate { table: PathBuf },
    /// Half twist `V_{n/2}`.
    Twist {
        table: PathBuf,
        #[arg(allow_negative_numbers = true)]
        n: i64,
    },
    /// Tate twist `V(n)`.
    Tate {
        table: PathBuf,
        #[arg(allow_negative_numbers = true)]
        n: i64,
    },
    /// Exterior power over the CM field.
    Ext { table: PathBuf, i: usize },
    /// Diagonal and conjugate halves of `V ⊗ K_{-1/2}`.
    TensorK { table: PathBuf },
    /// Kuga-Satake report for a form and a weight-2 table.
    Ks { form: PathBuf, table: PathBuf },
    /// Hilbert symbols and split verdict for `(a, b)`.
    Quat {
        #[arg(allow_negative_numbers = true)]
        a: String,
        #[arg(allow_negative_numbers = true)]
        b: String,
    },
    /// Seeded consistency battery.
    Selftest,
}

/// Error carrying the process exit code: 1 for mathematical failures, 2 for bad input.
struct Failure {
    code: u8,
    message: String,
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn math(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn hodge_failure(e: HodgeError) -> Failure {
    match e {
        HodgeError::Parse(_) | HodgeError::Field(_) => input(e.to_string()),
        _ => math(e.to_string()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn read_table(path: &Path) -> Result<HodgeTable, Failure> {
    HodgeTable::from_json(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Validate { table } => {
            let t = read_table(table)?;
            let report = validate(&t);
            emit(cli, &report.to_string())?;
            if report.is_valid() {
                Ok(())
            } else {
                Err(math("table violates its invariants"))
            }
        }
        Command::Twist { table, n } => {
            let t = half_twist(&read_table(table)?, *n).map_err(hodge_failure)?;
            emit(cli, &t.to_json())
        }
        Command::Tate { table, n } => emit(cli, &tate_twist(&read_table(table)?, *n).to_json()),
        Command::Ext { table, i } => {
            let t = ext_power_k(&read_table(table)?, *i).map_err(hodge_failure)?;
            emit(cli, &t.to_json())
        }
        Command::TensorK { table } => {
            let halves = tensor_k_halfmodule(&read_table(table)?);
            let v = serde_json::json!({ "diag": halves.diag.to_json_value(), "conj": halves.conj.to_json_value() });
            emit(cli, &(serde_json::to_string_pretty(&v).expect("serializable") + "\n"))
        }
        Command::Ks { form, table } => {
            let f = QuadFormDiag::from_json(&read(form)?).map_err(|e| input(format!("{}: {e}", form.display())))?;
            let t = read_table(table)?;
            let level = match cli.level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Exact => Level::Exact,
            };
            let report = full_report(&f, &t, level, cli.bound, cli.allow_m6).map_err(|e: KsError| Failure {
                code: e.exit_code() as u8,
                message: e.to_string(),
            })?;
            emit(cli, &format!("{report}\n--- machine-readable ---\n{}\n", report.to_json()))
        }
        Command::Quat { a, b } => {
            let a = parse_rational(a).map_err(|e| input(e.to_string()))?;
            let b = parse_rational(b).map_err(|e| input(e.to_string()))?;
            let alg = QuatAlg::new(a, b).map_err(|e| input(e.to_string()))?;
            let symbols = alg.symbols(&alg.relevant_places().map_err(|e| input(e.to_string()))?).map_err(|e| input(e.to_string()))?;
            let split = symbols.iter().all(|&(_, s)| s == 1);
            let mut text = format!("algebra ({}, {})\n", format_rational(alg.a()), format_rational(alg.b()));
            for (place, s) in &symbols {
                text += &format!("  ({}, {})_{place} = {s:+}\n", format_rational(alg.a()), format_rational(alg.b()));
            }
            text += &format!("verdict: {}\n", if split { "split" } else { "non-split" });
            if split {
                match splitting_witness(&alg, cli.bound) {
                    Some((x, y)) => {
                        text += &format!("witness: b = x^2 - a*y^2 with (x, y) = ({}, {})\n", format_rational(&x), format_rational(&y))
                    }
                    None => text += &format!("no witness within bound {}; symbols certify\n", cli.bound),
                }
            }
            emit(cli, &text)
        }
        Command::Selftest => {
            let lines = selftest::run(cli.seed);
            let mut text = format!("seed {}\n", cli.seed);
            for l in &lines {
                text += &format!("{} {}", if l.passed { "PASS" } else { "FAIL" }, l.name);
                if !l.detail.is_empty() {
                    text += &format!(": {}", l.detail);
                }
                text.push('\n');
            }
            emit(cli, &text)?;
            if lines.iter().all(|l| l.passed) {
                Ok(())
            } else {
                Err(math("self-test failed"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
