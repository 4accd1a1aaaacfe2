use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use alpert::exact::parse_rational;
use alpert::export::{coeff_matrices_csv, vector_to_csv, wavelet_matrices_csv, MAX_DIGITS, MIN_DIGITS};
use alpert::legendre::eval_scaling_vector;
use alpert::transform::{project_samples, threshold_compress};
use alpert::waveletsolve::eval_wavelet_vector;
use alpert::{
    analyze, build_coeff_matrices, build_wavelet_matrices, run_verification, FilterBank64, FormulaPath, Rational,
    SignalTree64, SurdValue, VerifyScope,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const THREADS_ENV: &str = "ALPERT_THREADS";

#[derive(Parser)]
#[command(name = "alpert", version, about = "Exact Alpert multiwavelet matrices and transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputKind {
    /// Values at the Gauss-Legendre nodes of every finest block.
    Samples,
    /// Finest-level scaling coefficients, block-major.
    Coeffs,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Decimal places for CSV output.
    #[arg(long, default_value_t = 17, value_parser = clap::value_parser!(u64).range(MIN_DIGITS as u64..=MAX_DIGITS as u64))]
    digits: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Refinement matrices of order n.
    Gen {
        n: usize,
        /// Formula used for the entries.
        #[arg(long, default_value = "2f1-half", value_parser = parse_path)]
        path: FormulaPath,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Wavelet matrices of order n.
    Wavelets {
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the identity checks for every order up to n; exits 1 on failure.
    Verify {
        n: usize,
        #[arg(long, value_delimiter = ',', value_parser = parse_scope)]
        scope: Vec<VerifyScope>,
    },
    /// Scaling and wavelet vectors at a point x of [0, 1].
    Eval {
        n: usize,
        /// Rational or decimal, e.g. 1/3 or 0.25.
        #[arg(allow_hyphen_values = true, value_parser = parse_point)]
        x: Rational,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Multiwavelet decomposition of data read from a CSV file.
    Transform {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_parser = parse_threshold)]
        threshold: Option<f64>,
        #[arg(long, value_enum, default_value = "samples")]
        input_kind: InputKind,
    },
}

fn parse_path(s: &str) -> Result<FormulaPath, String> {
    s.parse::<FormulaPath>().map_err(|e| e.to_string())
}

fn parse_scope(s: &str) -> Result<VerifyScope, String> {
    s.parse()
}

fn parse_point(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("threshold must be a finite number >= 0, got `{s}`")),
    }
}

/// Errors after argument parsing; all map to the usage exit code.
struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

#[derive(Serialize)]
struct EvalPayload<'a> {
    n: usize,
    x: String,
    phi: &'a [SurdValue],
    psi: &'a [SurdValue],
}

#[derive(Serialize)]
struct TransformSummary {
    order: usize,
    levels: usize,
    coefficients: usize,
    kept_details: usize,
    max_detail: f64,
    output: String,
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn read_values(path: &PathBuf) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| CliError(format!("{}:{}: not a number: `{}`", path.display(), k + 1, l.trim())))
        })
        .collect()
}

/// Returns stdout text and whether the command succeeded.
fn run(command: Command) -> Result<(String, bool), CliError> {
    Ok(match command {
        Command::Gen { n, path, output } => {
            let c = build_coeff_matrices(n, path)?;
            let text = match output.format {
                Format::Json => json(&c)?,
                Format::Csv => coeff_matrices_csv(&c, output.digits as usize),
            };
            (text, true)
        }
        Command::Wavelets { n, output } => {
            let c = build_coeff_matrices(n, FormulaPath::default())?;
            let d = build_wavelet_matrices(&c)?;
            let text = match output.format {
                Format::Json => json(&d)?,
                Format::Csv => wavelet_matrices_csv(&d, output.digits as usize),
            };
            (text, true)
        }
        Command::Verify { n, scope } => {
            let scopes = if scope.is_empty() { VerifyScope::ALL.to_vec() } else { scope };
            let report = run_verification(n, &scopes);
            (json(&report)?, report.passed)
        }
        Command::Eval { n, x, output } => {
            let c = build_coeff_matrices(n, FormulaPath::default())?;
            let d = build_wavelet_matrices(&c)?;
            let phi = eval_scaling_vector(n, &x);
            let t = &x * Rational::from_integer(2.into()) - Rational::from_integer(1.into());
            let psi = eval_wavelet_vector(&d, &t);
            let text = match output.format {
                Format::Json => json(&EvalPayload { n, x: x.to_string(), phi: &phi, psi: &psi })?,
                Format::Csv => {
                    let digits = output.digits as usize;
                    format!(
                        "function,index,value\n{}{}",
                        vector_to_csv("phi", &phi, digits),
                        vector_to_csv("psi", &psi, digits)
                    )
                }
            };
            (text, true)
        }
        Command::Transform { order, levels, input, output, threshold, input_kind } => {
            let values = read_values(&input)?;
            let tree = match input_kind {
                InputKind::Samples => {
                    SignalTree64::from_finest(order, levels, project_samples(&values, order, levels)?)?
                }
                InputKind::Coeffs => SignalTree64::from_flat(order, levels, &values)?,
            };
            let bank = FilterBank64::build(order);
            let analyzed = analyze(&tree, &bank)?;
            let (analyzed, kept) = match threshold {
                Some(eps) => threshold_compress(&analyzed, eps),
                None => {
                    let kept = analyzed.d_blocks.iter().flatten().flatten().filter(|v| **v != 0.0).count();
                    (analyzed, kept)
                }
            };
            fs::write(&output, json(&analyzed)?).map_err(|e| CliError(format!("{}: {e}", output.display())))?;
            let summary = TransformSummary {
                order,
                levels,
                coefficients: values.len(),
                kept_details: kept,
                max_detail: analyzed.max_detail(),
                output: output.display().to_string(),
            };
            (json(&summary)?, true)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = configure_threads().and_then(|()| run(cli.command));
    match outcome {
        Ok((text, passed)) => {
            print!("{text}");
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY_FAILED)
            }
        }
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
