//! `zp-limits`: enumerate, probe and verify unconventional p-adic limit sets.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 for usage,
//! configuration or I/O errors, 3 when an enumeration exceeds its budget.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zp_limits::config::{parse_config_with, Overrides, RunConfig};
use zp_limits::export::{distance_matrix_text, export_points, write_atomic, ExportFormat};
use zp_limits::family::{compose_word, concat_words};
use zp_limits::gallery::{closed_form_fp, lambda_member, make_px_system};
use zp_limits::limit::{
    enumerate_lambda0_with, f_tilde, limit_point, EnumerateOptions, LimitSetSample,
};
use zp_limits::padic::parse_digits;
use zp_limits::verify::run_verification;
use zp_limits::{Error, Execution, SymbolWord};

#[derive(Parser, Debug)]
#[command(
    name = "zp-limits",
    version,
    about = "Unconventional limit sets over the p-adic integers"
)]
struct Cli {
    /// Run configuration (flat key = value file)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Enumeration depth, overriding enumerate.depth
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Number of p-adic digits, overriding precision
    #[arg(long, global = true)]
    precision: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest number of words an enumeration may visit
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[arg(long, global = true, default_value = "digits", value_parser = parse_format)]
    format: ExportFormat,
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the limit-set sample at the configured depth
    Enumerate,
    /// Test a digit string against the limit-set digit pattern
    Member {
        /// Little-endian digits, e.g. 0,1,2,0
        digits: String,
        /// Prime to use when no configuration is given
        #[arg(long)]
        prime: Option<u32>,
    },
    /// Fixed point of the composition of base maps along a word
    Fixedpoint {
        /// Word such as 1,2 or 1|2 (prefix|periodic tail)
        word: String,
        /// Number of symbols to compose; defaults to the word length
        #[arg(long)]
        n: Option<usize>,
    },
    /// Compare the extension operator with the limit point of the joined word
    Ftilde {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        m: usize,
    },
    /// Run the verification suites and print their reports
    Verify,
    /// Write pairwise valuations of the sample
    Distmatrix,
    /// Write the sample as digit strings or Monna-map reals
    Export,
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    s.parse()
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    usage(format!("{}: {e}", path.display()))
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| usage("this command needs --config"))?;
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let overrides = Overrides {
        precision: cli.precision,
        depth: cli.depth,
        seed: cli.seed,
        budget: cli.budget,
    };
    parse_config_with(&text, &overrides).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Writes to `--out`, else the configured path, else standard output.
fn emit(cli: &Cli, configured: Option<&PathBuf>, contents: &str) -> Result<(), Failure> {
    match cli.out.as_ref().or(configured) {
        Some(path) => write_atomic(path, contents).map_err(|e| io_failure(path, e)),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn sample(config: &RunConfig) -> Result<LimitSetSample, Failure> {
    let options = EnumerateOptions {
        budget: config.budget,
        execution: Execution::default(),
    };
    Ok(enumerate_lambda0_with(
        &config.system,
        &config.family,
        config.depth,
        &options,
    )?)
}

fn parse_word(config: &RunConfig, text: &str) -> Result<SymbolWord, Failure> {
    SymbolWord::parse(config.system.len() as u32, text)
        .map_err(|e| usage(format!("word {text:?}: {e}")))
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Enumerate => {
            let config = load_config(cli)?;
            let s = sample(&config)?;
            emit(cli, config.outputs.sample.as_ref(), &s.to_text())?;
        }
        Command::Member { digits, prime } => {
            let prime = match (prime, &cli.config) {
                (Some(p), _) => *p,
                (None, Some(_)) => load_config(cli)?.prime,
                (None, None) => return Err(usage("member needs --prime or --config")),
            };
            let x = parse_digits(prime, digits)?;
            println!("{}", lambda_member(&x));
        }
        Command::Fixedpoint { word, n } => {
            let config = load_config(cli)?;
            let w = parse_word(&config, word)?;
            let n = match (n, w.len()) {
                (Some(n), _) => *n,
                (None, Some(len)) => len,
                (None, None) => return Err(usage("periodic words need --n")),
            };
            let composed = compose_word(&config.system, &w.unfold(n)?)?;
            let exact = composed.fixed_point()?;
            let start = exact.zero_like();
            let (iterated, steps) =
                composed.iterate_fixed_point(&start, 4 * config.precision + 8)?;
            println!("word: {w}");
            println!(
                "composed: a={} b={}",
                composed.multiplier(),
                composed.offset()
            );
            println!("closed form: {exact}");
            println!("iterated: {iterated} ({steps} steps)");
            if let Ok(px) = make_px_system(config.prime, config.precision) {
                if px.system() == &config.system {
                    println!("digit formula: {}", closed_form_fp(&px, &w, n)?);
                }
            }
            let agree = exact.distance_valuation(&iterated)?;
            println!("agreement: mod {}^{}", config.prime, agree.exponent());
        }
        Command::Ftilde { alpha, n, beta, m } => {
            let config = load_config(cli)?;
            let (a, b) = (parse_word(&config, alpha)?, parse_word(&config, beta)?);
            let lhs = f_tilde(&config.system, &config.family, &a, *n, &b, *m)?;
            let joined = concat_words(&a, *n, &b)?;
            let rhs = limit_point(&config.system, &config.family, &joined, n + m)?;
            let need = (n + m).min(config.precision);
            let agree = lhs.distance_valuation(&rhs.value)?.exponent();
            println!("f_tilde: {lhs}");
            println!("limit point of {joined}: {}", rhs.value);
            println!(
                "agreement: mod {}^{agree} (required {}^{need})",
                config.prime, config.prime
            );
            let ok = agree >= need;
            println!("verdict: {}", if ok { "pass" } else { "fail" });
            return Ok(if ok { 0 } else { 1 });
        }
        Command::Verify => {
            let config = load_config(cli)?;
            let reports = run_verification(&config)?;
            let failed = reports.iter().filter(|r| r.failed()).count();
            let mut text: String = reports.iter().map(|r| format!("{r}\n")).collect();
            text.push_str(&format!(
                "summary: {} reports, {} failed\n",
                reports.len(),
                failed
            ));
            emit(cli, config.outputs.report.as_ref(), &text)?;
            return Ok(if failed == 0 { 0 } else { 1 });
        }
        Command::Distmatrix => {
            let config = load_config(cli)?;
            let text = distance_matrix_text(&sample(&config)?, Execution::default())?;
            emit(cli, config.outputs.distmatrix.as_ref(), &text)?;
        }
        Command::Export => {
            let config = load_config(cli)?;
            let text = export_points(&sample(&config)?, cli.format)?;
            let configured = match cli.format {
                ExportFormat::Digits => config.outputs.sample.as_ref(),
                ExportFormat::Monna => config.outputs.monna.as_ref(),
            };
            emit(cli, configured, &text)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
