use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hhquad::harness::{self, load_config, report, ConfigError, Corpus, HarnessError};
use hhquad::kernel::RuleOrder;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "hhquad", version, about = "Corrected midpoint quadrature checks and error bounds")]
struct Cli {
    /// Override the identity residual tolerance from the config.
    #[arg(long, global = true, value_name = "FLOAT")]
    tolerance_identity: Option<f64>,

    /// Worker threads. HHQUAD_SINGLE_THREAD=1 forces one.
    #[arg(long, global = true, value_name = "INT")]
    jobs: Option<usize>,

    /// Report format for `check`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check the identity and bounds for every entry of a corpus.
    Check {
        config: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the per-(entry, n, q) bound comparison table as CSV.
    Table {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump the remainder kernel on a 1e-3 grid as CSV.
    Kernel {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("hhquad: {message}");
    ExitCode::from(code)
}

fn harness_failure(e: HarnessError) -> ExitCode {
    match e {
        HarnessError::Numeric { .. } => fail(EXIT_NUMERIC, format!("numeric failure: {e}")),
        HarnessError::ThreadPool { .. } => fail(EXIT_USAGE, e),
    }
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(cli: &Cli, path: &Path) -> Result<Corpus, ExitCode> {
    let mut corpus = load_config(path).map_err(|e| match e {
        ConfigError::Io { .. } => fail(EXIT_USAGE, e),
        _ => fail(EXIT_USAGE, format!("{}: {e}", path.display())),
    })?;
    if let Some(t) = cli.tolerance_identity {
        if !(t.is_finite() && t > 0.0) {
            return Err(fail(EXIT_USAGE, format!("--tolerance-identity must be positive, got {t}")));
        }
        corpus.tolerances.identity = t;
    }
    Ok(corpus)
}

fn jobs(cli: &Cli) -> usize {
    let requested = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    harness::effective_jobs(requested)
}

fn run(cli: &Cli) -> Result<ExitCode, ExitCode> {
    match &cli.command {
        Command::Check { config, out } => {
            let corpus = load(cli, config)?;
            let report = harness::run_check(&corpus, jobs(cli)).map_err(harness_failure)?;
            let written = open_output(out.as_deref()).and_then(|w| match cli.format {
                Format::Csv => report::write_check_csv(&report, w),
                Format::Json => report::write_check_json(&report, w),
            });
            written.map_err(|e| fail(EXIT_USAGE, format!("cannot write report: {e}")))?;
            eprintln!(
                "hhquad: {} rows, {} identity failures, {} bound violations, {} sanity failures",
                report.rows.len(),
                report.identity_failures(),
                report.violations(),
                report.sanity_failures()
            );
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            })
        }
        Command::Table { config, out } => {
            let corpus = load(cli, config)?;
            let rows = harness::run_table(&corpus, jobs(cli)).map_err(harness_failure)?;
            open_output(Some(out))
                .and_then(|w| report::write_table_csv(&rows, w))
                .map_err(|e| fail(EXIT_USAGE, format!("cannot write table: {e}")))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Kernel { n, out } => {
            let n = RuleOrder::new(*n).map_err(|e| fail(EXIT_USAGE, e))?;
            open_output(Some(out))
                .and_then(|w| report::write_kernel_csv(n, w))
                .map_err(|e| fail(EXIT_USAGE, format!("cannot write kernel table: {e}")))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run(&cli).unwrap_or_else(|code| code)
}
