//! `paley-sos` command-line harness: invariant suites, sweeps, fits, plots
//! and classical bounds.
//!
//! Exit codes: 0 success, 1 a hard check or computation failed, 2 usage error.

use clap::{Args, Parser, Subcommand};
use paley_sos::harness::{self, Quantity, Suite, SweepOptions};
use paley_sos::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "paley-sos", version, about = "Clique-number relaxations of Paley graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Prime selection shared by every subcommand.
#[derive(Args, Clone)]
struct PrimeArgs {
    /// A single prime p ≡ 1 (mod 4).
    #[arg(long, conflicts_with_all = ["primes", "p_min", "p_max"])]
    p: Option<u64>,
    /// Lower end of the prime range.
    #[arg(long, default_value_t = 5)]
    p_min: u64,
    /// Upper end of the prime range.
    #[arg(long, default_value_t = 61)]
    p_max: u64,
    /// Explicit comma-separated primes.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["p_min", "p_max"])]
    primes: Option<Vec<u64>>,
}

impl PrimeArgs {
    fn resolve(&self) -> Result<Vec<u64>> {
        harness::resolve_primes(self.primes.as_deref(), self.p, self.p_min, self.p_max)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an invariant suite and print one PASS/FAIL/INFO line per check.
    Verify {
        /// field|charsums|graph|graphmx|blockcirc|fk|sdp|all
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        #[command(flatten)]
        primes: PrimeArgs,
    },
    /// Compute a quantity over a prime range and write CSV rows.
    Sweep {
        /// omega|sos2|sos4|fk4|t441norm|diamondnorm|restricted:<shape>:<i>:<j>
        #[arg(long, value_parser = parse_quantity)]
        quantity: Quantity,
        #[command(flatten)]
        primes: PrimeArgs,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Runtime cap per prime.
        #[arg(long, default_value_t = harness::DEFAULT_TIMEOUT_SECONDS)]
        timeout_seconds: u64,
        /// Write the SDP solver trace to this CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Fit value ≈ a·p^b to each quantity of one or more sweep CSVs.
    Fit {
        /// Sweep CSV files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Render sweep CSVs as a log-log SVG.
    Plot {
        /// Sweep CSV files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output SVG.
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate ω, √p, the Hansen–Podolskii bound, SOS₂ and FK₄ (and SOS₄).
    Bounds {
        #[command(flatten)]
        primes: PrimeArgs,
        /// Also solve the degree-4 SOS relaxation (slow beyond p = 41).
        #[arg(long)]
        sos4: bool,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_quantity(s: &str) -> std::result::Result<Quantity, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn print_csv(records: &[harness::SweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs a subcommand; `Ok(code)` carries the non-usage exit code.
fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Verify { suite, primes } => {
            let primes = primes.resolve()?;
            let report = harness::run_verify(suite, &primes);
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for c in &report.checks {
                println!("{c}");
            }
            let failed = report.hard_failures().len();
            let hard = report.checks.iter().filter(|c| c.hard).count();
            println!("{} hard checks, {failed} failed", hard);
            Ok(report.exit_code() as u8)
        }
        Command::Sweep { quantity, primes, out, jobs, timeout_seconds, trace } => {
            let primes = primes.resolve()?;
            if primes.is_empty() {
                eprintln!("warning: empty prime range: no primes congruent to 1 mod 4");
            }
            let opts = SweepOptions { jobs, timeout: Duration::from_secs(timeout_seconds) };
            let output = harness::run_sweep(quantity, &primes, opts)?;
            match out {
                Some(path) => harness::write_records(&path, &output.records)?,
                None => print_csv(&output.records)?,
            }
            if let Some(path) = trace {
                harness::write_trace(&path, &output.traces)?;
            }
            let bad = output.records.iter().filter(|r| r.status == harness::Status::Failed).count();
            Ok(if bad > 0 { 1 } else { 0 })
        }
        Command::Fit { inputs } => {
            let mut records = Vec::new();
            for p in &inputs {
                records.extend(harness::read_records(p)?);
            }
            let groups = harness::group_by_quantity(&records);
            if groups.is_empty() {
                return Err(Error::InvalidParameter("no ok rows to fit".into()));
            }
            println!("quantity,a,b,r_squared,n_points");
            let mut code = 0;
            for (q, rows) in groups {
                match harness::fit_power_law(&rows) {
                    Ok(f) => println!("{q},{},{},{},{}", f.a, f.b, f.r_squared, f.n_points),
                    Err(e) => {
                        eprintln!("{q}: {e}");
                        code = 1;
                    }
                }
            }
            Ok(code)
        }
        Command::Plot { inputs, out } => {
            let paths: Vec<&std::path::Path> = inputs.iter().map(|p| p.as_path()).collect();
            harness::emit_plot(&paths, &out)?;
            Ok(0)
        }
        Command::Bounds { primes, out, sos4 } => {
            let records = harness::bounds_records(&primes.resolve()?, sos4)?;
            match out {
                Some(path) => harness::write_records(&path, &records)?,
                None => print_csv(&records)?,
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let usage = matches!(
                e,
                Error::NotPrime(_) | Error::NotOneModFour(_) | Error::InvalidParameter(_) | Error::UnknownShape(_)
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
