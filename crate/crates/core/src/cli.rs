//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on errors (and on verification violations),
//! 2 when the run finished but a bound was undefined or minimization was
//! infeasible.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::{full_report, ReportSettings};
use crate::ensemble::LabelKind;
use crate::error::{Error, Result};
use crate::io;
use crate::minimizer::{minimize, MinimizeConfig};
use crate::oracle::{self, InstanceSpec, Property, VerifyOptions};
use crate::report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_DEGRADED: i32 = 2;

const SEED_ENV: &str = "VOTEBOUND_SEED";
const THREADS_ENV: &str = "VOTEBOUND_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "votebound",
    version,
    about = "C-bounds for weighted majority votes"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Binary,
    Multiclass,
    Multilabel,
}

impl From<Kind> for LabelKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Binary => LabelKind::Binary,
            Kind::Multiclass => LabelKind::Multiclass,
            Kind::Multilabel => LabelKind::Multilabel,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every applicable bound for a dataset and ensemble.
    Compute {
        dataset: PathBuf,
        ensemble: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        omega: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Recorded in the report settings.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run brute-force verification campaigns.
    Verify {
        /// Property name, or `all`.
        #[arg(long, default_value = "all")]
        property: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Inclusive class-count range such as `2..5`.
        #[arg(long, value_parser = parse_range)]
        q_range: Option<(usize, usize)>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reverse every inequality check (self-test of the harness).
        #[arg(long, hide = true)]
        inject_bug: bool,
    },
    /// Learn a posterior minimizing the omega-margin C-bound.
    Minimize {
        dataset: PathBuf,
        ensemble: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        omega: f64,
        /// Number of first-moment grid points.
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report for the learned posterior; defaults to `<out>.report.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a random dataset and matching ensemble.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, default_value_t = 5)]
        voters: usize,
        #[arg(long, default_value_t = 20)]
        examples: usize,
        #[arg(long, default_value_t = 0.7)]
        accuracy: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Writes `<prefix>.csv` and `<prefix>.ensemble.json`.
        #[arg(long)]
        out_prefix: PathBuf,
    },
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a range like 2..5, got `{s}`"))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad range start `{a}`"))?;
    let b: usize = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("bad range end `{b}`"))?;
    if a < 2 || a > b {
        return Err(format!("range {a}..{b} must satisfy 2 <= start <= end"));
    }
    Ok((a, b))
}

fn default_seed(explicit: Option<u64>) -> Result<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        // Fails only if a pool already exists, e.g. when run from tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => io::write_atomic(p, contents.as_bytes()),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run_command(command: Command) -> Result<i32> {
    match command {
        Command::Compute {
            dataset,
            ensemble,
            omega,
            out,
            format,
            seed,
        } => {
            let (ds, ens) = io::load_pair(&dataset, &ensemble)?;
            let r = full_report(&ds, &ens, ReportSettings { omega, seed })?;
            let value = report::report_json(&r);
            let text = match format {
                Format::Json => report::to_pretty(&value),
                Format::Csv => report::to_key_value_csv(&value),
            };
            emit(out.as_deref(), &text)?;
            if r.is_degraded() {
                for (k, b) in &r.bounds {
                    if let crate::bounds::BoundValue::Undefined(reason) = b {
                        eprintln!("warning: {k} undefined: {reason}");
                    }
                }
                Ok(EXIT_DEGRADED)
            } else {
                Ok(EXIT_OK)
            }
        }
        Command::Verify {
            property,
            trials,
            seed,
            q_range,
            out,
            inject_bug,
        } => {
            let seed = default_seed(seed)?;
            let properties: Vec<Property> = if property == "all" {
                Property::ALL.to_vec()
            } else {
                vec![property.parse()?]
            };
            let opts = VerifyOptions { inject_bug };
            let mut results = Vec::new();
            for p in properties {
                let specs = oracle::campaign(p, trials, seed, q_range)?;
                let r = oracle::verify(p, &specs, opts)?;
                eprintln!(
                    "{:<28} trials={:<6} evaluated={:<6} violations={:<4} {}",
                    r.property,
                    r.trials,
                    r.evaluated,
                    r.violations.len(),
                    if r.passed { "PASS" } else { "FAIL" }
                );
                results.push(r);
            }
            emit(
                out.as_deref(),
                &report::to_pretty(&report::verification_json(seed, &results)),
            )?;
            Ok(if results.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_ERROR
            })
        }
        Command::Minimize {
            dataset,
            ensemble,
            omega,
            grid,
            tol,
            max_iters,
            seed,
            out,
            report: report_path,
        } => {
            let (ds, ens) = io::load_pair(&dataset, &ensemble)?;
            if ds.label_space().kind() != LabelKind::Multiclass {
                return Err(Error::config("minimize needs a multiclass dataset"));
            }
            let config = MinimizeConfig {
                omega,
                mu_grid: None,
                grid_points: grid,
                max_iterations: max_iters,
                tolerance: tol,
                seed: default_seed(seed)?,
            };
            let result = match minimize(&ds, &ens.voters, &config) {
                Ok(r) => r,
                Err(Error::BoundUndefined { bound, reason }) => {
                    eprintln!("infeasible: {bound} cannot be minimized: {reason}");
                    return Ok(EXIT_DEGRADED);
                }
                Err(e) => return Err(e),
            };
            let learned = ens.with_posterior(result.posterior.clone())?;
            let r = full_report(
                &ds,
                &learned,
                ReportSettings {
                    omega,
                    seed: Some(config.seed),
                },
            )?;
            emit(
                out.as_deref(),
                &report::to_pretty(&report::minimize_json(&result, &config)),
            )?;
            let report_path =
                report_path.or_else(|| out.as_deref().map(|p| with_suffix(p, ".report.json")));
            if let Some(p) = report_path {
                io::write_atomic(&p, report::to_pretty(&report::report_json(&r)).as_bytes())?;
            }
            if !result.converged {
                eprintln!("warning: some subproblems stopped at the iteration limit");
            }
            Ok(EXIT_OK)
        }
        Command::Gen {
            kind,
            q,
            voters,
            examples,
            accuracy,
            seed,
            out_prefix,
        } => {
            let spec = InstanceSpec {
                label_kind: kind.into(),
                q,
                voters,
                examples,
                seed: default_seed(seed)?,
                voter_accuracy: accuracy,
            };
            let (ds, ens) = oracle::generate(&spec)?;
            io::write_atomic(
                &with_suffix(&out_prefix, ".csv"),
                io::write_dataset(&ds).as_bytes(),
            )?;
            io::write_atomic(
                &with_suffix(&out_prefix, ".ensemble.json"),
                io::write_ensemble(&ens).as_bytes(),
            )?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    configure_threads();
    match run_command(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("2..5"), Ok((2, 5)));
        assert_eq!(parse_range("3..=3"), Ok((3, 3)));
        assert!(parse_range("1..4").is_err());
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("abc").is_err());
    }

    #[test]
    fn unknown_property_is_an_error() {
        assert_eq!(
            run([
                "votebound",
                "verify",
                "--property",
                "bogus",
                "--trials",
                "1"
            ]),
            EXIT_ERROR
        );
    }
}
