use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mediocre::{AlphaRatio, Ratio};
use mediocre_cli::args::{parse_alpha, parse_list, parse_ratio, parse_usize_list};
use mediocre_cli::gen::{generate, GenMode, GenParams};
use mediocre_cli::instance::Instance;
use mediocre_cli::run::{run, Protocol, RunParams, Verdict, RUN_HEADER};
use mediocre_cli::sweep::{any_failed, to_csv, SweepConfig};

#[derive(Parser)]
#[command(name = "mediocre", version, about = "Communication protocols for medians and mediocre elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Gen {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = GenMode::Multiset)]
        mode: GenMode,
        /// Density for disjoint-dense instances (t ≥ c·n).
        #[arg(long, value_parser = parse_ratio, default_value = "1/2")]
        c: Ratio,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one protocol on one instance and print a CSV row.
    Run {
        #[arg(long, value_enum)]
        protocol: Protocol,
        /// Instance file; without it a random instance is generated.
        #[arg(long, conflicts_with_all = ["n", "k", "mode", "seed"])]
        instance: Option<PathBuf>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<GenMode>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the transcript (and any pruning posets) here.
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run a grid of protocols, sizes and player counts in parallel.
    Sweep {
        /// Comma separated protocol names.
        #[arg(long, value_enum, value_delimiter = ',', required = true)]
        protocol: Vec<Protocol>,
        /// Universe sizes, e.g. `2^6..2^12` or `100,200`.
        #[arg(long, value_parser = parse_list)]
        n: std::vec::Vec<u64>,
        /// Player counts for k-party protocols, e.g. `3..8`.
        #[arg(long, value_parser = parse_usize_list, default_value = "3")]
        k: std::vec::Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        mode: Option<GenMode>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, value_parser = parse_alpha, default_value = "1/4")]
    alpha: AlphaRatio,
    #[arg(long, value_parser = parse_ratio, default_value = "1/2")]
    c: Ratio,
    /// Abort a k-party run if a pruning round breaks the size lemma.
    #[arg(long)]
    assert_lemma1: bool,
    /// Skip the oracle check; verdicts become SKIPPED.
    #[arg(long)]
    no_verify: bool,
}

impl ParamArgs {
    fn params(&self) -> RunParams {
        RunParams { alpha: self.alpha, c: self.c, assert_lemma1: self.assert_lemma1, verify: !self.no_verify }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn main() -> ExitCode {
    match try_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns false if any verdict is FAIL.
fn try_main() -> Result<bool> {
    match Cli::parse().command {
        Command::Gen { n, k, mode, c, seed, out } => {
            let instance = generate(seed, &GenParams::new(n, k, mode).with_c(c))?;
            emit(out.as_ref(), &instance.to_string())?;
            Ok(true)
        }
        Command::Run { protocol, instance, n, k, mode, seed, transcript, out, params } => {
            let params = params.params();
            let instance = match instance {
                Some(path) => fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?
                    .parse::<Instance>()
                    .with_context(|| format!("parsing {}", path.display()))?,
                None => {
                    let Some(n) = n else { bail!("either --instance or --n is required") };
                    let k = k.unwrap_or(if protocol.is_two_party() { 2 } else { 3 });
                    let mode = mode.unwrap_or(if protocol.is_approximate() {
                        GenMode::DisjointDense
                    } else {
                        GenMode::Multiset
                    });
                    generate(seed.unwrap_or(0), &GenParams::new(n, k, mode).with_c(params.c))?
                }
            };
            let record = run(protocol, &instance, &params)?;
            if let Some(path) = &transcript {
                fs::write(path, record.transcript_text()).with_context(|| format!("writing {}", path.display()))?;
            }
            emit(out.as_ref(), &format!("{RUN_HEADER}\n{}\n", record.run_row()))?;
            Ok(record.verdict != Verdict::Fail)
        }
        Command::Sweep { protocol, n, k, trials, seed, mode, out, params } => {
            let config = SweepConfig { protocols: protocol, ns: n, ks: k, trials, seed, mode, params: params.params() };
            let records = config.run()?;
            emit(out.as_ref(), &to_csv(&records))?;
            Ok(!any_failed(&records))
        }
    }
}
