use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use footseq::filters_const::ConstFilterId;
use footseq::pipeline::{
    enumerate, render_report, verify_up_to, OracleMode, Pipeline, PipelineConfig, ReportFormat,
};
use footseq::theory::{filter_efficiency, format_decimal, regular_growth_ratio, FilterSelector, Horizon};
use footseq::Verdict;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "footseq", version, about = "Decide and enumerate football score sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide one sequence and print the verdict as JSON.
    Decide {
        #[arg(required = true, allow_negative_numbers = true)]
        scores: Vec<i64>,
    },
    /// Print the number of football sequences for N teams.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "backtrack")]
        oracle: OracleMode,
        #[arg(long, default_value_t = 64)]
        partitions: usize,
        #[arg(long)]
        store_dir: Option<PathBuf>,
    },
    /// Enumerate N teams and write the per-stage report.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
        /// Also write the accepted sequences next to the report.
        #[arg(long)]
        emit_store: bool,
    },
    /// Per-stage counts for 1..=N teams with reference comparisons.
    Tables {
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
    },
    /// Exact rejection shares of the constant tests, or the growth ratio.
    Ratios {
        /// C1..C9, ALL or GROWTH.
        #[arg(long)]
        filter: String,
        #[arg(long, conflicts_with = "limit")]
        n: Option<u64>,
        #[arg(long)]
        limit: bool,
    },
    /// Cross-check every stage against exhaustive backtracking.
    Verify {
        #[arg(long)]
        max_n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Decide { scores } => decide(&scores),
        Command::Count {
            n,
            oracle,
            partitions,
            store_dir,
        } => {
            let mut cfg = PipelineConfig::new(n);
            cfg.oracle = oracle;
            cfg.partitions = partitions;
            cfg.store_dir = store_dir;
            let e = enumerate(&cfg)?;
            println!("{}", e.stats.football_count);
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate {
            n,
            report,
            format,
            emit_store,
        } => {
            let mut cfg = PipelineConfig::new(n);
            cfg.format = format;
            cfg.emit_store = emit_store;
            cfg.store_dir = emit_store.then(|| parent_dir(&report));
            let e = enumerate(&cfg)?;
            write_report(&report, &render_report(std::slice::from_ref(&e.stats), format)?)?;
            println!("{}", e.stats.football_count);
            Ok(ExitCode::SUCCESS)
        }
        Command::Tables {
            max_n,
            report,
            format,
        } => {
            let mut stats = Vec::with_capacity(max_n);
            for n in 1..=max_n {
                let start = Instant::now();
                let mut p = Pipeline::new(PipelineConfig::new(n))?;
                let e = p.enumerate()?;
                eprintln!("n={n}: {} in {:.2?}", e.stats.football_count, start.elapsed());
                stats.push(e.stats);
            }
            write_report(&report, &render_report(&stats, format)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Ratios { filter, n, limit } => {
            let horizon = match (n, limit) {
                (Some(n), false) => Horizon::Finite(n),
                (None, true) => Horizon::Limit,
                _ => bail!("give exactly one of --n and --limit"),
            };
            let r = if filter.eq_ignore_ascii_case("GROWTH") {
                regular_growth_ratio(horizon)?
            } else if filter.eq_ignore_ascii_case("ALL") {
                filter_efficiency(FilterSelector::All, horizon)?
            } else {
                let id: ConstFilterId = filter.parse()?;
                filter_efficiency(FilterSelector::One(id), horizon)?
            };
            println!("{r}");
            println!("{}", format_decimal(&r, 6));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { max_n } => {
            let report = verify_up_to(max_n)?;
            for v in &report.violations {
                println!("violation: {v}");
            }
            for s in &report.scan_disagreements {
                println!("scan disagreement: {s:?}");
            }
            println!(
                "checked {} sequences, {} violations, {} scan disagreements",
                report.checked,
                report.violations.len(),
                report.scan_disagreements.len()
            );
            Ok(if report.is_clean() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn decide(scores: &[i64]) -> Result<ExitCode> {
    let mut p = Pipeline::new(PipelineConfig::new(scores.len()))?;
    let verdict = p.decide(scores)?;
    let (name, certificate) = match &verdict {
        Verdict::Good(_, m) => ("good", json!(m.to_rows())),
        Verdict::Bad(_) => ("bad", serde_json::Value::Null),
        Verdict::Undecided => bail!("the pipeline left the sequence undecided"),
    };
    let stage = verdict.stage().map(|s| s.to_string());
    println!(
        "{}",
        json!({ "verdict": name, "stage": stage, "certificate": certificate })
    );
    Ok(if verdict.is_good() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn write_report(path: &Path, body: &str) -> Result<()> {
    fs::create_dir_all(parent_dir(path))?;
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}
