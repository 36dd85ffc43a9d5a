//! `bslab` — scenario runner for Baumslag–Solitar circle actions.
//!
//! Subcommands: `run <config>` executes a TOML scenario and emits reports,
//! `validate <config>` checks it without running, and `demo <name>` runs a
//! built-in scenario. Exit status: 0 when every experiment succeeded
//! (negative verdicts are data, not errors), 1 when an experiment errored,
//! 2 on config or I/O problems.

mod config;
mod emit;
mod runner;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

const DEMOS: &[(&str, &str)] = &[
    ("standard-n2", include_str!("../scenarios/standard-n2.toml")),
    (
        "pl-conjugated-n2",
        include_str!("../scenarios/pl-conjugated-n2.toml"),
    ),
    (
        "synthetic-denjoy-depth8",
        include_str!("../scenarios/synthetic-denjoy-depth8.toml"),
    ),
];

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "BSLAB_OUT";

#[derive(Parser)]
#[command(
    name = "bslab",
    version,
    about = "Scenario runner for actions of BS(1,n) on the circle"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario config and emit reports.
    Run {
        /// Path to a TOML scenario file.
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Parse and validate a scenario config without running experiments.
    Validate {
        /// Path to a TOML scenario file.
        config: PathBuf,
    },
    /// Run one of the built-in demo scenarios.
    Demo {
        /// Demo name; an unknown name lists the available demos.
        name: String,
        /// Print the demo's config instead of running it.
        #[arg(long)]
        show_config: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Output directory (default: $BSLAB_OUT, else the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format; repeat the flag to emit several (default: json).
    #[arg(long, value_enum)]
    format: Vec<EmitFormat>,
    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Omit the timestamp so identical runs produce byte-identical reports.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmitFormat {
    Json,
    Csv,
    Plotdata,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Validate { config } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = config::parse_scenario(&text)?;
            let v = config::validate(&cfg, None)?;
            println!(
                "config OK: {} (n = {}, seed = {}, {} experiment(s))",
                v.name,
                v.n,
                v.seed,
                v.experiments.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Run { config, out } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            run_text(&text, &out)
        }
        Cmd::Demo {
            name,
            show_config,
            out,
        } => {
            let Some((_, text)) = DEMOS.iter().find(|(n, _)| *n == name) else {
                let names: Vec<&str> = DEMOS.iter().map(|(n, _)| *n).collect();
                bail!("unknown demo {name:?}; available: {}", names.join(", "));
            };
            if show_config {
                print!("{text}");
                return Ok(ExitCode::SUCCESS);
            }
            run_text(text, &out)
        }
    }
}

fn run_text(text: &str, out_args: &OutputArgs) -> Result<ExitCode> {
    let cfg = config::parse_scenario(text)?;
    let scenario = config::validate(&cfg, out_args.seed)?;
    let timestamp = if out_args.no_timestamp {
        None
    } else {
        Some(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    };

    let outcome = runner::run_scenario(&scenario, timestamp);
    println!(
        "scenario {} (n = {}, seed = {}): {}",
        scenario.name,
        scenario.n,
        scenario.seed,
        scenario.maps_note
    );
    for line in &outcome.summaries {
        println!("  {line}");
    }

    let out_dir = out_args
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let formats: Vec<EmitFormat> = if out_args.format.is_empty() {
        vec![EmitFormat::Json]
    } else {
        let mut seen = Vec::new();
        for f in &out_args.format {
            if !seen.contains(f) {
                seen.push(*f);
            }
        }
        seen
    };
    for format in formats {
        match format {
            EmitFormat::Json => {
                let path = emit::write_json(&out_dir, &outcome.report)?;
                println!("wrote {}", path.display());
            }
            EmitFormat::Csv => {
                let path = emit::write_csv(&out_dir, &outcome.report)?;
                println!("wrote {}", path.display());
            }
            EmitFormat::Plotdata => {
                let paths = emit::write_plotdata(&out_dir, &outcome.report, &outcome.plots)?;
                if paths.is_empty() {
                    println!("no plottable experiments (obstruction and semiconjugacy plot)");
                }
                for path in paths {
                    println!("wrote {}", path.display());
                }
            }
        }
    }

    if outcome.report.error_count == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} experiment(s) errored", outcome.report.error_count);
        Ok(ExitCode::from(1))
    }
}
