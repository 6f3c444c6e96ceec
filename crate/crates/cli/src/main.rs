//! Batch front door: parse a job configuration, dispatch to the toolkit,
//! emit machine-readable reports.

mod commands;
mod config;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "nestpf",
    about = "Picard-Fuchs systems for iterated integrals over nests of ovals, \
             and Melnikov functions of polynomial perturbations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the commands listed in a job configuration file.
    Run {
        /// Path to the TOML job configuration.
        config: PathBuf,
        /// Directory for the JSON report and CSV side-outputs
        /// (default: print the report to stdout).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print a documented example configuration.
    ExampleConfig,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out_dir } => match run(&config, out_dir.as_deref()) {
            Ok(errored) => {
                if errored {
                    2
                } else {
                    0
                }
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                1
            }
        },
        Command::ExampleConfig => {
            print!("{}{}", config::EXAMPLE_CONFIG, config::EXAMPLE_TAIL);
            0
        }
    };
    std::process::exit(code);
}

fn run(config_path: &std::path::Path, out_dir: Option<&std::path::Path>) -> Result<bool> {
    let text = std::fs::read_to_string(config_path)
        .with_context(|| format!("cannot read config {}", config_path.display()))?;
    let cfg = config::JobConfig::parse(&text)?;
    let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
    let out = commands::run(cfg, &hash);
    let report = serde_json::to_string_pretty(&out.report)?;
    match out_dir {
        None => println!("{report}"),
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("cannot create {}", dir.display()))?;
            std::fs::write(dir.join("report.json"), &report)?;
            for (name, contents) in &out.csv_files {
                std::fs::write(dir.join(name), contents)?;
            }
            eprintln!("report written to {}", dir.join("report.json").display());
        }
    }
    Ok(out.errored)
}
