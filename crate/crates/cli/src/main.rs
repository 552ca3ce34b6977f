//! Batch certification CLI: generic solves, convexity/structure checks,
//! and the registered golden experiments.
//!
//! Exit codes: 0 all pass, 1 golden mismatch or failed check, 2
//! configuration/usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hopflax::config::{self, ConfigError};
use hopflax::experiments;

#[derive(Parser)]
#[command(
    name = "hopflax",
    about = "Hopf-Lax Hamilton-Jacobi solvers and convexity certification on geodesic spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Args)]
struct CommonOpts {
    /// Output directory for report files.
    #[arg(long, default_value = "hopflax-out")]
    out: PathBuf,
    /// Seed for all randomized sampling.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads (0 = rayon default).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Which artifacts to write.
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured Hamilton-Jacobi problem and emit slices.
    Solve {
        /// TOML configuration file.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run one certification notion against the configured space/field.
    Check {
        /// TOML configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Notion: weak-geodesic | strong-geodesic | one-weak |
        /// infty-subharmonious | uniform-infty-subharmonious | pointwise |
        /// busemann3 | busemann4 | equivalence-3-4 | uniform-npc.
        #[arg(long)]
        notion: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a registered golden experiment (or list them).
    Experiment {
        /// Experiment name; see --list.
        name: Option<String>,
        /// List registered experiments and exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building thread pool")?;
    Ok(pool.install(job))
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { config, common } => {
            let cfg = load_config(&config)?;
            let artifacts = in_pool(common.threads, || {
                config::run_solve_config(&cfg, common.seed)
            })?
            .map_err(config_error)?;
            write_artifacts(&common, "solve", &artifacts.json, &artifacts.csv)?;
            println!("solve: ok ({} slices)", artifacts.csv.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            config,
            notion,
            common,
        } => {
            let cfg = load_config(&config)?;
            let artifacts = in_pool(common.threads, || {
                config::run_check_config(&cfg, &notion, common.seed)
            })?
            .map_err(config_error)?;
            write_artifacts(&common, "check", &artifacts.json, &artifacts.csv)?;
            print_check_table(&artifacts.json);
            Ok(if artifacts.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Experiment { name, list, common } => {
            if list {
                for name in experiments::NAMES {
                    println!("{name}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let Some(name) = name else {
                anyhow::bail!("missing experiment name (or use --list)");
            };
            let output = in_pool(common.threads, || experiments::run(&name, common.seed))?
                .map_err(|e| anyhow::anyhow!(e))?;
            let json = serde_json::to_value(&output.report)?;
            write_artifacts(&common, &name, &json, &output.csv)?;
            print_experiment_table(&output.report);
            if output.report.all_pass() {
                Ok(ExitCode::SUCCESS)
            } else {
                print!("{}", output.report.diff_table());
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn load_config(path: &Path) -> Result<config::Config> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    config::parse(&text).map_err(config_error)
}

fn config_error(err: ConfigError) -> anyhow::Error {
    anyhow::anyhow!(err)
}

fn write_artifacts(
    common: &CommonOpts,
    stem: &str,
    json: &serde_json::Value,
    csv: &[(String, String)],
) -> Result<()> {
    std::fs::create_dir_all(&common.out)
        .with_context(|| format!("creating {}", common.out.display()))?;
    if matches!(common.format, Format::Json | Format::Both) {
        let path = common.out.join(format!("{stem}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(json)?)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    if matches!(common.format, Format::Csv | Format::Both) {
        for (name, contents) in csv {
            let path = common.out.join(name);
            std::fs::write(&path, contents)
                .with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn print_experiment_table(report: &hopflax::report::ExperimentReport) {
    println!(
        "experiment {} (seed {}), {:.1} ms",
        report.name, report.seed, report.wall_ms
    );
    for g in &report.goldens {
        println!(
            "  [{}] {:<58} [{}] {}",
            if g.pass { "PASS" } else { "FAIL" },
            g.name,
            g.provenance,
            if g.pass {
                String::new()
            } else {
                format!("expected {} got {}", g.expected, g.actual)
            }
        );
    }
    for note in &report.notes {
        println!("  note: {note}");
    }
}

fn print_check_table(json: &serde_json::Value) {
    let rows = ["convexity", "structure"];
    for key in rows {
        if let Some(list) = json.get(key).and_then(|v| v.as_array()) {
            for rep in list {
                let notion = rep
                    .get("notion")
                    .or_else(|| rep.get("condition"))
                    .and_then(|v| v.as_str())
                    .unwrap_or("?");
                let pass = rep.get("pass").and_then(|v| v.as_bool()).unwrap_or(false);
                let margin = rep
                    .get("worst_margin")
                    .map(|m| {
                        m.get("exact")
                            .and_then(|e| e.as_str())
                            .map(String::from)
                            .unwrap_or_else(|| {
                                format!(
                                    "{}",
                                    m.get("approx").and_then(|a| a.as_f64()).unwrap_or(0.0)
                                )
                            })
                    })
                    .unwrap_or_default();
                let witness = rep
                    .get("witness")
                    .and_then(|w| w.as_array())
                    .map(|w| {
                        w.iter()
                            .filter_map(|p| p.as_str())
                            .collect::<Vec<_>>()
                            .join(" | ")
                    })
                    .unwrap_or_default();
                println!(
                    "  [{}] {:<34} margin {:<14} witness [{}]",
                    if pass { "PASS" } else { "FAIL" },
                    notion,
                    margin,
                    witness
                );
            }
        }
    }
}
