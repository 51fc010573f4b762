use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use floquet_sweep::dump::DumpError;
use floquet_sweep::format::sig12;
use floquet_sweep::{
    locate_borders, locate_crossings, mode_dump, run_sweep, run_validation, write_csv, Collision,
    CrossingError, SweepConfig, Target,
};

const CONFIG_ERROR: u8 = 1;
const INVARIANT_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "floquet-thermo", version, about = "Quasistationary Floquet-state distributions of the driven Mathieu oscillator")]
struct Cli {
    /// Override a config field, e.g. `--set bath.density.s=0.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every q grid point and write CSV.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate r = 1 (r1) or ħω/(k_B τ) = 1 (tau1) crossings.
    Crossings {
        config: PathBuf,
        #[arg(long)]
        target: Target,
    },
    /// Locate mechanical stability borders in the q range.
    Borders { config: PathBuf },
    /// Print the Floquet mode at one q as JSON.
    ModeDump {
        config: PathBuf,
        #[arg(long)]
        q: f64,
    },
    /// Run the invariant suite.
    Validate,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(CONFIG_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let load = |path: &PathBuf| SweepConfig::load(path, &cli.overrides);

    match &cli.command {
        Command::Sweep { config, out } => {
            let config = match load(config) {
                Ok(c) => c,
                Err(e) => return fail(CONFIG_ERROR, e),
            };
            let rows = match run_sweep(&config) {
                Ok(rows) => rows,
                Err(e) => return fail(CONFIG_ERROR, e),
            };
            let written = match out {
                Some(path) => match File::create(path) {
                    Ok(f) => write_csv(&rows, &config, BufWriter::new(f)),
                    Err(e) => return fail(CONFIG_ERROR, format!("{}: {e}", path.display())),
                },
                None => write_csv(&rows, &config, io::stdout().lock()),
            };
            if let Err(e) = written {
                return fail(CONFIG_ERROR, e);
            }
            let broken = rows.iter().filter(|r| r.has_flag("oracle_failed")).count();
            if broken > 0 {
                return fail(INVARIANT_FAILURE, format!("{broken} points failed oracle checks"));
            }
            ExitCode::SUCCESS
        }
        Command::Crossings { config, target } => {
            let config = match load(config) {
                Ok(c) => c,
                Err(e) => return fail(CONFIG_ERROR, e),
            };
            match locate_crossings(&config, *target) {
                Ok(found) => {
                    let mut out = io::stdout().lock();
                    let _ = writeln!(out, "q,direction");
                    for c in found {
                        let dir = if c.rising { "rising" } else { "falling" };
                        let _ = writeln!(out, "{},{dir}", sig12(c.q));
                    }
                    ExitCode::SUCCESS
                }
                Err(e @ (CrossingError::NoCrossing(_) | CrossingError::Config(_))) => {
                    fail(CONFIG_ERROR, e)
                }
                Err(e) => fail(INVARIANT_FAILURE, e),
            }
        }
        Command::Borders { config } => {
            let config = match load(config) {
                Ok(c) => c,
                Err(e) => return fail(CONFIG_ERROR, e),
            };
            let borders = match locate_borders(&config) {
                Ok(b) => b,
                Err(e) => return fail(CONFIG_ERROR, e),
            };
            let mut out = io::stdout().lock();
            let _ = writeln!(out, "q,collision,stable_side,nu_near_border,nu_limit,error");
            let opt = |x: Option<f64>| x.map(sig12).unwrap_or_default();
            for b in &borders {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    sig12(b.q),
                    match b.collision {
                        Collision::Plus => "plus",
                        Collision::Minus => "minus",
                    },
                    if b.stable_below { "below" } else { "above" },
                    opt(b.nu_near),
                    opt(b.nu_limit),
                    b.error.as_deref().unwrap_or("").replace(',', ";"),
                );
            }
            ExitCode::SUCCESS
        }
        Command::ModeDump { config, q } => {
            let config = match load(config) {
                Ok(c) => c,
                Err(e) => return fail(CONFIG_ERROR, e),
            };
            match mode_dump(&config, *q) {
                Ok(dump) => {
                    let text = serde_json::to_string(&dump).expect("plain data");
                    println!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e @ DumpError::Unstable(_)) => fail(CONFIG_ERROR, e),
                Err(DumpError::Numerical(floquet_thermo::Error::InvalidParameter(m))) => {
                    fail(CONFIG_ERROR, m)
                }
                Err(e) => fail(INVARIANT_FAILURE, e),
            }
        }
        Command::Validate => {
            let report = run_validation();
            for c in &report.checks {
                println!("{c}");
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            println!(
                "{passed}/{} checks passed in {:.1} s",
                report.checks.len(),
                report.seconds
            );
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(INVARIANT_FAILURE)
            }
        }
    }
}
