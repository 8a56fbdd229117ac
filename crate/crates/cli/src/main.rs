use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geodesy_cli::schema::{MatricesFile, ScenarioFile, SolutionReportFile};
use geodesy_cli::{census, exit, generate, measure, plot, solve, CliError, Family, PlotKind};
use planar_geodesy::SolveOptions;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "geodesy", version, about = "Planar configurations from angle measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded scenario.
    Gen {
        #[arg(short = 't', long, default_value_t = 5)]
        targets: usize,
        #[arg(short = 'm', long, default_value_t = 4)]
        measures: usize,
        #[arg(long, value_enum, default_value = "generic")]
        family: Family,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the angle matrices of a scenario.
    Measure {
        scenario: PathBuf,
        /// Uniform angular jitter half-width in radians.
        #[arg(long)]
        jitter: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct configurations from a matrices file.
    Solve {
        matrices: PathBuf,
        /// Use the directed matrix to choose between twins.
        #[arg(long)]
        directed: bool,
        #[arg(long, default_value_t = SolveOptions::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SolveOptions::default().tol)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate solution counts over many seeded instances.
    Census {
        /// Shapes as `t,m` pairs separated by spaces or semicolons.
        #[arg(long, value_delimiter = ';', num_args = 1.., default_values_t = ["4,3".to_string(), "4,4".into(), "5,3".into(), "5,4".into(), "6,4".into()])]
        shapes: Vec<String>,
        #[arg(short = 'n', long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SolveOptions::default().restarts)]
        restarts: usize,
        #[arg(long, value_enum, default_value = "generic")]
        family: Family,
        /// Write JSON instead of a table.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a scenario or solution report as SVG.
    Plot {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "config")]
        kind: PlotKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    Ok(std::fs::read_to_string(path)?)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(&text, out)
}

fn parse_shape(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Invalid(format!("shape must look like `t,m`, got `{s}`"));
    let (t, m) = s.trim().split_once(',').ok_or_else(bad)?;
    Ok((t.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Gen { targets, measures, family, seed, out } => {
            let cfg = generate(family, targets, measures, seed)?;
            emit_json(&ScenarioFile::new(&cfg, Some(seed), Some(family.name())), out.as_ref())?;
            Ok(exit::SUCCESS)
        }
        Command::Measure { scenario, jitter, seed, out } => {
            let scenario: ScenarioFile = serde_json::from_str(&read(&scenario)?)?;
            emit_json(&measure(&scenario, jitter, seed)?, out.as_ref())?;
            Ok(exit::SUCCESS)
        }
        Command::Solve { matrices, directed, restarts, seed, tol, out } => {
            if !(tol > 0.0) {
                return Err(CliError::Invalid(format!("tolerance must be positive, got {tol}")));
            }
            let matrices: MatricesFile = serde_json::from_str(&read(&matrices)?)?;
            let (report, code): (SolutionReportFile, i32) =
                solve(&matrices, directed, &SolveOptions { restarts, seed, tol })?;
            emit_json(&report, out.as_ref())?;
            Ok(code)
        }
        Command::Census { shapes, n, seed, restarts, family, json, out } => {
            let shapes = shapes
                .iter()
                .flat_map(|s| s.split_whitespace())
                .map(parse_shape)
                .collect::<Result<Vec<_>, _>>()?;
            let file = census(&shapes, n, seed, restarts, family);
            if json {
                emit_json(&file, out.as_ref())?;
            } else {
                emit(&file.table(), out.as_ref())?;
            }
            Ok(exit::SUCCESS)
        }
        Command::Plot { input, kind, out } => {
            emit(&plot(&read(&input)?, kind)?, out.as_ref())?;
            Ok(exit::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
