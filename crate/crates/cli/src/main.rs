use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use aimwell::aim::AimError;
use aimwell::oracle::DEFAULT_INTERVALS;
use aimwell::report::{self, emit_records, Format, RunError, RunSettings};
use aimwell::tables;
use aimwell::well::WellParams;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status per error class.
mod exit {
    pub const OTHER: u8 = 1;
    pub const INVALID: u8 = 2;
    pub const NOT_CONVERGED: u8 = 3;
    pub const LEVEL_NOT_FOUND: u8 = 4;
    pub const ORACLE: u8 = 5;
    pub const TABLE_FAILED: u8 = 6;
}

/// Bound states of the deformed trigonometric well by the asymptotic iteration method.
#[derive(Parser)]
#[command(name = "aimwell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Converge energies for arbitrary A, B, γ
    Solve {
        #[command(flatten)]
        well: WellArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Quasi-exact sub-levels at degree n (A is derived from B and γ)
    Quasi {
        #[arg(long)]
        n: usize,
        #[arg(long = "B", allow_negative_numbers = true)]
        b: f64,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Second-order perturbed energies in B
    Perturb {
        #[command(flatten)]
        well: WellArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Finite-difference energies with Richardson extrapolation
    Oracle {
        #[command(flatten)]
        well: WellArgs,
        /// Coarse grid intervals; the fine grid doubles it
        #[arg(long, default_value_t = DEFAULT_INTERVALS)]
        intervals: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Recompute reference table 1–5 and compare
    ReproduceTable {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        table: u8,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct WellArgs {
    #[arg(long = "A", allow_negative_numbers = true)]
    a: f64,
    #[arg(long = "B", allow_negative_numbers = true)]
    b: f64,
    #[arg(long)]
    gamma: f64,
    /// Levels as `n` or `lo..hi` (inclusive)
    #[arg(long, default_value = "0..5", value_parser = parse_levels)]
    levels: RangeInclusive<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// Evaluation point y₀ = cos x₀
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    y0: f64,
    #[arg(long, default_value_t = 60)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Significant digits (raised to 50 when max-iter exceeds 20)
    #[arg(long, env = "AIMWELL_PRECISION", default_value_t = 16)]
    precision: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
    format: OutputFormat,
    /// Write to FILE instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Tsv,
    Json,
}

impl RunArgs {
    fn settings(&self) -> RunSettings {
        RunSettings { y0: self.y0, max_iter: self.max_iter, tol: self.tol, digits: self.precision }
    }

    fn format(&self) -> Format {
        match self.format {
            OutputFormat::Tsv => Format::Tsv,
            OutputFormat::Json => Format::Json,
        }
    }
}

impl WellArgs {
    fn params(&self) -> Result<WellParams, RunError> {
        Ok(WellParams::new(self.a, self.b, self.gamma)?)
    }

    fn levels(&self) -> Vec<usize> {
        self.levels.clone().collect()
    }
}

fn parse_levels(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad level `{t}`: {e}"));
    let range = match s.split_once("..") {
        Some((lo, hi)) => parse(lo)?..=parse(hi.trim_start_matches('='))?,
        None => {
            let n = parse(s)?;
            n..=n
        }
    };
    if range.is_empty() {
        return Err(format!("empty level range `{s}`"));
    }
    Ok(range)
}

fn error_code(e: &RunError) -> u8 {
    match e {
        RunError::Invalid(_) => exit::INVALID,
        RunError::Well(_) => exit::INVALID,
        RunError::Aim(AimError::LevelNotFound { .. }) => exit::LEVEL_NOT_FOUND,
        RunError::Aim(AimError::InvalidProblem(_)) => exit::INVALID,
        RunError::Oracle(_) => exit::ORACLE,
        _ => exit::OTHER,
    }
}

/// Output text and exit status.
fn run(command: &Command) -> Result<(String, u8), RunError> {
    let records_status = |recs: &[report::Record]| if recs.iter().all(|r| r.converged) { 0 } else { exit::NOT_CONVERGED };
    match command {
        Command::Solve { well, run } => {
            let recs = report::solve(&well.params()?, &well.levels(), &run.settings())?;
            Ok((emit_records(&recs, run.format()), records_status(&recs)))
        }
        Command::Quasi { n, b, gamma, run } => {
            let recs = report::quasi(*n, *gamma, *b, &run.settings())?;
            Ok((emit_records(&recs, run.format()), 0))
        }
        Command::Perturb { well, run } => {
            let recs = report::perturb(&well.params()?, &well.levels(), &run.settings())?;
            Ok((emit_records(&recs, run.format()), 0))
        }
        Command::Oracle { well, intervals, run } => {
            let recs = report::oracle(&well.params()?, &well.levels(), *intervals)?;
            Ok((emit_records(&recs, run.format()), 0))
        }
        Command::ReproduceTable { table, run } => {
            let rep = tables::reproduce(*table, &run.settings())?;
            let code = if rep.passed { 0 } else { exit::TABLE_FAILED };
            Ok((tables::emit(&rep, run.format()), code))
        }
    }
}

fn out_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Solve { run, .. }
        | Command::Quasi { run, .. }
        | Command::Perturb { run, .. }
        | Command::Oracle { run, .. }
        | Command::ReproduceTable { run, .. } => run.out.as_ref(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((text, code)) => {
            match out_path(&cli.command) {
                Some(path) => {
                    if let Err(e) = fs::write(path, &text) {
                        eprintln!("aimwell: cannot write {}: {e}", path.display());
                        return ExitCode::from(exit::OTHER);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("aimwell: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
