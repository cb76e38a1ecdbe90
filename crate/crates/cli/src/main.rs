use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polyeig_cli::bench::Suite;
use polyeig_cli::commands::{
    cmd_bench, cmd_check, cmd_gen, cmd_roots, cmd_solve, BenchArgs, CheckArgs, CliError, GenArgs, ReportFormat,
    RootsArgs, SolveArgs,
};
use polyeig_cli::generate::GenKind;
use polyeig_cli::problem_file::Format;

#[derive(Parser)]
#[command(name = "polyeig", version, about = "Eigenvalues of matrix polynomials by Laguerre iteration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ReportFlags {
    /// JSON report
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// CSV, one row per eigenvalue
    #[arg(long)]
    csv: bool,
}

impl ReportFlags {
    fn format(&self) -> ReportFormat {
        if self.json {
            ReportFormat::Json
        } else if self.csv {
            ReportFormat::Csv
        } else {
            ReportFormat::Text
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file
    Solve {
        file: PathBuf,
        #[command(flatten)]
        report: ReportFlags,
        #[arg(long, default_value_t = 60)]
        max_iter: usize,
        #[arg(long, env = "POLYEIG_SEED", default_value_t = 0)]
        seed: u64,
        /// Rank tolerance relative to ‖A‖_F for the end coefficients
        #[arg(long)]
        rank_tol: Option<f64>,
        /// Write to this file instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Roots of a scalar polynomial
    Roots {
        /// 1x1 problem file
        file: Option<PathBuf>,
        /// Coefficients a_0 .. a_d as re,im (takes every following argument, so put it last)
        #[arg(long, num_args = 1.., allow_hyphen_values = true)]
        coeffs: Vec<String>,
        #[command(flatten)]
        report: ReportFlags,
        #[arg(long, default_value_t = 60)]
        max_iter: usize,
        #[arg(long, env = "POLYEIG_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Timing sweep over problem size
    Bench {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, env = "POLYEIG_SEED", default_value_t = 0)]
        seed: u64,
        /// Comma-separated sizes replacing the default grid
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Output format
        #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
        out: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve and independently verify residuals, Pellet containment and counts
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 60)]
        max_iter: usize,
        #[arg(long, env = "POLYEIG_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Write a random problem file
    Gen {
        /// general, hessenberg, hessenberg-reduced, tridiagonal, scalar, hermitian-coefficients, rank-deficient-ends(k)
        #[arg(long)]
        kind: GenKind,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, env = "POLYEIG_SEED", default_value_t = 0)]
        seed: u64,
        /// JSON instead of the text format
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn open(output: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match output {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Solve { file, report, max_iter, seed, rank_tol, output } => {
            let args = SolveArgs { file, format: report.format(), max_iter, seed, rank_tol };
            let mut w = open(&output)?;
            cmd_solve(&args, &mut w)?;
            w.flush()?;
        }
        Command::Roots { file, coeffs, report, max_iter, seed, output } => {
            let args = RootsArgs { file, coeffs, format: report.format(), max_iter, seed };
            let mut w = open(&output)?;
            cmd_roots(&args, &mut w)?;
            w.flush()?;
        }
        Command::Bench { suite, repeats, seed, sizes, out, output } => {
            let args = BenchArgs { suite, repeats, seed, sizes, json: out == "json" };
            let mut w = open(&output)?;
            cmd_bench(&args, &mut w)?;
            w.flush()?;
        }
        Command::Check { file, max_iter, seed, json } => {
            let mut w = io::stdout().lock();
            let r = cmd_check(&CheckArgs { file, max_iter, seed, json }, &mut w);
            w.flush()?;
            r?;
        }
        Command::Gen { kind, n, d, seed, json, output } => {
            let format = if json { Format::Json } else { Format::Text };
            let mut w = open(&output)?;
            cmd_gen(&GenArgs { kind, n, d, seed, format }, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polyeig: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
