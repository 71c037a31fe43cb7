//! Convergence harness: `cavity-bench cavity ...` and `cavity-bench mms ...`.

use std::path::PathBuf;
use std::process::ExitCode;

use cavity_fem::study::{export_results, run_study, to_csv, ExportFormat};
use cavity_fem::{CornerConvention, ElementPair, StudyConfig, StudyKind};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cavity-bench", version, about = "Mixed FEM convergence studies on [-1,1]^2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lid-driven cavity: successive L4 errors and their orders.
    Cavity {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "leaky")]
        corner: CornerConvention,
    },
    /// Manufactured smooth solution: H1/L2 errors and their orders.
    Mms {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// taylor-hood, mini or p1p1-stab
    #[arg(long, default_value = "taylor-hood")]
    element: ElementPair,
    /// Subdivisions per side, each twice the previous one.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
    levels: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// CSV output; the table goes to stdout either way.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Directory for per-level VTK files.
    #[arg(long)]
    vtk: Option<PathBuf>,
    /// Solve levels concurrently.
    #[arg(long)]
    parallel_levels: bool,
}

impl Common {
    fn into_config(self, kind: StudyKind, corner: CornerConvention) -> StudyConfig {
        StudyConfig {
            kind,
            pair: self.element,
            levels: self.levels,
            nu: self.nu,
            tol: self.tol,
            max_iter: self.max_iter,
            corner,
            out: self.out,
            json: self.json,
            vtk: self.vtk,
            parallel_levels: self.parallel_levels,
        }
    }
}

fn run(config: &StudyConfig) -> cavity_fem::Result<()> {
    let result = run_study(config)?;
    print!("{}", to_csv(&result));
    for level in &result.levels {
        eprintln!("n_div {:4}: {} Newton iterations", level.n_div, level.iterations);
    }
    if let Some(path) = &config.out {
        export_results(&result, ExportFormat::Csv, path)?;
    }
    if let Some(path) = &config.json {
        export_results(&result, ExportFormat::Json, path)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let config = match Cli::parse().command {
        Command::Cavity { common, corner } => common.into_config(StudyKind::Cavity, corner),
        Command::Mms { common } => common.into_config(StudyKind::Mms, CornerConvention::default()),
    };
    match run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
