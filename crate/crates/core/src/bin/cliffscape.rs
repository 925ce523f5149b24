use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cliffscape::experiment::{emit_plot, run_and_write, ConfigFile, ExperimentKind, PlotKind, RunConfig};
use cliffscape::par::with_threads;
use cliffscape::Error;

#[derive(Parser)]
#[command(name = "cliffscape", version, about = "Loss-landscape experiments on Clifford variational circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Loss variance under uniform and Clifford sampling.
    VarianceScan(Common),
    /// Greedy search for exact siloed minima and remainder statistics.
    ExactMinima(Common),
    /// Pauli-averaged second moment against 2^-n.
    RandomObs(Common),
    /// Averaging identities on random small circuits.
    LemmaChecks(Common),
    /// Closed-form fixture checks.
    Fixtures(Common),
    /// Render a CSV produced by variance-scan or exact-minima as SVG.
    Plot {
        csv: PathBuf,
        /// `variance` or `vanish`.
        #[arg(long, default_value = "variance")]
        kind: String,
        /// Output directory (default: next to the CSV).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    if e.is_cap() {
        3
    } else {
        match e {
            Error::Config(_) | Error::Parse(_) | Error::InvalidArgument(_) => 2,
            _ => 1,
        }
    }
}

fn experiment(kind: ExperimentKind, common: Common) -> Result<(), Error> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let mut config = RunConfig::resolve(kind, &file, common.seed)?;
    if let Some(out) = common.out {
        config.out_dir = out;
    }
    let (out, paths) = with_threads(common.threads, || run_and_write(&config))?;
    for line in &out.summary {
        println!("{line}");
    }
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn plot(csv: PathBuf, kind: &str, out: Option<PathBuf>) -> Result<(), Error> {
    let kind: PlotKind = kind.parse()?;
    let text = std::fs::read_to_string(&csv)?;
    let svg = emit_plot(&text, kind)?;
    let dir = out.unwrap_or_else(|| csv.parent().map(PathBuf::from).unwrap_or_default());
    std::fs::create_dir_all(&dir)?;
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let path = dir.join(format!("{stem}.svg"));
    std::fs::write(&path, svg)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::VarianceScan(c) => experiment(ExperimentKind::VarianceScan, c),
        Command::ExactMinima(c) => experiment(ExperimentKind::ExactMinima, c),
        Command::RandomObs(c) => experiment(ExperimentKind::RandomObservableIdentity, c),
        Command::LemmaChecks(c) => experiment(ExperimentKind::LemmaChecks, c),
        Command::Fixtures(c) => experiment(ExperimentKind::Fixtures, c),
        Command::Plot { csv, kind, out } => plot(csv, &kind, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
