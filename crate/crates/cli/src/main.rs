//! `semilevel`: run benchmark cases, build EOC tables and scan amplification
//! factors.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or configuration error,
//! 3 non-finite values during a run, 4 degenerate symbol in a stability scan.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use semilevel_core::experiments::driver::run_ladder;
use semilevel_core::{
    case, instability_onset, run_case, scan_max_magnitude, CaseId, CrossTermVariant, Dim, EocTable,
    Error, ExperimentCase, FrozenStencil, HrPredictor, OnsetConfig, RunConfig, ScanConfig, Scheme,
    SchemeKind, Weight,
};

#[derive(Parser)]
#[command(
    name = "semilevel",
    version,
    about = "Semi-implicit level-set advection schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one resolution of a benchmark case and print its error record.
    Run(RunArgs),
    /// Walk a case's resolution ladder and print the error/EOC table.
    Eoc(EocArgs),
    /// Scan the amplification factor of a frozen scheme.
    Stability(StabilityArgs),
}

#[derive(Args)]
struct SchemeArgs {
    /// Benchmark case, e.g. ex1d-smooth or ex2d-circle-shrink.
    #[arg(long)]
    case: CaseId,
    /// second, hr or third.
    #[arg(long)]
    scheme: Scheme,
    /// Gauss-Seidel sweeps per step (default: the case's value).
    #[arg(long)]
    sweeps: Option<usize>,
    /// Weight of the second-order scheme: a number or `preferred`.
    #[arg(long, value_parser = parse_weight)]
    w: Option<Weight>,
    /// Predictor of the HR scheme (default: global in 1D, in-sweep in 2D).
    #[arg(long)]
    predictor: Option<HrPredictor>,
    /// Courant sample in the mixed corrections of the 2D third-order scheme.
    #[arg(long, value_enum, default_value_t = CrossTerms::Symmetric)]
    cross_terms: CrossTerms,
    /// Output CSV file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// `I`: number of space intervals per axis.
    #[arg(long)]
    nx: usize,
    /// `N`: number of time steps.
    #[arg(long)]
    nt: usize,
    /// Write a field snapshot after every step.
    #[arg(long)]
    snapshots: bool,
    /// Directory for snapshots and failure dumps.
    #[arg(long, default_value = "snapshots")]
    snapshot_dir: PathBuf,
}

#[derive(Args)]
struct EocArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Number of ladder levels to run (default: all).
    #[arg(long)]
    levels: Option<usize>,
    /// Ladder name, e.g. c27 (default: the case's first ladder).
    #[arg(long)]
    ladder: Option<String>,
    /// Run the extra coarse level that gives the first row an EOC.
    /// `auto` runs it when more than one level is requested.
    #[arg(long, value_enum, default_value_t = PreLevel::Auto)]
    pre_level: PreLevel,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Args)]
struct StabilityArgs {
    /// first, second, second2d, hr or third.
    #[arg(long)]
    scheme: String,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: Option<u8>,
    /// Largest Courant number of the scan.
    #[arg(long)]
    cmax: f64,
    /// Smallest positive Courant number of the scan.
    #[arg(long, default_value_t = 1e-2)]
    cmin: f64,
    /// Frequency samples per axis.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Courant samples per axis.
    #[arg(long, default_value_t = 48)]
    courant_samples: usize,
    /// Refinement rounds around the running maximum.
    #[arg(long, default_value_t = 4)]
    refine: usize,
    /// Weight of the second-order scheme: a number or `preferred`.
    #[arg(long, value_parser = parse_weight)]
    w: Option<Weight>,
    /// Frozen limited slope of the HR scheme.
    #[arg(long, default_value_t = 1.0)]
    l: f64,
    /// Skip the search for the smallest unstable Courant number.
    #[arg(long)]
    no_onset: bool,
    /// Output CSV file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CrossTerms {
    Symmetric,
    AsPrinted,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PreLevel {
    Auto,
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Markdown,
}

fn parse_weight(s: &str) -> Result<Weight, String> {
    if s == "preferred" {
        return Ok(Weight::Preferred);
    }
    s.parse::<f64>()
        .ok()
        .filter(|w| w.is_finite())
        .map(Weight::Fixed)
        .ok_or_else(|| format!("expected a number or `preferred`, got '{s}'"))
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NonFinite { .. } => 3,
        Error::DegenerateSymbol { .. } => 4,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_config(
    args: &SchemeArgs,
    c: &ExperimentCase,
    nodes: usize,
    steps: usize,
) -> Result<RunConfig, Error> {
    let scheme = match (args.scheme, args.w) {
        (Scheme::Second(_), Some(w)) => Scheme::Second(w),
        (s, Some(_)) => {
            return Err(Error::Config(format!(
                "--w only applies to the second-order scheme, not {s}"
            )))
        }
        (s, None) => s,
    };
    if args.predictor.is_some() && scheme != Scheme::HighResolution {
        return Err(Error::Config(
            "--predictor only applies to the hr scheme".into(),
        ));
    }
    let mut config = RunConfig::new(c, scheme, nodes, steps);
    if let Some(k) = args.sweeps {
        config.sweeps = k;
    }
    config.hr_predictor = args.predictor;
    config.variant = match args.cross_terms {
        CrossTerms::Symmetric => CrossTermVariant::Symmetric,
        CrossTerms::AsPrinted => CrossTermVariant::AsPrinted,
    };
    Ok(config)
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let c = case(args.scheme.case);
    let mut config = run_config(&args.scheme, &c, args.nx, args.nt)?;
    config.snapshot_dir = Some(args.snapshot_dir);
    config.snapshots = args.snapshots;
    let outcome = run_case(&c, &config)?;
    let mut out = output(&args.scheme.out)?;
    EocTable::new(vec![outcome.record]).write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_eoc(args: EocArgs) -> Result<(), Error> {
    let c = case(args.scheme.case);
    let ladder = c.ladder(args.ladder.as_deref())?;
    if args.levels == Some(0) {
        return Err(Error::Config("--levels must be at least 1".into()));
    }
    let levels = args.levels.unwrap_or(ladder.levels.len());
    let with_pre = match args.pre_level {
        PreLevel::On => true,
        PreLevel::Off => false,
        PreLevel::Auto => levels > 1,
    };
    let (nodes, steps) = ladder.levels[0];
    let template = run_config(&args.scheme, &c, nodes, steps)?;
    let records = run_ladder(&c, ladder, &template, Some(levels), with_pre)?
        .into_iter()
        .map(|o| o.record)
        .collect();
    let table = EocTable::new(records);
    let mut out = output(&args.scheme.out)?;
    match args.format {
        TableFormat::Csv => table.write_csv(&mut out)?,
        TableFormat::Markdown => out.write_all(table.to_markdown().as_bytes())?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_stability(args: StabilityArgs) -> Result<(), Error> {
    let (kind, implied_dim) = match args.scheme.as_str() {
        "first" => (SchemeKind::FirstOrder, None),
        "second" => (
            SchemeKind::SecondOrder(args.w.unwrap_or(Weight::Preferred)),
            None,
        ),
        "second2d" => (
            SchemeKind::SecondOrder(args.w.unwrap_or(Weight::Preferred)),
            Some(2),
        ),
        "hr" => (SchemeKind::HighResolution(args.l), None),
        "third" => (SchemeKind::ThirdOrder, None),
        other => {
            return Err(Error::Config(format!(
                "unknown scheme '{other}' (expected first, second, second2d, hr or third)"
            )))
        }
    };
    if args.w.is_some() && !matches!(kind, SchemeKind::SecondOrder(_)) {
        return Err(Error::Config(
            "--w only applies to second and second2d".into(),
        ));
    }
    let dim = match (args.dim, implied_dim) {
        (Some(1), Some(2)) => {
            return Err(Error::Config("second2d needs --dim 2".into()));
        }
        (Some(d), _) | (None, Some(d)) => d,
        (None, None) => 1,
    };
    let dim = if dim == 2 { Dim::Two } else { Dim::One };
    if !args.cmax.is_finite() || args.cmax < 0.0 || args.cmin.is_nan() || args.cmin <= 0.0 {
        return Err(Error::Config(
            "need finite --cmax >= 0 and --cmin > 0".into(),
        ));
    }
    let stencil = FrozenStencil::new(kind, dim);
    let config = ScanConfig {
        c_min: args.cmin,
        c_max: args.cmax,
        courant_samples: args.courant_samples,
        theta_samples: args.grid,
        refine_rounds: args.refine,
        ..ScanConfig::default()
    };
    let report = scan_max_magnitude(&stencil, &config)?;
    let onset = if args.no_onset {
        None
    } else {
        Some(instability_onset(
            &stencil,
            args.cmax,
            &OnsetConfig::default(),
        )?)
    };
    let mut out = output(&args.out)?;
    report.write_csv(&mut out)?;
    match onset {
        Some(Some(c)) => writeln!(out, "# onset,{c}")?,
        Some(None) => writeln!(out, "# onset,none")?,
        None => {}
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Eoc(a) => cmd_eoc(a),
        Command::Stability(a) => cmd_stability(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semilevel: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
