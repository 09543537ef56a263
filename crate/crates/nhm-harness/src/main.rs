//! `nhm`: reproduce the non-Hermitian Maryland model figures as data
//! artifacts and run the verification suite.
//!
//! Exit codes: 0 success, 1 verification/runtime failure, 2 config error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nhm_harness::config::{ApproximantChoice, ExperimentConfig, ExperimentKind, OutputFormat};
use nhm_harness::{experiments, verify};

#[derive(Parser)]
#[command(
    name = "nhm",
    about = "Non-Hermitian Maryland model: spectra, windings, rotations, verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Potential amplitude V.
    #[arg(long = "V", alias = "v")]
    v: Option<f64>,

    /// Non-Hermiticity strength; repeat for a grid.
    #[arg(long = "epsilon")]
    epsilon: Vec<f64>,

    /// Potential phase theta.
    #[arg(long)]
    theta: Option<f64>,

    /// 0-based index into the Fibonacci approximants 1/2, 2/3, 3/5, ...
    /// (index 10 -> ring 233, 11 -> 377, 12 -> 610).
    #[arg(long, conflicts_with = "pq")]
    fib_index: Option<usize>,

    /// Explicit rational approximant p/q (sets the ring size L = q).
    #[arg(long, value_parser = parse_pq)]
    pq: Option<(u64, u64)>,

    /// Flux grid steps for winding/rotation sweeps.
    #[arg(long)]
    theta_steps: Option<usize>,

    /// Curve-sampling resolution for analytic loop overlays.
    #[arg(long)]
    resolution: Option<usize>,

    /// Transfer-matrix steps for Lyapunov estimates.
    #[arg(long)]
    steps: Option<usize>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format for tables.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,

    /// Also render SVG plots of the tables.
    #[arg(long)]
    plot: bool,

    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigen-spectra and IPR panels with analytic loop overlays.
    Spectrum(CommonArgs),
    /// Winding numbers w1, w2 over an epsilon grid.
    Winding(CommonArgs),
    /// Analytic phase diagram over an epsilon grid.
    PhaseDiagram(CommonArgs),
    /// Closed-form vs transfer-matrix Lyapunov exponents.
    Lyapunov(CommonArgs),
    /// Eigenvalue flow under boundary flux.
    Rotations(CommonArgs),
    /// Run the verification suite and write the report.
    Verify {
        #[command(flatten)]
        common: CommonArgs,

        /// Run only checks whose name contains this substring; repeatable.
        #[arg(long)]
        only: Vec<String>,

        /// Override a check tolerance, e.g. --tolerance thresholds=1e-5.
        #[arg(long = "tolerance", value_parser = parse_tolerance)]
        tolerances: Vec<(String, f64)>,
    },
}

fn parse_pq(s: &str) -> Result<(u64, u64), String> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| format!("expected p/q, got {s}"))?;
    let p = p.trim().parse().map_err(|e| format!("numerator: {e}"))?;
    let q = q.trim().parse().map_err(|e| format!("denominator: {e}"))?;
    Ok((p, q))
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(format!("format must be csv or json, got {other}")),
    }
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s}"))?;
    let v = value.trim().parse().map_err(|e| format!("value: {e}"))?;
    Ok((name.trim().to_string(), v))
}

fn build_config(kind: ExperimentKind, args: &CommonArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(kind);
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    if let Some(v) = args.v {
        cfg.v = v;
    }
    if !args.epsilon.is_empty() {
        cfg.epsilons = args.epsilon.clone();
    }
    if let Some(t) = args.theta {
        cfg.theta = t;
    }
    if let Some(k) = args.fib_index {
        cfg.approximant = ApproximantChoice::FibIndex(k);
    }
    if let Some((p, q)) = args.pq {
        cfg.approximant = ApproximantChoice::Explicit { p, q };
    }
    if let Some(s) = args.theta_steps {
        cfg.theta_steps = s;
    }
    if let Some(r) = args.resolution {
        cfg.resolution = r;
    }
    if let Some(s) = args.steps {
        cfg.steps = s;
    }
    if let Some(o) = &args.out {
        cfg.out_dir = o.clone();
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if args.plot {
        cfg.plot = true;
    }
    Ok(cfg)
}

fn init_workers() {
    if let Ok(s) = std::env::var("NHM_WORKERS") {
        if let Ok(n) = s.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_workers();
    let cli = Cli::parse();

    let (kind, common) = match &cli.command {
        Command::Spectrum(c) => (ExperimentKind::Spectrum, c.clone()),
        Command::Winding(c) => (ExperimentKind::WindingSweep, c.clone()),
        Command::PhaseDiagram(c) => (ExperimentKind::PhaseDiagram, c.clone()),
        Command::Lyapunov(c) => (ExperimentKind::Lyapunov, c.clone()),
        Command::Rotations(c) => (ExperimentKind::Rotations, c.clone()),
        Command::Verify { common, .. } => (ExperimentKind::Verify, common.clone()),
    };

    let mut cfg = match build_config(kind, &common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Command::Verify {
        only, tolerances, ..
    } = &cli.command
    {
        cfg.only.extend(only.iter().cloned());
        cfg.tolerance_overrides
            .extend(tolerances.iter().cloned().collect::<BTreeMap<_, _>>());
    }
    if let Err(e) = cfg.validate() {
        eprintln!("config error: {e:#}");
        return ExitCode::from(2);
    }

    let outcome = match cli.command {
        Command::Spectrum(_) => experiments::run_spectrum_experiment(&cfg).map(report_files),
        Command::Winding(_) => experiments::run_winding_sweep(&cfg).map(report_files),
        Command::PhaseDiagram(_) => experiments::run_phase_diagram(&cfg).map(report_files),
        Command::Lyapunov(_) => experiments::run_lyapunov_experiment(&cfg).map(report_files),
        Command::Rotations(_) => experiments::run_rotation_experiment(&cfg).map(report_files),
        Command::Verify { .. } => match verify::run_verify_suite(&cfg) {
            Ok((report, path)) => {
                println!("report: {}", path.display());
                if report.all_passed {
                    Ok(())
                } else {
                    eprintln!("verification failures present");
                    return ExitCode::from(1);
                }
            }
            Err(e) => Err(e),
        },
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn report_files(files: Vec<PathBuf>) {
    for f in files {
        println!("wrote {}", f.display());
    }
}
