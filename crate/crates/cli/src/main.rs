//! Command-line front end: synthesize S-curves, decompose series into
//! logistic waves, refine models, evaluate them, and report fit metrics.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
//! non-convergence (best-effort output still written).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use logwave_core::extract::{
    decompose_with_engine, DecompositionConfig, ScaleGrid, ShiftGrid,
};
use logwave_core::refine::{fit_metrics, refine, Objective, RefineConfig};
use logwave_core::{
    sample_curve, Error as CoreError, GompertzParams, LogisticWave, MultilogisticModel,
};

use logwave_cli::engine::ThreadedEngine;
use logwave_cli::formats::{self, sig6, FormatError};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "logwave",
    version,
    about = "Decompose S-shaped time series into sums of logistic waves",
    max_term_width = 100
)]
struct Cli {
    /// Seed for the refinement restarts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for scalogram evaluation ("auto" or a count).
    #[arg(long, global = true, default_value = "auto")]
    threads: String,

    /// Suppress informational output (results still print).
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a curve to a series CSV.
    Generate(GenerateArgs),
    /// Decompose a series CSV into logistic waves.
    Decompose(DecomposeArgs),
    /// Refine a model against a series under minimax or least squares.
    Refine(RefineArgs),
    /// Evaluate a model over a grid, optionally against a series.
    Eval(EvalArgs),
    /// Print fit metrics of a model against a series.
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[command(subcommand)]
    kind: GenerateKind,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Gompertz curve x_sat*exp(-exp(-s*(t-t0))).
    Gompertz {
        #[arg(long)]
        xsat: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t0: f64,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Logistic curve y_sat/(1+exp(-(t-b)/a)).
    Logistic {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        ysat: f64,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sum of logistic waves given as repeated --wave a,b,ysat triples.
    Multilogistic {
        #[arg(long = "wave", value_name = "A,B,YSAT", required = true, allow_hyphen_values = true)]
        waves: Vec<String>,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Input series CSV.
    input: PathBuf,
    #[arg(long)]
    out_model: PathBuf,
    #[arg(long)]
    out_trace: Option<PathBuf>,
    /// Directory for per-pass scalogram CSVs (off by default; large).
    #[arg(long)]
    scalogram_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    max_waves: usize,
    #[arg(long, default_value_t = 0.02)]
    min_saturation_fraction: f64,
    /// Voices per octave of the scale grid.
    #[arg(long, default_value_t = 16)]
    voices: u32,
    #[arg(long, default_value_t = 0.8)]
    exclusion_octaves: f64,
    #[arg(long, default_value_t = 2.0)]
    exclusion_shift_factor: f64,
}

#[derive(Args)]
struct RefineArgs {
    /// Input series CSV.
    series: PathBuf,
    /// Starting model JSON.
    model: PathBuf,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Minimax)]
    objective: ObjectiveArg,
    #[arg(long)]
    out_model: PathBuf,
    #[arg(long)]
    out_report: Option<PathBuf>,
    #[arg(long, default_value_t = 20_000)]
    max_evaluations: usize,
    #[arg(long, default_value_t = 3)]
    restarts: u32,
    #[arg(long, default_value_t = 0.05)]
    step_fraction: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Minimax,
    LeastSquares,
}

#[derive(Args)]
struct EvalArgs {
    /// Model JSON to evaluate.
    model: PathBuf,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long)]
    out: PathBuf,
    /// Evaluate on this series' grid and add a residual column.
    #[arg(long)]
    against: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Input series CSV.
    series: PathBuf,
    /// Model JSON.
    model: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Data(String),
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    return ExitCode::SUCCESS;
                }
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let threads = match parse_threads(&cli.threads) {
        Ok(n) => n,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let outcome = match &cli.command {
        Command::Generate(args) => cmd_generate(&cli, args),
        Command::Decompose(args) => cmd_decompose(&cli, args, threads),
        Command::Refine(args) => cmd_refine(&cli, args),
        Command::Eval(args) => cmd_eval(&cli, args),
        Command::Metrics(args) => cmd_metrics(&cli, args),
    };

    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn parse_threads(spec: &str) -> Result<usize, String> {
    if spec == "auto" {
        return Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    }
    spec.parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("--threads must be 'auto' or a positive integer, got '{spec}'"))
}

fn parse_wave_triple(spec: &str) -> Result<LogisticWave, CliError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("--wave expects 'a,b,ysat', got '{spec}'")));
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| CliError::Usage(format!("bad --wave '{spec}': {e}")))?;
    LogisticWave::new(nums[0], nums[1], nums[2]).map_err(CliError::from)
}

fn cmd_generate(cli: &Cli, args: &GenerateArgs) -> Result<ExitCode, CliError> {
    let (series, out) = match &args.kind {
        GenerateKind::Gompertz { xsat, s, t0, range, out } => {
            let params = GompertzParams::new(*xsat, *s, *t0)?;
            (sample_curve(|t| params.eval(t), range.from, range.to, range.step)?, out)
        }
        GenerateKind::Logistic { a, b, ysat, range, out } => {
            let wave = LogisticWave::new(*a, *b, *ysat)?;
            (sample_curve(|t| wave.eval(t), range.from, range.to, range.step)?, out)
        }
        GenerateKind::Multilogistic { waves, range, out } => {
            let parsed =
                waves.iter().map(|w| parse_wave_triple(w)).collect::<Result<Vec<_>, _>>()?;
            let model = MultilogisticModel::new(parsed)?;
            (sample_curve(|t| model.eval(t), range.from, range.to, range.step)?, out)
        }
    };
    formats::write_series(out, &series)?;
    if !cli.quiet {
        println!("wrote {} samples to {}", series.len(), out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_decompose(cli: &Cli, args: &DecomposeArgs, threads: usize) -> Result<ExitCode, CliError> {
    let series = formats::read_series(&args.input)?;
    let cfg = DecompositionConfig {
        max_waves: args.max_waves,
        min_saturation_fraction: args.min_saturation_fraction,
        exclusion_scale_octaves: args.exclusion_octaves,
        exclusion_shift_factor: args.exclusion_shift_factor,
        scale_grid: ScaleGrid::Auto { voices_per_octave: args.voices },
        shift_grid: ShiftGrid::EverySample,
    };
    let engine = ThreadedEngine::new(threads);
    let (model, trace) = decompose_with_engine(&series, &cfg, &engine)?;

    formats::write_model(&args.out_model, &model, &args.input.display().to_string())?;
    if let Some(trace_path) = &args.out_trace {
        formats::write_trace(trace_path, &trace)?;
    }
    if let Some(dir) = &args.scalogram_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
        for (i, iteration) in trace.iterations.iter().enumerate() {
            let csv = dir.join(format!("scalogram-pass-{}.csv", i + 1));
            formats::write_scalogram_csv(&csv, &iteration.scalogram)?;
            let json = dir.join(format!("scalogram-pass-{}.json", i + 1));
            formats::write_scalogram_json(&json, &iteration.scalogram)?;
        }
    }

    println!("{:>3}  {:>12}  {:>12}  {:>14}", "#", "a", "b", "y_sat");
    for (i, w) in model.waves.iter().enumerate() {
        println!("{:>3}  {:>12}  {:>12}  {:>14}", i + 1, sig6(w.a), sig6(w.b), sig6(w.y_sat));
    }
    if !cli.quiet {
        println!(
            "wrote {} waves to {} ({} passes)",
            model.waves.len(),
            args.out_model.display(),
            trace.iterations.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_refine(cli: &Cli, args: &RefineArgs) -> Result<ExitCode, CliError> {
    let series = formats::read_series(&args.series)?;
    let m0 = formats::read_model(&args.model)?;

    // a model whose centers sit outside the series span probably belongs to
    // different data; warn but continue
    let (t_first, t_last) = (series.t[0], series.t[series.len() - 1]);
    if m0.waves.iter().any(|w| w.b < t_first || w.b > t_last) {
        eprintln!(
            "warning: model center outside the series span [{}, {}]",
            sig6(t_first),
            sig6(t_last)
        );
    }

    let cfg = RefineConfig {
        objective: match args.objective {
            ObjectiveArg::Minimax => Objective::Minimax,
            ObjectiveArg::LeastSquares => Objective::LeastSquares,
        },
        max_evaluations: args.max_evaluations,
        initial_step_fraction: args.step_fraction,
        restarts: args.restarts,
        seed: cli.seed,
    };
    let outcome = refine(&series, &m0, &cfg)?;

    formats::write_model(&args.out_model, &outcome.model, &args.model.display().to_string())?;
    if let Some(report_path) = &args.out_report {
        formats::write_report(
            report_path,
            &outcome.report,
            Some(outcome.converged),
            Some(outcome.evaluations),
        )?;
    }

    print_report(&outcome.report);
    if !cli.quiet {
        println!(
            "wrote refined model to {} ({} evaluations)",
            args.out_model.display(),
            outcome.evaluations
        );
    }
    if !outcome.converged {
        eprintln!("warning: evaluation budget exhausted before convergence");
        return Ok(ExitCode::from(EXIT_NONCONVERGED));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(cli: &Cli, args: &EvalArgs) -> Result<ExitCode, CliError> {
    let model = formats::read_model(&args.model)?;
    match &args.against {
        Some(series_path) => {
            let series = formats::read_series(series_path)?;
            let f: Vec<f64> = series.t.iter().map(|&t| model.eval(t)).collect();
            let residuals: Vec<f64> =
                series.y.iter().zip(&f).map(|(&y, &fv)| y - fv).collect();
            formats::write_eval_csv(&args.out, &series.t, &f, Some(&residuals))?;
            let max_abs = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
            if !cli.quiet {
                println!(
                    "wrote {} rows to {} (max |residual| {})",
                    series.len(),
                    args.out.display(),
                    sig6(max_abs)
                );
            }
        }
        None => {
            let sampled =
                sample_curve(|t| model.eval(t), args.range.from, args.range.to, args.range.step)?;
            formats::write_eval_csv(&args.out, &sampled.t, &sampled.y, None)?;
            if !cli.quiet {
                println!("wrote {} rows to {}", sampled.len(), args.out.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_metrics(cli: &Cli, args: &MetricsArgs) -> Result<ExitCode, CliError> {
    let series = formats::read_series(&args.series)?;
    let model = formats::read_model(&args.model)?;
    let report = fit_metrics(&series, &model)?;
    if let Some(out) = &args.out {
        formats::write_report(out, &report, None, None)?;
        if !cli.quiet {
            println!("wrote report to {}", out.display());
        }
    }
    print_report(&report);
    Ok(ExitCode::SUCCESS)
}

fn print_report(report: &logwave_core::refine::FitReport) {
    println!("max_abs_error {}", sig6(report.max_abs_error));
    println!("rmse          {}", sig6(report.rmse));
    match report.r_squared {
        Some(r2) => println!("r_squared     {}", sig6(r2)),
        None => println!("r_squared     undefined (constant series)"),
    }
}
