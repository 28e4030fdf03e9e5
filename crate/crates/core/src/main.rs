//! Command-line surface: `fit`, `simulate`, `stats`, and `reproduce`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use macrodyn::dataset::{derive_growth_rates, load_dataset, MacroDataset, RateAnchor, RateMode};
use macrodyn::dynamics::{
    simulate_coalition, simulate_compact, simulate_exponential_tech, simulate_kuznetsian,
    simulate_logistic, Integrator, SimulationTrace,
};
use macrodyn::error::{Error, Result};
use macrodyn::fitting::{fit_trend_with, Convention, FitOptions, KMode, Objective};
use macrodyn::report::params::ParamFile;
use macrodyn::report::reference;
use macrodyn::report::{atomic_write, run_reproduce, FitReport};
use macrodyn::stats::{ols, p_value, pearson, poly_fit, surplus_population_proportionality};

const DATA_DIR_ENV: &str = "MACRODYN_DATA_DIR";

#[derive(Parser)]
#[command(
    name = "macrodyn",
    version,
    about = "Fits, simulates, and statistically tests long-run world population and GDP growth models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a blow-up trend to the population or GDP series of a dataset.
    Fit(FitArgs),
    /// Run one of the dynamical systems from a key=value params file.
    Simulate(SimulateArgs),
    /// Regression and correlation analyses on a dataset.
    Stats(StatsArgs),
    /// Rerun every headline analysis against the bundled dataset and
    /// compare with the published statistics.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesArg {
    Population,
    Gdp,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Integer,
    Continuous,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    /// Maximize the fitted-observed correlation (the published convention).
    Correlation,
    /// Minimize squared error in natural units.
    Sse,
    /// Minimize squared error of logs.
    LogSse,
}

#[derive(Args)]
struct FitArgs {
    /// Input dataset CSV (falls back to $MACRODYN_DATA_DIR/<file>).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    series: SeriesArg,
    /// Trend exponent: 1, 2, any positive number, or `free`.
    #[arg(long, default_value = "1")]
    k: String,
    #[arg(long, value_enum, default_value = "integer")]
    convention: ConventionArg,
    #[arg(long, value_enum, default_value = "correlation")]
    objective: ObjectiveArg,
    /// Restrict to years >= this.
    #[arg(long)]
    from_year: Option<f64>,
    /// Restrict to years <= this.
    #[arg(long)]
    to_year: Option<f64>,
    /// Subsistence threshold used for dataset validation.
    #[arg(long, default_value_t = reference::SUBSISTENCE_M)]
    m: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Compact,
    Kuznetsian,
    Exptech,
    Logistic,
    Coalition,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegratorArg {
    Euler,
    Rk4,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// key=value parameter file; `#` starts a comment.
    #[arg(long)]
    params: PathBuf,
    /// Defaults to the annual Euler scheme for the compact model and RK4
    /// for everything else.
    #[arg(long, value_enum)]
    integrator: Option<IntegratorArg>,
    /// Integration step in years; must divide one year evenly.
    #[arg(long)]
    step: Option<f64>,
    /// Keep every n-th stored year in the CSV.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Write the trace CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalysisArg {
    /// Correlation between relative population growth and surplus level.
    RateCorrelation,
    /// Regression of absolute population growth on absolute surplus growth.
    RateRegression,
    /// Regression of surplus level on population level.
    Proportionality,
    /// Polynomial fit of GDP on population.
    Curvature,
}

#[derive(Clone, Copy, ValueEnum)]
enum RateModeArg {
    Simple,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnchorArg {
    Start,
    Midpoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    analysis: AnalysisArg,
    #[arg(long, value_enum, default_value = "simple")]
    mode: RateModeArg,
    #[arg(long, value_enum, default_value = "start")]
    anchor: AnchorArg,
    #[arg(long, default_value_t = false)]
    through_origin: bool,
    #[arg(long)]
    from_year: Option<f64>,
    #[arg(long)]
    to_year: Option<f64>,
    /// Polynomial degree for the curvature analysis.
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long, default_value_t = reference::SUBSISTENCE_M)]
    m: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Directory holding the bundled dataset CSVs
    /// (default: $MACRODYN_DATA_DIR, then ./data).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output directory for report.json, figures, and traces.
    #[arg(long, default_value = "reproduction")]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Reproduce(args) => cmd_reproduce(args),
    }
}

/// Resolve a data path, falling back to $MACRODYN_DATA_DIR/<path>.
fn resolve_data(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
        let candidate = Path::new(&dir).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => atomic_write(path, content.as_bytes()),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn cmd_fit(args: FitArgs) -> Result<u8> {
    let dataset = load_dataset(resolve_data(&args.data), args.m)?;
    let series = match args.series {
        SeriesArg::Population => dataset.population().clone(),
        SeriesArg::Gdp => dataset.gdp().clone(),
    };
    let series = series.subrange(
        args.from_year.unwrap_or(f64::NEG_INFINITY),
        args.to_year.unwrap_or(f64::INFINITY),
    );
    let k_mode = match args.k.as_str() {
        "free" => KMode::Free,
        raw => KMode::Fixed(
            raw.parse::<f64>()
                .map_err(|_| Error::params("k", format!("expected a number or 'free', got '{raw}'")))?,
        ),
    };
    let options = FitOptions::new(
        k_mode,
        match args.convention {
            ConventionArg::Integer => Convention::IntegerT0,
            ConventionArg::Continuous => Convention::ContinuousT0,
        },
    )
    .with_objective(match args.objective {
        ObjectiveArg::Correlation => Objective::Correlation,
        ObjectiveArg::Sse => Objective::Sse,
        ObjectiveArg::LogSse => Objective::LogSse,
    });
    let fit = fit_trend_with(&series, &options)?;
    let report = FitReport::new(
        match args.series {
            SeriesArg::Population => "population",
            SeriesArg::Gdp => "gdp",
        },
        k_mode,
        &fit,
    );
    emit(&args.out, &to_json(&report)?)?;
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8> {
    let params = ParamFile::load(&args.params)?;
    let default_integrator = match args.model {
        ModelArg::Compact => Integrator::euler_annual(),
        _ => Integrator::rk4_default(),
    };
    let integrator = match (args.integrator, args.step) {
        (None, None) => default_integrator,
        (choice, step) => {
            let step = step.unwrap_or(match choice {
                Some(IntegratorArg::Euler) | None => 1.0,
                Some(IntegratorArg::Rk4) => 0.25,
            });
            match choice {
                Some(IntegratorArg::Rk4) => Integrator::Rk4 { step },
                Some(IntegratorArg::Euler) => Integrator::Euler { step },
                None => match default_integrator {
                    Integrator::Euler { .. } => Integrator::Euler { step },
                    Integrator::Rk4 { .. } => Integrator::Rk4 { step },
                },
            }
        }
    };

    let trace: SimulationTrace = match args.model {
        ModelArg::Compact => simulate_compact(&params.compact_model()?, integrator)?,
        ModelArg::Kuznetsian => {
            let (t0, t1) = params.span()?;
            simulate_kuznetsian(&params.kremer_model()?, t0, t1, integrator)?
        }
        ModelArg::Exptech => {
            let (t0, t1) = params.span()?;
            simulate_exponential_tech(&params.kremer_model()?, t0, t1, integrator)?
        }
        ModelArg::Logistic => {
            let (t0, t1) = params.span()?;
            simulate_logistic(
                params.f64("a1")?,
                params.f64("a2")?,
                params.f64("b")?,
                params.f64("n0")?,
                t0,
                t1,
                integrator,
            )?
        }
        ModelArg::Coalition => {
            let (t0, t1) = params.span()?;
            simulate_coalition(
                params.f64("a0")?,
                params.f64("k")?,
                params.f64("n0")?,
                t0,
                t1,
                integrator,
            )?
        }
    };

    let csv = trace.to_csv(args.stride);
    match &args.out {
        Some(path) => atomic_write(path, csv.as_bytes())?,
        None => print!("{csv}"),
    }

    let mut summary = format!(
        "outcome={} integrator={} final_year={} final_N={}",
        trace.outcome,
        trace.integrator,
        trace.years.last().unwrap_or(&f64::NAN),
        trace.population.last().unwrap_or(&f64::NAN),
    );
    if let (Some(s), Some(g)) = (&trace.surplus, &trace.gdp) {
        summary.push_str(&format!(
            " final_S={} final_G={}",
            s.last().unwrap_or(&f64::NAN),
            g.last().unwrap_or(&f64::NAN)
        ));
    }
    eprintln!("{summary}");

    Ok(if trace.outcome.is_completed() { 0 } else { 6 })
}

#[derive(Serialize)]
struct CorrelationReport {
    r: f64,
    t: f64,
    p: f64,
    n: usize,
}

#[derive(Serialize)]
struct CurvatureReport {
    degree: usize,
    coefficients: Vec<f64>,
    r2: f64,
}

fn cmd_stats(args: StatsArgs) -> Result<u8> {
    let dataset = load_dataset(resolve_data(&args.data), args.m)?;
    let lo = args.from_year.unwrap_or(f64::NEG_INFINITY);
    let hi = args.to_year.unwrap_or(f64::INFINITY);
    let sub: MacroDataset = dataset.subrange(lo, hi)?;
    let mode = match args.mode {
        RateModeArg::Simple => RateMode::Simple,
        RateModeArg::Log => RateMode::Log,
    };
    let anchor = match args.anchor {
        AnchorArg::Start => RateAnchor::Start,
        AnchorArg::Midpoint => RateAnchor::Midpoint,
    };

    let json = match args.analysis {
        AnalysisArg::RateCorrelation => {
            let pop_rates = derive_growth_rates(sub.population(), mode, anchor)?;
            let surplus_rates = derive_growth_rates(&sub.surplus_series(), mode, anchor)?;
            let rel = pop_rates.rel_rates();
            let levels = surplus_rates.anchor_levels();
            let r = pearson(&levels, &rel)?;
            let dof = rel.len() - 2;
            let t = r * (dof as f64).sqrt() / (1.0 - r * r).sqrt();
            to_json(&CorrelationReport {
                r,
                t,
                p: p_value(t, dof)?,
                n: rel.len(),
            })?
        }
        AnalysisArg::RateRegression => {
            let pop_rates = derive_growth_rates(sub.population(), mode, anchor)?;
            let surplus_rates = derive_growth_rates(&sub.surplus_series(), mode, anchor)?;
            let reg = ols(
                &surplus_rates.abs_rates(),
                &pop_rates.abs_rates(),
                args.through_origin,
            )?;
            to_json(&reg)?
        }
        AnalysisArg::Proportionality => {
            let reg = surplus_population_proportionality(&dataset, lo.max(f64::MIN), hi)?;
            to_json(&reg)?
        }
        AnalysisArg::Curvature => {
            let n: Vec<f64> = sub.population().values().collect();
            let g: Vec<f64> = sub.gdp().values().collect();
            let fit = poly_fit(&n, &g, args.degree)?;
            to_json(&CurvatureReport {
                degree: args.degree,
                coefficients: fit.coefficients,
                r2: fit.r2,
            })?
        }
    };

    let content = match args.format {
        FormatArg::Json => json,
        FormatArg::Csv => json_to_csv(&json)?,
    };
    emit(&args.out, &content)?;
    Ok(0)
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<u8> {
    let data_dir = args
        .data
        .or_else(|| std::env::var(DATA_DIR_ENV).ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"));
    let outcome = run_reproduce(&data_dir, &args.out)?;

    for row in &outcome.bundle.checks {
        println!(
            "[{}] {}: {} (target: {})",
            if row.pass { "PASS" } else { "FAIL" },
            row.name,
            row.actual,
            row.target
        );
    }
    println!(
        "{}/{} checks passed; report written to {}",
        outcome.bundle.passes(),
        outcome.bundle.checks.len(),
        outcome.report_path.display()
    );
    Ok(if outcome.bundle.all_passed() { 0 } else { 6 })
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::validation(format!("serialization failed: {e}")))
}

/// Flatten a JSON object into `key,value` CSV lines.
fn json_to_csv(json: &str) -> Result<String> {
    let value: serde_json::Value = serde_json::from_str(json)
        .map_err(|e| Error::validation(format!("internal JSON invalid: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::validation("CSV output requires a flat JSON object"))?;
    let mut out = String::from("key,value\n");
    for (k, v) in obj {
        out.push_str(&format!("{k},{v}\n"));
    }
    Ok(out)
}
