//! Report generation: JSON fit/regression documents, trace CSVs, SVG
//! figures, and the one-shot reproduction bundle that reruns every headline
//! analysis against the bundled dataset and compares it to the published
//! statistics.

pub mod params;
pub mod reference;
pub mod svg;

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dataset::{
    derive_growth_rates, load_dataset, MacroDataset, RateAnchor, RateMode, YearValueSeries,
};
use crate::dynamics::{simulate_compact, CompactModelParams, Integrator};
use crate::error::{Error, Result};
use crate::fitting::{fit_trend, goodness_of_fit, Convention, KMode, TrendFit};
use crate::stats::{
    ols, p_value, pearson, poly_fit, surplus_population_proportionality, RegressionResult,
};
use crate::trend::eval_trend;
use reference as refs;
use svg::Figure;

/// JSON document for one trend fit.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub series_id: String,
    pub k_mode: String,
    pub convention: String,
    #[serde(rename = "C")]
    pub c: f64,
    pub t0: f64,
    pub k: f64,
    pub r: f64,
    pub r2: f64,
    pub sse: f64,
    pub warnings: Vec<String>,
}

impl FitReport {
    pub fn new(series_id: &str, k_mode: KMode, fit: &TrendFit) -> Self {
        Self {
            series_id: series_id.to_string(),
            k_mode: match k_mode {
                KMode::Fixed(_) => "fixed".to_string(),
                KMode::Free => "free".to_string(),
            },
            convention: fit.convention.label().to_string(),
            c: fit.params.scale,
            t0: fit.params.singularity_year,
            k: fit.params.exponent,
            r: fit.r,
            r2: fit.r2,
            sse: fit.sse,
            warnings: fit.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegressionReport {
    pub name: String,
    #[serde(flatten)]
    pub result: RegressionResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub model: String,
    pub integrator: String,
    pub outcome: String,
    pub final_year: f64,
    pub final_population: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_gdp: Option<f64>,
    pub csv_file: String,
}

/// One comparison against a published statistic.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub actual: String,
    pub target: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool_version: String,
    pub datasets: Vec<FileDigest>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle {
    pub fits: Vec<FitReport>,
    pub regressions: Vec<RegressionReport>,
    pub traces: Vec<TraceSummary>,
    pub checks: Vec<CheckRow>,
    pub figures: Vec<String>,
    pub provenance: Provenance,
}

impl ReportBundle {
    pub fn passes(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub struct ReproduceOutcome {
    pub bundle: ReportBundle,
    pub report_path: PathBuf,
}

/// Write-to-temp-then-rename so readers never observe partial files.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(|source| Error::Io {
        path: tmp.clone(),
        source,
    })?;
    std::fs::rename(&tmp, path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn check(name: impl Into<String>, actual: String, target: String, pass: bool) -> CheckRow {
    CheckRow {
        name: name.into(),
        actual,
        target,
        pass,
    }
}

fn save_figure(
    out_dir: &Path,
    name: &str,
    fig: &Figure,
    bundle: &mut ReportBundle,
) -> Result<()> {
    let file = format!("{name}.svg");
    atomic_write(&out_dir.join(&file), fig.render().as_bytes())?;
    bundle.figures.push(file);
    Ok(())
}

fn curve_line(fit: &TrendFit, from: f64, to: f64) -> Vec<(f64, f64)> {
    let n = 240;
    let step = (to - from) / n as f64;
    (0..=n)
        .filter_map(|i| {
            let t = from + i as f64 * step;
            eval_trend(&fit.params, t).ok().map(|v| (t, v))
        })
        .collect()
}

struct FitStep<'a> {
    series_id: &'a str,
    label: &'a str,
    k: f64,
    convention: Convention,
    figure_name: &'a str,
    figure_title: &'a str,
    y_label: &'a str,
}

/// Runs the full reproduction: the four trend fits, the growth-rate
/// correlation and regressions, the proportionality and curvature tests,
/// and the compact-model simulation; emits figures, trace CSVs, and
/// `report.json` under `out_dir`. Sub-step failures are recorded as failed
/// checks and the remaining steps still run.
pub fn run_reproduce(data_dir: &Path, out_dir: &Path) -> Result<ReproduceOutcome> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let bench_path = data_dir.join(refs::BENCHMARK_FILE);
    let ext_path = data_dir.join(refs::EXTENDED_FILE);
    let bench = load_dataset(&bench_path, refs::SUBSISTENCE_M)?;
    let extended = load_dataset(&ext_path, refs::SUBSISTENCE_M)?;

    let mut bundle = ReportBundle {
        fits: Vec::new(),
        regressions: Vec::new(),
        traces: Vec::new(),
        checks: Vec::new(),
        figures: Vec::new(),
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            datasets: vec![
                FileDigest {
                    file: refs::BENCHMARK_FILE.to_string(),
                    sha256: sha256_hex(&bench_path)?,
                },
                FileDigest {
                    file: refs::EXTENDED_FILE.to_string(),
                    sha256: sha256_hex(&ext_path)?,
                },
            ],
        },
    };

    // --- trend fits on the 1..=1973 range of the extended series ---
    let fit_pop = extended
        .population()
        .subrange(f64::NEG_INFINITY, refs::FIT_RANGE_END);
    let fit_gdp = extended
        .gdp()
        .subrange(f64::NEG_INFINITY, refs::FIT_RANGE_END);

    let steps = [
        FitStep {
            series_id: "population",
            label: "population simple-hyperbola fit",
            k: 1.0,
            convention: Convention::IntegerT0,
            figure_name: "population_simple_trend",
            figure_title: "World population and the fitted simple hyperbola",
            y_label: "population, millions",
        },
        FitStep {
            series_id: "gdp",
            label: "GDP quadratic-hyperbola fit",
            k: 2.0,
            convention: Convention::ContinuousT0,
            figure_name: "gdp_quadratic_trend",
            figure_title: "World GDP and the fitted quadratic hyperbola",
            y_label: "GDP, billions of 1990 dollars",
        },
        FitStep {
            series_id: "gdp",
            label: "GDP simple-hyperbola fit",
            k: 1.0,
            convention: Convention::IntegerT0,
            figure_name: "gdp_simple_trend",
            figure_title: "World GDP and the fitted simple hyperbola",
            y_label: "GDP, billions of 1990 dollars",
        },
        FitStep {
            series_id: "population",
            label: "population quadratic-hyperbola fit",
            k: 2.0,
            convention: Convention::IntegerT0,
            figure_name: "population_quadratic_trend",
            figure_title: "World population and the fitted quadratic hyperbola",
            y_label: "population, millions",
        },
    ];

    let mut fit_r2: Vec<Option<f64>> = vec![None; steps.len()];
    for (i, step) in steps.iter().enumerate() {
        let series = if step.series_id == "population" {
            &fit_pop
        } else {
            &fit_gdp
        };
        match fit_trend(series, KMode::Fixed(step.k), step.convention) {
            Ok(fit) => {
                bundle
                    .fits
                    .push(FitReport::new(step.series_id, KMode::Fixed(step.k), &fit));
                fit_r2[i] = Some(fit.r2);
                push_fit_checks(i, step.label, &fit, &mut bundle);
                let fig = Figure::new(step.figure_title, "year", step.y_label)
                    .points("observed", series.points())
                    .line(
                        "fitted",
                        &curve_line(&fit, series.first_year().unwrap(), refs::FIT_RANGE_END),
                    );
                save_figure(out_dir, step.figure_name, &fig, &mut bundle)?;
            }
            Err(e) => bundle.checks.push(check(
                step.label,
                format!("error: {e}"),
                "fit completes".into(),
                false,
            )),
        }
    }

    if let (Some(p1), Some(g2), Some(g1), Some(p2)) =
        (fit_r2[0], fit_r2[1], fit_r2[2], fit_r2[3])
    {
        bundle.checks.push(check(
            "fit ordering: quadratic beats simple on GDP",
            format!("{g2:.5} vs {g1:.5}"),
            "strictly greater".into(),
            g2 > g1,
        ));
        bundle.checks.push(check(
            "fit ordering: simple beats quadratic on population",
            format!("{p1:.5} vs {p2:.5}"),
            "strictly greater".into(),
            p1 > p2,
        ));
    }

    if let Err(e) = growth_vs_surplus_step(&bench, out_dir, &mut bundle) {
        bundle.checks.push(check(
            "population growth rate vs surplus",
            format!("error: {e}"),
            "analysis completes".into(),
            false,
        ));
    }
    if let Err(e) = rate_regression_step(&bench, out_dir, &mut bundle) {
        bundle.checks.push(check(
            "population-rate vs surplus-rate regression",
            format!("error: {e}"),
            "analysis completes".into(),
            false,
        ));
    }
    proportionality_steps(&extended, out_dir, &mut bundle)?;
    if let Err(e) = curvature_step(&bench, out_dir, &mut bundle) {
        bundle.checks.push(check(
            "population-GDP curvature",
            format!("error: {e}"),
            "analysis completes".into(),
            false,
        ));
    }

    for (label, a) in [
        ("published", refs::COMPACT_PUBLISHED_A),
        ("calibrated", refs::COMPACT_CALIBRATED_A),
    ] {
        if let Err(e) = compact_step(label, a, &bench, out_dir, &mut bundle) {
            bundle.checks.push(check(
                format!("compact model ({label} a)"),
                format!("error: {e}"),
                "simulation runs".into(),
                false,
            ));
        }
    }

    let report_path = out_dir.join("report.json");
    let json = serde_json::to_string_pretty(&bundle)
        .map_err(|e| Error::validation(format!("report serialization failed: {e}")))?;
    atomic_write(&report_path, json.as_bytes())?;

    Ok(ReproduceOutcome {
        bundle,
        report_path,
    })
}

fn push_fit_checks(step_index: usize, label: &str, fit: &TrendFit, bundle: &mut ReportBundle) {
    let t0 = fit.params.singularity_year;
    match step_index {
        0 => {
            bundle.checks.push(check(
                format!("{label}: singularity year"),
                format!("{t0}"),
                format!(
                    "{} with window [{}, {}]",
                    refs::POP_K1_T0,
                    refs::POP_K1_T0_WINDOW.0,
                    refs::POP_K1_T0_WINDOW.1
                ),
                refs::in_window(t0, refs::POP_K1_T0_WINDOW),
            ));
            bundle.checks.push(check(
                format!("{label}: scale constant"),
                format!("{:.2}", fit.params.scale),
                format!(
                    "{} ± {}%",
                    refs::POP_K1_SCALE,
                    100.0 * refs::POP_K1_SCALE_RTOL
                ),
                refs::within(fit.params.scale, refs::POP_K1_SCALE, refs::POP_K1_SCALE_RTOL),
            ));
            bundle.checks.push(check(
                format!("{label}: r^2"),
                format!("{:.5}", fit.r2),
                format!("{} (>= {})", refs::POP_K1_R2, refs::POP_K1_R2_MIN),
                fit.r2 >= refs::POP_K1_R2_MIN,
            ));
        }
        1 => {
            bundle.checks.push(check(
                format!("{label}: singularity year"),
                format!("{t0:.2}"),
                format!(
                    "{} with window [{}, {}]",
                    refs::GDP_K2_T0,
                    refs::GDP_K2_T0_WINDOW.0,
                    refs::GDP_K2_T0_WINDOW.1
                ),
                refs::in_window(t0, refs::GDP_K2_T0_WINDOW),
            ));
            bundle.checks.push(check(
                format!("{label}: scale constant"),
                format!("{:.1}", fit.params.scale),
                format!(
                    "{} ± {}%",
                    refs::GDP_K2_SCALE,
                    100.0 * refs::GDP_K2_SCALE_RTOL
                ),
                refs::within(fit.params.scale, refs::GDP_K2_SCALE, refs::GDP_K2_SCALE_RTOL),
            ));
            bundle.checks.push(check(
                format!("{label}: r^2"),
                format!("{:.5}", fit.r2),
                format!("{} (>= {})", refs::GDP_K2_R2, refs::GDP_K2_R2_MIN),
                fit.r2 >= refs::GDP_K2_R2_MIN,
            ));
        }
        2 => bundle.checks.push(check(
            format!("{label}: r^2"),
            format!("{:.5}", fit.r2),
            format!("{} ± {}", refs::GDP_K1_R2, refs::GDP_K1_R2_TOL),
            (fit.r2 - refs::GDP_K1_R2).abs() <= refs::GDP_K1_R2_TOL,
        )),
        _ => bundle.checks.push(check(
            format!("{label}: r^2"),
            format!("{:.5}", fit.r2),
            format!("{} ± {}", refs::POP_K2_R2, refs::POP_K2_R2_TOL),
            (fit.r2 - refs::POP_K2_R2).abs() <= refs::POP_K2_R2_TOL,
        )),
    }
}

fn growth_vs_surplus_step(
    bench: &MacroDataset,
    out_dir: &Path,
    bundle: &mut ReportBundle,
) -> Result<()> {
    let rates = derive_growth_rates(bench.population(), RateMode::Simple, RateAnchor::Start)?;
    let surplus = bench.surplus_series();
    let levels: Vec<f64> = surplus.values().collect();
    let rel = rates.rel_rates();
    let x = &levels[..rel.len()]; // start-anchored surplus per interval
    let r = pearson(x, &rel)?;
    let dof = rel.len() - 2;
    let t = r * (dof as f64).sqrt() / (1.0 - r * r).sqrt();
    let p = p_value(t, dof)?;
    bundle.checks.push(check(
        "population growth rate vs surplus: correlation",
        format!("{r:.4}"),
        format!(
            "{} (>= {})",
            refs::GROWTH_SURPLUS_R,
            refs::GROWTH_SURPLUS_R_MIN
        ),
        r >= refs::GROWTH_SURPLUS_R_MIN,
    ));
    bundle.checks.push(check(
        "population growth rate vs surplus: significance",
        format!("{p:.2e}"),
        format!("order of {:.0e}", refs::GROWTH_SURPLUS_P),
        (refs::GROWTH_SURPLUS_P / 10.0..=refs::GROWTH_SURPLUS_P * 10.0).contains(&p),
    ));

    let pts: Vec<(f64, f64)> = x.iter().copied().zip(rel.iter().copied()).collect();
    let line = ols(x, &rel, false)?;
    let hi = x.iter().cloned().fold(f64::MIN, f64::max);
    let line_of = |v: f64| line.intercept.unwrap_or(0.0) + line.slope * v;
    let fig = Figure::new(
        "Relative population growth vs per-capita surplus",
        "surplus, dollars per person",
        "relative growth rate, 1/year",
    )
    .points("interval estimates", &pts)
    .line("regression", &[(0.0, line_of(0.0)), (hi, line_of(hi))]);
    save_figure(out_dir, "growth_rate_vs_surplus", &fig, bundle)
}

fn rate_regression_step(
    bench: &MacroDataset,
    out_dir: &Path,
    bundle: &mut ReportBundle,
) -> Result<()> {
    let pop_rates = derive_growth_rates(bench.population(), RateMode::Simple, RateAnchor::Start)?;
    let surplus_rates =
        derive_growth_rates(&bench.surplus_series(), RateMode::Simple, RateAnchor::Start)?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (p, s) in pop_rates
        .intervals
        .iter()
        .zip(&surplus_rates.intervals)
        .filter(|(p, _)| p.t_end <= refs::RATE_REGRESSION_END)
    {
        x.push(s.abs_rate);
        y.push(p.abs_rate);
    }

    let origin = ols(&x, &y, true)?;
    let with_const = ols(&x, &y, false)?;
    bundle.checks.push(check(
        "population-rate vs surplus-rate (through origin): slope",
        format!("{:.4}", origin.slope),
        format!(
            "{} with window [{}, {}]",
            refs::RATE_SLOPE_ORIGIN,
            refs::RATE_SLOPE_WINDOW.0,
            refs::RATE_SLOPE_WINDOW.1
        ),
        refs::in_window(origin.slope, refs::RATE_SLOPE_WINDOW),
    ));
    bundle.checks.push(check(
        "population-rate vs surplus-rate (through origin): r^2",
        format!("{:.4}", origin.r2),
        format!("{} (>= {})", refs::RATE_R2_ORIGIN, refs::RATE_R2_ORIGIN_MIN),
        origin.r2 >= refs::RATE_R2_ORIGIN_MIN,
    ));
    bundle.checks.push(check(
        "population-rate vs surplus-rate (through origin): slope significance",
        format!("{:.2e}", origin.p_slope),
        format!("< {}", refs::RATE_SLOPE_P_MAX),
        origin.p_slope < refs::RATE_SLOPE_P_MAX,
    ));
    let t_icept = with_const.t_intercept.unwrap_or(f64::INFINITY).abs();
    bundle.checks.push(check(
        "population-rate vs surplus-rate (with constant): intercept insignificant",
        format!("|t| = {t_icept:.3}"),
        format!(
            "|t| around {} (< {})",
            refs::RATE_INTERCEPT_T,
            refs::RATE_INTERCEPT_T_MAX
        ),
        t_icept < refs::RATE_INTERCEPT_T_MAX,
    ));
    bundle.checks.push(check(
        "population-rate vs surplus-rate (with constant): slope significance",
        format!("{:.2e}", with_const.p_slope),
        format!("< {}", refs::RATE_SLOPE_P_MAX),
        with_const.p_slope < refs::RATE_SLOPE_P_MAX,
    ));
    bundle.regressions.push(RegressionReport {
        name: "population_rate_vs_surplus_rate_through_origin".into(),
        result: origin.clone(),
    });
    bundle.regressions.push(RegressionReport {
        name: "population_rate_vs_surplus_rate_with_constant".into(),
        result: with_const,
    });

    let pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    let hi = x.iter().cloned().fold(f64::MIN, f64::max);
    let fig = Figure::new(
        "Population growth rate vs surplus growth rate",
        "surplus growth, dollars/person/year^2",
        "population growth, millions/year",
    )
    .points("interval estimates", &pts)
    .line("through-origin fit", &[(0.0, 0.0), (hi, origin.slope * hi)]);
    save_figure(out_dir, "population_rate_vs_surplus_rate", &fig, bundle)
}

fn proportionality_steps(
    extended: &MacroDataset,
    out_dir: &Path,
    bundle: &mut ReportBundle,
) -> Result<()> {
    for (label, range, r2_pub, r2_min, p_max) in [
        (
            "surplus vs population 1820-1958",
            refs::PROPORTIONALITY_EARLY_RANGE,
            refs::PROPORTIONALITY_EARLY_R2,
            refs::PROPORTIONALITY_EARLY_R2_MIN,
            refs::PROPORTIONALITY_EARLY_P_MAX,
        ),
        (
            "surplus vs population 1-2002",
            refs::PROPORTIONALITY_FULL_RANGE,
            refs::PROPORTIONALITY_FULL_R2,
            refs::PROPORTIONALITY_FULL_R2_MIN,
            refs::PROPORTIONALITY_FULL_P_MAX,
        ),
    ] {
        match surplus_population_proportionality(extended, range.0, range.1) {
            Ok(reg) => {
                bundle.checks.push(check(
                    format!("{label}: r^2"),
                    format!("{:.5}", reg.r2),
                    format!("{r2_pub} (>= {r2_min})"),
                    reg.r2 >= r2_min,
                ));
                bundle.checks.push(check(
                    format!("{label}: significance"),
                    format!("{:.2e}", reg.p_slope),
                    format!("< {p_max:.0e}"),
                    reg.p_slope < p_max,
                ));
                let sub = extended.subrange(range.0, range.1)?;
                let pts: Vec<(f64, f64)> = sub
                    .population()
                    .values()
                    .zip(sub.surplus_series().values())
                    .collect();
                let lo = pts.iter().map(|p| p.0).fold(f64::MAX, f64::min);
                let hi = pts.iter().map(|p| p.0).fold(f64::MIN, f64::max);
                let line_of = |v: f64| reg.intercept.unwrap_or(0.0) + reg.slope * v;
                let fig = Figure::new(
                    "Per-capita surplus vs population",
                    "population, millions",
                    "surplus, dollars per person",
                )
                .points("observed", &pts)
                .line("regression", &[(lo, line_of(lo)), (hi, line_of(hi))]);
                let name = format!(
                    "surplus_vs_population_{}_{}",
                    range.0 as i64, range.1 as i64
                );
                save_figure(out_dir, &name, &fig, bundle)?;
                bundle.regressions.push(RegressionReport { name, result: reg });
            }
            Err(e) => bundle.checks.push(check(
                label,
                format!("skipped: {e}"),
                "analysis completes".into(),
                false,
            )),
        }
    }
    Ok(())
}

fn curvature_step(bench: &MacroDataset, out_dir: &Path, bundle: &mut ReportBundle) -> Result<()> {
    let n: Vec<f64> = bench.population().values().collect();
    let g: Vec<f64> = bench.gdp().values().collect();
    let quad = poly_fit(&n, &g, 2)?;
    let lin = poly_fit(&n, &g, 1)?;
    bundle.checks.push(check(
        "population-GDP curvature: quadratic r^2",
        format!("{:.5}", quad.r2),
        format!(
            "{} (>= {})",
            refs::CURVATURE_QUADRATIC_R2,
            refs::CURVATURE_QUADRATIC_R2_MIN
        ),
        quad.r2 >= refs::CURVATURE_QUADRATIC_R2_MIN,
    ));
    bundle.checks.push(check(
        "population-GDP curvature: linear r^2",
        format!("{:.5}", lin.r2),
        format!(
            "{} ± {}",
            refs::CURVATURE_LINEAR_R2,
            refs::CURVATURE_LINEAR_R2_TOL
        ),
        (lin.r2 - refs::CURVATURE_LINEAR_R2).abs() <= refs::CURVATURE_LINEAR_R2_TOL,
    ));
    let pts: Vec<(f64, f64)> = n.iter().copied().zip(g.iter().copied()).collect();
    let lo = n.iter().cloned().fold(f64::MAX, f64::min);
    let hi = n.iter().cloned().fold(f64::MIN, f64::max);
    let dense = |fit: &crate::stats::PolyFit| -> Vec<(f64, f64)> {
        (0..=200)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / 200.0;
                (x, fit.eval(x))
            })
            .collect()
    };
    let fig = Figure::new(
        "World GDP vs population: curve estimation",
        "population, millions",
        "GDP, billions of 1990 dollars",
    )
    .points("observed", &pts)
    .line("quadratic fit", &dense(&quad))
    .line("linear fit", &dense(&lin));
    save_figure(out_dir, "population_gdp_curvature", &fig, bundle)
}

fn compact_step(
    label: &str,
    a: f64,
    bench: &MacroDataset,
    out_dir: &Path,
    bundle: &mut ReportBundle,
) -> Result<()> {
    let params = CompactModelParams {
        a,
        ..CompactModelParams::published_constants()
    };
    let trace = simulate_compact(&params, Integrator::euler_annual())?;
    let csv_file = format!("compact_model_{label}.csv");
    atomic_write(&out_dir.join(&csv_file), trace.to_csv(1).as_bytes())?;
    bundle.traces.push(TraceSummary {
        model: format!("compact ({label} a)"),
        integrator: trace.integrator.to_string(),
        outcome: trace.outcome.to_string(),
        final_year: *trace.years.last().unwrap_or(&f64::NAN),
        final_population: *trace.population.last().unwrap_or(&f64::NAN),
        final_gdp: trace.gdp.as_ref().and_then(|g| g.last().copied()),
        csv_file,
    });

    let name = |what: &str| format!("compact model ({label} a = {a}): {what}");
    if !trace.outcome.is_completed() {
        bundle.checks.push(check(
            name("completes 1-1973"),
            trace.outcome.to_string(),
            "completed".into(),
            false,
        ));
        for what in ["GDP r^2", "population r^2"] {
            bundle.checks.push(check(
                name(what),
                format!("unavailable ({})", trace.outcome),
                "computable".into(),
                false,
            ));
        }
        return Ok(());
    }

    let years = bench.years();
    let pred_g = YearValueSeries::new(
        years
            .iter()
            .map(|&y| (y, trace.gdp_at(y).unwrap_or(f64::NAN)))
            .collect(),
    )?;
    let pred_n = YearValueSeries::new(
        years
            .iter()
            .map(|&y| (y, trace.population_at(y).unwrap_or(f64::NAN)))
            .collect(),
    )?;
    let g_fit = goodness_of_fit(bench.gdp(), &pred_g)?;
    let n_fit = goodness_of_fit(bench.population(), &pred_n)?;
    bundle.checks.push(check(
        name("GDP r^2"),
        format!("{:.5}", g_fit.r2),
        format!("{} (>= {})", refs::COMPACT_GDP_R2, refs::COMPACT_GDP_R2_MIN),
        g_fit.r2 >= refs::COMPACT_GDP_R2_MIN,
    ));
    bundle.checks.push(check(
        name("population r^2"),
        format!("{:.5}", n_fit.r2),
        format!("{} (>= {})", refs::COMPACT_POP_R2, refs::COMPACT_POP_R2_MIN),
        n_fit.r2 >= refs::COMPACT_POP_R2_MIN,
    ));

    let model_curve: Vec<(f64, f64)> = trace
        .years
        .iter()
        .copied()
        .zip(trace.gdp.as_ref().expect("compact trace has gdp").iter().copied())
        .collect();
    let fig = Figure::new(
        &format!("Compact model vs observed world GDP ({label} a)"),
        "year",
        "GDP, billions of 1990 dollars",
    )
    .points("observed", bench.gdp().points())
    .line("model", &model_curve);
    save_figure(out_dir, &format!("compact_model_gdp_{label}"), &fig, bundle)
}
