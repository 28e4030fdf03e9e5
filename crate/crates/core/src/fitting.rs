//! Least-squares estimation of blow-up trends from a time series.
//!
//! The model is linear in the scale constant, so the scale is solved in
//! closed form at every probe and only the singularity year (and optionally
//! the exponent) is searched: a coarse integer grid over the singularity
//! year followed by golden-section refinement.
//!
//! Three objectives are available. `Correlation` (the default) picks the
//! singularity year maximizing the correlation between fitted and observed
//! values — the convention behind the published fit statistics this crate
//! reproduces — while `Sse` and `LogSse` minimize squared error in natural
//! and log space.

use crate::dataset::YearValueSeries;
use crate::error::{Error, Result};
use crate::trend::TrendParams;

/// Exponent handling during a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KMode {
    Fixed(f64),
    Free,
}

/// Whether the fitted singularity year is reported as the best whole year or
/// refined continuously.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    ContinuousT0,
    IntegerT0,
}

impl Convention {
    pub fn label(self) -> &'static str {
        match self {
            Convention::ContinuousT0 => "continuous_t0",
            Convention::IntegerT0 => "integer_t0",
        }
    }
}

/// Outer-search objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Maximize Pearson correlation between fitted and observed values.
    #[default]
    Correlation,
    /// Minimize unweighted squared error in natural units.
    Sse,
    /// Minimize squared error of log values.
    LogSse,
}

impl Objective {
    pub fn label(self) -> &'static str {
        match self {
            Objective::Correlation => "correlation",
            Objective::Sse => "sse",
            Objective::LogSse => "log_sse",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub k: KMode,
    pub convention: Convention,
    pub objective: Objective,
    /// Search cap: singularity year is sought in
    /// (max_year, max_year + horizon_years].
    pub horizon_years: f64,
}

impl FitOptions {
    pub fn new(k: KMode, convention: Convention) -> Self {
        Self {
            k,
            convention,
            objective: Objective::default(),
            horizon_years: 200.0,
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }
}

/// A completed trend fit with its diagnostics.
///
/// `r` is the Pearson correlation between fitted and observed values and
/// `r2 = r²` — the fit-quality statistic quoted by the published estimates
/// this crate reproduces. `sse`/`sst` are raw sums of squares against the
/// reported curve, so `1 − sse/sst` is also derivable.
#[derive(Debug, Clone)]
pub struct TrendFit {
    pub params: TrendParams,
    pub convention: Convention,
    pub objective: Objective,
    pub r: f64,
    pub r2: f64,
    pub sse: f64,
    pub sst: f64,
    pub residuals: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Least-squares scale for a fixed singularity year and exponent:
/// argmin over C of Σ (vᵢ − C·uᵢ)² with uᵢ = (t0 − tᵢ)^(−k),
/// i.e. C = Σ vᵢuᵢ / Σ uᵢ².
pub fn solve_scale_given_t0(series: &YearValueSeries, t0: f64, k: f64) -> Result<f64> {
    let t_max = series
        .last_year()
        .ok_or_else(|| Error::validation("empty series"))?;
    if t0 <= t_max {
        return Err(Error::domain(format!(
            "singularity year {t0} must exceed the last observation year {t_max}"
        )));
    }
    if !(k > 0.0) {
        return Err(Error::params("k", format!("must be positive, got {k}")));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &(t, v) in series.points() {
        let u = (t0 - t).powf(-k);
        num += v * u;
        den += u * u;
    }
    if den == 0.0 || !den.is_finite() {
        return Err(Error::domain("degenerate basis in scale solve"));
    }
    Ok(num / den)
}

/// Fit with the default objective. See [`fit_trend_with`].
pub fn fit_trend(series: &YearValueSeries, k: KMode, convention: Convention) -> Result<TrendFit> {
    fit_trend_with(series, &FitOptions::new(k, convention))
}

/// Full trend fit: searches the singularity year on an annual grid over
/// `(max_year, max_year + horizon]`, refines per the convention, and nests a
/// golden-section search over the exponent when it is free. Ties break
/// toward the smallest singularity year, then the smallest exponent.
pub fn fit_trend_with(series: &YearValueSeries, options: &FitOptions) -> Result<TrendFit> {
    if series.len() < 3 {
        return Err(Error::validation(format!(
            "trend fit needs at least 3 points, got {}",
            series.len()
        )));
    }
    if !series.all_positive() {
        return Err(Error::validation("trend fit requires positive values"));
    }
    if let KMode::Fixed(k) = options.k {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::params("k", format!("must be positive, got {k}")));
        }
    }
    let t_max = series.last_year().expect("non-empty");
    let horizon = options.horizon_years;
    if !(horizon >= 2.0) {
        return Err(Error::params("horizon_years", "must be at least 2"));
    }

    let score_at = |t0: f64| -> f64 {
        match options.k {
            KMode::Fixed(k) => score(series, t0, k, options.objective),
            KMode::Free => best_k_for(series, t0, options.objective).0,
        }
    };

    // Coarse integer grid.
    let steps = horizon as usize;
    let mut best: Option<(f64, f64)> = None; // (score, t0)
    for i in 1..=steps {
        let t0 = t_max + i as f64;
        let s = score_at(t0);
        if s.is_finite() && best.is_none_or(|(bs, _)| s < bs) {
            best = Some((s, t0));
        }
    }
    let (_, grid_t0) =
        best.ok_or_else(|| Error::Search("objective non-finite across the whole search bracket".into()))?;

    let mut warnings = Vec::new();
    if grid_t0 >= t_max + steps as f64 {
        warnings.push(format!(
            "singularity-year search hit the {horizon}-year horizon; the data may not be blow-up-shaped"
        ));
    }

    let t0 = match options.convention {
        Convention::IntegerT0 => grid_t0,
        Convention::ContinuousT0 => {
            let lo = (grid_t0 - 1.0).max(t_max + 1e-6);
            let hi = (grid_t0 + 1.0).min(t_max + horizon);
            golden_min(lo, hi, 1e-6, score_at)
        }
    };
    let k = match options.k {
        KMode::Fixed(k) => k,
        KMode::Free => best_k_for(series, t0, options.objective).1,
    };

    let scale = match options.objective {
        Objective::Correlation | Objective::Sse => solve_scale_given_t0(series, t0, k)?,
        Objective::LogSse => log_scale(series, t0, k),
    };
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::Search(format!(
            "scale solve produced {scale} at t0 = {t0}, k = {k}"
        )));
    }

    let params = TrendParams::new(scale, t0, k)?;
    let fitted: Vec<f64> = series
        .points()
        .iter()
        .map(|&(t, _)| scale * (t0 - t).powf(-k))
        .collect();
    let observed: Vec<f64> = series.values().collect();
    let r = corr(&fitted, &observed).ok_or_else(|| {
        Error::domain("correlation undefined: observed or fitted series has zero variance")
    })?;
    let mean_obs = observed.iter().sum::<f64>() / observed.len() as f64;
    let residuals: Vec<f64> = observed
        .iter()
        .zip(&fitted)
        .map(|(o, f)| o - f)
        .collect();
    let sse = residuals.iter().map(|e| e * e).sum();
    let sst = observed.iter().map(|o| (o - mean_obs).powi(2)).sum();

    Ok(TrendFit {
        params,
        convention: options.convention,
        objective: options.objective,
        r,
        r2: r * r,
        sse,
        sst,
        residuals,
        warnings,
    })
}

/// Fit quality of a prediction against observations on the same years.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Goodness {
    pub r: f64,
    pub r2: f64,
    pub sse: f64,
    pub sst: f64,
}

/// Compares an observed and a predicted series point-by-point. `r` is the
/// Pearson correlation of the value pairs and `r2 = r²`.
pub fn goodness_of_fit(observed: &YearValueSeries, predicted: &YearValueSeries) -> Result<Goodness> {
    if observed.len() != predicted.len()
        || observed
            .years()
            .zip(predicted.years())
            .any(|(a, b)| a != b)
    {
        return Err(Error::validation(
            "observed and predicted series must cover identical year sets",
        ));
    }
    let obs: Vec<f64> = observed.values().collect();
    let pred: Vec<f64> = predicted.values().collect();
    let n = obs.len() as f64;
    let mean_obs = obs.iter().sum::<f64>() / n;
    let sst: f64 = obs.iter().map(|o| (o - mean_obs).powi(2)).sum();
    if sst == 0.0 {
        return Err(Error::domain("observed series has zero variance"));
    }
    let sse: f64 = obs.iter().zip(&pred).map(|(o, p)| (o - p).powi(2)).sum();
    let r = corr(&pred, &obs)
        .ok_or_else(|| Error::domain("predicted series has zero variance"))?;
    Ok(Goodness {
        r,
        r2: r * r,
        sse,
        sst,
    })
}

fn log_scale(series: &YearValueSeries, t0: f64, k: f64) -> f64 {
    let mean: f64 = series
        .points()
        .iter()
        .map(|&(t, v)| v.ln() + k * (t0 - t).ln())
        .sum::<f64>()
        / series.len() as f64;
    mean.exp()
}

/// Objective value at (t0, k); lower is better for every objective.
fn score(series: &YearValueSeries, t0: f64, k: f64, objective: Objective) -> f64 {
    match objective {
        // 1 − r²(u, v), computed as the affine-regression residual sum over
        // SST: algebraically identical but free of the cancellation that
        // floors `1 − r·r` at machine epsilon near perfect fits.
        Objective::Correlation => {
            let u: Vec<f64> = series.years().map(|t| (t0 - t).powf(-k)).collect();
            let v: Vec<f64> = series.values().collect();
            let n = u.len() as f64;
            let mu = u.iter().sum::<f64>() / n;
            let mv = v.iter().sum::<f64>() / n;
            let mut sxx = 0.0;
            let mut syy = 0.0;
            let mut sxy = 0.0;
            for (&a, &b) in u.iter().zip(&v) {
                sxx += (a - mu) * (a - mu);
                syy += (b - mv) * (b - mv);
                sxy += (a - mu) * (b - mv);
            }
            if sxx <= 0.0 || syy <= 0.0 || !sxx.is_finite() {
                return f64::INFINITY;
            }
            let slope = sxy / sxx;
            let sse_affine: f64 = u
                .iter()
                .zip(&v)
                .map(|(&a, &b)| {
                    let e = (b - mv) - slope * (a - mu);
                    e * e
                })
                .sum();
            sse_affine / syy
        }
        Objective::Sse => {
            let mut num = 0.0;
            let mut den = 0.0;
            for &(t, v) in series.points() {
                let u = (t0 - t).powf(-k);
                num += v * u;
                den += u * u;
            }
            if den == 0.0 || !den.is_finite() {
                return f64::INFINITY;
            }
            let c = num / den;
            series
                .points()
                .iter()
                .map(|&(t, v)| {
                    let e = v - c * (t0 - t).powf(-k);
                    e * e
                })
                .sum()
        }
        Objective::LogSse => {
            let logs: Vec<f64> = series
                .points()
                .iter()
                .map(|&(t, v)| v.ln() + k * (t0 - t).ln())
                .collect();
            let mean = logs.iter().sum::<f64>() / logs.len() as f64;
            logs.iter().map(|x| (x - mean).powi(2)).sum()
        }
    }
}

/// Best exponent in [0.1, 4] for a fixed singularity year.
fn best_k_for(series: &YearValueSeries, t0: f64, objective: Objective) -> (f64, f64) {
    let k = golden_min(0.1, 4.0, 1e-9, |k| score(series, t0, k, objective));
    (score(series, t0, k, objective), k)
}

/// Pearson correlation of two equal-length slices; `None` when either side
/// has zero variance.
fn corr(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Golden-section minimization on [a, b] to bracket width `tol`.
fn golden_min(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn on_curve(c: f64, t0: f64, k: f64, years: &[f64]) -> YearValueSeries {
        YearValueSeries::new(
            years
                .iter()
                .map(|&t| (t, c * (t0 - t).powf(-k)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn scale_solve_exact_recovery() {
        let s = on_curve(1000.0, 2000.0, 1.0, &[1900.0, 1920.0, 1950.0, 1980.0]);
        let c = solve_scale_given_t0(&s, 2000.0, 1.0).unwrap();
        assert_relative_eq!(c, 1000.0, max_relative = 1e-9);
    }

    #[test]
    fn scale_solve_hand_arithmetic() {
        // s = [(0,1),(1,1)], t0=2, k=1: C = (1*0.5 + 1*1)/(0.25+1) = 1.2
        let s = YearValueSeries::new(vec![(0.0, 1.0), (1.0, 1.0)]).unwrap();
        assert_relative_eq!(solve_scale_given_t0(&s, 2.0, 1.0).unwrap(), 1.2);
    }

    #[test]
    fn scale_solve_is_optimal() {
        let s = YearValueSeries::new(vec![(0.0, 2.0), (1.0, 3.0), (2.0, 9.0)]).unwrap();
        let t0 = 3.0;
        let k = 1.0;
        let c = solve_scale_given_t0(&s, t0, k).unwrap();
        let sse = |c: f64| -> f64 {
            s.points()
                .iter()
                .map(|&(t, v)| (v - c * (t0 - t).powf(-k)).powi(2))
                .sum()
        };
        let base = sse(c);
        assert!(sse(c * (1.0 + 1e-3)) > base);
        assert!(sse(c * (1.0 - 1e-3)) > base);
    }

    #[test]
    fn scale_solve_rejects_t0_inside_data() {
        let s = YearValueSeries::new(vec![(0.0, 1.0), (1.0, 1.0)]).unwrap();
        assert!(solve_scale_given_t0(&s, 0.5, 1.0).is_err());
    }

    #[test]
    fn noiseless_recovery_simple() {
        let years: Vec<f64> = (0..10).map(|i| 1900.0 + 10.0 * i as f64).collect();
        let s = on_curve(500.0, 2050.0, 1.0, &years);
        for objective in [Objective::Correlation, Objective::Sse, Objective::LogSse] {
            let fit = fit_trend_with(
                &s,
                &FitOptions::new(KMode::Fixed(1.0), Convention::ContinuousT0)
                    .with_objective(objective),
            )
            .unwrap();
            assert_relative_eq!(fit.params.scale, 500.0, max_relative = 1e-6);
            assert_relative_eq!(fit.params.singularity_year, 2050.0, max_relative = 1e-6);
            assert!(fit.r2 > 1.0 - 1e-9, "{objective:?}: r2 = {}", fit.r2);
        }
    }

    #[test]
    fn noiseless_recovery_free_k() {
        let years: Vec<f64> = (0..12).map(|i| 1850.0 + 12.0 * i as f64).collect();
        let s = on_curve(8.5e6, 2020.0, 2.0, &years);
        let fit = fit_trend(&s, KMode::Free, Convention::ContinuousT0).unwrap();
        assert_relative_eq!(fit.params.exponent, 2.0, max_relative = 1e-5);
        assert_relative_eq!(fit.params.singularity_year, 2020.0, max_relative = 1e-5);
        assert_relative_eq!(fit.params.scale, 8.5e6, max_relative = 1e-4);
    }

    #[test]
    fn integer_convention_reports_whole_year() {
        let years: Vec<f64> = (0..8).map(|i| 1900.0 + 10.0 * i as f64).collect();
        let s = on_curve(1234.0, 2033.0, 1.0, &years);
        let fit = fit_trend(&s, KMode::Fixed(1.0), Convention::IntegerT0).unwrap();
        assert_eq!(fit.params.singularity_year, 2033.0);
        assert_eq!(fit.convention, Convention::IntegerT0);
    }

    #[test]
    fn horizon_cap_produces_warning() {
        // Decreasing data: the best a growing curve can do is stay flat,
        // which pushes the singularity-year search to the cap.
        let s = YearValueSeries::new((0..6).map(|i| (i as f64, 10.0 - i as f64)).collect())
            .unwrap();
        let fit = fit_trend_with(
            &s,
            &FitOptions {
                k: KMode::Fixed(1.0),
                convention: Convention::IntegerT0,
                objective: Objective::Sse,
                horizon_years: 50.0,
            },
        )
        .unwrap();
        assert!(!fit.warnings.is_empty());
    }

    #[test]
    fn too_few_points_rejected() {
        let s = YearValueSeries::new(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert!(fit_trend(&s, KMode::Fixed(1.0), Convention::IntegerT0).is_err());
    }

    #[test]
    fn constant_series_fails_the_search() {
        // No variance anywhere in the bracket: the correlation objective is
        // non-finite for every probe.
        let s = YearValueSeries::new((0..5).map(|i| (i as f64, 7.0)).collect()).unwrap();
        let err = fit_trend(&s, KMode::Fixed(1.0), Convention::IntegerT0).unwrap_err();
        assert!(matches!(err, crate::error::Error::Search(_)), "{err}");
    }

    #[test]
    fn goodness_identity_and_anticorrelation() {
        let a = YearValueSeries::new(vec![(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]).unwrap();
        let g = goodness_of_fit(&a, &a).unwrap();
        assert_relative_eq!(g.r, 1.0);
        assert_relative_eq!(g.r2, 1.0);
        assert_eq!(g.sse, 0.0);

        let rev = YearValueSeries::new(vec![(0.0, 3.0), (1.0, 2.0), (2.0, 1.0)]).unwrap();
        let g = goodness_of_fit(&a, &rev).unwrap();
        assert_relative_eq!(g.r, -1.0);
    }

    #[test]
    fn goodness_rejects_mismatched_years() {
        let a = YearValueSeries::new(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        let b = YearValueSeries::new(vec![(0.0, 1.0), (2.0, 2.0)]).unwrap();
        assert!(goodness_of_fit(&a, &b).is_err());
    }

    #[test]
    fn goodness_rejects_constant_observed() {
        let a = YearValueSeries::new(vec![(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)]).unwrap();
        let b = YearValueSeries::new(vec![(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]).unwrap();
        assert!(goodness_of_fit(&a, &b).is_err());
    }
}
