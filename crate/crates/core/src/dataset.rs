//! Historical macro-data ingestion and derived series.
//!
//! The input is a Maddison-style CSV of world population (millions) and world
//! GDP (billions of 1990 PPP international dollars) at a common set of years.
//! Everything downstream — per-capita GDP, surplus, growth rates — derives
//! from here. Units are fixed module-wide: population in millions, GDP in
//! billions, per-capita quantities in dollars; the factor 1000 linking them is
//! applied exactly once, in [`MacroDataset::surplus_series`].

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Ordered (year, value) observations. Years are calendar years CE and must
/// be strictly increasing; values must be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct YearValueSeries {
    points: Vec<(f64, f64)>,
}

impl YearValueSeries {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(year, value)) in points.iter().enumerate() {
            if !year.is_finite() || !value.is_finite() {
                return Err(Error::validation(format!(
                    "non-finite entry at index {i} (year {year}, value {value})"
                )));
            }
            if i > 0 && points[i - 1].0 >= year {
                return Err(Error::validation(format!(
                    "years not strictly increasing at index {i} ({} then {year})",
                    points[i - 1].0
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn years(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn first_year(&self) -> Option<f64> {
        self.points.first().map(|p| p.0)
    }

    pub fn last_year(&self) -> Option<f64> {
        self.points.last().map(|p| p.0)
    }

    pub fn value_at(&self, year: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|&&(y, _)| y == year)
            .map(|&(_, v)| v)
    }

    /// Points with year in `[lo, hi]`, inclusive.
    pub fn subrange(&self, lo: f64, hi: f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .copied()
                .filter(|&(y, _)| y >= lo && y <= hi)
                .collect(),
        }
    }

    pub fn all_positive(&self) -> bool {
        self.points.iter().all(|&(_, v)| v > 0.0)
    }

    /// Same years, values multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            points: self.points.iter().map(|&(y, v)| (y, factor * v)).collect(),
        }
    }

    /// All years shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            points: self.points.iter().map(|&(y, v)| (y + delta, v)).collect(),
        }
    }
}

/// How a relative growth rate is computed from an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    /// abs_rate divided by the anchor level.
    Simple,
    /// (ln v_end − ln v_start) / Δt; requires positive values.
    Log,
}

/// Which level the interval rate is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateAnchor {
    /// Level at the interval start (default).
    #[default]
    Start,
    /// Arithmetic mean of the endpoint levels.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthInterval {
    pub t_start: f64,
    pub t_end: f64,
    /// (value(t_end) − value(t_start)) / (t_end − t_start), units/year.
    pub abs_rate: f64,
    /// Relative rate per the chosen [`RateMode`], 1/year.
    pub rel_rate: f64,
    /// Level the relative rate is anchored to.
    pub level_at_anchor: f64,
}

/// Interval growth rates derived from consecutive points of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRateSeries {
    pub intervals: Vec<GrowthInterval>,
}

impl GrowthRateSeries {
    pub fn abs_rates(&self) -> Vec<f64> {
        self.intervals.iter().map(|i| i.abs_rate).collect()
    }

    pub fn rel_rates(&self) -> Vec<f64> {
        self.intervals.iter().map(|i| i.rel_rate).collect()
    }

    pub fn anchor_levels(&self) -> Vec<f64> {
        self.intervals.iter().map(|i| i.level_at_anchor).collect()
    }
}

/// Interval growth rates between consecutive observations.
pub fn derive_growth_rates(
    series: &YearValueSeries,
    mode: RateMode,
    anchor: RateAnchor,
) -> Result<GrowthRateSeries> {
    if series.len() < 2 {
        return Err(Error::validation(
            "growth rates need at least 2 points".to_string(),
        ));
    }
    if mode == RateMode::Log && !series.all_positive() {
        return Err(Error::domain(
            "log-mode growth rates require strictly positive values",
        ));
    }
    let pts = series.points();
    let mut intervals = Vec::with_capacity(pts.len() - 1);
    for w in pts.windows(2) {
        let (t0, v0) = w[0];
        let (t1, v1) = w[1];
        let dt = t1 - t0;
        let abs_rate = (v1 - v0) / dt;
        let level = match anchor {
            RateAnchor::Start => v0,
            RateAnchor::Midpoint => 0.5 * (v0 + v1),
        };
        let rel_rate = match mode {
            RateMode::Simple => abs_rate / level,
            RateMode::Log => (v1.ln() - v0.ln()) / dt,
        };
        intervals.push(GrowthInterval {
            t_start: t0,
            t_end: t1,
            abs_rate,
            rel_rate,
            level_at_anchor: level,
        });
    }
    Ok(GrowthRateSeries { intervals })
}

/// Free-text provenance note attached to a data row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointNote {
    pub year: f64,
    pub note: String,
}

/// Paired population and GDP observations plus the subsistence threshold `m`
/// (dollars per person per year). Immutable after load.
#[derive(Debug, Clone)]
pub struct MacroDataset {
    population: YearValueSeries,
    gdp: YearValueSeries,
    m: f64,
    correction_notes: Vec<PointNote>,
}

impl MacroDataset {
    /// Validates the pairing invariants: identical year sets, positive
    /// values, and per-capita GDP strictly above `m` at every point.
    pub fn new(
        population: YearValueSeries,
        gdp: YearValueSeries,
        m: f64,
        correction_notes: Vec<PointNote>,
    ) -> Result<Self> {
        if m <= 0.0 || !m.is_finite() {
            return Err(Error::params("m", format!("must be positive, got {m}")));
        }
        if population.len() < 2 {
            return Err(Error::validation(format!(
                "insufficient points: need at least 2 rows, got {}",
                population.len()
            )));
        }
        if population.len() != gdp.len()
            || population
                .years()
                .zip(gdp.years())
                .any(|(a, b)| a != b)
        {
            return Err(Error::validation(
                "population and gdp series must cover identical year sets",
            ));
        }
        for (&(year, n), &(_, g)) in population.points().iter().zip(gdp.points()) {
            if n <= 0.0 {
                return Err(Error::validation(format!(
                    "non-positive population {n} at year {year}"
                )));
            }
            if g <= 0.0 {
                return Err(Error::validation(format!(
                    "non-positive GDP {g} at year {year}"
                )));
            }
            let per_capita = 1000.0 * g / n;
            if per_capita <= m {
                return Err(Error::validation(format!(
                    "per-capita GDP {per_capita:.3} at year {year} does not exceed m = {m}"
                )));
            }
        }
        Ok(Self {
            population,
            gdp,
            m,
            correction_notes,
        })
    }

    pub fn population(&self) -> &YearValueSeries {
        &self.population
    }

    pub fn gdp(&self) -> &YearValueSeries {
        &self.gdp
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn correction_notes(&self) -> &[PointNote] {
        &self.correction_notes
    }

    pub fn len(&self) -> usize {
        self.population.len()
    }

    pub fn is_empty(&self) -> bool {
        self.population.is_empty()
    }

    pub fn years(&self) -> Vec<f64> {
        self.population.years().collect()
    }

    /// Per-capita GDP g = 1000·G/N, dollars per person per year.
    pub fn per_capita_gdp(&self) -> YearValueSeries {
        let points = self
            .population
            .points()
            .iter()
            .zip(self.gdp.points())
            .map(|(&(year, n), &(_, g))| (year, 1000.0 * g / n))
            .collect();
        YearValueSeries { points }
    }

    /// Surplus S = 1000·G/N − m, dollars per person per year.
    /// The identity m·N + S·N = 1000·G holds to machine precision.
    pub fn surplus_series(&self) -> YearValueSeries {
        let points = self
            .population
            .points()
            .iter()
            .zip(self.gdp.points())
            .map(|(&(year, n), &(_, g))| (year, 1000.0 * g / n - self.m))
            .collect();
        YearValueSeries { points }
    }

    /// Rows with year in `[lo, hi]`, inclusive; keeps `m` and the notes that
    /// fall inside the range.
    pub fn subrange(&self, lo: f64, hi: f64) -> Result<Self> {
        MacroDataset::new(
            self.population.subrange(lo, hi),
            self.gdp.subrange(lo, hi),
            self.m,
            self.correction_notes
                .iter()
                .filter(|n| n.year >= lo && n.year <= hi)
                .cloned()
                .collect(),
        )
    }
}

/// Alias for [`MacroDataset::surplus_series`] mirroring the operation name
/// used throughout the docs.
pub fn derive_surplus_series(dataset: &MacroDataset) -> YearValueSeries {
    dataset.surplus_series()
}

/// CSV column layout: `year,population_millions,gdp_billions[,note]`,
/// ascending years, decimal points, no thousands separators.
pub fn load_dataset(path: impl AsRef<Path>, m: f64) -> Result<MacroDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    for (idx, expected) in ["year", "population_millions", "gdp_billions"]
        .iter()
        .enumerate()
    {
        match headers.get(idx) {
            Some(h) if h.trim() == *expected => {}
            other => {
                return Err(parse_err(
                    path,
                    1,
                    format!("expected column {idx} to be '{expected}', got {other:?}"),
                ))
            }
        }
    }

    let mut pop = Vec::new();
    let mut gdp = Vec::new();
    let mut notes = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // 1-based, after header
        let record = record.map_err(|e| parse_err(path, line, e.to_string()))?;
        let field = |idx: usize, name: &str| -> Result<f64> {
            let raw = record
                .get(idx)
                .ok_or_else(|| parse_err(path, line, format!("missing {name} column")))?;
            raw.trim()
                .parse::<f64>()
                .map_err(|_| parse_err(path, line, format!("malformed {name} value '{raw}'")))
        };
        let year = field(0, "year")?;
        pop.push((year, field(1, "population_millions")?));
        gdp.push((year, field(2, "gdp_billions")?));
        if let Some(note) = record.get(3) {
            if !note.trim().is_empty() {
                notes.push(PointNote {
                    year,
                    note: note.trim().to_string(),
                });
            }
        }
    }

    MacroDataset::new(YearValueSeries::new(pop)?, YearValueSeries::new(gdp)?, m, notes)
}

fn parse_err(path: &Path, line: usize, message: impl fmt::Display) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_and_derives_reference_surplus() {
        let f = write_csv(
            "year,population_millions,gdp_billions,note\n\
             1,230.82,102.536,anchor row\n\
             1000,268.273,134.137,corrected\n",
        );
        let d = load_dataset(f.path(), 440.0).unwrap();
        let g = d.per_capita_gdp();
        assert_relative_eq!(g.points()[0].1, 444.225, max_relative = 1e-6);
        // 4.225 is the rounded published value; exact arithmetic gives
        // 1000*102.536/230.82 - 440 = 4.2249372...
        let s = derive_surplus_series(&d);
        assert_relative_eq!(s.points()[0].1, 4.225, max_relative = 2e-5);
        assert_eq!(d.correction_notes().len(), 2);
    }

    #[test]
    fn single_row_is_insufficient() {
        let f = write_csv("year,population_millions,gdp_billions\n1,230.82,102.536\n");
        let err = load_dataset(f.path(), 440.0).unwrap_err();
        assert!(err.to_string().contains("insufficient"), "{err}");
    }

    #[test]
    fn per_capita_below_threshold_names_year() {
        // 1000*40/100 = 400 < 440 at year 1900
        let f = write_csv(
            "year,population_millions,gdp_billions\n1,230.82,102.536\n1900,100,40\n",
        );
        let err = load_dataset(f.path(), 440.0).unwrap_err();
        assert!(err.to_string().contains("1900"), "{err}");
    }

    #[test]
    fn exact_threshold_is_rejected() {
        // g exactly m must be rejected, not clamped
        let f = write_csv("year,population_millions,gdp_billions\n1,230.82,102.536\n2,100,44\n");
        assert!(load_dataset(f.path(), 440.0).is_err());
    }

    #[test]
    fn non_increasing_years_rejected() {
        let f = write_csv(
            "year,population_millions,gdp_billions\n1000,268,134\n1000,269,135\n",
        );
        assert!(load_dataset(f.path(), 440.0).is_err());
    }

    #[test]
    fn malformed_row_names_line() {
        let f = write_csv("year,population_millions,gdp_billions\n1,230.82,102.536\n2,x,1\n");
        let err = load_dataset(f.path(), 440.0).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_dataset("/nonexistent/file.csv", 440.0).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn surplus_round_trip_identity() {
        let f = write_csv(
            "year,population_millions,gdp_billions\n\
             1,230.82,102.536\n1000,268.273,134.137\n1950,2524.531,5336.101\n",
        );
        let d = load_dataset(f.path(), 440.0).unwrap();
        let s = d.surplus_series();
        for ((&(_, n), &(_, g)), &(_, surplus)) in d
            .population()
            .points()
            .iter()
            .zip(d.gdp().points())
            .zip(s.points())
        {
            let recon = (d.m() * n + surplus * n) / 1000.0;
            assert_relative_eq!(recon, g, max_relative = 1e-9);
        }
    }

    #[test]
    fn hand_arithmetic_surplus() {
        // N=1000, G=1000, m=440 -> S = 560
        let pop = YearValueSeries::new(vec![(0.0, 1000.0), (1.0, 1000.0)]).unwrap();
        let gdp = YearValueSeries::new(vec![(0.0, 1000.0), (1.0, 1000.0)]).unwrap();
        let d = MacroDataset::new(pop, gdp, 440.0, vec![]).unwrap();
        assert_relative_eq!(d.surplus_series().points()[0].1, 560.0);
    }

    #[test]
    fn growth_rates_simple_and_log() {
        let s = YearValueSeries::new(vec![(0.0, 100.0), (10.0, 200.0)]).unwrap();
        let simple = derive_growth_rates(&s, RateMode::Simple, RateAnchor::Start).unwrap();
        assert_eq!(simple.intervals.len(), 1);
        assert_relative_eq!(simple.intervals[0].abs_rate, 10.0);
        assert_relative_eq!(simple.intervals[0].rel_rate, 0.1);
        assert_relative_eq!(simple.intervals[0].level_at_anchor, 100.0);

        let log = derive_growth_rates(&s, RateMode::Log, RateAnchor::Start).unwrap();
        assert_relative_eq!(log.intervals[0].rel_rate, std::f64::consts::LN_2 / 10.0);

        let mid = derive_growth_rates(&s, RateMode::Simple, RateAnchor::Midpoint).unwrap();
        assert_relative_eq!(mid.intervals[0].level_at_anchor, 150.0);
    }

    #[test]
    fn constant_series_has_zero_rates() {
        let s = YearValueSeries::new(vec![(0.0, 5.0), (1.0, 5.0)]).unwrap();
        let r = derive_growth_rates(&s, RateMode::Simple, RateAnchor::Start).unwrap();
        assert_eq!(r.intervals[0].abs_rate, 0.0);
        assert_eq!(r.intervals[0].rel_rate, 0.0);
    }

    #[test]
    fn log_mode_rejects_non_positive() {
        let s = YearValueSeries::new(vec![(0.0, 1.0), (1.0, -1.0)]).unwrap();
        assert!(derive_growth_rates(&s, RateMode::Log, RateAnchor::Start).is_err());
        assert!(derive_growth_rates(&s, RateMode::Simple, RateAnchor::Start).is_ok());
    }

    #[test]
    fn mismatched_year_sets_rejected() {
        let pop = YearValueSeries::new(vec![(0.0, 1.0), (1.0, 1.0)]).unwrap();
        let gdp = YearValueSeries::new(vec![(0.0, 1.0), (2.0, 1.0)]).unwrap();
        assert!(MacroDataset::new(pop, gdp, 440.0, vec![]).is_err());
    }
}
