//! C ABI for the macrodyn library.
//!
//! Conventions:
//! - fallible calls return [`MdStatus`]; `MD_STATUS_OK` is zero,
//! - the failure message of the most recent call on the current thread is
//!   retrievable via [`md_last_error_message`],
//! - heap objects cross the boundary as opaque pointers with paired
//!   `md_*_free` functions,
//! - flat results use plain `#[repr(C)]` structs.
//!
//! The matching header lives at `include/macrodyn.h` (regenerable with
//! cbindgen using the committed `cbindgen.toml`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use macrodyn::dataset::{load_dataset, MacroDataset};
use macrodyn::dynamics::{
    simulate_compact, CompactModelParams, Integrator, RunOutcome, SimulationTrace,
};
use macrodyn::error::Error;
use macrodyn::fitting::{fit_trend_with, Convention, FitOptions, KMode};
use macrodyn::stats::{ols, p_value, pearson};
use macrodyn::YearValueSeries;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg.into());
}

/// Status code of a fallible call. Matches the process exit codes of the
/// `macrodyn` binary where the classes overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdStatus {
    Ok = 0,
    Io = 3,
    Parse = 4,
    Validation = 5,
    Numeric = 6,
    NullArgument = 7,
    InvalidUtf8 = 8,
    Panic = 9,
}

fn status_of(err: &Error) -> MdStatus {
    match err {
        Error::Io { .. } => MdStatus::Io,
        Error::Parse { .. } => MdStatus::Parse,
        Error::Validation(_) | Error::Params { .. } => MdStatus::Validation,
        Error::Domain(_) | Error::Search(_) => MdStatus::Numeric,
    }
}

fn guarded(body: impl FnOnce() -> MdStatus) -> MdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic crossed the FFI boundary");
            MdStatus::Panic
        }
    }
}

/// Copies the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be NULL (then only the
/// length is returned).
#[no_mangle]
pub unsafe extern "C" fn md_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn md_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Opaque dataset handle.
pub struct MdDataset {
    inner: MacroDataset,
}

/// Opaque simulation-trace handle.
pub struct MdTrace {
    inner: SimulationTrace,
}

/// Which derived series of a dataset to copy out.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdSeriesKind {
    Population = 0,
    Gdp = 1,
    Surplus = 2,
    PerCapitaGdp = 3,
}

/// Loads and validates a dataset CSV
/// (`year,population_millions,gdp_billions[,note]`).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn md_dataset_load(
    path: *const c_char,
    m: f64,
    out: *mut *mut MdDataset,
) -> MdStatus {
    if path.is_null() || out.is_null() {
        set_error("path and out must be non-NULL");
        return MdStatus::NullArgument;
    }
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        set_error("path is not valid UTF-8");
        return MdStatus::InvalidUtf8;
    };
    guarded(|| match load_dataset(path, m) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(MdDataset { inner }));
            MdStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    })
}

/// Releases a dataset handle. NULL is a no-op.
///
/// # Safety
/// `ds` must come from [`md_dataset_load`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn md_dataset_free(ds: *mut MdDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of rows in the dataset; 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn md_dataset_len(ds: *const MdDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.len())
}

/// Copies a raw or derived series into caller-provided arrays of capacity
/// `cap`; `*written` receives the number of rows copied.
///
/// # Safety
/// `years` and `values` must each point to `cap` writable doubles;
/// `ds` and `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn md_dataset_series(
    ds: *const MdDataset,
    kind: MdSeriesKind,
    years: *mut f64,
    values: *mut f64,
    cap: usize,
    written: *mut usize,
) -> MdStatus {
    let Some(ds) = ds.as_ref() else {
        set_error("dataset handle is NULL");
        return MdStatus::NullArgument;
    };
    if years.is_null() || values.is_null() || written.is_null() {
        set_error("output pointers must be non-NULL");
        return MdStatus::NullArgument;
    }
    let series = match kind {
        MdSeriesKind::Population => ds.inner.population().clone(),
        MdSeriesKind::Gdp => ds.inner.gdp().clone(),
        MdSeriesKind::Surplus => ds.inner.surplus_series(),
        MdSeriesKind::PerCapitaGdp => ds.inner.per_capita_gdp(),
    };
    let n = series.len().min(cap);
    for (i, &(year, value)) in series.points().iter().take(n).enumerate() {
        *years.add(i) = year;
        *values.add(i) = value;
    }
    *written = n;
    MdStatus::Ok
}

/// Fitted trend parameters with fit quality; `r2` is the squared
/// correlation between fitted and observed values.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MdTrendFit {
    pub c: f64,
    pub t0: f64,
    pub k: f64,
    pub r: f64,
    pub r2: f64,
    pub sse: f64,
}

/// Fits a blow-up trend to (years, values). `free_k` ignores `k` and
/// searches the exponent; `integer_t0` reports the best whole singularity
/// year instead of refining continuously.
///
/// # Safety
/// `years` and `values` must point to `len` readable doubles; `out` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn md_fit_trend(
    years: *const f64,
    values: *const f64,
    len: usize,
    k: f64,
    free_k: bool,
    integer_t0: bool,
    out: *mut MdTrendFit,
) -> MdStatus {
    if years.is_null() || values.is_null() || out.is_null() {
        set_error("years, values, and out must be non-NULL");
        return MdStatus::NullArgument;
    }
    let years = std::slice::from_raw_parts(years, len);
    let values = std::slice::from_raw_parts(values, len);
    guarded(|| {
        let series = match YearValueSeries::new(
            years.iter().copied().zip(values.iter().copied()).collect(),
        ) {
            Ok(s) => s,
            Err(e) => {
                set_error(e.to_string());
                return status_of(&e);
            }
        };
        let options = FitOptions::new(
            if free_k { KMode::Free } else { KMode::Fixed(k) },
            if integer_t0 {
                Convention::IntegerT0
            } else {
                Convention::ContinuousT0
            },
        );
        match fit_trend_with(&series, &options) {
            Ok(fit) => {
                *out = MdTrendFit {
                    c: fit.params.scale,
                    t0: fit.params.singularity_year,
                    k: fit.params.exponent,
                    r: fit.r,
                    r2: fit.r2,
                    sse: fit.sse,
                };
                MdStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Ordinary-least-squares result. `has_intercept` is false for
/// through-origin fits, in which case `intercept` fields are zero.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MdRegression {
    pub slope: f64,
    pub intercept: f64,
    pub has_intercept: bool,
    pub slope_se: f64,
    pub t_slope: f64,
    pub p_slope: f64,
    pub r: f64,
    pub r2: f64,
    pub n: usize,
    pub dof: usize,
}

/// Least squares of y on x, optionally through the origin.
///
/// # Safety
/// `x` and `y` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn md_ols(
    x: *const f64,
    y: *const f64,
    len: usize,
    through_origin: bool,
    out: *mut MdRegression,
) -> MdStatus {
    if x.is_null() || y.is_null() || out.is_null() {
        set_error("x, y, and out must be non-NULL");
        return MdStatus::NullArgument;
    }
    let x = std::slice::from_raw_parts(x, len);
    let y = std::slice::from_raw_parts(y, len);
    guarded(|| match ols(x, y, through_origin) {
        Ok(r) => {
            *out = MdRegression {
                slope: r.slope,
                intercept: r.intercept.unwrap_or(0.0),
                has_intercept: r.intercept.is_some(),
                slope_se: r.slope_se,
                t_slope: r.t_slope,
                p_slope: r.p_slope,
                r: r.r,
                r2: r.r2,
                n: r.n,
                dof: r.dof,
            };
            MdStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    })
}

/// Pearson correlation of two equal-length arrays.
///
/// # Safety
/// `x` and `y` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn md_pearson(
    x: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> MdStatus {
    if x.is_null() || y.is_null() || out.is_null() {
        set_error("x, y, and out must be non-NULL");
        return MdStatus::NullArgument;
    }
    let x = std::slice::from_raw_parts(x, len);
    let y = std::slice::from_raw_parts(y, len);
    guarded(|| match pearson(x, y) {
        Ok(r) => {
            *out = r;
            MdStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    })
}

/// Two-tailed Student-t tail probability.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn md_p_value(t_stat: f64, dof: usize, out: *mut f64) -> MdStatus {
    if out.is_null() {
        set_error("out must be non-NULL");
        return MdStatus::NullArgument;
    }
    guarded(|| match p_value(t_stat, dof) {
        Ok(p) => {
            *out = p;
            MdStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    })
}

/// How a simulation run ended.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdOutcome {
    Completed = 0,
    BlowUp = 1,
    NegativeSurplus = 2,
    NonPositiveState = 3,
}

/// Runs the two-equation population/surplus model. On success the handle
/// holds yearly samples up to `t_end` or the abort year.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn md_simulate_compact(
    a: f64,
    b_ratio: f64,
    m: f64,
    n0: f64,
    s0: f64,
    t_start: f64,
    t_end: f64,
    use_rk4: bool,
    step: f64,
    out: *mut *mut MdTrace,
) -> MdStatus {
    if out.is_null() {
        set_error("out must be non-NULL");
        return MdStatus::NullArgument;
    }
    let params = CompactModelParams {
        a,
        b_ratio,
        m,
        n0,
        s0,
        t_start,
        t_end,
    };
    let integrator = if use_rk4 {
        Integrator::Rk4 { step }
    } else {
        Integrator::Euler { step }
    };
    guarded(|| match simulate_compact(&params, integrator) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(MdTrace { inner }));
            MdStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    })
}

/// Releases a trace handle. NULL is a no-op.
///
/// # Safety
/// `trace` must come from a trace-producing call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn md_trace_free(trace: *mut MdTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of stored yearly samples; 0 for NULL.
///
/// # Safety
/// `trace` must be NULL or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn md_trace_len(trace: *const MdTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.inner.len())
}

/// Outcome of the run; if it aborted and `abort_year` is non-NULL, the year
/// reached is stored there.
///
/// # Safety
/// `trace` must be a live trace handle; `abort_year` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn md_trace_outcome(
    trace: *const MdTrace,
    abort_year: *mut f64,
) -> MdOutcome {
    let Some(trace) = trace.as_ref() else {
        return MdOutcome::NonPositiveState;
    };
    if let (Some(year), false) = (trace.inner.outcome.abort_year(), abort_year.is_null()) {
        *abort_year = year;
    }
    match trace.inner.outcome {
        RunOutcome::Completed => MdOutcome::Completed,
        RunOutcome::BlowUp { .. } => MdOutcome::BlowUp,
        RunOutcome::NegativeSurplus { .. } => MdOutcome::NegativeSurplus,
        RunOutcome::NonPositiveState { .. } => MdOutcome::NonPositiveState,
    }
}

/// Reads one stored sample. Surplus and GDP are NaN for models that do not
/// define them; output pointers may individually be NULL.
///
/// # Safety
/// `trace` must be a live trace handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn md_trace_row(
    trace: *const MdTrace,
    index: usize,
    year: *mut f64,
    population: *mut f64,
    surplus: *mut f64,
    gdp: *mut f64,
) -> MdStatus {
    let Some(trace) = trace.as_ref() else {
        set_error("trace handle is NULL");
        return MdStatus::NullArgument;
    };
    if index >= trace.inner.len() {
        set_error(format!(
            "index {index} out of range for trace of length {}",
            trace.inner.len()
        ));
        return MdStatus::Validation;
    }
    if !year.is_null() {
        *year = trace.inner.years[index];
    }
    if !population.is_null() {
        *population = trace.inner.population[index];
    }
    if !surplus.is_null() {
        *surplus = trace
            .inner
            .surplus
            .as_ref()
            .map_or(f64::NAN, |s| s[index]);
    }
    if !gdp.is_null() {
        *gdp = trace.inner.gdp.as_ref().map_or(f64::NAN, |g| g[index]);
    }
    MdStatus::Ok
}
