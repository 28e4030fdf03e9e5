//! Dynamical-system simulators: the two-equation population/surplus model,
//! the technology-coupled variants, and the logistic/coalition baselines.
//!
//! All systems share the same driver: fixed-step explicit integration
//! (Euler or classical RK4), yearly sampling into a [`SimulationTrace`],
//! and hard aborts — never clamping — when a trajectory leaves its valid
//! region (overflow past the blow-up guard, or a non-positive state).

mod baselines;
mod compact;
mod kremer;

pub use baselines::{simulate_coalition, simulate_logistic, logistic_carrying_capacity};
pub use compact::{simulate_compact, CompactModelParams};
pub use kremer::{
    bernoulli_closed_form, bernoulli_integration_constant, equilibrium_population,
    limiting_surplus, simulate_exponential_tech, simulate_kuznetsian, KremerParams,
};

use std::fmt;

use crate::error::{Error, Result};

/// Every blow-up system eventually exits floating-point range; runs abort
/// once any state variable passes this guard and report the year reached.
pub const OVERFLOW_GUARD: f64 = 1e12;

/// Fixed-step explicit integrator. The step must divide one year evenly so
/// traces can be sampled at whole years.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    Euler { step: f64 },
    Rk4 { step: f64 },
}

impl Integrator {
    /// The annual difference-equation scheme: one Euler step per year, both
    /// increments computed from the same start-of-step state.
    pub fn euler_annual() -> Self {
        Integrator::Euler { step: 1.0 }
    }

    /// Classical fourth-order Runge-Kutta at the default quarter-year step.
    pub fn rk4_default() -> Self {
        Integrator::Rk4 { step: 0.25 }
    }

    pub fn step(&self) -> f64 {
        match *self {
            Integrator::Euler { step } | Integrator::Rk4 { step } => step,
        }
    }

    pub(crate) fn validate(&self) -> Result<u32> {
        let step = self.step();
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::params("step", format!("must be in (0, 1], got {step}")));
        }
        let per_year = 1.0 / step;
        if (per_year - per_year.round()).abs() > 1e-9 {
            return Err(Error::params(
                "step",
                format!("must divide one year evenly, got {step}"),
            ));
        }
        Ok(per_year.round() as u32)
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Integrator::Euler { step } if step == 1.0 => write!(f, "euler_annual"),
            Integrator::Euler { step } => write!(f, "euler({step})"),
            Integrator::Rk4 { step } => write!(f, "rk4({step})"),
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunOutcome {
    Completed,
    /// A state variable overflowed the guard or became non-finite;
    /// `year` is when it was detected.
    BlowUp { year: f64 },
    /// Surplus reached zero or below: the Malthusian floor.
    NegativeSurplus { year: f64 },
    /// Population (or another required-positive variable) left (0, ∞).
    NonPositiveState { year: f64 },
}

impl RunOutcome {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunOutcome::Completed)
    }

    pub fn abort_year(&self) -> Option<f64> {
        match *self {
            RunOutcome::Completed => None,
            RunOutcome::BlowUp { year }
            | RunOutcome::NegativeSurplus { year }
            | RunOutcome::NonPositiveState { year } => Some(year),
        }
    }
}

impl fmt::Display for RunOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunOutcome::Completed => write!(f, "completed"),
            RunOutcome::BlowUp { year } => write!(f, "blow-up at year {year:.2}"),
            RunOutcome::NegativeSurplus { year } => {
                write!(f, "surplus hit the Malthusian floor at year {year:.2}")
            }
            RunOutcome::NonPositiveState { year } => {
                write!(f, "non-positive state at year {year:.2}")
            }
        }
    }
}

/// Yearly samples of a simulated trajectory. Population is always present;
/// surplus/GDP/technology columns exist only for the systems that define
/// them. Where surplus exists, GDP satisfies G = (m·N + S·N)/1000 at every
/// sample by construction.
#[derive(Debug, Clone)]
pub struct SimulationTrace {
    pub years: Vec<f64>,
    pub population: Vec<f64>,
    pub surplus: Option<Vec<f64>>,
    pub gdp: Option<Vec<f64>>,
    pub technology: Option<Vec<f64>>,
    pub integrator: Integrator,
    pub outcome: RunOutcome,
    /// Parameter echo, sorted by key.
    pub metadata: Vec<(String, String)>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    pub fn value_at(&self, column: &[f64], year: f64) -> Option<f64> {
        self.years
            .iter()
            .position(|&y| y == year)
            .map(|i| column[i])
    }

    pub fn population_at(&self, year: f64) -> Option<f64> {
        self.value_at(&self.population, year)
    }

    pub fn gdp_at(&self, year: f64) -> Option<f64> {
        self.gdp
            .as_ref()
            .and_then(|g| self.value_at(g, year))
    }

    /// CSV rendering: `year,N_millions[,S_dollars,G_billions][,T_index]`,
    /// one row per `stride` stored years.
    pub fn to_csv(&self, stride: usize) -> String {
        let stride = stride.max(1);
        let mut header = String::from("year,N_millions");
        if self.surplus.is_some() {
            header.push_str(",S_dollars,G_billions");
        }
        if self.technology.is_some() {
            header.push_str(",T_index");
        }
        let mut out = header;
        out.push('\n');
        for i in (0..self.years.len()).step_by(stride) {
            out.push_str(&format!("{},{}", self.years[i], self.population[i]));
            if let (Some(s), Some(g)) = (&self.surplus, &self.gdp) {
                out.push_str(&format!(",{},{}", s[i], g[i]));
            }
            if let Some(t) = &self.technology {
                out.push_str(&format!(",{}", t[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// What the per-step state check decided.
pub(crate) enum StepCheck {
    Ok,
    Abort(RunOutcome),
}

/// Shared fixed-step driver. `deriv` receives (t, state) and returns the
/// full derivative vector, so Euler applies all increments simultaneously
/// from the start-of-step state. `check` inspects each new state and may
/// abort; `sample` maps a recorded state to the trace row.
pub(crate) struct Driver<const K: usize> {
    pub t_start: f64,
    pub t_end: f64,
    pub integrator: Integrator,
}

impl<const K: usize> Driver<K> {
    pub fn run(
        &self,
        state0: [f64; K],
        deriv: impl Fn(f64, &[f64; K]) -> [f64; K],
        check: impl Fn(f64, &[f64; K]) -> StepCheck,
        mut record: impl FnMut(f64, &[f64; K]),
    ) -> Result<RunOutcome> {
        if !(self.t_end > self.t_start) {
            return Err(Error::params(
                "t_end",
                format!("span must be positive, got {}..{}", self.t_start, self.t_end),
            ));
        }
        let per_year = self.integrator.validate()?;
        let h = self.integrator.step();
        let whole_years = (self.t_end - self.t_start).floor() as u64;
        record(self.t_start, &state0);

        let mut state = state0;
        let steps = whole_years * per_year as u64;
        for i in 1..=steps {
            let t_prev = self.t_start + (i - 1) as f64 * h;
            state = match self.integrator {
                Integrator::Euler { .. } => {
                    let d = deriv(t_prev, &state);
                    let mut next = state;
                    for (s, di) in next.iter_mut().zip(d) {
                        *s += h * di;
                    }
                    next
                }
                Integrator::Rk4 { .. } => rk4_step(&deriv, t_prev, &state, h),
            };
            let t = self.t_start + i as f64 * h;
            if state
                .iter()
                .any(|v| !v.is_finite() || v.abs() > OVERFLOW_GUARD)
            {
                return Ok(RunOutcome::BlowUp { year: t });
            }
            if let StepCheck::Abort(outcome) = check(t, &state) {
                return Ok(outcome);
            }
            if i % per_year as u64 == 0 {
                record(t, &state);
            }
        }
        Ok(RunOutcome::Completed)
    }
}

fn rk4_step<const K: usize>(
    deriv: &impl Fn(f64, &[f64; K]) -> [f64; K],
    t: f64,
    y: &[f64; K],
    h: f64,
) -> [f64; K] {
    let add = |y: &[f64; K], k: &[f64; K], f: f64| -> [f64; K] {
        let mut out = *y;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += f * ki;
        }
        out
    };
    let k1 = deriv(t, y);
    let k2 = deriv(t + 0.5 * h, &add(y, &k1, 0.5 * h));
    let k3 = deriv(t + 0.5 * h, &add(y, &k2, 0.5 * h));
    let k4 = deriv(t + h, &add(y, &k3, h));
    let mut out = *y;
    for i in 0..K {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

pub(crate) fn meta(pairs: &[(&str, f64)]) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = pairs
        .iter()
        .map(|&(k, val)| (k.to_string(), format!("{val}")))
        .collect();
    v.sort();
    v
}
