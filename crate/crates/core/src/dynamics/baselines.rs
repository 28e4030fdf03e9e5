//! Baseline population models: the logistic birth/death balance and the
//! coalition power-law growth whose solution is the blow-up trend.
//!
//! Both are population-only systems; their traces carry no surplus, GDP, or
//! technology columns.

use super::{meta, Driver, Integrator, RunOutcome, SimulationTrace, StepCheck};
use crate::error::{Error, Result};

/// Saturation level of the logistic model: K = (a1 − a2)/b.
pub fn logistic_carrying_capacity(a1: f64, a2: f64, b: f64) -> f64 {
    (a1 - a2) / b
}

/// dN/dt = a1·N − (a2·N + b·N²): births linear, deaths linear plus a
/// crowding term. Converges to the carrying capacity for a1 > a2.
pub fn simulate_logistic(
    a1: f64,
    a2: f64,
    b: f64,
    n0: f64,
    t_start: f64,
    t_end: f64,
    integrator: Integrator,
) -> Result<SimulationTrace> {
    if !(a1 > a2) {
        return Err(Error::params(
            "a1",
            format!("birth coefficient a1 = {a1} must exceed death coefficient a2 = {a2}"),
        ));
    }
    if !(b > 0.0) {
        return Err(Error::params("b", format!("must be positive, got {b}")));
    }
    if !(n0 > 0.0) {
        return Err(Error::params("n0", format!("must be positive, got {n0}")));
    }
    let mut years = Vec::new();
    let mut population = Vec::new();
    let driver: Driver<1> = Driver {
        t_start,
        t_end,
        integrator,
    };
    let outcome = driver.run(
        [n0],
        |_, y| [a1 * y[0] - (a2 * y[0] + b * y[0] * y[0])],
        |t, y| {
            if y[0] <= 0.0 {
                StepCheck::Abort(RunOutcome::NonPositiveState { year: t })
            } else {
                StepCheck::Ok
            }
        },
        |t, y| {
            years.push(t);
            population.push(y[0]);
        },
    )?;
    Ok(SimulationTrace {
        years,
        population,
        surplus: None,
        gdp: None,
        technology: None,
        integrator,
        outcome,
        metadata: meta(&[("a1", a1), ("a2", a2), ("b", b), ("n0", n0)]),
    })
}

/// Coalition growth dN/dt = a0·N^(1/k)·N for 0 < k ≤ 1: super-exponential,
/// with a finite-time singularity. For k = 1 the trajectory is exactly the
/// simple hyperbola scale/(t0 − t) with scale = 1/a0 and t0 fixed by the
/// initial condition.
pub fn simulate_coalition(
    a0: f64,
    k: f64,
    n0: f64,
    t_start: f64,
    t_end: f64,
    integrator: Integrator,
) -> Result<SimulationTrace> {
    if !(a0 > 0.0) {
        return Err(Error::params("a0", format!("must be positive, got {a0}")));
    }
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::params("k", format!("must lie in (0, 1], got {k}")));
    }
    if !(n0 > 0.0) {
        return Err(Error::params("n0", format!("must be positive, got {n0}")));
    }
    let mut years = Vec::new();
    let mut population = Vec::new();
    let driver: Driver<1> = Driver {
        t_start,
        t_end,
        integrator,
    };
    let exponent = 1.0 / k;
    let outcome = driver.run(
        [n0],
        |_, y| [a0 * y[0].powf(exponent) * y[0]],
        |t, y| {
            if y[0] <= 0.0 {
                StepCheck::Abort(RunOutcome::NonPositiveState { year: t })
            } else {
                StepCheck::Ok
            }
        },
        |t, y| {
            years.push(t);
            population.push(y[0]);
        },
    )?;
    Ok(SimulationTrace {
        years,
        population,
        surplus: None,
        gdp: None,
        technology: None,
        integrator,
        outcome,
        metadata: meta(&[("a0", a0), ("k", k), ("n0", n0)]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn logistic_fixed_point_is_constant() {
        let (a1, a2, b) = (0.06, 0.02, 1e-4);
        let k = logistic_carrying_capacity(a1, a2, b);
        let trace =
            simulate_logistic(a1, a2, b, k, 0.0, 100.0, Integrator::rk4_default()).unwrap();
        for &n in &trace.population {
            assert_relative_eq!(n, k, max_relative = 1e-12);
        }
    }

    #[test]
    fn logistic_converges_from_half_capacity() {
        let (a1, a2, b) = (0.06, 0.02, 1e-4);
        let r = a1 - a2;
        let k = logistic_carrying_capacity(a1, a2, b);
        let horizon = (20.0 / r).ceil();
        let trace =
            simulate_logistic(a1, a2, b, k / 2.0, 0.0, horizon, Integrator::rk4_default())
                .unwrap();
        assert!(trace.outcome.is_completed());
        let n = &trace.population;
        assert!(n.windows(2).all(|w| w[1] >= w[0]), "monotone approach");
        let last = *n.last().unwrap();
        assert!((k - last).abs() / k < 1e-3, "N = {last}, K = {k}");

        // Against the closed-form logistic solution.
        let analytic = |t: f64| k / (1.0 + (k / (k / 2.0) - 1.0) * (-r * t).exp());
        for (i, &t) in trace.years.iter().enumerate().step_by(50) {
            assert_relative_eq!(n[i], analytic(t), max_relative = 1e-7);
        }
    }

    #[test]
    fn logistic_rejects_zero_intrinsic_growth() {
        assert!(simulate_logistic(0.02, 0.02, 1e-4, 1.0, 0.0, 10.0, Integrator::rk4_default())
            .is_err());
    }

    #[test]
    fn coalition_matches_hyperbola_for_unit_k() {
        // a0 = 1/scale, n0 on-curve: trace equals scale/(t0 − t).
        let scale = 200.0;
        let t0 = 2050.0;
        let t_start = 1900.0;
        let n0 = scale / (t0 - t_start);
        let trace = simulate_coalition(
            1.0 / scale,
            1.0,
            n0,
            t_start,
            2020.0,
            Integrator::Rk4 { step: 0.125 },
        )
        .unwrap();
        assert!(trace.outcome.is_completed());
        for (i, &t) in trace.years.iter().enumerate() {
            assert_relative_eq!(
                trace.population[i],
                scale / (t0 - t),
                max_relative = 1e-7
            );
        }
    }

    #[test]
    fn coalition_small_k_first_step_rate() {
        // n0 = 1 makes the first derivative a0 regardless of k.
        for k in [0.2, 0.5, 1.0] {
            let trace =
                simulate_coalition(0.01, k, 1.0, 0.0, 1.0, Integrator::euler_annual()).unwrap();
            assert_relative_eq!(trace.population[1] - trace.population[0], 0.01);
        }
    }

    #[test]
    fn coalition_blow_up_reports_year() {
        // On-curve start with singularity at 2000: the run must abort close
        // to it, not at the requested end.
        let scale = 100.0;
        let t0 = 2000.0;
        let trace = simulate_coalition(
            1.0 / scale,
            1.0,
            scale / (t0 - 1900.0),
            1900.0,
            2050.0,
            Integrator::rk4_default(),
        )
        .unwrap();
        match trace.outcome {
            RunOutcome::BlowUp { year } => {
                assert!((1999.0..=2001.0).contains(&year), "year = {year}")
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
