//! The two-equation population/surplus system:
//!
//! dN/dt = a·S·N,  dS/dt = b·N·S  with b = b_ratio·a,
//!
//! population N in millions, per-capita surplus S in dollars, and GDP
//! recovered as G = (m + S)·N / 1000 (billions). In the annual-Euler scheme
//! both increments share the factor a·Nᵢ·Sᵢ, so ΔNᵢ/ΔSᵢ = 1/b_ratio holds
//! exactly step by step.

use super::{meta, Driver, Integrator, RunOutcome, SimulationTrace, StepCheck};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactModelParams {
    /// Population response to surplus, 1/(dollar·year).
    pub a: f64,
    /// b = b_ratio·a couples surplus growth to population.
    pub b_ratio: f64,
    /// Subsistence-plus-infrastructure threshold, dollars/person/year.
    pub m: f64,
    /// Initial population, millions.
    pub n0: f64,
    /// Initial per-capita surplus, dollars.
    pub s0: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl CompactModelParams {
    /// The constant set quoted alongside the published simulation
    /// (N0 = 230.82, a = 0.000011383, S0 = 4.225, b = 0.96a, m = 440,
    /// run from 1 CE to 1973).
    pub fn published_constants() -> Self {
        Self {
            a: 0.000011383,
            b_ratio: 0.96,
            m: 440.0,
            n0: 230.82,
            s0: 4.225,
            t_start: 1.0,
            t_end: 1973.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a", self.a),
            ("b_ratio", self.b_ratio),
            ("m", self.m),
            ("n0", self.n0),
            ("s0", self.s0),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::params(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.t_start < self.t_end) {
            return Err(Error::params(
                "t_end",
                format!("must exceed t_start, got {}..{}", self.t_start, self.t_end),
            ));
        }
        Ok(())
    }
}

/// Runs the compact model. A blow-up before `t_end` is reported in the
/// trace outcome together with the year reached; samples up to that year
/// are preserved.
pub fn simulate_compact(
    params: &CompactModelParams,
    integrator: Integrator,
) -> Result<SimulationTrace> {
    params.validate()?;
    let p = *params;

    let mut years = Vec::new();
    let mut population = Vec::new();
    let mut surplus = Vec::new();
    let mut gdp = Vec::new();

    let driver: Driver<2> = Driver {
        t_start: p.t_start,
        t_end: p.t_end,
        integrator,
    };
    let outcome = driver.run(
        [p.n0, p.s0],
        |_, y| {
            // Shared factor keeps the per-step increment ratio exact.
            let base = p.a * y[0] * y[1];
            [base, p.b_ratio * base]
        },
        |t, y| {
            if y[0] <= 0.0 {
                StepCheck::Abort(RunOutcome::NonPositiveState { year: t })
            } else if y[1] <= 0.0 {
                StepCheck::Abort(RunOutcome::NegativeSurplus { year: t })
            } else {
                StepCheck::Ok
            }
        },
        |t, y| {
            years.push(t);
            population.push(y[0]);
            surplus.push(y[1]);
            gdp.push((p.m * y[0] + y[1] * y[0]) / 1000.0);
        },
    )?;

    Ok(SimulationTrace {
        years,
        population,
        surplus: Some(surplus),
        gdp: Some(gdp),
        technology: None,
        integrator,
        outcome,
        metadata: meta(&[
            ("a", p.a),
            ("b_ratio", p.b_ratio),
            ("m", p.m),
            ("n0", p.n0),
            ("s0", p.s0),
            ("t_start", p.t_start),
            ("t_end", p.t_end),
        ]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small(t_end: f64) -> CompactModelParams {
        CompactModelParams {
            t_end,
            ..CompactModelParams::published_constants()
        }
    }

    #[test]
    fn one_euler_step_hand_computed() {
        let p = small(2.0);
        let trace = simulate_compact(&p, Integrator::euler_annual()).unwrap();
        assert_eq!(trace.len(), 2);
        let n1 = 230.82 + 0.000011383 * 4.225 * 230.82;
        let s1 = 4.225 + 0.96 * 0.000011383 * 230.82 * 4.225;
        assert_relative_eq!(trace.population[1], n1, max_relative = 1e-12);
        assert_relative_eq!(trace.surplus.as_ref().unwrap()[1], s1, max_relative = 1e-12);
        assert_relative_eq!(trace.population[1], 230.8311, max_relative = 1e-6);
        assert_relative_eq!(trace.surplus.as_ref().unwrap()[1], 4.23566, max_relative = 1e-5);
    }

    #[test]
    fn per_step_increment_ratio_is_exact() {
        let p = small(301.0);
        let trace = simulate_compact(&p, Integrator::euler_annual()).unwrap();
        let s = trace.surplus.as_ref().unwrap();
        for i in 1..trace.len() {
            // Increments as the scheme applies them: both scaled from the
            // shared factor a·N·S of the start-of-step state.
            let base = p.a * trace.population[i - 1] * s[i - 1];
            let (dn_applied, ds_applied) = (base, p.b_ratio * base);
            assert_relative_eq!(dn_applied / ds_applied, 1.0 / 0.96, max_relative = 1e-12);

            // Differencing the stored states re-adds one rounding of the
            // state magnitude (ulp(N)/increment), so the realized ratio is
            // only representation-exact.
            let dn = trace.population[i] - trace.population[i - 1];
            let ds = s[i] - s[i - 1];
            assert_relative_eq!(dn, dn_applied, max_relative = 5e-12);
            assert_relative_eq!(dn / ds, 1.0 / 0.96, max_relative = 5e-12);
        }
    }

    #[test]
    fn gdp_identity_holds() {
        let p = small(501.0);
        let trace = simulate_compact(&p, Integrator::rk4_default()).unwrap();
        let s = trace.surplus.as_ref().unwrap();
        let g = trace.gdp.as_ref().unwrap();
        for i in 0..trace.len() {
            let expect = (p.m * trace.population[i] + s[i] * trace.population[i]) / 1000.0;
            assert_relative_eq!(g[i], expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn vanishing_surplus_freezes_population() {
        // S0 -> 0: N stays put while S grows exponentially at ~b_ratio·a·N0.
        let p = CompactModelParams {
            s0: 1e-9,
            t_start: 0.0,
            t_end: 1000.0,
            ..CompactModelParams::published_constants()
        };
        let trace = simulate_compact(&p, Integrator::euler_annual()).unwrap();
        let n_final = *trace.population.last().unwrap();
        assert!((n_final - p.n0).abs() / p.n0 < 1e-6);

        let s = trace.surplus.as_ref().unwrap();
        let growth = (s[1000] / s[0]).ln() / 1000.0;
        let expected = (1.0 + 0.96 * p.a * p.n0).ln();
        assert_relative_eq!(growth, expected, max_relative = 1e-6);
        assert_relative_eq!(growth, 0.96 * p.a * p.n0, max_relative = 5e-3);
    }

    #[test]
    fn euler_error_scales_linearly_against_rk4_reference() {
        // Over 1-1500 the published-constant trajectory is still finite;
        // halving the Euler step should roughly halve the endpoint error
        // measured against a fine RK4 reference.
        let p = small(1500.0);
        let reference = simulate_compact(&p, Integrator::Rk4 { step: 0.125 }).unwrap();
        let ref_n = *reference.population.last().unwrap();
        let err = |h: f64| -> f64 {
            let t = simulate_compact(&p, Integrator::Euler { step: h }).unwrap();
            (t.population.last().unwrap() - ref_n).abs()
        };
        let order = (err(1.0) / err(0.5)).log2();
        assert!((order - 1.0).abs() <= 0.3, "euler order {order}");
    }

    #[test]
    fn published_constants_blow_up_before_reaching_1973() {
        let p = CompactModelParams::published_constants();
        let trace = simulate_compact(&p, Integrator::euler_annual()).unwrap();
        match trace.outcome {
            RunOutcome::BlowUp { year } => {
                assert!(year < 1973.0, "blow-up year {year}");
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn invalid_params_are_field_named() {
        let p = CompactModelParams {
            s0: -1.0,
            ..CompactModelParams::published_constants()
        };
        let err = simulate_compact(&p, Integrator::euler_annual()).unwrap_err();
        assert!(err.to_string().contains("s0"), "{err}");

        let p = CompactModelParams {
            t_end: 0.5,
            ..CompactModelParams::published_constants()
        };
        assert!(simulate_compact(&p, Integrator::euler_annual()).is_err());
    }
}
