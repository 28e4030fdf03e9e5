//! Technology-coupled Malthusian systems.
//!
//! Output is Cobb-Douglas in technology and population: per-capita income
//! g = r_tech·T·N^(α−1) (dollars, with N in millions — r_tech absorbs the
//! unit constants), surplus S = g − m, and population responds as
//! dN/dt = a·S·N. Technology either grows with population (dT/dt = b·N·T,
//! the endogenous-inventors variant) or exponentially (dT/dt = c·T), the
//! latter with a Bernoulli closed-form solution used as an oracle.

use super::{meta, Driver, Integrator, RunOutcome, SimulationTrace, StepCheck};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KremerParams {
    /// Output elasticity of population, in (0, 1).
    pub alpha: f64,
    /// Output scale of the production function.
    pub r_tech: f64,
    /// Technology growth coefficient: b (per-person innovation rate) in the
    /// population-coupled variant, c (constant relative rate) in the
    /// exponential variant.
    pub b_or_c: f64,
    /// Population response to surplus, 1/(dollar·year).
    pub a: f64,
    /// Subsistence-plus-infrastructure threshold, dollars.
    pub m: f64,
    /// Equilibrium per-capita income used by the equilibrium-population map.
    pub g_bar: f64,
    /// Initial technology index.
    pub tech0: f64,
    /// Initial population, millions.
    pub n0: f64,
}

impl KremerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::params(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        for (name, v) in [
            ("r_tech", self.r_tech),
            ("a", self.a),
            ("m", self.m),
            ("g_bar", self.g_bar),
            ("tech0", self.tech0),
            ("n0", self.n0),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::params(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.b_or_c >= 0.0) || !self.b_or_c.is_finite() {
            return Err(Error::params(
                "b_or_c",
                format!("must be non-negative, got {}", self.b_or_c),
            ));
        }
        Ok(())
    }

    /// Per-capita surplus at (population, technology).
    pub fn surplus(&self, n: f64, tech: f64) -> f64 {
        self.r_tech * tech * n.powf(self.alpha - 1.0) - self.m
    }

    fn metadata(&self) -> Vec<(String, String)> {
        meta(&[
            ("alpha", self.alpha),
            ("r_tech", self.r_tech),
            ("b_or_c", self.b_or_c),
            ("a", self.a),
            ("m", self.m),
            ("g_bar", self.g_bar),
            ("tech0", self.tech0),
            ("n0", self.n0),
        ])
    }
}

/// Population at which per-capita income equals `g_bar` for a given
/// technology level: N̄ = (g_bar/(r_tech·T))^(1/(α−1)). Increasing in T.
pub fn equilibrium_population(tech: f64, g_bar: f64, alpha: f64, r_tech: f64) -> Result<f64> {
    if !(tech > 0.0) || !(g_bar > 0.0) || !(r_tech > 0.0) {
        return Err(Error::domain(
            "equilibrium population needs positive technology, income, and scale",
        ));
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::domain(
            "alpha = 1 makes the equilibrium exponent singular",
        ));
    }
    Ok((g_bar / (r_tech * tech)).powf(1.0 / (alpha - 1.0)))
}

/// Population-coupled technology growth: dN/dt = a·S·N, dT/dt = b·N·T.
pub fn simulate_kuznetsian(
    params: &KremerParams,
    t_start: f64,
    t_end: f64,
    integrator: Integrator,
) -> Result<SimulationTrace> {
    params.validate()?;
    let p = *params;
    if p.surplus(p.n0, p.tech0) <= 0.0 {
        return Err(Error::params(
            "n0",
            format!(
                "initial surplus is non-positive ({:.3}); the starting state is below the Malthusian floor",
                p.surplus(p.n0, p.tech0)
            ),
        ));
    }
    run_tech_system(
        &p,
        t_start,
        t_end,
        integrator,
        move |_, y: &[f64; 2]| {
            let s = p.surplus(y[0], y[1]);
            [p.a * s * y[0], p.b_or_c * y[0] * y[1]]
        },
        |_, y: &[f64; 2]| y[1],
    )
}

/// Exponential technology: dN/dt = a·S·N with T(t) = tech0·e^{c·(t−t_start)}.
pub fn simulate_exponential_tech(
    params: &KremerParams,
    t_start: f64,
    t_end: f64,
    integrator: Integrator,
) -> Result<SimulationTrace> {
    params.validate()?;
    let p = *params;
    if p.surplus(p.n0, p.tech0) <= 0.0 {
        return Err(Error::params(
            "n0",
            "initial surplus is non-positive; the starting state is below the Malthusian floor",
        ));
    }
    let tech_at = move |t: f64| p.tech0 * (p.b_or_c * (t - t_start)).exp();
    run_tech_system(
        &p,
        t_start,
        t_end,
        integrator,
        move |t, y: &[f64; 2]| {
            let tech = tech_at(t);
            let s = p.surplus(y[0], tech);
            // The second state slot mirrors the analytic technology so both
            // variants share one driver; its derivative is c·T.
            [p.a * s * y[0], p.b_or_c * tech]
        },
        move |t: f64, _y: &[f64; 2]| tech_at(t),
    )
}

fn run_tech_system(
    p: &KremerParams,
    t_start: f64,
    t_end: f64,
    integrator: Integrator,
    deriv: impl Fn(f64, &[f64; 2]) -> [f64; 2],
    tech_of: impl Fn(f64, &[f64; 2]) -> f64,
) -> Result<SimulationTrace> {
    let p = *p;
    let mut years = Vec::new();
    let mut population = Vec::new();
    let mut surplus = Vec::new();
    let mut gdp = Vec::new();
    let mut technology = Vec::new();

    let driver: Driver<2> = Driver {
        t_start,
        t_end,
        integrator,
    };
    let outcome = driver.run(
        [p.n0, p.tech0],
        deriv,
        |t, y| {
            if y[0] <= 0.0 {
                return StepCheck::Abort(RunOutcome::NonPositiveState { year: t });
            }
            let tech = tech_of(t, y);
            if tech <= 0.0 {
                return StepCheck::Abort(RunOutcome::NonPositiveState { year: t });
            }
            if p.surplus(y[0], tech) <= 0.0 {
                StepCheck::Abort(RunOutcome::NegativeSurplus { year: t })
            } else {
                StepCheck::Ok
            }
        },
        |t, y| {
            let tech = tech_of(t, y);
            let s = p.surplus(y[0], tech);
            years.push(t);
            population.push(y[0]);
            surplus.push(s);
            gdp.push((p.m * y[0] + s * y[0]) / 1000.0);
            technology.push(tech);
        },
    )?;

    Ok(SimulationTrace {
        years,
        population,
        surplus: Some(surplus),
        gdp: Some(gdp),
        technology: Some(technology),
        integrator,
        outcome,
        metadata: p.metadata(),
    })
}

/// Long-run per-capita surplus of the exponential-technology system:
/// S → c/((1−α)·a), independent of initial conditions.
pub fn limiting_surplus(params: &KremerParams) -> f64 {
    params.b_or_c / ((1.0 - params.alpha) * params.a)
}

/// Integration constant anchoring the closed form at N(0) = n0.
pub fn bernoulli_integration_constant(params: &KremerParams) -> f64 {
    let one_minus_alpha = 1.0 - params.alpha;
    let rate = params.b_or_c + one_minus_alpha * params.a * params.m;
    params.n0.powf(one_minus_alpha)
        - one_minus_alpha * params.a * params.r_tech * params.tech0 / rate
}

/// Analytic population of the exponential-technology system at `t` years
/// after the start:
///
/// N^(1−α) = C·e^(−(1−α)·a·m·t) + ((1−α)·a·r·T0/(c+(1−α)·a·m))·e^(c·t).
pub fn bernoulli_closed_form(params: &KremerParams, c_integration: f64, t: f64) -> Result<f64> {
    params.validate()?;
    let one_minus_alpha = 1.0 - params.alpha;
    let lam = one_minus_alpha * params.a * params.m;
    let rate = params.b_or_c + lam;
    let forced = one_minus_alpha * params.a * params.r_tech * params.tech0 / rate;
    let bracket = c_integration * (-lam * t).exp() + forced * (params.b_or_c * t).exp();
    if bracket <= 0.0 {
        return Err(Error::domain(format!(
            "closed form undefined: bracket {bracket} is non-positive (inconsistent integration constant)"
        )));
    }
    Ok(bracket.powf(1.0 / one_minus_alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn base() -> KremerParams {
        KremerParams {
            alpha: 0.5,
            r_tech: 500.0,
            b_or_c: 0.0,
            a: 1e-5,
            m: 440.0,
            g_bar: 500.0,
            tech0: 1.0,
            n0: 1.0,
        }
    }

    #[test]
    fn equilibrium_scaling_in_technology() {
        // alpha = 0.5: doubling T scales the equilibrium by 2^(1/(1-0.5)) = 4.
        let n1 = equilibrium_population(1.0, 500.0, 0.5, 500.0).unwrap();
        let n2 = equilibrium_population(2.0, 500.0, 0.5, 500.0).unwrap();
        assert_relative_eq!(n2 / n1, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn equilibrium_unit_base_case() {
        // g_bar = r_tech·T -> equilibrium population 1.
        assert_relative_eq!(
            equilibrium_population(2.0, 1000.0, 0.37, 500.0).unwrap(),
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn equilibrium_rejects_alpha_one() {
        assert!(equilibrium_population(1.0, 500.0, 1.0, 500.0).is_err());
    }

    #[test]
    fn frozen_technology_saturates_logistically() {
        // b = 0: population converges monotonically toward the S = 0 ceiling.
        let p = base();
        let trace = simulate_kuznetsian(&p, 0.0, 2000.0, Integrator::rk4_default()).unwrap();
        assert!(trace.outcome.is_completed(), "{:?}", trace.outcome);
        let n = &trace.population;
        assert!(n.windows(2).all(|w| w[1] >= w[0]), "monotone growth");
        let ceiling = equilibrium_population(p.tech0, p.m, p.alpha, p.r_tech).unwrap();
        let last = *n.last().unwrap();
        assert!(last < ceiling);
        assert!(
            (ceiling - last) / ceiling < 0.01,
            "population {last} should approach the ceiling {ceiling}"
        );
        let s = trace.surplus.as_ref().unwrap();
        assert!(s.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn exponential_tech_with_zero_rate_matches_frozen_kuznetsian() {
        let p = base();
        let a = simulate_kuznetsian(&p, 0.0, 300.0, Integrator::rk4_default()).unwrap();
        let b = simulate_exponential_tech(&p, 0.0, 300.0, Integrator::rk4_default()).unwrap();
        for (x, y) in a.population.iter().zip(&b.population) {
            assert_relative_eq!(x, y, max_relative = 1e-9);
        }
    }

    #[test]
    fn closed_form_anchors_initial_population() {
        let mut p = base();
        p.b_or_c = 0.002;
        let c = bernoulli_integration_constant(&p);
        assert_relative_eq!(
            bernoulli_closed_form(&p, c, 0.0).unwrap(),
            p.n0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn closed_form_matches_rk4_trace() {
        let mut p = base();
        p.b_or_c = 0.004;
        p.n0 = 0.5;
        let trace =
            simulate_exponential_tech(&p, 0.0, 500.0, Integrator::rk4_default()).unwrap();
        assert!(trace.outcome.is_completed(), "{:?}", trace.outcome);
        let c = bernoulli_integration_constant(&p);
        for (i, &year) in trace.years.iter().enumerate() {
            let analytic = bernoulli_closed_form(&p, c, year).unwrap();
            assert_relative_eq!(trace.population[i], analytic, max_relative = 1e-6);
        }
    }

    #[test]
    fn limiting_surplus_formula_and_convergence() {
        let mut p = base();
        p.b_or_c = 0.003;
        let limit = limiting_surplus(&p);
        assert_relative_eq!(limit, 0.003 / (0.5 * 1e-5), max_relative = 1e-12);

        // Run until the transient term is far below 1e-6.
        let lam = (1.0 - p.alpha) * p.a * p.m + p.b_or_c;
        let t_needed = (1e-7_f64.ln() / -lam).ceil();
        let trace =
            simulate_exponential_tech(&p, 0.0, t_needed, Integrator::rk4_default()).unwrap();
        assert!(trace.outcome.is_completed(), "{:?}", trace.outcome);
        let s_final = *trace.surplus.as_ref().unwrap().last().unwrap();
        assert_relative_eq!(s_final, limit, max_relative = 1e-3);
    }

    #[test]
    fn doubling_rate_doubles_limit() {
        let mut p = base();
        p.b_or_c = 0.002;
        let l1 = limiting_surplus(&p);
        p.b_or_c = 0.004;
        assert_relative_eq!(limiting_surplus(&p), 2.0 * l1, max_relative = 1e-12);
    }

    #[test]
    fn balanced_start_keeps_surplus_proportional_to_population() {
        let mut p = base();
        p.b_or_c = 5e-3;
        // g_bar solves S = b·N/(a(1−α)) at the equilibrium map, so the run
        // starts on the balanced path and reaches the S ≈ k·N regime.
        p.g_bar = 816.0;
        p.n0 = equilibrium_population(p.tech0, p.g_bar, p.alpha, p.r_tech).unwrap();
        let trace = simulate_kuznetsian(&p, 0.0, 400.0, Integrator::rk4_default()).unwrap();
        assert!(trace.outcome.is_completed(), "{:?}", trace.outcome);
        let burn = trace.len() / 10;
        let n = &trace.population[burn..];
        let s = &trace.surplus.as_ref().unwrap()[burn..];
        let r = crate::stats::pearson(n, s).unwrap();
        assert!(r > 0.99, "corr(S, N) = {r}");
    }

    #[test]
    fn instantaneous_adjustment_recovers_quadratic_growth() {
        // Pin population to the equilibrium map each step; then
        // (dN/dt)/N² should be constant (= b/(1−α) scaled by nothing).
        let p = KremerParams {
            alpha: 0.4,
            r_tech: 520.0,
            b_or_c: 1e-4,
            a: 1e-5,
            m: 440.0,
            g_bar: 470.0,
            tech0: 1.0,
            n0: 1.0,
        };
        let h = 0.25;
        let mut tech = p.tech0;
        let mut pops = Vec::new();
        for _ in 0..4000 {
            let n = equilibrium_population(tech, p.g_bar, p.alpha, p.r_tech).unwrap();
            pops.push(n);
            tech += h * p.b_or_c * n * tech; // dT/dt = b·N·T
        }
        let mut ratios = Vec::new();
        for i in 1..pops.len() - 1 {
            let dn_dt = (pops[i + 1] - pops[i - 1]) / (2.0 * h);
            ratios.push(dn_dt / (pops[i] * pops[i]));
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        for r in &ratios {
            assert!(
                (r - mean).abs() / mean < 0.01,
                "quadratic-rate constancy violated: {r} vs mean {mean}"
            );
        }
    }

    #[test]
    fn alpha_bounds_enforced() {
        let mut p = base();
        p.alpha = 1.0;
        assert!(simulate_kuznetsian(&p, 0.0, 10.0, Integrator::rk4_default()).is_err());
    }

    #[test]
    fn closed_form_rejects_inconsistent_constant() {
        let mut p = base();
        p.b_or_c = 0.002;
        // A large negative integration constant makes the bracket negative.
        let err = bernoulli_closed_form(&p, -1e12, 1.0).unwrap_err();
        assert!(err.to_string().contains("integration constant"), "{err}");
    }
}
