//! Closed-form blow-up trend family: v(t) = scale / (t0 − t)^exponent.
//!
//! exponent = 1 is the simple hyperbola, exponent = 2 the quadratic one;
//! any positive exponent is accepted (the fitted power-law case).

use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters of a finite-time-singularity trend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendParams {
    /// Scale constant, > 0. Serialized as `C`.
    #[serde(rename = "C")]
    pub scale: f64,
    /// Singularity year: the curve diverges as t → t0 from below.
    #[serde(rename = "t0")]
    pub singularity_year: f64,
    /// Power of the divergence, > 0. Serialized as `k`.
    #[serde(rename = "k")]
    pub exponent: f64,
}

impl TrendParams {
    pub fn new(scale: f64, singularity_year: f64, exponent: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::params("scale", format!("must be positive, got {scale}")));
        }
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(Error::params(
                "exponent",
                format!("must be positive, got {exponent}"),
            ));
        }
        if !singularity_year.is_finite() {
            return Err(Error::params("singularity_year", "must be finite"));
        }
        Ok(Self {
            scale,
            singularity_year,
            exponent,
        })
    }

    pub fn simple_hyperbola(scale: f64, singularity_year: f64) -> Result<Self> {
        Self::new(scale, singularity_year, 1.0)
    }

    pub fn quadratic_hyperbola(scale: f64, singularity_year: f64) -> Result<Self> {
        Self::new(scale, singularity_year, 2.0)
    }
}

/// Evaluate the trend at year `t`. Only defined left of the singularity.
pub fn eval_trend(p: &TrendParams, t: f64) -> Result<f64> {
    let remaining = p.singularity_year - t;
    if remaining <= 0.0 {
        return Err(Error::domain(format!(
            "trend undefined at t = {t}: at or past the singularity year {}",
            p.singularity_year
        )));
    }
    Ok(p.scale / remaining.powf(p.exponent))
}

/// Right-hand side of the equivalent ODE for the simple hyperbola:
/// dN/dt = N²/scale. Integrating from an on-curve initial condition
/// reproduces [`eval_trend`] exactly.
pub fn trend_ode_rhs(p: &TrendParams, n: f64) -> Result<f64> {
    if (p.exponent - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "ODE form holds for exponent 1, got {}",
            p.exponent
        )));
    }
    if n < 0.0 {
        return Err(Error::domain(format!("population must be >= 0, got {n}")));
    }
    Ok(n * n / p.scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn published_population_curve_value() {
        let p = TrendParams::simple_hyperbola(163158.78, 2014.0).unwrap();
        assert_relative_eq!(
            eval_trend(&p, 1973.0).unwrap(),
            163158.78 / 41.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn singularity_is_domain_error() {
        let p = TrendParams::quadratic_hyperbola(17355487.3, 2005.56).unwrap();
        assert!(eval_trend(&p, 2005.56).is_err());
        assert!(eval_trend(&p, 2010.0).is_err());
    }

    #[test]
    fn hand_arithmetic() {
        let p = TrendParams::simple_hyperbola(1000.0, 2000.0).unwrap();
        assert_relative_eq!(eval_trend(&p, 1000.0).unwrap(), 1.0);
    }

    #[test]
    fn ode_rhs_values() {
        let p = TrendParams::simple_hyperbola(100.0, 2000.0).unwrap();
        assert_relative_eq!(trend_ode_rhs(&p, 10.0).unwrap(), 1.0);
        assert_eq!(trend_ode_rhs(&p, 0.0).unwrap(), 0.0);

        let p = TrendParams::simple_hyperbola(163158.78, 2014.0).unwrap();
        assert_relative_eq!(
            trend_ode_rhs(&p, 3979.5).unwrap(),
            3979.5 * 3979.5 / 163158.78,
            max_relative = 1e-12
        );
    }

    #[test]
    fn ode_rhs_requires_unit_exponent() {
        let p = TrendParams::quadratic_hyperbola(100.0, 2000.0).unwrap();
        assert!(trend_ode_rhs(&p, 10.0).is_err());
    }

    #[test]
    fn monotone_increasing_left_of_singularity() {
        let p = TrendParams::new(500.0, 2050.0, 1.7).unwrap();
        let mut last = 0.0;
        for t in (1900..2049).map(f64::from) {
            let v = eval_trend(&p, t).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn log_linear_in_log_remaining_time() {
        // ln v = ln C − k ln(t0 − t): exact linearity with slope −k
        let p = TrendParams::new(123.4, 2030.0, 2.0).unwrap();
        let ts = [1900.0, 1950.0, 1990.0, 2020.0];
        for w in ts.windows(2) {
            let (t1, t2) = (w[0], w[1]);
            let slope = (eval_trend(&p, t2).unwrap().ln() - eval_trend(&p, t1).unwrap().ln())
                / ((p.singularity_year - t2).ln() - (p.singularity_year - t1).ln());
            assert_relative_eq!(slope, -2.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(TrendParams::new(-1.0, 2000.0, 1.0).is_err());
        assert!(TrendParams::new(1.0, 2000.0, 0.0).is_err());
        assert!(TrendParams::new(1.0, f64::NAN, 1.0).is_err());
    }

    /// Integrating dN/dt = N²/C from an on-curve start reproduces the
    /// closed form, with the textbook convergence orders.
    #[test]
    fn ode_integration_matches_closed_form() {
        let p = TrendParams::simple_hyperbola(163158.78, 2014.0).unwrap();
        let (t_start, t_end) = (1900.0, 1970.0);

        let err_euler = |h: f64| -> f64 {
            let mut n = eval_trend(&p, t_start).unwrap();
            let steps = ((t_end - t_start) / h).round() as usize;
            for _ in 0..steps {
                n += h * trend_ode_rhs(&p, n).unwrap();
            }
            (n - eval_trend(&p, t_end).unwrap()).abs()
        };
        let err_rk4 = |h: f64| -> f64 {
            let f = |n: f64| trend_ode_rhs(&p, n).unwrap();
            let mut n = eval_trend(&p, t_start).unwrap();
            let steps = ((t_end - t_start) / h).round() as usize;
            for _ in 0..steps {
                let k1 = f(n);
                let k2 = f(n + 0.5 * h * k1);
                let k3 = f(n + 0.5 * h * k2);
                let k4 = f(n + h * k3);
                n += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            (n - eval_trend(&p, t_end).unwrap()).abs()
        };

        let order = |e1: f64, e2: f64| (e1 / e2).log2();
        let euler_order = order(err_euler(0.5), err_euler(0.25));
        let rk4_order = order(err_rk4(1.0), err_rk4(0.5));
        assert!((euler_order - 1.0).abs() <= 0.3, "euler order {euler_order}");
        assert!((rk4_order - 4.0).abs() <= 0.3, "rk4 order {rk4_order}");
    }
}
