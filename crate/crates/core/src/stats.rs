//! Regression and correlation machinery: Pearson correlation, ordinary
//! least squares (with and without intercept), low-degree polynomial fits,
//! and Student-t tail probabilities.
//!
//! Through-origin regressions follow the no-constant convention: degrees of
//! freedom n−1 and R² measured against the uncentered sum of squares.

use serde::Serialize;

use crate::dataset::MacroDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressionMode {
    WithIntercept,
    ThroughOrigin,
}

/// Slope/intercept estimates with their standard errors, t-statistics and
/// two-tailed p-values. Intercept fields are `None` in through-origin mode.
#[derive(Debug, Clone, Serialize)]
pub struct RegressionResult {
    pub mode: RegressionMode,
    pub slope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    #[serde(rename = "se")]
    pub slope_se: f64,
    #[serde(rename = "t")]
    pub t_slope: f64,
    #[serde(rename = "p")]
    pub p_slope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept_se: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_intercept: Option<f64>,
    pub r: f64,
    pub r2: f64,
    pub n: usize,
    pub dof: usize,
}

/// Product-moment correlation. Requires n ≥ 3 and variance on both sides.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::validation("paired series differ in length"));
    }
    if x.len() < 3 {
        return Err(Error::validation(format!(
            "correlation needs at least 3 pairs, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx <= 0.0 {
        return Err(Error::domain("x series has zero variance"));
    }
    if syy <= 0.0 {
        return Err(Error::domain("y series has zero variance"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Ordinary least squares of y on x.
///
/// Through-origin mode uses the closed form slope = Σxy/Σx², dof = n−1, and
/// R² against the uncentered Σy²; r is then sign(slope)·√R². With an
/// intercept, r is the Pearson correlation and r² = R².
pub fn ols(x: &[f64], y: &[f64], through_origin: bool) -> Result<RegressionResult> {
    if x.len() != y.len() {
        return Err(Error::validation("paired series differ in length"));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::validation(format!(
            "regression needs at least 3 pairs, got {n}"
        )));
    }
    let nf = n as f64;

    if through_origin {
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        if sxx <= 0.0 {
            return Err(Error::domain("degenerate design: all x are zero"));
        }
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let slope = sxy / sxx;
        let sse: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (b - slope * a).powi(2))
            .sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        let dof = n - 1;
        let s2 = sse / dof as f64;
        let slope_se = (s2 / sxx).sqrt();
        let t_slope = if slope_se > 0.0 {
            slope / slope_se
        } else {
            f64::INFINITY
        };
        let p_slope = p_value(t_slope, dof)?;
        let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 0.0 };
        let r = slope.signum() * r2.max(0.0).sqrt();
        return Ok(RegressionResult {
            mode: RegressionMode::ThroughOrigin,
            slope,
            intercept: None,
            slope_se,
            t_slope,
            p_slope,
            intercept_se: None,
            t_intercept: None,
            p_intercept: None,
            r,
            r2,
            n,
            dof,
        });
    }

    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 {
        return Err(Error::domain("degenerate design: all x equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let dof = n - 2;
    let s2 = sse / dof as f64;
    let slope_se = (s2 / sxx).sqrt();
    let intercept_se = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    let t_slope = if slope_se > 0.0 {
        slope / slope_se
    } else {
        f64::INFINITY
    };
    let t_intercept = if intercept_se > 0.0 {
        intercept / intercept_se
    } else {
        f64::INFINITY
    };
    let r = pearson(x, y)?;
    Ok(RegressionResult {
        mode: RegressionMode::WithIntercept,
        slope,
        intercept: Some(intercept),
        slope_se,
        t_slope,
        p_slope: p_value(t_slope, dof)?,
        intercept_se: Some(intercept_se),
        t_intercept: Some(t_intercept),
        p_intercept: Some(p_value(t_intercept, dof)?),
        r,
        r2: if syy > 0.0 { r * r } else { 0.0 },
        n,
        dof,
    })
}

/// Polynomial least squares of degree 1 or 2.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    /// Coefficients in ascending powers of x: value = Σ coefficients[i]·xⁱ.
    pub coefficients: Vec<f64>,
    pub r2: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    }
}

/// Least-squares polynomial via normal equations on centered-and-scaled x,
/// mapped back to the original variable. R² is 1 − SSE/SST.
pub fn poly_fit(x: &[f64], y: &[f64], degree: usize) -> Result<PolyFit> {
    if !(1..=2).contains(&degree) {
        return Err(Error::params("degree", "must be 1 or 2"));
    }
    if x.len() != y.len() {
        return Err(Error::validation("paired series differ in length"));
    }
    let n = x.len();
    if n < degree + 2 {
        return Err(Error::validation(format!(
            "degree-{degree} fit needs at least {} points, got {n}",
            degree + 2
        )));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let sx = (x.iter().map(|a| (a - mx) * (a - mx)).sum::<f64>() / nf).sqrt();
    if sx == 0.0 {
        return Err(Error::domain("degenerate design: all x equal"));
    }
    let z: Vec<f64> = x.iter().map(|a| (a - mx) / sx).collect();

    // Normal equations A c = b over the scaled basis [1, z, z², ...].
    let dim = degree + 1;
    let mut a = vec![vec![0.0; dim]; dim];
    let mut b = vec![0.0; dim];
    for (zi, &yi) in z.iter().zip(y) {
        let mut powers = [1.0; 3];
        for p in 1..dim {
            powers[p] = powers[p - 1] * zi;
        }
        for i in 0..dim {
            for (j, row) in a.iter_mut().enumerate().take(dim) {
                row[i] += powers[i] * powers[j];
            }
            b[i] += powers[i] * yi;
        }
    }
    let c = solve_linear(&mut a, &mut b)?;

    let pred = |zi: f64| -> f64 { c.iter().rev().fold(0.0, |acc, &ci| acc * zi + ci) };
    let my = y.iter().sum::<f64>() / nf;
    let sse: f64 = z.iter().zip(y).map(|(&zi, &yi)| (yi - pred(zi)).powi(2)).sum();
    let sst: f64 = y.iter().map(|&yi| (yi - my) * (yi - my)).sum();

    // Map coefficients back to the original x.
    let coefficients = match degree {
        1 => vec![c[0] - c[1] * mx / sx, c[1] / sx],
        _ => vec![
            c[0] - c[1] * mx / sx + c[2] * mx * mx / (sx * sx),
            c[1] / sx - 2.0 * c[2] * mx / (sx * sx),
            c[2] / (sx * sx),
        ],
    };
    Ok(PolyFit {
        coefficients,
        r2: if sst > 0.0 { 1.0 - sse / sst } else { 1.0 },
    })
}

fn solve_linear(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let dim = b.len();
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot_row][col].abs() < 1e-10 {
            return Err(Error::domain(
                "ill-conditioned normal matrix (duplicate x values?)",
            ));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..dim {
            let factor = a[row][col] / a[col][col];
            let (pivot_rows, rest) = a.split_at_mut(row);
            let pivot = &pivot_rows[col];
            for (entry, p) in rest[0][col..dim].iter_mut().zip(&pivot[col..dim]) {
                *entry -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; dim];
    for row in (0..dim).rev() {
        let mut acc = b[row];
        for k in (row + 1)..dim {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Two-tailed Student-t tail probability P(|T| > t) at `dof` degrees of
/// freedom, via the regularized incomplete beta function. The result is
/// clamped into (0, 1] so extreme statistics never report exactly zero.
pub fn p_value(t_stat: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Err(Error::params("dof", "must be at least 1"));
    }
    if t_stat.is_nan() {
        return Err(Error::domain("t statistic is NaN"));
    }
    if t_stat.is_infinite() {
        return Ok(f64::MIN_POSITIVE);
    }
    let nu = dof as f64;
    let x = nu / (nu + t_stat * t_stat);
    let p = betainc_regularized(0.5 * nu, 0.5, x);
    Ok(p.clamp(f64::MIN_POSITIVE, 1.0))
}

/// Regresses surplus on population over `[year_lo, year_hi]` — the
/// proportionality test between per-capita surplus and population size.
pub fn surplus_population_proportionality(
    dataset: &MacroDataset,
    year_lo: f64,
    year_hi: f64,
) -> Result<RegressionResult> {
    let sub = dataset.subrange(year_lo, year_hi)?;
    if sub.len() < 4 {
        return Err(Error::validation(format!(
            "range {year_lo}..{year_hi} covers only {} points; need at least 4",
            sub.len()
        )));
    }
    let x: Vec<f64> = sub.population().values().collect();
    let y: Vec<f64> = sub.surplus_series().values().collect();
    ols(&x, &y, false)
}

// ---------------------------------------------------------------------------
// Special functions.

/// ln Γ(x) for x > 0 (Lanczos approximation, ~1e-10 relative accuracy).
pub fn ln_gamma(x: f64) -> f64 {
    const COF: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_9e-2,
        -0.539_523_938_495_3e-5,
    ];
    let mut ser = 1.000_000_000_190_015;
    let mut den = x;
    for c in COF {
        den += 1.0;
        ser += c / den;
    }
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
/// (modified Lentz), accurate to better than 1e-10 over the t-test range.
pub fn betainc_regularized(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cont_frac(a, b, x) / a
    } else {
        1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b
    }
}

fn beta_cont_frac(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let mf = m as f64;
        let m2 = 2.0 * mf;

        let aa = mf * (b - mf) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn pearson_perfect_affine() {
        let x = [1.0, 2.0, 5.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert_relative_eq!(pearson(&x, &y).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn pearson_centered_cancellation() {
        let x = [1.0, 2.0, 3.0];
        let y = [1.0, -1.0, 1.0];
        assert_abs_diff_eq!(pearson(&x, &y).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pearson_rejects_constant() {
        assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn ols_through_origin_exact() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let r = ols(&x, &y, true).unwrap();
        assert_relative_eq!(r.slope, 3.0);
        assert_eq!(r.slope_se, 0.0);
        assert_eq!(r.dof, 3);
        assert_relative_eq!(r.r2, 1.0);
        assert!(r.intercept.is_none());
    }

    #[test]
    fn ols_with_intercept_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| -2.0 + 0.5 * v).collect();
        let r = ols(&x, &y, false).unwrap();
        assert_relative_eq!(r.slope, 0.5, max_relative = 1e-12);
        assert_relative_eq!(r.intercept.unwrap(), -2.0, max_relative = 1e-12);
        assert_eq!(r.dof, 3);
    }

    #[test]
    fn ols_r2_matches_pearson_square() {
        let x = [1.0, 2.0, 3.0, 5.0, 8.0];
        let y = [2.0, 2.5, 4.0, 4.5, 9.0];
        let r = ols(&x, &y, false).unwrap();
        let rho = pearson(&x, &y).unwrap();
        assert_relative_eq!(r.r2, rho * rho, max_relative = 1e-12);
    }

    #[test]
    fn ols_rejects_degenerate_design() {
        assert!(ols(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0], false).is_err());
        assert!(ols(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0], true).is_err());
    }

    #[test]
    fn poly_exact_quadratic() {
        let x = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let fit = poly_fit(&x, &y, 2).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.coefficients[1], 0.0, epsilon = 1e-10);
        assert_relative_eq!(fit.coefficients[2], 1.0, max_relative = 1e-10);
        assert_relative_eq!(fit.r2, 1.0, max_relative = 1e-12);

        let lin = poly_fit(&x, &y, 1).unwrap();
        assert_abs_diff_eq!(lin.coefficients[1], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(lin.r2, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn poly_eval_round_trip() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v + 0.25 * v * v).collect();
        let fit = poly_fit(&x, &y, 2).unwrap();
        for (&xi, &yi) in x.iter().zip(&y) {
            assert_relative_eq!(fit.eval(xi), yi, max_relative = 1e-9);
        }
    }

    #[test]
    fn poly_rejects_duplicate_x() {
        let x = [1.0, 1.0, 1.0, 1.0];
        let y = [1.0, 2.0, 3.0, 4.0];
        assert!(poly_fit(&x, &y, 2).is_err());
    }

    #[test]
    fn p_value_center_and_normal_limit() {
        assert_relative_eq!(p_value(0.0, 5).unwrap(), 1.0);
        // dof -> infinity surrogate: standard normal two-tail at 1.96
        assert_abs_diff_eq!(p_value(1.96, 1_000_000).unwrap(), 0.05, epsilon = 5e-4);
    }

    #[test]
    fn p_value_closed_forms() {
        // dof = 1: P(|T| > t) = 1 − (2/π)·atan(t)
        for t in [0.5_f64, 1.0, 2.0, 10.0] {
            let expect = 1.0 - 2.0 / std::f64::consts::PI * t.atan();
            assert_relative_eq!(p_value(t, 1).unwrap(), expect, max_relative = 1e-9);
        }
        // dof = 2: P(|T| > t) = 1 − t/√(2 + t²)
        for t in [0.5_f64, 1.0, 3.0] {
            let expect = 1.0 - t / (2.0 + t * t).sqrt();
            assert_relative_eq!(p_value(t, 2).unwrap(), expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn p_value_published_magnitude() {
        // t = 8.315 at 7 dof is well below the 0.001 level
        let p = p_value(8.315, 7).unwrap();
        assert!(p < 1e-3, "p = {p}");
        assert!(p > 1e-6, "p = {p}");
    }

    #[test]
    fn betainc_arcsine_oracle() {
        // I_x(1/2, 1/2) = (2/π)·asin(√x)
        for x in [0.05_f64, 0.2, 0.5, 0.8, 0.95] {
            let expect = 2.0 / std::f64::consts::PI * x.sqrt().asin();
            assert_relative_eq!(betainc_regularized(0.5, 0.5, x), expect, max_relative = 1e-10);
        }
        // I_x(1, b) = 1 − (1−x)^b
        for (b, x) in [(2.5, 0.3), (4.0, 0.7)] {
            assert_relative_eq!(
                betainc_regularized(1.0, b, x),
                1.0 - (1.0 - x).powf(b),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(ln_gamma(5.0), 24.0_f64.ln(), epsilon = 1e-10);
        assert_relative_eq!(
            ln_gamma(0.5),
            std::f64::consts::PI.sqrt().ln(),
            max_relative = 1e-10
        );
    }
}
