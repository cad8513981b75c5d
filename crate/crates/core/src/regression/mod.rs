//! Log-log OLS elasticity with correlation and two-sided significance.
//!
//! Both series are logged with the natural logarithm, GDP is regressed on
//! R&D, and the correlation t-statistic `t = r·√(n−2)/√(1−r²)` is tested
//! against Student's t with `n − 2` degrees of freedom.

mod student_t;

pub use student_t::{ln_gamma, regularized_incomplete_beta, student_t_cdf, two_sided_p};

use serde::Serialize;
use thiserror::Error;

use crate::indicators::{IndicatorError, IndicatorSeries};

#[derive(Debug, Error, PartialEq)]
pub enum RegressionError {
    #[error("series lengths differ ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 3 observations, got {0}")]
    TooFewObservations(usize),
    #[error("{0} series is constant")]
    ConstantSeries(&'static str),
    #[error("series `{series}` has non-positive value {value} in {year}")]
    NonPositive {
        series: String,
        year: i32,
        value: f64,
    },
    #[error("series `{x}` covers {x_span} but `{y}` covers {y_span}")]
    YearMisalignment {
        x: String,
        x_span: String,
        y: String,
        y_span: String,
    },
    #[error("perfect correlation (r = {r}); significance is undefined")]
    PerfectCorrelation { r: f64 },
    #[error("perfectly collinear input (slope = {slope}, r = {r}); significance is undefined")]
    Collinear { slope: f64, r: f64 },
    #[error("degrees of freedom must be at least 1, got {0}")]
    DegreesOfFreedom(u32),
    #[error("continued fraction did not converge (a={a}, b={b}, x={x})")]
    NoConvergence { a: f64, b: f64, x: f64 },
    #[error("{0}")]
    InvalidArgument(String),
}

impl From<IndicatorError> for RegressionError {
    fn from(e: IndicatorError) -> Self {
        RegressionError::InvalidArgument(e.to_string())
    }
}

pub type Result<T, E = RegressionError> = std::result::Result<T, E>;

/// Replaces each value by its natural logarithm.
pub fn log_transform(series: &IndicatorSeries) -> Result<IndicatorSeries> {
    let mut points = Vec::with_capacity(series.len());
    for &(year, value) in series.points() {
        if value <= 0.0 {
            return Err(RegressionError::NonPositive {
                series: series.name().to_string(),
                year,
                value,
            });
        }
        points.push((year, value.ln()));
    }
    Ok(IndicatorSeries::new(
        format!("ln_{}", series.name()),
        series.unit(),
        points,
    )?)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(RegressionError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(RegressionError::TooFewObservations(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(RegressionError::InvalidArgument(
            "non-finite observation".into(),
        ));
    }
    Ok(())
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&a| a == v[0])
}

/// Centered sums (Σdx², Σdy², Σdx·dy) and means.
struct Moments {
    x_mean: f64,
    y_mean: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

fn moments(x: &[f64], y: &[f64]) -> Moments {
    let x_mean = mean(x);
    let y_mean = mean(y);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - x_mean;
        let dy = yi - y_mean;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    Moments {
        x_mean,
        y_mean,
        sxx,
        syy,
        sxy,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub x_mean: f64,
    pub y_mean: f64,
}

/// Ordinary least squares of `y` on `x`.
pub fn fit_ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    check_pair(x, y)?;
    if is_constant(x) {
        return Err(RegressionError::ConstantSeries("x"));
    }
    let m = moments(x, y);
    if m.sxx == 0.0 {
        return Err(RegressionError::ConstantSeries("x"));
    }
    let slope = m.sxy / m.sxx;
    Ok(LinearFit {
        slope,
        intercept: m.y_mean - slope * m.x_mean,
        x_mean: m.x_mean,
        y_mean: m.y_mean,
    })
}

/// Pearson correlation, clamped to [−1, 1].
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    if is_constant(x) {
        return Err(RegressionError::ConstantSeries("x"));
    }
    if is_constant(y) {
        return Err(RegressionError::ConstantSeries("y"));
    }
    let m = moments(x, y);
    if m.sxx == 0.0 || m.syy == 0.0 {
        return Err(RegressionError::ConstantSeries(if m.sxx == 0.0 {
            "x"
        } else {
            "y"
        }));
    }
    Ok((m.sxy / (m.sxx * m.syy).sqrt()).clamp(-1.0, 1.0))
}

fn check_r(r: f64, n: usize) -> Result<()> {
    if n < 3 {
        return Err(RegressionError::TooFewObservations(n));
    }
    if r.is_nan() {
        return Err(RegressionError::InvalidArgument("r is NaN".into()));
    }
    if r.abs() >= 1.0 {
        return Err(RegressionError::PerfectCorrelation { r });
    }
    Ok(())
}

/// Correlation t-statistic `r·√(n−2)/√(1−r²)`.
pub fn t_statistic(r: f64, n: usize) -> Result<f64> {
    check_r(r, n)?;
    Ok(r * ((n - 2) as f64).sqrt() / (1.0 - r * r).sqrt())
}

/// Two-sided p-value of the correlation t-test.
pub fn p_value(r: f64, n: usize) -> Result<f64> {
    let t = t_statistic(r, n)?;
    let df = u32::try_from(n - 2)
        .map_err(|_| RegressionError::InvalidArgument(format!("sample size {n} too large")))?;
    two_sided_p(t, df)
}

/// Slope, intercept and correlation of a log-log fit, before significance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
    pub r_squared: f64,
    pub n: usize,
    pub x_mean: f64,
    pub y_mean: f64,
}

/// Full elasticity estimate of one log-log regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionResult {
    /// Elasticity of `y` with respect to `x`.
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
    pub r_squared: f64,
    pub n: usize,
    pub t_statistic: f64,
    pub p_value: f64,
    pub x_mean: f64,
    pub y_mean: f64,
}

/// Correlations this close to ±1 are treated as exact collinearity.
pub const COLLINEAR_TOLERANCE: f64 = 1e-12;

fn aligned_logs(x: &IndicatorSeries, y: &IndicatorSeries) -> Result<(Vec<f64>, Vec<f64>)> {
    if !x.years().eq(y.years()) {
        return Err(RegressionError::YearMisalignment {
            x: x.name().to_string(),
            x_span: x.span(),
            y: y.name().to_string(),
            y_span: y.span(),
        });
    }
    let lx = log_transform(x)?;
    let ly = log_transform(y)?;
    Ok((lx.values().collect(), ly.values().collect()))
}

/// Logs both series and fits `ln y = intercept + slope · ln x`.
pub fn fit_log_log(x: &IndicatorSeries, y: &IndicatorSeries) -> Result<LogLogFit> {
    let (lx, ly) = aligned_logs(x, y)?;
    let fit = fit_ols(&lx, &ly)?;
    let r = pearson_r(&lx, &ly)?;
    Ok(LogLogFit {
        slope: fit.slope,
        intercept: fit.intercept,
        pearson_r: r,
        r_squared: r * r,
        n: lx.len(),
        x_mean: fit.x_mean,
        y_mean: fit.y_mean,
    })
}

/// Elasticity of GDP with respect to R&D spending, with significance.
///
/// Perfectly collinear input (|r| within [`COLLINEAR_TOLERANCE`] of one) is reported as [`RegressionError::Collinear`],
/// carrying the slope and correlation that were recovered.
pub fn estimate_elasticity(
    rd: &IndicatorSeries,
    gdp: &IndicatorSeries,
) -> Result<RegressionResult> {
    let fit = fit_log_log(rd, gdp)?;
    if 1.0 - fit.pearson_r.abs() < COLLINEAR_TOLERANCE {
        return Err(RegressionError::Collinear {
            slope: fit.slope,
            r: fit.pearson_r,
        });
    }
    let (t, p) = match (
        t_statistic(fit.pearson_r, fit.n),
        p_value(fit.pearson_r, fit.n),
    ) {
        (Ok(t), Ok(p)) => (t, p),
        (Err(RegressionError::PerfectCorrelation { r }), _) => {
            return Err(RegressionError::Collinear {
                slope: fit.slope,
                r,
            })
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(RegressionResult {
        slope: fit.slope,
        intercept: fit.intercept,
        pearson_r: fit.pearson_r,
        r_squared: fit.r_squared,
        n: fit.n,
        t_statistic: t,
        p_value: p,
        x_mean: fit.x_mean,
        y_mean: fit.y_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicators::Unit;

    fn series(name: &str, values: &[f64]) -> IndicatorSeries {
        let points = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (2014 + i as i32, v))
            .collect();
        IndicatorSeries::new(name, Unit::BillionsUsd, points).unwrap()
    }

    #[test]
    fn log_transform_values() {
        let s = series("s", &[1.0, std::f64::consts::E]);
        let l = log_transform(&s).unwrap();
        assert_eq!(l.points()[0], (2014, 0.0));
        assert!((l.points()[1].1 - 1.0).abs() < 1e-15);
        let bad = series("s", &[1.0, -3.0]);
        assert_eq!(
            log_transform(&bad).unwrap_err(),
            RegressionError::NonPositive {
                series: "s".into(),
                year: 2015,
                value: -3.0
            }
        );
    }

    #[test]
    fn ols_examples() {
        let f = fit_ols(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15 && f.intercept.abs() < 1e-15);
        let f = fit_ols(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((f.slope, f.intercept), (0.0, 5.0));
        // Σ(x−x̄)(y−ȳ) = 4.5, Σ(x−x̄)² = 5
        let f = fit_ols(&[0.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!((f.slope - 0.9).abs() < 1e-14);
        assert!((f.intercept - 0.9).abs() < 1e-14);
    }

    #[test]
    fn ols_errors() {
        assert_eq!(
            fit_ols(&[1.0, 2.0], &[1.0, 2.0]).unwrap_err(),
            RegressionError::TooFewObservations(2)
        );
        assert_eq!(
            fit_ols(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            RegressionError::ConstantSeries("x")
        );
        assert!(matches!(
            fit_ols(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(RegressionError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let up: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let down: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(pearson_r(&x, &up).unwrap(), 1.0);
        assert_eq!(pearson_r(&x, &down).unwrap(), -1.0);
        // 4.5 / √(5 · 4.75)
        let r = pearson_r(&[0.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.9234).abs() < 1e-4, "{r}");
        assert_eq!(
            pearson_r(&x, &[3.0; 4]).unwrap_err(),
            RegressionError::ConstantSeries("y")
        );
    }

    #[test]
    fn p_value_edges() {
        assert_eq!(p_value(0.0, 3).unwrap(), 1.0);
        assert_eq!(p_value(0.0, 50).unwrap(), 1.0);
        assert!(p_value(0.99, 20).unwrap() < 1e-10);
        assert!(p_value(0.99, 20).unwrap() > 0.0);
        assert!(matches!(
            p_value(1.0, 9),
            Err(RegressionError::PerfectCorrelation { .. })
        ));
        assert!(matches!(
            p_value(-1.0, 9),
            Err(RegressionError::PerfectCorrelation { .. })
        ));
        assert_eq!(
            p_value(0.5, 2).unwrap_err(),
            RegressionError::TooFewObservations(2)
        );
    }

    #[test]
    fn published_correlation_gives_r_squared() {
        let r: f64 = 0.901;
        assert!((r * r - 0.8118).abs() < 1e-4);
    }

    #[test]
    fn self_regression_is_collinear() {
        let s = series("gdp", &[17.63, 14.95, 15.14, 16.24, 17.60]);
        match estimate_elasticity(&s, &s).unwrap_err() {
            RegressionError::Collinear { slope, r } => {
                assert!((slope - 1.0).abs() < 1e-12);
                assert_eq!(r, 1.0);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn constructed_inverse_recovers_elasticity() {
        let rd = series(
            "rd",
            &[0.0406, 0.0449, 0.0459, 0.0495, 0.0530, 0.0480, 0.0510],
        );
        let gdp_values: Vec<f64> = rd.values().map(|v| 40.0 * v.powf(0.0702502)).collect();
        let gdp = series("gdp", &gdp_values);
        let fit = fit_log_log(&rd, &gdp).unwrap();
        assert!((fit.slope - 0.0702502).abs() < 1e-9, "{}", fit.slope);
        assert!((fit.intercept - 40f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn misaligned_years() {
        let a = series("rd", &[1.0, 2.0, 3.0, 4.0]);
        let b = IndicatorSeries::new(
            "gdp",
            Unit::BillionsUsd,
            vec![(2015, 1.0), (2016, 2.0), (2017, 3.0), (2018, 5.0)],
        )
        .unwrap();
        assert!(matches!(
            estimate_elasticity(&a, &b),
            Err(RegressionError::YearMisalignment { .. })
        ));
    }

    #[test]
    fn noisy_fit_has_consistent_statistics() {
        let rd = series("rd", &[1.0, 1.3, 1.2, 1.8, 2.1, 2.0]);
        let gdp = series("gdp", &[10.0, 10.4, 10.1, 10.9, 11.5, 11.0]);
        let res = estimate_elasticity(&rd, &gdp).unwrap();
        assert_eq!(res.n, 6);
        assert_eq!(res.r_squared, res.pearson_r * res.pearson_r);
        assert!(res.slope > 0.0 && res.pearson_r > 0.0);
        assert!(res.p_value > 0.0 && res.p_value <= 1.0);
        let t = res.pearson_r * 2.0 / (1.0 - res.r_squared).sqrt();
        assert!((res.t_statistic - t).abs() < 1e-12);
    }
}
