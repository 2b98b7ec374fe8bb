//! Pearson correlation with exact Student-t p-values, and normal-approximation
//! 95% confidence intervals over per-mode accuracy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Level;

/// z quantile for a two-sided 95% interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("series {0:?} is constant")]
    ConstantSeries(String),
    #[error("need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("degrees of freedom must be >= 1")]
    BadDf,
    #[error("non-finite input")]
    NonFinite,
}

pub fn mean(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::InsufficientData { needed: 1, got: 0 });
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Standard deviation with the n-1 denominator.
pub fn sample_std(values: &[f64]) -> Result<f64, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::InsufficientData {
            needed: 2,
            got: values.len(),
        });
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Ok((ss / (values.len() - 1) as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub x_name: String,
    pub y_name: String,
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub mode: Option<Level>,
    pub mean: f64,
    pub sample_std: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub correlations: Vec<CorrelationResult>,
    pub intervals: Vec<ConfidenceInterval>,
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    pearson_named("x", "y", x, y)
}

/// Sample correlation coefficient with a two-tailed p-value from
/// `t = r sqrt(n-2) / sqrt(1-r^2)` on `n-2` degrees of freedom.
pub fn pearson_named(x_name: &str, y_name: &str, x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::InsufficientData { needed: 3, got: n });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mx = mean(x)?;
    let my = mean(y)?;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::ConstantSeries(x_name.to_string()));
    }
    if syy == 0.0 {
        return Err(StatsError::ConstantSeries(y_name.to_string()));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as u32;
    let p_value = if 1.0 - r * r <= 0.0 {
        0.0
    } else {
        let t = r * f64::from(df).sqrt() / (1.0 - r * r).sqrt();
        (2.0 * t_cdf(-t.abs(), df)?).min(1.0)
    };
    Ok(CorrelationResult {
        x_name: x_name.to_string(),
        y_name: y_name.to_string(),
        r,
        p_value,
        n,
    })
}

/// `mean +- 1.96 * s / sqrt(n)` with the sample standard deviation. Bounds
/// are not clamped to any range.
pub fn ci95(values: &[f64]) -> Result<ConfidenceInterval, StatsError> {
    let s = sample_std(values)?;
    let m = mean(values)?;
    let half = Z_95 * s / (values.len() as f64).sqrt();
    Ok(ConfidenceInterval {
        mode: None,
        mean: m,
        sample_std: s,
        lower: m - half,
        upper: m + half,
        level: 0.95,
        n: values.len(),
    })
}

/// Student's t cumulative distribution function.
pub fn t_cdf(t: f64, df: u32) -> Result<f64, StatsError> {
    if df == 0 {
        return Err(StatsError::BadDf);
    }
    if t.is_nan() {
        return Err(StatsError::NonFinite);
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let v = f64::from(df);
    let x = v / (v + t * t);
    let tail = 0.5 * reg_incomplete_beta(v / 2.0, 0.5, x);
    Ok(if t > 0.0 { 1.0 - tail } else { tail })
}

/// Lanczos approximation (g = 7, n = 9), |error| < 1e-15 for x > 0.
fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized incomplete beta `I_x(a, b)`.
fn reg_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
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
    for m in 1..=10_000 {
        let m = f64::from(m);
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
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
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
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
