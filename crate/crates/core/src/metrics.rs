//! Forecast error metrics and runtime statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default guard for [`mape`].
pub const MAPE_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub rmse: f64,
    pub ndei: f64,
    pub mae: f64,
    pub er2: f64,
    pub mape: f64,
    pub final_rules: usize,
    pub runtime_mean_s: f64,
    pub runtime_std_s: f64,
}

impl MetricReport {
    /// All error metrics of `y_hat` against `y`; runtime fields start at 0.
    pub fn compute(y: &[f64], y_hat: &[f64], final_rules: usize) -> Result<Self> {
        Ok(MetricReport {
            rmse: rmse(y, y_hat)?,
            ndei: ndei(y, y_hat)?,
            mae: mae(y, y_hat)?,
            er2: er2(y, y_hat)?,
            mape: mape(y, y_hat, MAPE_EPS)?,
            final_rules,
            runtime_mean_s: 0.0,
            runtime_std_s: 0.0,
        })
    }
}

fn check(y: &[f64], y_hat: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::domain("metrics need at least one sample"));
    }
    if y.len() != y_hat.len() {
        return Err(Error::domain(format!(
            "{} targets but {} predictions",
            y.len(),
            y_hat.len()
        )));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn population_std(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
}

pub fn rmse(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    check(y, y_hat)?;
    let sse: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sse / y.len() as f64).sqrt())
}

/// RMSE over the population standard deviation of `y`.
pub fn ndei(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    let r = rmse(y, y_hat)?;
    let s = population_std(y);
    if s == 0.0 {
        return Err(Error::domain("ndei of a constant target series"));
    }
    Ok(r / s)
}

pub fn mae(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    check(y, y_hat)?;
    Ok(y.iter().zip(y_hat).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64)
}

/// `Σ (y - ŷ)² / Σ (y - ȳ)²`.
pub fn er2(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    check(y, y_hat)?;
    let m = mean(y);
    let den: f64 = y.iter().map(|a| (a - m) * (a - m)).sum();
    if den == 0.0 {
        return Err(Error::domain("er2 of a constant target series"));
    }
    let num: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(num / den)
}

/// `mean |y - ŷ| / max(eps, |ŷ|)`; the denominator is the prediction.
pub fn mape(y: &[f64], y_hat: &[f64], eps: f64) -> Result<f64> {
    check(y, y_hat)?;
    if !(eps > 0.0) {
        return Err(Error::domain("mape guard must be positive"));
    }
    Ok(y.iter()
        .zip(y_hat)
        .map(|(a, b)| (a - b).abs() / eps.max(b.abs()))
        .sum::<f64>()
        / y.len() as f64)
}

/// Sample mean and sample standard deviation.
pub fn runtime_stats(durations: &[f64]) -> Result<(f64, f64)> {
    if durations.len() < 2 {
        return Err(Error::domain("runtime statistics need at least two durations"));
    }
    let m = mean(durations);
    let var = durations.iter().map(|d| (d - m) * (d - m)).sum::<f64>() / (durations.len() - 1) as f64;
    Ok((m, var.sqrt()))
}
