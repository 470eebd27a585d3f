//! Participatory-learning antecedent dynamics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fs_builder::DataWindow;

/// Antecedent part of a rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntecedentState {
    pub center: DataWindow,
    pub arousal: f64,
    /// Running sum of normalized activations since creation.
    pub activation_sum: f64,
    /// Iteration at which the rule was created.
    pub created_at: u64,
    /// Number of samples assigned to the rule, creation included.
    pub support_count: u64,
}

impl AntecedentState {
    pub fn new(center: DataWindow, created_at: u64) -> Self {
        AntecedentState {
            center,
            arousal: 0.0,
            activation_sum: 0.0,
            created_at,
            support_count: 1,
        }
    }
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {v} is outside [0, 1]")))
    }
}

/// `a + β (1 - c - a)`, clamped to `[0, 1]`.
pub fn update_arousal(a_prev: f64, c: f64, beta: f64) -> Result<f64> {
    unit_interval("arousal", a_prev)?;
    unit_interval("compatibility", c)?;
    unit_interval("beta", beta)?;
    Ok((a_prev + beta * (1.0 - c - a_prev)).clamp(0.0, 1.0))
}

/// `c^(1-a)` with `0^0 = 1`.
fn step_gain(c: f64, a: f64) -> f64 {
    let e = 1.0 - a;
    if e == 0.0 {
        1.0
    } else {
        c.powf(e)
    }
}

/// `center + α c^(1-a) (x - center)`.
pub fn update_center(center: &DataWindow, x: &DataWindow, c: f64, a: f64, alpha: f64) -> Result<DataWindow> {
    if center.len() != x.len() {
        return Err(Error::domain(format!(
            "center has {} elements, sample has {}",
            center.len(),
            x.len()
        )));
    }
    unit_interval("compatibility", c)?;
    unit_interval("arousal", a)?;
    unit_interval("alpha", alpha)?;
    let gain = alpha * step_gain(c, a);
    let moved = center
        .values()
        .iter()
        .zip(x.values())
        .map(|(v, xv)| v + gain * (xv - v))
        .collect();
    DataWindow::new(moved)
}

/// `Π_j exp(-|x_j - υ_j|) / (2σ²)`.
///
/// The per-attribute factor `1 / (2σ²)` is constant across rules, so it
/// cancels in [`normalized_activations`]; only with `σ = √0.5` is the value
/// itself bounded by 1.
pub fn activation_level(x: &DataWindow, center: &DataWindow, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if center.len() != x.len() {
        return Err(Error::domain("activation of windows with different lengths"));
    }
    let scale = 1.0 / (2.0 * sigma * sigma);
    Ok(x
        .values()
        .iter()
        .zip(center.values())
        .map(|(a, b)| (-(a - b).abs()).exp() * scale)
        .product())
}

/// `Σλ / (k - I)`; infinite on the creation step.
pub fn utility(activation_sum: f64, k: u64, created_at: u64) -> Result<f64> {
    if k < created_at {
        return Err(Error::domain(format!(
            "iteration {k} precedes rule creation at {created_at}"
        )));
    }
    if k == created_at {
        return Ok(f64::INFINITY);
    }
    Ok(activation_sum / (k - created_at) as f64)
}

/// `τ_i / Σ τ`.
pub fn normalized_activations(taus: &[f64]) -> Result<Vec<f64>> {
    if taus.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::domain("activations must be finite and non-negative"));
    }
    let total: f64 = taus.iter().sum();
    if total <= 0.0 {
        return Err(Error::domain("all activations are zero"));
    }
    Ok(taus.iter().map(|t| t / total).collect())
}

/// Normalized activations of rules centred at `centers` for input `x`.
///
/// Equal to [`normalized_activations`] over [`activation_level`], computed in
/// the log domain so that distant inputs cannot underflow every activation.
pub fn normalized_activations_at(x: &DataWindow, centers: &[&DataWindow], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if centers.is_empty() {
        return Err(Error::domain("no rules to activate"));
    }
    let logs = centers
        .iter()
        .map(|c| {
            if c.len() != x.len() {
                return Err(Error::domain("activation of windows with different lengths"));
            }
            Ok(-x.values().iter().zip(c.values()).map(|(a, b)| (a - b).abs()).sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}
