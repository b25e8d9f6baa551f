//! The gradient descent efficiency index.
//!
//! For iteration `k ≥ 2`:
//!
//! ```text
//! P_k = (L_initial − L_k) / L_initial
//! Δ_k = |L_{k−1} − L_k|
//! E_k = 100 − min(100, max(1, 100·P_k / (1 + ln(1 + Δ_k²))))
//! ```
//!
//! Low scores mean most of the initial loss is gone and the loss has stopped
//! moving. The clamps bound `E_k` to `[0, 99]`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_STOP_THRESHOLD: f64 = 5.0;
pub const DEFAULT_STOP_PATIENCE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyInputs {
    pub loss_initial: f64,
    pub loss_prev: f64,
    pub loss_current: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRecord {
    pub k: usize,
    pub p_k: f64,
    pub delta_k: f64,
    pub e_k: f64,
}

impl EfficiencyRecord {
    pub fn compute(k: usize, inputs: EfficiencyInputs) -> Result<Self> {
        let p_k = proportion_reduced(inputs.loss_initial, inputs.loss_current)?;
        let delta_k = delta_loss(inputs.loss_prev, inputs.loss_current);
        Ok(Self {
            k,
            p_k,
            delta_k,
            e_k: efficiency_score(p_k, delta_k),
        })
    }
}

/// Fraction of the initial loss eliminated so far; negative when the loss has
/// risen above its initial value.
pub fn proportion_reduced(loss_initial: f64, loss_current: f64) -> Result<f64> {
    if !(loss_initial > 0.0 && loss_initial.is_finite()) {
        return Err(Error::config(format!(
            "initial loss must be finite and > 0, got {loss_initial}"
        )));
    }
    Ok((loss_initial - loss_current) / loss_initial)
}

pub fn delta_loss(loss_prev: f64, loss_current: f64) -> f64 {
    (loss_prev - loss_current).abs()
}

pub fn efficiency_score(p_k: f64, delta_k: f64) -> f64 {
    let damping = 1.0 + (delta_k * delta_k).ln_1p();
    let progress = 100.0 * p_k / damping;
    100.0 - progress.clamp(1.0, 100.0)
}

pub fn efficiency_from_losses(inputs: EfficiencyInputs) -> Result<f64> {
    let p_k = proportion_reduced(inputs.loss_initial, inputs.loss_current)?;
    Ok(efficiency_score(p_k, delta_loss(inputs.loss_prev, inputs.loss_current)))
}

/// Stop once the trailing `patience` scores are all at or below `threshold`.
pub fn should_stop(recent_scores: &[f64], threshold: f64, patience: usize) -> bool {
    if patience == 0 || recent_scores.len() < patience {
        return false;
    }
    recent_scores[recent_scores.len() - patience..]
        .iter()
        .all(|&e| e <= threshold)
}

/// Threshold/patience pair for [`should_stop`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub threshold: f64,
    pub patience: usize,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_STOP_THRESHOLD,
            patience: DEFAULT_STOP_PATIENCE,
        }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if self.patience == 0 {
            return Err(Error::config("stopping patience must be at least 1"));
        }
        if self.threshold.is_nan() {
            return Err(Error::config("stopping threshold must be a number"));
        }
        Ok(())
    }

    pub fn should_stop(&self, recent_scores: &[f64]) -> bool {
        should_stop(recent_scores, self.threshold, self.patience)
    }
}
