//! First-order optimizers sharing one mutable state struct.
//!
//! Every step mutates `theta` in place. The Adam family increments
//! `step_count` before bias correction, so the first step uses `t = 1`.
//! AdaGrad and RMSProp add ε under the square root; the Adam family adds it
//! after the square root.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_BETA: f64 = 0.9;
pub const DEFAULT_BETA1: f64 = 0.9;
pub const DEFAULT_BETA2: f64 = 0.999;
pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const DEFAULT_RESTART_PERIOD: u64 = 500;
pub const DEFAULT_RESTART_MULT: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Gd,
    Momentum,
    Nag,
    AdaGrad,
    RmsProp,
    Adam,
    AdaMax,
    AmsGrad,
    Nadam,
    /// Plain gradient steps under a cosine schedule with warm restarts.
    Sgdr,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 10] = [
        OptimizerKind::Gd,
        OptimizerKind::Momentum,
        OptimizerKind::Nag,
        OptimizerKind::AdaGrad,
        OptimizerKind::RmsProp,
        OptimizerKind::Adam,
        OptimizerKind::AdaMax,
        OptimizerKind::AmsGrad,
        OptimizerKind::Nadam,
        OptimizerKind::Sgdr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Gd => "gd",
            OptimizerKind::Momentum => "momentum",
            OptimizerKind::Nag => "nag",
            OptimizerKind::AdaGrad => "adagrad",
            OptimizerKind::RmsProp => "rmsprop",
            OptimizerKind::Adam => "adam",
            OptimizerKind::AdaMax => "adamax",
            OptimizerKind::AmsGrad => "amsgrad",
            OptimizerKind::Nadam => "nadam",
            OptimizerKind::Sgdr => "sgdr",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let kind = match lower.as_str() {
            "gd" | "sgd" => OptimizerKind::Gd,
            "momentum" => OptimizerKind::Momentum,
            "nag" | "nesterov" => OptimizerKind::Nag,
            "adagrad" => OptimizerKind::AdaGrad,
            "rmsprop" => OptimizerKind::RmsProp,
            "adam" => OptimizerKind::Adam,
            "adamax" => OptimizerKind::AdaMax,
            "amsgrad" => OptimizerKind::AmsGrad,
            "nadam" => OptimizerKind::Nadam,
            "sgdr" | "warm-restarts" => OptimizerKind::Sgdr,
            _ => {
                return Err(Error::config(format!(
                    "unknown optimizer '{s}' (expected one of: {})",
                    OptimizerKind::ALL.map(OptimizerKind::name).join(", ")
                )))
            }
        };
        Ok(kind)
    }
}

/// Hyperparameters other than the learning rate, which the run schedule owns.
///
/// `beta` is the momentum/decay coefficient (γ for NAG); `restart_period`,
/// `restart_mult` and `eta_min` only affect [`OptimizerKind::Sgdr`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub restart_period: u64,
    pub restart_mult: u64,
    pub eta_min: f64,
}

impl OptimizerConfig {
    pub fn new(kind: OptimizerKind) -> Self {
        Self {
            kind,
            beta: DEFAULT_BETA,
            beta1: DEFAULT_BETA1,
            beta2: DEFAULT_BETA2,
            epsilon: DEFAULT_EPSILON,
            restart_period: DEFAULT_RESTART_PERIOD,
            restart_mult: DEFAULT_RESTART_MULT,
            eta_min: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must lie in [0, 1), got {v}")))
            }
        };
        unit("beta", self.beta)?;
        unit("beta1", self.beta1)?;
        unit("beta2", self.beta2)?;
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config(format!(
                "epsilon must be finite and > 0, got {}",
                self.epsilon
            )));
        }
        if self.restart_period == 0 {
            return Err(Error::config("restart period must be at least 1"));
        }
        if self.restart_mult == 0 {
            return Err(Error::config("restart multiplier must be at least 1"));
        }
        if !(self.eta_min >= 0.0 && self.eta_min.is_finite()) {
            return Err(Error::config("eta_min must be finite and >= 0"));
        }
        Ok(())
    }
}

/// θ ← θ − α·g.
pub fn gd_step(theta: &mut [f64], gradient: &[f64], alpha: f64) -> Result<()> {
    check_lengths(theta.len(), gradient)?;
    for (t, g) in theta.iter_mut().zip(gradient) {
        *t -= alpha * g;
    }
    Ok(())
}

fn check_lengths(expected: usize, gradient: &[f64]) -> Result<()> {
    if gradient.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: gradient.len(),
        });
    }
    if !gradient.iter().all(|g| g.is_finite()) {
        return Err(Error::NonFinite("gradient"));
    }
    Ok(())
}

/// Accumulators for every supported update rule. Only the vectors a given
/// rule touches change; the rest stay at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub step_count: u64,
    pub velocity: Vec<f64>,
    pub grad_sq_accum: Vec<f64>,
    pub grad_sq_ema: Vec<f64>,
    pub first_moment: Vec<f64>,
    /// Adam's `v`; AdaMax stores its infinity-norm estimate `u` here.
    pub second_moment: Vec<f64>,
    pub second_moment_max: Vec<f64>,
}

impl OptimizerState {
    pub fn new(dim: usize) -> Self {
        Self {
            step_count: 0,
            velocity: vec![0.0; dim],
            grad_sq_accum: vec![0.0; dim],
            grad_sq_ema: vec![0.0; dim],
            first_moment: vec![0.0; dim],
            second_moment: vec![0.0; dim],
            second_moment_max: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.velocity.len()
    }

    fn check(&self, theta: &[f64], gradient: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: theta.len(),
            });
        }
        check_lengths(self.dim(), gradient)
    }

    pub fn gd_step(&mut self, theta: &mut [f64], gradient: &[f64], alpha: f64) -> Result<()> {
        self.check(theta, gradient)?;
        self.step_count += 1;
        gd_step(theta, gradient, alpha)
    }

    /// v ← βv + (1−β)g; θ ← θ − αv.
    pub fn momentum_step(
        &mut self,
        theta: &mut [f64],
        gradient: &[f64],
        alpha: f64,
        beta: f64,
    ) -> Result<()> {
        self.check(theta, gradient)?;
        self.step_count += 1;
        for ((t, v), g) in theta.iter_mut().zip(&mut self.velocity).zip(gradient) {
            *v = beta * *v + (1.0 - beta) * g;
            *t -= alpha * *v;
        }
        Ok(())
    }

    /// Nesterov: the gradient is taken at the look-ahead point θ − γv.
    /// v ← γv + η∇L(θ − γv); θ ← θ − v.
    pub fn nag_step<F>(
        &mut self,
        theta: &mut [f64],
        mut gradient_at: F,
        gamma: f64,
        eta: f64,
    ) -> Result<()>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: theta.len(),
            });
        }
        let lookahead: Vec<f64> = theta
            .iter()
            .zip(&self.velocity)
            .map(|(t, v)| t - gamma * v)
            .collect();
        let gradient = gradient_at(&lookahead)?;
        if gradient.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: gradient.len(),
            });
        }
        if !gradient.iter().all(|g| g.is_finite()) {
            return Err(Error::NonFinite("gradient at look-ahead point"));
        }
        self.step_count += 1;
        for ((t, v), g) in theta.iter_mut().zip(&mut self.velocity).zip(&gradient) {
            *v = gamma * *v + eta * g;
            *t -= *v;
        }
        Ok(())
    }

    /// G ← G + g²; θ ← θ − α/√(G+ε)·g.
    pub fn adagrad_step(
        &mut self,
        theta: &mut [f64],
        gradient: &[f64],
        alpha: f64,
        epsilon: f64,
    ) -> Result<()> {
        self.check(theta, gradient)?;
        self.step_count += 1;
        for ((t, acc), g) in theta.iter_mut().zip(&mut self.grad_sq_accum).zip(gradient) {
            *acc += g * g;
            *t -= alpha / (*acc + epsilon).sqrt() * g;
        }
        Ok(())
    }

    /// E ← βE + (1−β)g²; θ ← θ − α/√(E+ε)·g.
    pub fn rmsprop_step(
        &mut self,
        theta: &mut [f64],
        gradient: &[f64],
        alpha: f64,
        beta: f64,
        epsilon: f64,
    ) -> Result<()> {
        self.check(theta, gradient)?;
        self.step_count += 1;
        for ((t, ema), g) in theta.iter_mut().zip(&mut self.grad_sq_ema).zip(gradient) {
            *ema = beta * *ema + (1.0 - beta) * g * g;
            *t -= alpha / (*ema + epsilon).sqrt() * g;
        }
        Ok(())
    }

    /// Shared first half of the Adam family: bumps `t` and updates m and v.
    /// Returns the bias corrections `(1 − β₁ᵗ, 1 − β₂ᵗ)`.
    fn update_moments(&mut self, gradient: &[f64], beta1: f64, beta2: f64) -> (f64, f64) {
        self.step_count += 1;
        for ((m, v), g) in self
            .first_moment
            .iter_mut()
            .zip(&mut self.second_moment)
            .zip(gradient)
        {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
        }
        let t = self.step_count as f64;
        (1.0 - beta1.powf(t), 1.0 - beta2.powf(t))
    }

    pub fn adam_step(
        &mut self,
        theta: &mut [f64],
        gradient: &[f64],
        alpha: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Result<()> {
        self.check(theta, gradient)?;
        let (c1, c2) = self.update_moments(gradient, beta1, beta2);
        for ((t, m), v) in theta.iter_mut().zip(&self.first_moment).zip(&self.second_moment) {
            let m_hat = m / c1;
            let v_hat = v / c2;
            *t -= alpha * m_hat / (v_hat.sqrt() + epsilon);
        }
        Ok(())
    }

    /// Adam with the second moment replaced by an exponentially weighted
    /// infinity norm: u ← max(β₂u, |g|).
    pub fn adamax_step(
        &mut self,
        theta: &mut [f64],
        gradient: &[f64],
        alpha: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Result<()> {
        self.check(theta, gradient)?;
        self.step_count += 1;
        let c1 = 1.0 - beta1.powf(self.step_count as f64);
        let rate = alpha / c1;
        for (((t, m), u), g) in theta
            .iter_mut()
            .zip(&mut self.first_moment)
            .zip(&mut self.second_moment)
            .zip(gradient)
        {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *u = (beta2 * *u).max(g.abs());
            *t -= rate * *m / (*u + epsilon);
        }
        Ok(())
    }

    /// Adam whose denominator uses the running maximum of the bias-corrected
    /// second moment.
    pub fn amsgrad_step(
        &mut self,
        theta: &mut [f64],
        gradient: &[f64],
        alpha: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Result<()> {
        self.check(theta, gradient)?;
        let (c1, c2) = self.update_moments(gradient, beta1, beta2);
        for (((t, m), v), v_max) in theta
            .iter_mut()
            .zip(&self.first_moment)
            .zip(&self.second_moment)
            .zip(&mut self.second_moment_max)
        {
            let m_hat = m / c1;
            let v_hat = v / c2;
            *v_max = v_max.max(v_hat);
            *t -= alpha * m_hat / (v_max.sqrt() + epsilon);
        }
        Ok(())
    }

    /// Adam with a Nesterov look-ahead on the first moment:
    /// θ ← θ − α(β₁m̂ + (1−β₁)g/(1−β₁ᵗ))/(√v̂ + ε).
    pub fn nadam_step(
        &mut self,
        theta: &mut [f64],
        gradient: &[f64],
        alpha: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Result<()> {
        self.check(theta, gradient)?;
        let (c1, c2) = self.update_moments(gradient, beta1, beta2);
        for (((t, m), v), g) in theta
            .iter_mut()
            .zip(&self.first_moment)
            .zip(&self.second_moment)
            .zip(gradient)
        {
            let m_hat = m / c1;
            let v_hat = v / c2;
            let blended = beta1 * m_hat + (1.0 - beta1) * g / c1;
            *t -= alpha * blended / (v_hat.sqrt() + epsilon);
        }
        Ok(())
    }
}

/// Cosine-annealed learning rate with warm restarts.
///
/// Cycle `i` lasts `restart_period · restart_mult^i` iterations; within a cycle
/// the rate falls from `eta_max` towards `eta_min` along half a cosine and jumps
/// back to `eta_max` at the next cycle start.
pub fn warm_restart_lr(
    t: u64,
    eta_max: f64,
    eta_min: f64,
    restart_period: u64,
    restart_mult: u64,
) -> Result<f64> {
    if restart_period == 0 {
        return Err(Error::config("restart period must be at least 1"));
    }
    if restart_mult == 0 {
        return Err(Error::config("restart multiplier must be at least 1"));
    }
    if eta_min.is_nan() || eta_max.is_nan() || eta_min > eta_max {
        return Err(Error::config(format!(
            "eta_min ({eta_min}) must not exceed eta_max ({eta_max})"
        )));
    }
    let (t_cur, t_len) = if restart_mult == 1 {
        (t % restart_period, restart_period)
    } else {
        let mut t_cur = t;
        let mut t_len = restart_period;
        while t_cur >= t_len {
            t_cur -= t_len;
            t_len = t_len.saturating_mul(restart_mult);
        }
        (t_cur, t_len)
    };
    if t_cur == 0 {
        return Ok(eta_max);
    }
    let phase = std::f64::consts::PI * t_cur as f64 / t_len as f64;
    Ok(eta_min + 0.5 * (eta_max - eta_min) * (1.0 + phase.cos()))
}

/// An optimizer config bound to its state, dispatching one step per call.
#[derive(Debug, Clone)]
pub struct Optimizer {
    config: OptimizerConfig,
    state: OptimizerState,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig, dim: usize) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            state: OptimizerState::new(dim),
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn state(&self) -> &OptimizerState {
        &self.state
    }

    /// Takes one step at learning rate `lr`. `gradient_at` evaluates the loss
    /// gradient at an arbitrary point; only NAG probes anywhere but `theta`.
    pub fn step<F>(&mut self, theta: &mut [f64], lr: f64, mut gradient_at: F) -> Result<()>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        let c = &self.config;
        let s = &mut self.state;
        if c.kind == OptimizerKind::Nag {
            return s.nag_step(theta, gradient_at, c.beta, lr);
        }
        let g = gradient_at(theta)?;
        match c.kind {
            OptimizerKind::Gd | OptimizerKind::Sgdr => s.gd_step(theta, &g, lr),
            OptimizerKind::Momentum => s.momentum_step(theta, &g, lr, c.beta),
            OptimizerKind::AdaGrad => s.adagrad_step(theta, &g, lr, c.epsilon),
            OptimizerKind::RmsProp => s.rmsprop_step(theta, &g, lr, c.beta, c.epsilon),
            OptimizerKind::Adam => s.adam_step(theta, &g, lr, c.beta1, c.beta2, c.epsilon),
            OptimizerKind::AdaMax => s.adamax_step(theta, &g, lr, c.beta1, c.beta2, c.epsilon),
            OptimizerKind::AmsGrad => s.amsgrad_step(theta, &g, lr, c.beta1, c.beta2, c.epsilon),
            OptimizerKind::Nadam => s.nadam_step(theta, &g, lr, c.beta1, c.beta2, c.epsilon),
            OptimizerKind::Nag => unreachable!(),
        }
    }
}
