//! The instrumented full-batch training loop and multi-run comparison.
//!
//! Each iteration predicts on the bias-augmented features, takes one optimizer
//! step at the current learning rate, then records the post-update loss.
//! Iteration 1 fixes `L_initial` and carries no efficiency score; every later
//! iteration records `E_k` from `(L_initial, L_{k−1}, L_k)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::efficiency::{EfficiencyInputs, EfficiencyRecord, StoppingRule};
use crate::loss::{add_bias, mse, mse_gradient_theta, predict_theta, LinearModel};
use crate::optim::{warm_restart_lr, Optimizer, OptimizerConfig, OptimizerKind};
use crate::report::{ComparisonEntry, ComparisonReport, RunSummary};
use crate::{Error, Result};

/// Losses above this are treated as divergence.
pub const DIVERGENCE_LOSS: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub optimizer: OptimizerConfig,
    pub n_iterations: usize,
    pub initial_learning_rate: f64,
    /// Per-iteration multiplicative decay; `1.0` keeps the rate fixed.
    /// Ignored by [`OptimizerKind::Sgdr`], which follows its own schedule.
    pub decay_rate: f64,
    pub seed: u64,
    pub stopping: Option<StoppingRule>,
}

impl RunConfig {
    pub fn new(optimizer: OptimizerConfig, initial_learning_rate: f64, n_iterations: usize) -> Self {
        Self {
            optimizer,
            n_iterations,
            initial_learning_rate,
            decay_rate: 1.0,
            seed: 42,
            stopping: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_decay(mut self, decay_rate: f64) -> Self {
        self.decay_rate = decay_rate;
        self
    }

    pub fn with_stopping(mut self, rule: StoppingRule) -> Self {
        self.stopping = Some(rule);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.optimizer.validate()?;
        if self.n_iterations < 2 {
            return Err(Error::config("at least 2 iterations are required"));
        }
        if !(self.initial_learning_rate >= 0.0 && self.initial_learning_rate.is_finite()) {
            return Err(Error::config(format!(
                "learning rate must be finite and >= 0, got {}",
                self.initial_learning_rate
            )));
        }
        if !(self.decay_rate > 0.0 && self.decay_rate <= 1.0) {
            return Err(Error::config(format!(
                "decay rate must lie in (0, 1], got {}",
                self.decay_rate
            )));
        }
        if self.optimizer.kind == OptimizerKind::Sgdr
            && self.optimizer.eta_min > self.initial_learning_rate
        {
            return Err(Error::config("eta_min must not exceed the learning rate"));
        }
        if let Some(rule) = &self.stopping {
            rule.validate()?;
        }
        Ok(())
    }

    /// Learning rate in effect during iteration `k` (1-based).
    pub fn learning_rate_at(&self, k: usize) -> Result<f64> {
        let elapsed = k.saturating_sub(1);
        if self.optimizer.kind == OptimizerKind::Sgdr {
            return warm_restart_lr(
                elapsed as u64,
                self.initial_learning_rate,
                self.optimizer.eta_min,
                self.optimizer.restart_period,
                self.optimizer.restart_mult,
            );
        }
        Ok(self.initial_learning_rate * self.decay_rate.powf(elapsed as f64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub loss: f64,
    pub learning_rate: f64,
    pub efficiency: Option<EfficiencyRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub loss_initial: f64,
    pub records: Vec<IterationRecord>,
    pub final_model: LinearModel,
    pub stopped_at: Option<usize>,
    pub config: RunConfig,
}

impl RunTrace {
    pub fn final_loss(&self) -> f64 {
        self.records.last().map_or(self.loss_initial, |r| r.loss)
    }

    pub fn final_efficiency(&self) -> Option<f64> {
        self.records
            .iter()
            .rev()
            .find_map(|r| r.efficiency.map(|e| e.e_k))
    }

    pub fn losses(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss).collect()
    }

    /// `(k, E_k)` for every scored iteration.
    pub fn efficiency_series(&self) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .filter_map(|r| r.efficiency.map(|e| (r.k, e.e_k)))
            .collect()
    }

    /// First iteration whose score is at or below the configured threshold.
    pub fn iterations_to_threshold(&self) -> Option<usize> {
        let rule = self.config.stopping?;
        self.efficiency_series()
            .into_iter()
            .find(|&(_, e)| e <= rule.threshold)
            .map(|(k, _)| k)
    }
}

fn initial_theta(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn train(dataset: &Dataset, config: &RunConfig) -> Result<RunTrace> {
    config.validate()?;
    let xb = add_bias(dataset.features())?;
    let targets = dataset.targets();
    let mut theta = initial_theta(xb.cols(), config.seed);
    let mut optimizer = Optimizer::new(config.optimizer.clone(), theta.len())?;

    let mut records = Vec::with_capacity(config.n_iterations);
    let mut scores = Vec::with_capacity(config.n_iterations);
    let mut loss_initial = f64::NAN;
    let mut stopped_at = None;

    for k in 1..=config.n_iterations {
        let lr = config.learning_rate_at(k)?;
        optimizer
            .step(&mut theta, lr, |point| mse_gradient_theta(point, &xb, targets))
            .map_err(|e| match e {
                Error::NonFinite(_) => Error::Diverged {
                    iteration: k,
                    loss: f64::INFINITY,
                },
                other => other,
            })?;
        let loss = mse(&predict_theta(&theta, &xb)?, targets)?;
        if !loss.is_finite() || loss > DIVERGENCE_LOSS {
            return Err(Error::Diverged { iteration: k, loss });
        }

        let efficiency = if k == 1 {
            if loss <= 0.0 {
                return Err(Error::config(
                    "loss after the first iteration is zero; efficiency is undefined",
                ));
            }
            loss_initial = loss;
            None
        } else {
            let loss_prev = records.last().map_or(loss_initial, |r: &IterationRecord| r.loss);
            let record = EfficiencyRecord::compute(
                k,
                EfficiencyInputs {
                    loss_initial,
                    loss_prev,
                    loss_current: loss,
                },
            )?;
            scores.push(record.e_k);
            Some(record)
        };
        records.push(IterationRecord {
            k,
            loss,
            learning_rate: lr,
            efficiency,
        });

        if let Some(rule) = &config.stopping {
            if efficiency.is_some() && rule.should_stop(&scores) {
                stopped_at = Some(k);
                break;
            }
        }
    }

    Ok(RunTrace {
        loss_initial,
        records,
        final_model: LinearModel::new(theta)?,
        stopped_at,
        config: config.clone(),
    })
}

/// Runs every config on the same dataset, concurrently, and collects the
/// outcomes by label. A failing run is recorded in its entry and does not
/// affect the others.
pub fn compare(
    dataset: &Dataset,
    configs: &[RunConfig],
    labels: &[String],
) -> Result<ComparisonReport> {
    if configs.len() < 2 {
        return Err(Error::config("comparison needs at least two runs"));
    }
    if configs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: configs.len(),
            found: labels.len(),
        });
    }
    let mut seen = BTreeSet::new();
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(Error::config(format!("duplicate label '{label}'")));
        }
    }

    let outcomes: Vec<Result<RunTrace>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|config| scope.spawn(move || train(dataset, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training thread panicked"))
            .collect()
    });

    let entries = labels
        .iter()
        .zip(configs)
        .zip(outcomes)
        .map(|((label, config), outcome)| {
            let entry = match outcome {
                Ok(trace) => ComparisonEntry::completed(trace),
                Err(err) => ComparisonEntry {
                    config: config.clone(),
                    summary: RunSummary::from_error(&err),
                    trace: None,
                },
            };
            (label.clone(), entry)
        })
        .collect::<BTreeMap<_, _>>();
    ComparisonReport::new(entries)
}
