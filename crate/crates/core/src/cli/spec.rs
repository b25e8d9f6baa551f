//! The `name:key=val,key=val` optimizer mini-grammar used by `--optimizer`.
//!
//! ```text
//! gd
//! adam:alpha=0.1,beta2=0.99
//! sgdr:alpha=0.5,t0=100,tmult=2,eta_min=0.001,label=restarts
//! ```
//!
//! Keys: `alpha` (or `lr`), `beta` (or `gamma`), `beta1`, `beta2`,
//! `epsilon` (or `eps`), `t0`, `tmult`, `eta_min`, `decay`, `label`.

use std::collections::BTreeSet;
use std::str::FromStr;

use crate::efficiency::StoppingRule;
use crate::optim::{OptimizerConfig, OptimizerKind};
use crate::runner::RunConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSpec {
    /// The label given with `label=`, or the spec text itself.
    pub label: String,
    pub optimizer: OptimizerConfig,
    pub alpha: Option<f64>,
    pub decay: Option<f64>,
}

impl OptimizerSpec {
    pub fn run_config(
        &self,
        default_alpha: f64,
        n_iterations: usize,
        seed: u64,
        default_decay: f64,
        stopping: Option<StoppingRule>,
    ) -> RunConfig {
        RunConfig {
            optimizer: self.optimizer.clone(),
            n_iterations,
            initial_learning_rate: self.alpha.unwrap_or(default_alpha),
            decay_rate: self.decay.unwrap_or(default_decay),
            seed,
            stopping,
        }
    }
}

fn invalid(spec: &str, msg: impl std::fmt::Display) -> Error {
    Error::config(format!("optimizer spec '{spec}': {msg}"))
}

pub fn parse_optimizer_spec(text: &str) -> Result<OptimizerSpec> {
    let spec = text.trim();
    let (name, params) = match spec.split_once(':') {
        Some((name, params)) => (name, Some(params)),
        None => (spec, None),
    };
    let kind = OptimizerKind::from_str(name).map_err(|e| invalid(spec, e))?;
    let mut optimizer = OptimizerConfig::new(kind);
    let mut alpha = None;
    let mut decay = None;
    let mut label = None;
    let mut seen = BTreeSet::new();

    for pair in params.into_iter().flat_map(|p| p.split(',')) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| invalid(spec, format!("expected key=value, found '{pair}'")))?;
        let key = key.trim();
        let value = value.trim();
        let canonical = match key {
            "lr" => "alpha",
            "gamma" => "beta",
            "eps" => "epsilon",
            other => other,
        };
        if !seen.insert(canonical) {
            return Err(invalid(spec, format!("duplicate key '{key}'")));
        }
        let real = || {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| invalid(spec, format!("'{key}' needs a finite number, got '{value}'")))
        };
        let count = || {
            value
                .parse::<u64>()
                .map_err(|_| invalid(spec, format!("'{key}' needs a positive integer, got '{value}'")))
        };
        match canonical {
            "alpha" => alpha = Some(real()?),
            "decay" => decay = Some(real()?),
            "beta" => optimizer.beta = real()?,
            "beta1" => optimizer.beta1 = real()?,
            "beta2" => optimizer.beta2 = real()?,
            "epsilon" => optimizer.epsilon = real()?,
            "eta_min" => optimizer.eta_min = real()?,
            "t0" => optimizer.restart_period = count()?,
            "tmult" => optimizer.restart_mult = count()?,
            "label" => {
                if value.is_empty() {
                    return Err(invalid(spec, "label must not be empty"));
                }
                label = Some(value.to_owned());
            }
            _ => return Err(invalid(spec, format!("unknown key '{key}'"))),
        }
    }
    optimizer.validate().map_err(|e| invalid(spec, e))?;

    Ok(OptimizerSpec {
        label: label.unwrap_or_else(|| spec.to_owned()),
        optimizer,
        alpha,
        decay,
    })
}
