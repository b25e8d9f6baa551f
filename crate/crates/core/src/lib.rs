//! Instrumentation for full-batch gradient descent on linear regression.
//!
//! The crate trains linear models with a family of optimizers, scores every
//! iteration with the gradient descent efficiency index `E_k`, optionally stops
//! once the score settles, and serializes the resulting traces as CSV, JSON and
//! SVG.
//!
//! ```
//! use gdei::data::{generate_data, GeneratorConfig};
//! use gdei::optim::{OptimizerConfig, OptimizerKind};
//! use gdei::runner::{train, RunConfig};
//!
//! let data = generate_data(&GeneratorConfig { n: 200, ..GeneratorConfig::default() }).unwrap();
//! let config = RunConfig::new(OptimizerConfig::new(OptimizerKind::Gd), 0.05, 500);
//! let trace = train(&data, &config).unwrap();
//! assert!(trace.final_loss() < trace.loss_initial);
//! ```

pub mod cli;
pub mod data;
pub mod efficiency;
pub mod error;
pub mod loss;
pub mod matrix;
pub mod optim;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
