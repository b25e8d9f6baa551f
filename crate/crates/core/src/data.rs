//! Regression datasets: the synthetic generator, CSV loading and seeded
//! train/validation splits.
//!
//! All randomness comes from a `ChaCha8Rng` seeded with the caller's `u64`, one
//! generator per call. ChaCha output is specified independently of platform and
//! word size, so a seed pins a dataset everywhere. Gaussian noise is drawn with
//! `rand_distr::StandardNormal` (ziggurat) and scaled by `noise_sigma`.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::report::fmt_num;
use crate::{Error, Result};

/// Feature matrix (`n × m`) plus one target per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Matrix,
    targets: Vec<f64>,
    #[serde(default)]
    feature_names: Vec<String>,
    #[serde(default)]
    target_name: String,
}

impl Dataset {
    /// Validates shape and finiteness. Feature columns are named `x1..xm` and
    /// the target `y`.
    pub fn new(features: Matrix, targets: Vec<f64>) -> Result<Self> {
        let names = (1..=features.cols()).map(|j| format!("x{j}")).collect();
        Self::with_names(features, targets, names, "y".to_owned())
    }

    pub fn with_names(
        features: Matrix,
        targets: Vec<f64>,
        feature_names: Vec<String>,
        target_name: String,
    ) -> Result<Self> {
        if features.rows() == 0 {
            return Err(Error::Empty("dataset has no rows"));
        }
        if features.cols() == 0 {
            return Err(Error::Empty("dataset has no feature columns"));
        }
        if targets.len() != features.rows() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                found: targets.len(),
            });
        }
        if feature_names.len() != features.cols() {
            return Err(Error::DimensionMismatch {
                expected: features.cols(),
                found: feature_names.len(),
            });
        }
        if !features.as_slice().iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        if !targets.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("targets"));
        }
        Ok(Self {
            features,
            targets,
            feature_names,
            target_name,
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn n(&self) -> usize {
        self.features.rows()
    }

    pub fn m(&self) -> usize {
        self.features.cols()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    fn select(&self, indices: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(indices),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
        }
    }

    /// Renders the dataset as CSV: header row, features in column order, target
    /// last, shortest round-trip decimals, LF line endings. Header names are
    /// quoted only when they need to be.
    pub fn to_csv(&self) -> String {
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let header = self.feature_names.iter().map(String::as_str);
        wtr.write_record(header.chain([self.target_name.as_str()]))
            .expect("writing to a Vec cannot fail");
        let mut fields = Vec::with_capacity(self.m() + 1);
        for (row, target) in self.features.row_iter().zip(&self.targets) {
            fields.clear();
            fields.extend(row.iter().chain([target]).map(|v| fmt_num(*v)));
            wtr.write_record(&fields).expect("writing to a Vec cannot fail");
        }
        let bytes = wtr.into_inner().expect("writing to a Vec cannot fail");
        String::from_utf8(bytes).expect("input was UTF-8")
    }
}

/// Parameters of the synthetic linear dataset `y = intercept + slope·x₁ + ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub intercept: f64,
    pub slope: f64,
    pub noise_sigma: f64,
    pub feature_low: f64,
    pub feature_high: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            m: 1,
            seed: 42,
            intercept: 4.0,
            slope: 3.0,
            noise_sigma: 1.0,
            feature_low: 0.0,
            feature_high: 2.0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n must be at least 1"));
        }
        if self.m == 0 {
            return Err(Error::config("m must be at least 1"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::config("noise_sigma must be finite and >= 0"));
        }
        if !(self.feature_low.is_finite() && self.feature_high.is_finite()) {
            return Err(Error::config("feature range must be finite"));
        }
        if self.feature_low >= self.feature_high {
            return Err(Error::config("feature_low must be below feature_high"));
        }
        if !(self.intercept.is_finite() && self.slope.is_finite()) {
            return Err(Error::config("intercept and slope must be finite"));
        }
        Ok(())
    }
}

/// Draws the full feature matrix row-major first, then one noise term per row,
/// so the features for a seed do not depend on `noise_sigma`.
pub fn generate_data(config: &GeneratorConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let features: Vec<f64> = (0..config.n * config.m)
        .map(|_| rng.random_range(config.feature_low..config.feature_high))
        .collect();
    let features = Matrix::from_vec(config.n, config.m, features)?;
    let targets = features
        .row_iter()
        .map(|row| {
            let noise: f64 = rng.sample(StandardNormal);
            config.intercept + config.slope * row[0] + config.noise_sigma * noise
        })
        .collect();
    Dataset::new(features, targets)
}

pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(BufReader::new(file), target_column)
}

/// Parses a headered numeric CSV. Every column other than `target_column`
/// becomes a feature, in header order; row order is preserved.
pub fn read_csv<R: Read>(reader: R, target_column: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::Empty("CSV file has no header"));
    }
    for (j, h) in headers.iter().enumerate() {
        if headers.iter().take(j).any(|prev| prev == h) {
            return Err(Error::Parse {
                line: 1,
                message: format!("duplicate column {h:?}"),
            });
        }
    }
    let target_idx = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::MissingColumn(target_column.to_owned()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != target_idx)
        .map(|(_, h)| h.to_owned())
        .collect();

    let mut features = Vec::new();
    let mut targets = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut row: u64 = 0;
    while rdr.read_record(&mut record).map_err(csv_error)? {
        row += 1;
        for (j, cell) in record.iter().enumerate() {
            let value = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::NonNumeric {
                    row,
                    column: headers[j].to_owned(),
                    value: cell.to_owned(),
                })?;
            if j == target_idx {
                targets.push(value);
            } else {
                features.push(value);
            }
        }
    }
    if row == 0 {
        return Err(Error::Empty("CSV file has no data rows"));
    }
    let features = Matrix::from_vec(targets.len(), feature_names.len(), features)?;
    Dataset::with_names(features, targets, feature_names, target_column.to_owned())
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    let message = match err.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} fields, found {len}"),
        csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_owned(),
        csv::ErrorKind::Io(e) => e.to_string(),
        _ => err.to_string(),
    };
    Error::Parse { line, message }
}

/// Seeded shuffle, then the first `floor(n · validation_fraction)` shuffled
/// rows form the validation set and the rest the training set.
pub fn split(
    dataset: &Dataset,
    validation_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    let (train_idx, valid_idx) = split_indices(dataset.n(), validation_fraction, seed)?;
    Ok((dataset.select(&train_idx), dataset.select(&valid_idx)))
}

/// Row indices of the `(train, validation)` partition used by [`split`].
pub fn split_indices(
    n: usize,
    validation_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(validation_fraction > 0.0 && validation_fraction < 1.0) {
        return Err(Error::config(format!(
            "validation fraction must lie in (0, 1), got {validation_fraction}"
        )));
    }
    let n_valid = (n as f64 * validation_fraction).floor() as usize;
    if n_valid == 0 {
        return Err(Error::config(format!(
            "validation fraction {validation_fraction} of {n} rows leaves no validation rows"
        )));
    }
    if n_valid >= n {
        return Err(Error::config("split leaves no training rows"));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let train = indices.split_off(n_valid);
    Ok((train, indices))
}
