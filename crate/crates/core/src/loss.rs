//! Linear model, bias augmentation and the mean squared error with its exact
//! gradient `(2/n)·Xᵀ(Xθ − y)`.

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::{Error, Result};

/// Parameter vector with the intercept stored at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub theta: Vec<f64>,
}

impl LinearModel {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::Empty("theta"));
        }
        if !theta.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("theta"));
        }
        Ok(Self { theta })
    }

    pub fn zeros(n_features: usize) -> Self {
        Self {
            theta: vec![0.0; n_features + 1],
        }
    }

    pub fn intercept(&self) -> f64 {
        self.theta[0]
    }

    pub fn weights(&self) -> &[f64] {
        &self.theta[1..]
    }

    /// Number of input features, excluding the bias.
    pub fn n_features(&self) -> usize {
        self.theta.len() - 1
    }
}

/// Prepends a column of ones.
pub fn add_bias(features: &Matrix) -> Result<Matrix> {
    if features.rows() == 0 {
        return Err(Error::Empty("feature matrix has no rows"));
    }
    if features.cols() == 0 {
        return Err(Error::Empty("feature matrix has no columns"));
    }
    let cols = features.cols() + 1;
    let mut data = Vec::with_capacity(features.rows() * cols);
    for row in features.row_iter() {
        data.push(1.0);
        data.extend_from_slice(row);
    }
    Matrix::from_vec(features.rows(), cols, data)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_cols(theta: &[f64], x: &Matrix) -> Result<()> {
    if theta.len() != x.cols() {
        return Err(Error::DimensionMismatch {
            expected: x.cols(),
            found: theta.len(),
        });
    }
    Ok(())
}

pub fn predict(model: &LinearModel, features_with_bias: &Matrix) -> Result<Vec<f64>> {
    predict_theta(&model.theta, features_with_bias)
}

/// [`predict`] on a bare parameter slice, for probing points that are not a
/// model (e.g. a look-ahead position).
pub fn predict_theta(theta: &[f64], features_with_bias: &Matrix) -> Result<Vec<f64>> {
    check_cols(theta, features_with_bias)?;
    Ok(features_with_bias
        .row_iter()
        .map(|row| dot(row, theta))
        .collect())
}

pub fn mse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: targets.len(),
            found: predictions.len(),
        });
    }
    if targets.is_empty() {
        return Err(Error::Empty("mse of empty vectors"));
    }
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (t - p) * (t - p))
        .sum();
    Ok(sum / targets.len() as f64)
}

pub fn mse_gradient(
    model: &LinearModel,
    features_with_bias: &Matrix,
    targets: &[f64],
) -> Result<Vec<f64>> {
    mse_gradient_theta(&model.theta, features_with_bias, targets)
}

pub fn mse_gradient_theta(
    theta: &[f64],
    features_with_bias: &Matrix,
    targets: &[f64],
) -> Result<Vec<f64>> {
    check_cols(theta, features_with_bias)?;
    if targets.len() != features_with_bias.rows() {
        return Err(Error::DimensionMismatch {
            expected: features_with_bias.rows(),
            found: targets.len(),
        });
    }
    if targets.is_empty() {
        return Err(Error::Empty("gradient of empty dataset"));
    }
    let mut grad = vec![0.0; theta.len()];
    for (row, target) in features_with_bias.row_iter().zip(targets) {
        let residual = dot(row, theta) - target;
        for (g, x) in grad.iter_mut().zip(row) {
            *g += x * residual;
        }
    }
    let scale = 2.0 / targets.len() as f64;
    grad.iter_mut().for_each(|g| *g *= scale);
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn add_bias_prepends_ones() {
        let xb = add_bias(&m(&[&[2.5], &[-1.0]])).unwrap();
        assert_eq!(xb.as_slice(), &[1.0, 2.5, 1.0, -1.0]);
    }

    #[test]
    fn add_bias_rejects_empty_columns() {
        let empty = Matrix::zeros(3, 0);
        assert!(matches!(add_bias(&empty), Err(Error::Empty(_))));
        assert!(add_bias(&Matrix::zeros(0, 2)).is_err());
    }

    #[test]
    fn add_bias_column_sums() {
        let x = m(&[&[1.0, 2.0], &[3.0, -4.0], &[0.5, 0.25]]);
        let sums = |mat: &Matrix| -> Vec<f64> {
            (0..mat.cols()).map(|j| mat.column(j).iter().sum()).collect()
        };
        let original = sums(&x);
        let biased = sums(&add_bias(&x).unwrap());
        assert_eq!(biased, vec![3.0, original[0], original[1]]);
        assert_eq!(original, vec![4.5, -1.75]);
    }

    #[test]
    fn predict_examples() {
        let model = LinearModel::new(vec![4.0, 3.0]).unwrap();
        assert_eq!(predict(&model, &m(&[&[1.0, 1.0]])).unwrap(), vec![7.0]);
        let zero = LinearModel::zeros(2);
        assert_eq!(
            predict(&zero, &m(&[&[1.0, 5.0, 6.0], &[1.0, -2.0, 3.0]])).unwrap(),
            vec![0.0, 0.0]
        );
        let model = LinearModel::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(predict(&model, &m(&[&[1.0, 0.5, -1.0]])).unwrap(), vec![-1.0]);
    }

    #[test]
    fn predict_dimension_mismatch() {
        let model = LinearModel::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            predict(&model, &m(&[&[1.0, 2.0, 3.0]])),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 0.0], &[1.0, 3.0]).unwrap(), 5.0);
        assert_eq!(mse(&[1.0, 3.0], &[0.0, 0.0]).unwrap(), 5.0);
    }

    #[test]
    fn mse_scaling_is_quadratic() {
        let t = [0.0, 0.0, 0.0];
        let r = [0.5, -1.25, 2.0];
        let scaled: Vec<f64> = r.iter().map(|v| v * 4.0).collect();
        assert_eq!(mse(&scaled, &t).unwrap(), 16.0 * mse(&r, &t).unwrap());
    }

    #[test]
    fn mse_errors() {
        assert!(matches!(mse(&[1.0], &[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(mse(&[], &[]), Err(Error::Empty(_))));
    }

    #[test]
    fn gradient_zero_at_exact_fit() {
        let xb = m(&[&[1.0, 1.0], &[1.0, 2.0], &[1.0, 3.0]]);
        let model = LinearModel::new(vec![4.0, 3.0]).unwrap();
        let y = predict(&model, &xb).unwrap();
        assert_eq!(mse_gradient(&model, &xb, &y).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn gradient_hand_example() {
        // residuals (1·0 + 0 − 1, ...) with theta = 0 are −y
        let xb = m(&[&[1.0, 2.0], &[1.0, -1.0]]);
        let g = mse_gradient(&LinearModel::zeros(1), &xb, &[1.0, 3.0]).unwrap();
        // (2/2)·[(−1) + (−3), 2·(−1) + (−1)(−3)] = [−4, 1]
        assert_eq!(g, vec![-4.0, 1.0]);
    }

    #[test]
    fn gradient_dimension_mismatch() {
        let xb = m(&[&[1.0, 2.0]]);
        assert!(mse_gradient(&LinearModel::zeros(1), &xb, &[1.0, 2.0]).is_err());
        assert!(mse_gradient(&LinearModel::zeros(2), &xb, &[1.0]).is_err());
    }

    #[test]
    fn model_rejects_non_finite() {
        assert!(LinearModel::new(vec![f64::NAN]).is_err());
        assert!(LinearModel::new(vec![]).is_err());
    }
}
