#![allow(dead_code)]

use gdei::data::Dataset;
use gdei::loss::add_bias;
use nalgebra::{DMatrix, DVector};

/// Least-squares θ from the normal equations `(XᵀX)θ = Xᵀy`, solved by
/// Cholesky on a bias-augmented design matrix built independently of the
/// crate's `add_bias`.
pub fn ols(dataset: &Dataset) -> Vec<f64> {
    let n = dataset.n();
    let m = dataset.m();
    let x = DMatrix::from_fn(n, m + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            dataset.features().get(i, j - 1)
        }
    });
    let y = DVector::from_column_slice(dataset.targets());
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * y;
    let theta = xtx.cholesky().expect("normal equations are SPD").solve(&xty);
    theta.iter().copied().collect()
}

/// MSE of the OLS fit: the loss floor any optimizer can reach.
pub fn ols_mse(dataset: &Dataset) -> f64 {
    let theta = ols(dataset);
    let xb = add_bias(dataset.features()).unwrap();
    let n = dataset.n();
    (0..n)
        .map(|i| {
            let pred: f64 = xb.row(i).iter().zip(&theta).map(|(a, b)| a * b).sum();
            (dataset.targets()[i] - pred).powi(2)
        })
        .sum::<f64>()
        / n as f64
}

/// Plain-loop MSE, independent of `gdei::loss`.
pub fn reference_mse(rows: &[Vec<f64>], targets: &[f64], theta: &[f64]) -> f64 {
    rows.iter()
        .zip(targets)
        .map(|(row, t)| {
            let pred = theta[0] + row.iter().zip(&theta[1..]).map(|(x, w)| x * w).sum::<f64>();
            (t - pred).powi(2)
        })
        .sum::<f64>()
        / targets.len() as f64
}

/// Central finite-difference gradient of [`reference_mse`].
pub fn finite_difference_gradient(
    rows: &[Vec<f64>],
    targets: &[f64],
    theta: &[f64],
    h: f64,
) -> Vec<f64> {
    (0..theta.len())
        .map(|j| {
            let mut plus = theta.to_vec();
            let mut minus = theta.to_vec();
            plus[j] += h;
            minus[j] -= h;
            (reference_mse(rows, targets, &plus) - reference_mse(rows, targets, &minus)) / (2.0 * h)
        })
        .collect()
}

/// Gradient-check comparison: relative error below `rel`, or absolute error
/// below `abs_floor` for components near zero.
pub fn grad_close(a: f64, b: f64, rel: f64, abs_floor: f64) -> bool {
    let diff = (a - b).abs();
    diff < abs_floor || diff / a.abs().max(b.abs()) < rel
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}
