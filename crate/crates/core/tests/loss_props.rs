mod common;

use gdei::data::{generate_data, GeneratorConfig};
use gdei::loss::{add_bias, mse, mse_gradient, predict, LinearModel};
use gdei::matrix::Matrix;
use proptest::prelude::*;

fn design(rows: &[Vec<f64>]) -> Matrix {
    add_bias(&Matrix::from_rows(rows).unwrap()).unwrap()
}

#[test]
fn gradient_vanishes_at_least_squares_solution() {
    for (seed, m) in [(1u64, 1usize), (2, 3), (3, 5)] {
        let d = generate_data(&GeneratorConfig {
            n: 200,
            m,
            seed,
            ..Default::default()
        })
        .unwrap();
        let theta = common::ols(&d);
        let xb = add_bias(d.features()).unwrap();
        let g = mse_gradient(&LinearModel::new(theta).unwrap(), &xb, d.targets()).unwrap();
        let worst = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(worst < 1e-9, "max |grad| {worst} at OLS (m={m})");
    }
}

prop_compose! {
    fn instance(n: usize, m: usize)(
        rows in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, m), n),
        targets in prop::collection::vec(-10.0f64..10.0, n),
        theta in prop::collection::vec(-5.0f64..5.0, m + 1),
    ) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
        (rows, targets, theta)
    }
}

proptest! {
    #[test]
    fn gradient_matches_finite_differences((rows, targets, theta) in instance(50, 3)) {
        let g = mse_gradient(&LinearModel::new(theta.clone()).unwrap(), &design(&rows), &targets).unwrap();
        let fd = common::finite_difference_gradient(&rows, &targets, &theta, 1e-6);
        // MSE is quadratic, so central differences carry only rounding error ~ eps·L/h
        let floor = 1e-8 * (1.0 + common::reference_mse(&rows, &targets, &theta));
        for (a, b) in g.iter().zip(&fd) {
            prop_assert!(common::grad_close(*a, *b, 1e-6, floor), "{} vs {}", a, b);
        }
    }

    #[test]
    fn mse_is_nonnegative_and_symmetric(
        pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40)
    ) {
        let (p, t): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let a = mse(&p, &t).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert_eq!(a, mse(&t, &p).unwrap());
        prop_assert_eq!(a == 0.0, p == t);
    }

    #[test]
    fn predict_is_linear_in_theta(
        (rows, _t, theta1) in instance(20, 2),
        theta2 in prop::collection::vec(-5.0f64..5.0, 3),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let xb = design(&rows);
        let mix: Vec<f64> = theta1.iter().zip(&theta2).map(|(x, y)| a * x + b * y).collect();
        let lhs = predict(&LinearModel::new(mix).unwrap(), &xb).unwrap();
        let p1 = predict(&LinearModel::new(theta1).unwrap(), &xb).unwrap();
        let p2 = predict(&LinearModel::new(theta2).unwrap(), &xb).unwrap();
        for ((l, x), y) in lhs.iter().zip(&p1).zip(&p2) {
            let r = a * x + b * y;
            prop_assert!((l - r).abs() <= 1e-12 * (1.0 + l.abs().max(r.abs())), "{} vs {}", l, r);
        }
    }

    #[test]
    fn add_bias_preserves_columns(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 4), 1..20)) {
        let x = Matrix::from_rows(&rows).unwrap();
        let xb = add_bias(&x).unwrap();
        prop_assert_eq!(xb.column(0), vec![1.0; rows.len()]);
        for j in 0..4 {
            prop_assert_eq!(xb.column(j + 1), x.column(j));
        }
    }
}
