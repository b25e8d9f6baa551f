mod common;

use gdei::data::{generate_data, load_csv, split, split_indices, GeneratorConfig};
use proptest::prelude::*;

#[test]
fn generator_statistics_match_the_model() {
    let d = generate_data(&GeneratorConfig {
        n: 10_000,
        m: 1,
        seed: 7,
        ..Default::default()
    })
    .unwrap();
    let mean_x = d.features().column(0).iter().sum::<f64>() / 10_000.0;
    let mean_y = d.targets().iter().sum::<f64>() / 10_000.0;
    // E[x] = 1, E[y] = 4 + 3·1 = 7, sd(y) = 2 → standard error 0.02
    assert!((0.95..=1.05).contains(&mean_x), "mean x {mean_x}");
    assert!((6.9..=7.1).contains(&mean_y), "mean y {mean_y}");
    assert!((mean_y - 7.0).abs() < 0.1);
}

#[test]
fn csv_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    let d = generate_data(&GeneratorConfig {
        n: 50,
        m: 2,
        seed: 1,
        ..Default::default()
    })
    .unwrap();
    std::fs::write(&path, d.to_csv()).unwrap();
    let back = load_csv(&path, "y").unwrap();
    assert_eq!((back.n(), back.m()), (50, 2));
    for (a, b) in d.features().as_slice().iter().zip(back.features().as_slice()) {
        assert!((a - b).abs() <= 1e-12);
    }
    for (a, b) in d.targets().iter().zip(back.targets()) {
        assert!((a - b).abs() <= 1e-12);
    }
    // shortest round-trip formatting makes this exact
    assert_eq!(back, d);
}

#[test]
fn three_row_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.csv");
    std::fs::write(&path, "x,y\n0.5,5.5\n1,7\n1.5,8.5\n").unwrap();
    let d = load_csv(&path, "y").unwrap();
    assert_eq!((d.n(), d.m()), (3, 1));
    assert_eq!(d.features().column(0), vec![0.5, 1.0, 1.5]);
}

#[test]
fn split_seeds_5_and_6_give_different_partitions() {
    // enumerated once: seed 5 holds out rows {0, 7}, seed 6 holds out {1, 2}
    let (_, v5) = split_indices(10, 0.2, 5).unwrap();
    let (_, v6) = split_indices(10, 0.2, 6).unwrap();
    let mut v5s = v5.clone();
    let mut v6s = v6.clone();
    v5s.sort();
    v6s.sort();
    assert_eq!(v5s, vec![0, 7]);
    assert_eq!(v6s, vec![1, 2]);
    assert_ne!(v5s, v6s);
}

#[test]
fn split_keeps_rows_intact() {
    let d = generate_data(&GeneratorConfig {
        n: 30,
        m: 3,
        seed: 4,
        ..Default::default()
    })
    .unwrap();
    let (train, valid) = split(&d, 0.3, 9).unwrap();
    assert_eq!((train.n(), valid.n()), (21, 9));
    let (ti, vi) = split_indices(30, 0.3, 9).unwrap();
    for (pos, &i) in ti.iter().enumerate() {
        assert_eq!(train.features().row(pos), d.features().row(i));
        assert_eq!(train.targets()[pos], d.targets()[i]);
    }
    for (pos, &i) in vi.iter().enumerate() {
        assert_eq!(valid.features().row(pos), d.features().row(i));
    }
}

proptest! {
    #[test]
    fn split_is_a_partition(n in 2usize..300, frac in 0.01f64..0.99, seed: u64) {
        prop_assume!((n as f64 * frac).floor() as usize >= 1);
        prop_assume!(((n as f64 * frac).floor() as usize) < n);
        let (train, valid) = split_indices(n, frac, seed).unwrap();
        prop_assert_eq!(valid.len(), (n as f64 * frac).floor() as usize);
        let mut all: Vec<usize> = train.iter().chain(&valid).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(split_indices(n, frac, seed).unwrap(), (train, valid));
    }

    #[test]
    fn generator_is_deterministic_and_bounded(n in 1usize..50, m in 1usize..4, seed: u64) {
        let cfg = GeneratorConfig { n, m, seed, ..Default::default() };
        let a = generate_data(&cfg).unwrap();
        prop_assert_eq!(&a, &generate_data(&cfg).unwrap());
        prop_assert!(a.features().as_slice().iter().all(|v| (0.0..2.0).contains(v)));
    }
}
