#![allow(dead_code)]

use fdms_core::synergy::PostureSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Correlated gaussian rows with well separated variances per latent axis.
pub fn random_rows(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let mix: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| StandardNormal.sample(&mut r)).collect())
        .collect();
    let offset: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
    (0..n)
        .map(|_| {
            let z: Vec<f64> = (0..d)
                .map(|k| {
                    let s: f64 = StandardNormal.sample(&mut r);
                    s * (d - k) as f64 / d as f64
                })
                .collect();
            (0..d)
                .map(|j| offset[j] + (0..d).map(|k| z[k] * mix[k][j]).sum::<f64>())
                .collect()
        })
        .collect()
}

pub fn names(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("j{j}")).collect()
}

pub fn random_sequence(seed: u64, n: usize, d: usize) -> PostureSequence {
    PostureSequence::from_rows(&random_rows(seed, n, d), names(d), format!("random seed={seed}")).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest entry difference between columns, allowing a sign flip per column.
pub fn column_diff_up_to_sign(a: &nalgebra::DMatrix<f64>, cols: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0_f64;
    for (k, col) in cols.iter().enumerate() {
        let c = a.column(k);
        let same = c.iter().zip(col).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let flip = c.iter().zip(col).map(|(x, y)| (x + y).abs()).fold(0.0, f64::max);
        worst = worst.max(same.min(flip));
    }
    worst
}
