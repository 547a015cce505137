mod common;

use common::{column_diff_up_to_sign, max_abs_diff, random_rows, random_sequence, rng};
use fdms_core::synergy::{fit_pca, orthonormality_error, reconstruction_mse, Centering, PostureSequence};
use fdms_oracle::{covariance, gram_schmidt, jacobi_eigen, projection_mse};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};

#[test]
fn matches_jacobi_reference() {
    for seed in 0..25 {
        let rows = random_rows(seed, 50, 10);
        let seq = PostureSequence::from_rows(&rows, common::names(10), "r").unwrap();
        let model = fit_pca(&seq, Centering::Centered).unwrap();
        let (mean, cov) = covariance(&rows, true);
        let (vals, vecs) = jacobi_eigen(&cov, 1e-12);
        assert!(max_abs_diff(model.mean().as_slice(), &mean) < 1e-12);
        assert!(
            max_abs_diff(model.eigenvalues().as_slice(), &vals) < 1e-8,
            "seed {seed}"
        );
        assert!(
            column_diff_up_to_sign(model.eigenvectors(), &vecs) < 1e-8,
            "seed {seed}"
        );
    }
}

#[test]
fn uncentered_matches_jacobi_reference() {
    for seed in 100..105 {
        let rows = random_rows(seed, 40, 6);
        let seq = PostureSequence::from_rows(&rows, common::names(6), "r").unwrap();
        let model = fit_pca(&seq, Centering::Uncentered).unwrap();
        let (_, cov) = covariance(&rows, false);
        let (vals, vecs) = jacobi_eigen(&cov, 1e-12);
        assert!(model.mean().iter().all(|&m| m == 0.0));
        assert!(max_abs_diff(model.eigenvalues().as_slice(), &vals) < 1e-8);
        assert!(column_diff_up_to_sign(model.eigenvectors(), &vecs) < 1e-8);
    }
}

#[test]
fn sign_convention_matches_reference() {
    let rows = random_rows(3, 50, 10);
    let seq = PostureSequence::from_rows(&rows, common::names(10), "r").unwrap();
    let v = fit_pca(&seq, Centering::Centered).unwrap().eigenvectors().clone();
    for k in 0..10 {
        let col = v.column(k);
        let big = col
            .iter()
            .copied()
            .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
        assert!(big > 0.0);
    }
}

#[test]
fn projection_algebra_for_every_component_count() {
    for seed in 0..25 {
        let seq = random_sequence(seed, 50, 10);
        let model = fit_pca(&seq, Centering::Centered).unwrap();
        assert!(orthonormality_error(model.eigenvectors()) < 1e-9);
        for n_s in 1..=10 {
            let s = model.synergy_matrix(n_s).unwrap();
            let sts = s.basis().transpose() * s.basis();
            assert!((sts - DMatrix::identity(n_s, n_s)).abs().max() < 1e-9);
            let p = s.projector();
            assert!((&p * &p - &p).abs().max() < 1e-9);
            let x = seq.row(7);
            let once = s.project(&x).unwrap();
            let twice = s.project(once.as_slice()).unwrap();
            assert!((&twice - &once).abs().max() < 1e-9);
        }
        let full = model.synergy_matrix(10).unwrap();
        for r in seq.rows() {
            assert!(max_abs_diff(full.project(&r).unwrap().as_slice(), &r) < 1e-9);
        }
    }
}

#[test]
fn training_error_equals_discarded_variance() {
    for seed in 0..25 {
        let seq = random_sequence(seed, 50, 10);
        let model = fit_pca(&seq, Centering::Centered).unwrap();
        let rows: Vec<Vec<f64>> = seq.rows().collect();
        let (_, cov) = covariance(&rows, true);
        let (vals, _) = jacobi_eigen(&cov, 1e-12);
        for n_s in 1..=10 {
            let s = model.synergy_matrix(n_s).unwrap();
            let mse = reconstruction_mse(&seq, &s.approximate_sequence(&seq).unwrap()).unwrap();
            let discarded: f64 = vals[n_s..].iter().sum();
            assert!(
                (mse - discarded).abs() < 1e-8,
                "seed {seed} n_s {n_s}: {mse} vs {discarded}"
            );
        }
    }
}

#[test]
fn pca_beats_random_bases() {
    let mut r = rng(99);
    for seed in 0..5 {
        let rows = random_rows(seed + 40, 50, 10);
        let seq = PostureSequence::from_rows(&rows, common::names(10), "r").unwrap();
        let model = fit_pca(&seq, Centering::Centered).unwrap();
        let mean: Vec<f64> = model.mean().iter().copied().collect();
        for n_s in 1..=3 {
            let s = model.synergy_matrix(n_s).unwrap();
            let pca = reconstruction_mse(&seq, &s.approximate_sequence(&seq).unwrap()).unwrap();
            for _ in 0..20 {
                let raw: Vec<Vec<f64>> = (0..n_s)
                    .map(|_| (0..10).map(|_| StandardNormal.sample(&mut r)).collect())
                    .collect();
                let basis = gram_schmidt(&raw);
                assert!(pca <= projection_mse(&rows, &mean, &basis) + 1e-12);
            }
        }
    }
}

#[test]
fn contribution_ratios_sum_to_one() {
    let model = fit_pca(&random_sequence(5, 50, 10), Centering::Centered).unwrap();
    let ratios = model.contribution_ratios().unwrap();
    assert!((ratios.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert_eq!(model.cumulative_contribution(10).unwrap(), 1.0);
    let mut prev = 0.0;
    for k in 1..=10 {
        let c = model.cumulative_contribution(k).unwrap();
        assert!(c >= prev);
        prev = c;
    }
    assert!(model.min_components_for_ratio(0.9).unwrap() >= model.min_components_for_ratio(0.8).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent(seed in 0u64..1000, n_s in 1usize..=6, p in prop::collection::vec(-2.0f64..2.0, 6)) {
        let model = fit_pca(&random_sequence(seed, 20, 6), Centering::Centered).unwrap();
        let s = model.synergy_matrix(n_s).unwrap();
        let once = s.project(&p).unwrap();
        let twice = s.project(once.as_slice()).unwrap();
        prop_assert!((&twice - &once).abs().max() < 1e-9);
        let via = s.decode(s.coefficients(&p).unwrap().as_slice()).unwrap();
        prop_assert_eq!(via, once);
    }

    #[test]
    fn uncentered_projection_is_idempotent(seed in 0u64..1000, n_s in 1usize..=5, p in prop::collection::vec(-2.0f64..2.0, 5)) {
        let model = fit_pca(&random_sequence(seed, 20, 5), Centering::Uncentered).unwrap();
        let s = model.synergy_matrix(n_s).unwrap();
        let once = s.project(&p).unwrap();
        let twice = s.project(once.as_slice()).unwrap();
        prop_assert!((&twice - &once).abs().max() < 1e-9);
    }

    #[test]
    fn fit_is_deterministic_and_permutation_invariant(seed in 0u64..1000) {
        let rows = random_rows(seed, 15, 4);
        let seq = PostureSequence::from_rows(&rows, common::names(4), "a").unwrap();
        let mut rev = rows.clone();
        rev.reverse();
        let seq_rev = PostureSequence::from_rows(&rev, common::names(4), "b").unwrap();
        let a = fit_pca(&seq, Centering::Centered).unwrap();
        let b = fit_pca(&seq_rev, Centering::Centered).unwrap();
        prop_assert!(max_abs_diff(a.eigenvalues().as_slice(), b.eigenvalues().as_slice()) < 1e-10);
        prop_assert_eq!(fit_pca(&seq, Centering::Centered).unwrap(), a);
    }
}
