//! Quick gradient checks on a few instances; the acceptance target runs the
//! full twenty per architecture.

mod common;

use common::gradcheck::*;
use hexrl::encoding::encode;
use hexrl::hex::Board;
use hexrl::neural::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn value_cnn_gradient_matches_finite_differences() {
    let err = value_cnn_worst(4, 11);
    assert!(err < GRAD_TOL, "relative error {err:e}");
}

#[test]
fn policy_score_matches_finite_differences_of_log_prob() {
    let err = policy_cnn_worst(4, 12);
    assert!(err < GRAD_TOL, "relative error {err:e}");
}

#[test]
fn value_rnn_gradient_matches_finite_differences() {
    let err = value_rnn_worst(3, 13);
    assert!(err < GRAD_TOL, "relative error {err:e}");
}

#[test]
fn hvp_matches_finite_differenced_gradients() {
    let err = hvp_worst(4, 14);
    assert!(err < HVP_TOL, "relative error {err:e}");
}

#[test]
fn hvp_is_linear_in_the_direction() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let p = NetworkParams::<f64>::init(Architecture::ValueCnn, 500);
    let x = encode(&random_board(&mut rng));
    let w1: Vec<f64> = (0..p.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w2: Vec<f64> = (0..p.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (a, b) = (0.7, -1.3);
    let mix: Vec<f64> = w1.iter().zip(&w2).map(|(u, v)| a * u + b * v).collect();
    let h1 = hvp_value(&p, &x, 2, &w1);
    let h2 = hvp_value(&p, &x, 2, &w2);
    let hm = hvp_value(&p, &x, 2, &mix);
    for k in 0..p.len() {
        assert!((hm[k] - (a * h1[k] + b * h2[k])).abs() < 1e-10);
    }
}

#[test]
fn gradient_is_zero_on_masked_weights() {
    let p = NetworkParams::<f64>::init(Architecture::ValueCnn, 7);
    let g = grad_value(&p, &encode(&Board::new()), 4);
    let mut masked = g.clone();
    p.mask_gradient(&mut masked);
    assert_eq!(g, masked);
}
