//! Pearson χ² goodness of fit of ε-greedy draws against the closed form.

use hexrl::action::ActionMask;
use hexrl::algorithms::epsilon_greedy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Draws ε-greedy actions over `legal`, with a unique greedy action, and
/// returns the χ² p-value of the observed counts.
pub fn epsilon_greedy_p_value(epsilon: f64, legal: ActionMask, draws: usize, seed: u64) -> f64 {
    let mut values = [0.0; 9];
    let greedy = legal.nth(legal.len() / 2).unwrap();
    for (i, v) in values.iter_mut().enumerate() {
        *v = if i == greedy { 0.5 } else { -(i as f64) / 10.0 };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0usize; 9];
    for _ in 0..draws {
        counts[epsilon_greedy(&values, legal, epsilon, &mut rng).unwrap()] += 1;
    }
    let n = legal.len() as f64;
    let mut stat = 0.0;
    for i in 0..9 {
        if !legal.contains(i) {
            assert_eq!(counts[i], 0, "illegal action {i} drawn");
            continue;
        }
        let p = if i == greedy { 1.0 - epsilon + epsilon / n } else { epsilon / n };
        let expected = p * draws as f64;
        stat += (counts[i] as f64 - expected).powi(2) / expected;
    }
    1.0 - ChiSquared::new(n - 1.0).unwrap().cdf(stat)
}
