//! Seven-state star counterexample for off-policy TD with linear features.
//!
//! States 0..5 have features `2eᵢ + e₇`, state 6 has `e₆ + 2e₇`. The target
//! policy always moves to state 6 with reward 0, so the true value is zero
//! everywhere. Training samples the start state uniformly (the off-policy
//! state distribution) and always follows the target transition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::ActionMask;
use crate::algorithms::{
    gradient_td_update, sarsa_update, CorrectionState, GtdKind, LinearValues, Trace, Transition, ValueFunction,
};
use crate::error::{Error, Result};

pub const STATES: usize = 7;
pub const FEATURES: usize = 8;
pub const GAMMA: f64 = 0.99;
pub const THETA0: [f64; FEATURES] = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BairdAlgorithm {
    SemiTd0,
    Gtd2,
    Tdc,
    GreedyGq,
}

impl std::str::FromStr for BairdAlgorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "semi_td0" => BairdAlgorithm::SemiTd0,
            "gtd2" => BairdAlgorithm::Gtd2,
            "tdc" => BairdAlgorithm::Tdc,
            "greedy_gq" => BairdAlgorithm::GreedyGq,
            other => return Err(Error::usage(format!("unknown baird algorithm {other:?}"))),
        })
    }
}

pub fn features(s: usize) -> [f64; FEATURES] {
    let mut phi = [0.0; FEATURES];
    if s < 6 {
        phi[s] = 2.0;
        phi[7] = 1.0;
    } else {
        phi[6] = 1.0;
        phi[7] = 2.0;
    }
    phi
}

pub fn value_function() -> LinearValues<f64> {
    let feats = (0..STATES).map(|s| vec![features(s).to_vec()]).collect();
    LinearValues::new(feats, THETA0.to_vec())
}

/// `‖Π(Tv − v)‖²_D` for `v = Φθ`, with `D` uniform over the states and `Π`
/// the `D`-orthogonal projection onto the span of the feature columns.
pub fn projected_bellman_error(theta: &[f64]) -> f64 {
    let d = 1.0 / STATES as f64;
    let inner = |a: &[f64; STATES], b: &[f64; STATES]| d * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let v: Vec<f64> = (0..STATES)
        .map(|s| features(s).iter().zip(theta).map(|(f, t)| f * t).sum())
        .collect();
    let residual: [f64; STATES] = std::array::from_fn(|s| GAMMA * v[6] - v[s]);

    let mut basis: Vec<[f64; STATES]> = Vec::new();
    for j in 0..FEATURES {
        let mut col: [f64; STATES] = std::array::from_fn(|s| features(s)[j]);
        for q in &basis {
            let c = inner(&col, q);
            for s in 0..STATES {
                col[s] -= c * q[s];
            }
        }
        let n = inner(&col, &col).sqrt();
        if n > 1e-10 {
            basis.push(col.map(|x| x / n));
        }
    }
    let mut proj = [0.0; STATES];
    for q in &basis {
        let c = inner(&residual, q);
        for s in 0..STATES {
            proj[s] += c * q[s];
        }
    }
    inner(&proj, &proj)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BairdPoint {
    pub norm: f64,
    pub pbe: f64,
}

pub fn run_baird(alg: BairdAlgorithm, steps: usize, alpha: f64, beta: f64, seed: u64) -> Result<Vec<BairdPoint>> {
    let mut vf = value_function();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Trace::new(FEATURES, 0.0);
    let mut c = CorrectionState::new(FEATURES, alpha, beta);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let t = Transition {
            s: rng.gen_range(0..STATES),
            a: 0,
            r: 0.0,
            s_next: 6,
            legal_next: ActionMask::all(1),
            a_next: Some(0),
            terminal: false,
            discount: GAMMA,
        };
        match alg {
            BairdAlgorithm::SemiTd0 => {
                sarsa_update(&mut vf, &t, &mut trace, alpha)?;
            }
            BairdAlgorithm::Gtd2 => {
                gradient_td_update(GtdKind::Gtd2, &mut vf, &t, &mut c, &mut trace)?;
            }
            BairdAlgorithm::Tdc => {
                gradient_td_update(GtdKind::Tdc, &mut vf, &t, &mut c, &mut trace)?;
            }
            BairdAlgorithm::GreedyGq => {
                gradient_td_update(GtdKind::GreedyGq, &mut vf, &t, &mut c, &mut trace)?;
            }
        }
        let theta = vf.params();
        out.push(BairdPoint {
            norm: crate::scalar::norm(theta),
            pbe: projected_bellman_error(theta),
        });
    }
    Ok(out)
}
