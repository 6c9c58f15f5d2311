//! Supervised warm start from oracle-scored random positions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::{encode, EncodedState};
use crate::error::{Error, Result};
use crate::hex::{Board, Player, CELLS};
use crate::neural::{value_forward, value_vjp, Architecture, NetworkParams, RmsPropState, OUTPUTS};
use crate::oracle::score_position;

/// Targets for winning and losing moves, kept inside the squashed output range.
pub const PRETRAIN_TARGET: f64 = 0.9;
pub const PRETRAIN_LR: f64 = 0.003;
pub const PRETRAIN_MINIBATCH: usize = 32;
pub const PRETRAIN_MAX_EPOCHS: usize = 200;
pub const PRETRAIN_MSE_GOAL: f64 = 0.05;

struct Example {
    x: EncodedState,
    targets: [Option<f64>; CELLS],
}

/// A random non-terminal position from Red-first random play, shown from the
/// mover's side (mirrored when Blue is to move).
pub fn random_position<R: Rng + ?Sized>(rng: &mut R) -> Board {
    loop {
        let plies = rng.gen_range(0..CELLS - 1);
        let mut b = Board::new();
        for _ in 0..plies {
            let moves = b.legal_moves();
            if moves.is_empty() {
                break;
            }
            b = b.play(moves[rng.gen_range(0..moves.len())]).expect("legal");
        }
        if b.legal_moves().is_empty() {
            continue;
        }
        return if b.to_move() == Player::Blue { b.mirror_transpose() } else { b };
    }
}

fn mse(p: &NetworkParams<f64>, data: &[Example]) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for ex in data {
        let y = value_forward(p, &ex.x);
        for (v, t) in y.iter().zip(&ex.targets) {
            if let Some(t) = t {
                sum += (v - t) * (v - t);
                n += 1;
            }
        }
    }
    sum / n.max(1) as f64
}

/// Fits `p` to oracle scores (±[`PRETRAIN_TARGET`] on legal cells) of
/// `n_positions` random positions by minibatch RMSProp, stopping once the
/// training MSE is below [`PRETRAIN_MSE_GOAL`] or after
/// [`PRETRAIN_MAX_EPOCHS`] epochs.
pub fn pretrain(mut p: NetworkParams<f64>, n_positions: usize, seed: u64) -> Result<NetworkParams<f64>> {
    if p.arch() != Architecture::ValueCnn {
        return Err(Error::usage("pretraining needs a value CNN"));
    }
    if n_positions == 0 {
        return Ok(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<Example> = (0..n_positions)
        .map(|_| {
            let b = random_position(&mut rng);
            let scores = score_position(&b).expect("non-terminal");
            Example {
                x: encode(&b),
                targets: scores.map(|s| s.map(|s| s * PRETRAIN_TARGET)),
            }
        })
        .collect();
    let mut opt = RmsPropState::new(p.len(), PRETRAIN_LR);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for _ in 0..PRETRAIN_MAX_EPOCHS {
        if mse(&p, &data) < PRETRAIN_MSE_GOAL {
            break;
        }
        order.shuffle(&mut rng);
        for chunk in order.chunks(PRETRAIN_MINIBATCH) {
            let count: usize = chunk.iter().map(|&i| data[i].targets.iter().flatten().count()).sum();
            let mut grad = vec![0.0; p.len()];
            for &i in chunk {
                let ex = &data[i];
                let y = value_forward(&p, &ex.x);
                let cot: [f64; OUTPUTS] =
                    std::array::from_fn(|k| ex.targets[k].map_or(0.0, |t| 2.0 * (y[k] - t) / count as f64));
                crate::scalar::axpy(1.0, &value_vjp(&p, &ex.x, &cot), &mut grad);
            }
            opt.step(&mut p, &grad)?;
        }
    }
    Ok(p)
}

/// Training MSE of `p` against the scores of `n_positions` positions drawn as in [`pretrain`].
pub fn pretrain_mse(p: &NetworkParams<f64>, n_positions: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<Example> = (0..n_positions)
        .map(|_| {
            let b = random_position(&mut rng);
            Example {
                x: encode(&b),
                targets: score_position(&b).expect("non-terminal").map(|s| s.map(|s| s * PRETRAIN_TARGET)),
            }
        })
        .collect();
    mse(p, &data)
}
