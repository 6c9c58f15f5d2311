//! Analytic gradients and Hessian-vector products against central finite
//! differences. Differences that miss by more than 1e-5 in f64 are redone in
//! double-double, so rounding noise stays far below the tolerance even for
//! coordinates near the 1e-8 magnitude floor.

use hexrl::action::ActionMask;
use hexrl::encoding::{encode, EncodedState};
use hexrl::hex::Board;
use hexrl::neural::*;
use hexrl::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dd::DD;

pub const GRAD_TOL: f64 = 1e-4;
pub const GRAD_FLOOR: f64 = 1e-8;
pub const HVP_TOL: f64 = 1e-3;
const H: f64 = 1e-5;

pub fn random_board(rng: &mut ChaCha8Rng) -> Board {
    loop {
        let mut b = Board::new();
        for _ in 0..rng.gen_range(0..7) {
            let moves = b.legal_moves();
            if moves.is_empty() {
                break;
            }
            b = b.play(moves[rng.gen_range(0..moves.len())]).unwrap();
        }
        if !b.legal_moves().is_empty() {
            return b;
        }
    }
}

fn to_dd(p: &NetworkParams<f64>) -> NetworkParams<DD> {
    p.map(DD::lit)
}

/// Scalar objective evaluable at any precision.
trait Objective {
    fn eval<T: Scalar>(&self, p: &NetworkParams<T>) -> T;
}

fn central_difference<T: Scalar>(f: &impl Objective, q: &mut NetworkParams<T>, k: usize, h: f64) -> f64 {
    let orig = q.flat()[k];
    let h = T::lit(h);
    q.flat_mut()[k] = orig + h;
    let fp = f.eval(q);
    q.flat_mut()[k] = orig - h;
    let fm = f.eval(q);
    q.flat_mut()[k] = orig;
    ((fp - fm) / (T::lit(2.0) * h)).real()
}

/// Largest relative error over coordinates with |g| > floor.
fn worst_fd_error(p: &NetworkParams<f64>, g: &[f64], f: &impl Objective) -> f64 {
    let mut worst = 0.0f64;
    let mut q = p.clone();
    let mut qd = to_dd(p);
    for k in 0..p.len() {
        if g[k].abs() <= GRAD_FLOOR {
            continue;
        }
        let mut rel = (central_difference(f, &mut q, k, H) - g[k]).abs() / g[k].abs();
        if rel > 1e-5 {
            rel = (central_difference(f, &mut qd, k, H) - g[k]).abs() / g[k].abs();
        }
        worst = worst.max(rel);
    }
    worst
}

/// Worst relative error of `∂y[i]/∂θ` over `n` random value CNNs and boards.
pub fn value_cnn_worst(n: u64, seed: u64) -> f64 {
    struct Out<'a>(&'a EncodedState, usize);
    impl Objective for Out<'_> {
        fn eval<T: Scalar>(&self, p: &NetworkParams<T>) -> T {
            value_forward(p, self.0)[self.1]
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|inst| {
            let p = NetworkParams::<f64>::init(Architecture::ValueCnn, seed * 1000 + inst);
            let x = encode(&random_board(&mut rng));
            let i = rng.gen_range(0..9);
            worst_fd_error(&p, &grad_value(&p, &x, i), &Out(&x, i))
        })
        .fold(0.0, f64::max)
}

/// Worst relative error of the policy score against `∇ log π(a)`.
pub fn policy_cnn_worst(n: u64, seed: u64) -> f64 {
    struct LogProb<'a>(&'a EncodedState, ActionMask, usize);
    impl Objective for LogProb<'_> {
        fn eval<T: Scalar>(&self, p: &NetworkParams<T>) -> T {
            policy_forward(p, self.0, self.1).unwrap()[self.2].ln()
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|inst| {
            let p = NetworkParams::<f64>::init(Architecture::PolicyCnn, seed * 1000 + inst);
            let b = random_board(&mut rng);
            let x = encode(&b);
            let legal = b.legal_mask();
            let a = legal.nth(rng.gen_range(0..legal.len())).unwrap();
            let (g, _) = policy_score(&p, &x, legal, a).unwrap();
            worst_fd_error(&p, &g, &LogProb(&x, legal, a))
        })
        .fold(0.0, f64::max)
}

fn sequence(rng: &mut ChaCha8Rng) -> Vec<EncodedState> {
    let mut b = Board::new();
    let mut xs = vec![encode(&b)];
    while xs.len() < RNN_DEPTH {
        let moves = b.legal_moves();
        if !moves.is_empty() {
            b = b.play(moves[rng.gen_range(0..moves.len())]).unwrap();
        }
        xs.push(encode(&b));
    }
    xs
}

/// Worst relative error of one late RNN output; earlier steps still
/// contribute through the hidden state.
pub fn value_rnn_worst(n: u64, seed: u64) -> f64 {
    struct Step<'a>(&'a [EncodedState], usize, usize);
    impl Objective for Step<'_> {
        fn eval<T: Scalar>(&self, p: &NetworkParams<T>) -> T {
            rnn_forward(p, self.0).unwrap()[self.1][self.2]
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|inst| {
            let p = NetworkParams::<f64>::init(Architecture::ValueRnn, seed * 1000 + inst);
            let xs = sequence(&mut rng);
            let t = rng.gen_range(RNN_DEPTH / 2..RNN_DEPTH);
            let i = rng.gen_range(0..9);
            let mut cots = vec![[0.0; 9]; RNN_DEPTH];
            cots[t][i] = 1.0;
            let g = rnn_vjp(&p, &xs, &cots).unwrap();
            worst_fd_error(&p, &g, &Step(&xs, t, i))
        })
        .fold(0.0, f64::max)
}

/// Worst relative error of `H·w` against `(∇f(θ+hw) − ∇f(θ−hw)) / 2h`,
/// measured both as a vector norm and per coordinate above 1e-6.
pub fn hvp_worst(n: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-4;
    let mut worst = 0.0f64;
    for inst in 0..n {
        let p = NetworkParams::<f64>::init(Architecture::ValueCnn, seed * 1000 + inst);
        let x = encode(&random_board(&mut rng));
        let i = rng.gen_range(0..9);
        let mut w: Vec<f64> = (0..p.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        p.mask_gradient(&mut w);
        let hv = hvp_value(&p, &x, i, &w);
        let wd: Vec<DD> = w.iter().map(|&v| DD::lit(v)).collect();
        let mut plus = to_dd(&p);
        plus.add_scaled(DD::lit(h), &wd);
        let mut minus = to_dd(&p);
        minus.add_scaled(DD::lit(-h), &wd);
        let gp = grad_value(&plus, &x, i);
        let gm = grad_value(&minus, &x, i);
        let fd: Vec<f64> = gp.iter().zip(&gm).map(|(&a, &b)| ((a - b) / DD::lit(2.0 * h)).real()).collect();
        let diff: f64 = fd.iter().zip(&hv).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = hv.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst = worst.max(diff / scale);
        for (a, b) in fd.iter().zip(&hv) {
            if b.abs() > 1e-6 {
                worst = worst.max((a - b).abs() / b.abs());
            }
        }
    }
    worst
}
