//! Textbook linear GTD2, TDC and greedy GQ over a one-hot (state, action)
//! table, written with plain index arithmetic and no library code.

use hexrl::action::ActionMask;
use hexrl::algorithms::{gradient_td_update, CorrectionState, GtdKind, LinearValues, Trace, Transition, ValueFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STATES: usize = 6;
pub const ACTIONS: usize = 4;
const DIM: usize = STATES * ACTIONS;

struct Reference {
    theta: [f64; DIM],
    w: [f64; DIM],
    e: [f64; DIM],
}

impl Reference {
    fn step(&mut self, kind: GtdKind, t: &Transition<usize, f64>, alpha: f64, beta: f64, lambda: f64) {
        let i = t.s * ACTIONS + t.a;
        let gamma = t.discount;
        let next = if t.terminal {
            None
        } else {
            let b = match kind {
                GtdKind::GreedyGq => {
                    let mut best: Option<usize> = None;
                    for b in 0..ACTIONS {
                        if t.legal_next.contains(b)
                            && best.is_none_or(|x| self.theta[t.s_next * ACTIONS + b] > self.theta[t.s_next * ACTIONS + x])
                        {
                            best = Some(b);
                        }
                    }
                    best.unwrap()
                }
                _ => t.a_next.unwrap(),
            };
            Some(t.s_next * ACTIONS + b)
        };
        let q_next = next.map_or(0.0, |j| self.theta[j]);
        let delta = t.r + gamma * q_next - self.theta[i];
        for k in 0..DIM {
            self.e[k] *= gamma * lambda;
        }
        self.e[i] += 1.0;
        let ew: f64 = (0..DIM).map(|k| self.e[k] * self.w[k]).sum();
        let phi_w = self.w[i];
        let mut step = [0.0; DIM];
        match kind {
            GtdKind::Gtd2 => {
                step[i] += ew;
                if let Some(j) = next {
                    step[j] -= gamma * ew;
                }
            }
            GtdKind::Tdc | GtdKind::GreedyGq => {
                for k in 0..DIM {
                    step[k] = delta * self.e[k];
                }
                if let Some(j) = next {
                    step[j] -= gamma * (1.0 - lambda) * ew;
                }
            }
        }
        for k in 0..DIM {
            self.w[k] += beta * delta * self.e[k];
        }
        self.w[i] -= beta * phi_w;
        for k in 0..DIM {
            self.theta[k] += alpha * step[k];
        }
    }
}

fn one_hot_table() -> Vec<Vec<Vec<f64>>> {
    (0..STATES)
        .map(|s| {
            (0..ACTIONS)
                .map(|a| (0..DIM).map(|k| if k == s * ACTIONS + a { 1.0 } else { 0.0 }).collect())
                .collect()
        })
        .collect()
}

pub fn random_transition(rng: &mut ChaCha8Rng, gamma: f64) -> Transition<usize, f64> {
    let terminal = rng.gen_bool(0.15);
    let legal_next = loop {
        let m = ActionMask::from_bits(rng.gen_range(0..1u16 << ACTIONS));
        if !m.is_empty() {
            break m;
        }
    };
    let a_next = (!terminal).then(|| legal_next.nth(rng.gen_range(0..legal_next.len())).unwrap());
    Transition {
        s: rng.gen_range(0..STATES),
        a: rng.gen_range(0..ACTIONS),
        r: if rng.gen_bool(0.3) { 1.0 } else { 0.0 },
        s_next: rng.gen_range(0..STATES),
        legal_next: if terminal { ActionMask::EMPTY } else { legal_next },
        a_next,
        terminal,
        discount: gamma,
    }
}

/// Largest deviation of `θ` or `w`, relative to `max(1, |reference|)`, over
/// `steps` random transitions. Traces are cleared after terminal transitions.
pub fn max_reduction_error(kind: GtdKind, lambda: f64, gamma: f64, steps: usize, seed: u64) -> f64 {
    let (alpha, beta) = (0.02, 0.05);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init: Vec<f64> = (0..DIM).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let mut vf = LinearValues::new(one_hot_table(), init.clone());
    let mut c = CorrectionState::new(DIM, alpha, beta);
    let mut trace = Trace::new(DIM, lambda);
    let mut r = Reference {
        theta: init.try_into().unwrap(),
        w: [0.0; DIM],
        e: [0.0; DIM],
    };
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let t = random_transition(&mut rng, gamma);
        gradient_td_update(kind, &mut vf, &t, &mut c, &mut trace).unwrap();
        r.step(kind, &t, alpha, beta, lambda);
        if t.terminal {
            trace.reset();
            r.e = [0.0; DIM];
        }
        for k in 0..DIM {
            for (got, want) in [(vf.params()[k], r.theta[k]), (c.w[k], r.w[k])] {
                assert!(want.is_finite(), "reference diverged");
                worst = worst.max((got - want).abs() / want.abs().max(1.0));
            }
        }
    }
    worst
}
