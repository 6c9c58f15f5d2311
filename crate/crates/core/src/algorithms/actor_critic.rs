use rand::Rng;

use crate::action::ActionMask;
use crate::encoding::encode;
use crate::error::Result;
use crate::hex::Board;
use crate::neural::{policy_forward, policy_score, Architecture, NetworkParams, OUTPUTS};
use crate::scalar::{dot, Scalar};

/// Running Fisher estimate `F ← (1−ρ)F + ρ·s·sᵀ` of the policy score `s`.
///
/// The natural direction `(F + εI)⁻¹·v` is found by conjugate gradients,
/// warm-started from the previous solution.
#[derive(Clone, Debug, PartialEq)]
pub struct NaturalGradientState<T> {
    dim: usize,
    /// Dense row-major `dim × dim`.
    fisher: Vec<T>,
    pub rho: T,
    pub ridge: T,
    last: Vec<T>,
}

impl<T: Scalar> NaturalGradientState<T> {
    pub const DEFAULT_RHO: f64 = 0.01;
    pub const DEFAULT_RIDGE: f64 = 1e-3;

    /// Starts from `F = I`.
    pub fn new(dim: usize, rho: T, ridge: T) -> Self {
        let mut fisher = vec![T::zero(); dim * dim];
        for i in 0..dim {
            fisher[i * dim + i] = T::one();
        }
        NaturalGradientState {
            dim,
            fisher,
            rho,
            ridge,
            last: vec![T::zero(); dim],
        }
    }

    pub fn observe(&mut self, score: &[T]) {
        let keep = T::one() - self.rho;
        for i in 0..self.dim {
            let si = self.rho * score[i];
            let row = &mut self.fisher[i * self.dim..(i + 1) * self.dim];
            for (f, &sj) in row.iter_mut().zip(score) {
                *f = keep * *f + si * sj;
            }
        }
    }

    fn apply(&self, x: &[T], out: &mut [T]) {
        for i in 0..self.dim {
            out[i] = dot(&self.fisher[i * self.dim..(i + 1) * self.dim], x) + self.ridge * x[i];
        }
    }

    /// Solves `(F + εI)x = b`.
    pub fn solve(&mut self, b: &[T]) -> Vec<T> {
        let n = self.dim;
        let mut x = self.last.clone();
        let mut ax = vec![T::zero(); n];
        self.apply(&x, &mut ax);
        let mut r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        let tol = T::lit(1e-14) * dot(b, b).max_of(T::lit(1e-300));
        let mut ap = vec![T::zero(); n];
        for _ in 0..n.min(200) {
            if rr <= tol {
                break;
            }
            self.apply(&p, &mut ap);
            let step = rr / dot(&p, &ap);
            for k in 0..n {
                x[k] += step * p[k];
                r[k] -= step * ap[k];
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            for k in 0..n {
                p[k] = r[k] + beta * p[k];
            }
            rr = rr_new;
        }
        self.last.clone_from(&x);
        x
    }
}

/// Softmax policy network with an eligibility trace over its score.
#[derive(Clone, Debug, PartialEq)]
pub struct Actor<T> {
    pub params: NetworkParams<T>,
    pub trace: Vec<T>,
    pub lambda: T,
    pub alpha: T,
    pub natural: Option<NaturalGradientState<T>>,
}

impl<T: Scalar> Actor<T> {
    pub fn new(params: NetworkParams<T>, alpha: T, lambda: T, natural: bool) -> Self {
        assert_eq!(params.arch(), Architecture::PolicyCnn, "actor needs a policy CNN");
        let n = params.len();
        Actor {
            natural: natural.then(|| {
                NaturalGradientState::new(
                    n,
                    T::lit(NaturalGradientState::<T>::DEFAULT_RHO),
                    T::lit(NaturalGradientState::<T>::DEFAULT_RIDGE),
                )
            }),
            params,
            trace: vec![T::zero(); n],
            lambda,
            alpha,
        }
    }

    pub fn reset_episode(&mut self) {
        self.trace.fill(T::zero());
    }

    pub fn probabilities(&self, s: &Board, legal: ActionMask) -> Result<[T; OUTPUTS]> {
        policy_forward(&self.params, &encode(s), legal)
    }

    pub fn sample<R: Rng + ?Sized>(&self, s: &Board, legal: ActionMask, rng: &mut R) -> Result<usize> {
        let probs = self.probabilities(s, legal)?;
        let u = rng.gen::<f64>();
        let mut acc = 0.0;
        let mut last = None;
        for i in legal.iter() {
            acc += probs[i].real();
            last = Some(i);
            if u < acc {
                return Ok(i);
            }
        }
        Ok(last.expect("legal mask checked by policy_forward"))
    }
}

/// Policy update driven by the critic's TD error `δ` for the transition that
/// took action `a` in `s`. The trace decays by `γλ`; use `γ = 1` for a
/// single-agent task.
pub fn actor_critic_step<T: Scalar>(actor: &mut Actor<T>, s: &Board, a: usize, delta: T, discount: T) -> Result<()> {
    let (score, _) = policy_score(&actor.params, &encode(s), s.legal_mask(), a)?;
    let decay = discount * actor.lambda;
    for (e, &g) in actor.trace.iter_mut().zip(&score) {
        *e = decay * *e + g;
    }
    let direction = match &mut actor.natural {
        Some(ng) => {
            ng.observe(&score);
            ng.solve(&actor.trace)
        }
        None => actor.trace.clone(),
    };
    if delta != T::zero() {
        actor.params.add_scaled(actor.alpha * delta, &direction);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_delta_keeps_params_but_accumulates_trace() {
        let mut actor = Actor::new(NetworkParams::<f64>::init(Architecture::PolicyCnn, 0), 0.1, 0.5, false);
        let before = actor.params.clone();
        actor_critic_step(&mut actor, &Board::new(), 4, 0.0, 1.0).unwrap();
        assert_eq!(actor.params, before);
        assert!(actor.trace.iter().any(|&e| e != 0.0));
    }

    #[test]
    fn illegal_action_is_a_usage_error() {
        let mut actor = Actor::new(NetworkParams::<f64>::init(Architecture::PolicyCnn, 0), 0.1, 0.5, false);
        let b = Board::new().play_index(4).unwrap();
        assert!(actor_critic_step(&mut actor, &b, 4, 1.0, 1.0).is_err());
    }

    #[test]
    fn identity_fisher_preserves_the_plain_direction() {
        let mut ng = NaturalGradientState::new(5, 0.0, 1e-3);
        let v = [1.0, -2.0, 0.5, 0.0, 3.0];
        ng.observe(&v);
        let x = ng.solve(&v);
        for (a, b) in x.iter().zip(&v) {
            assert!((a * (1.0 + 1e-3) - b).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugate_gradient_solves_a_rank_one_update() {
        let mut ng = NaturalGradientState::new(4, 0.5, 1e-3);
        let s = [1.0, 2.0, -1.0, 0.5];
        ng.observe(&s);
        let b = [0.3, -0.2, 0.1, 1.0];
        let x = ng.solve(&b);
        let mut ax = [0.0; 4];
        ng.apply(&x, &mut ax);
        for (a, b) in ax.iter().zip(&b) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
