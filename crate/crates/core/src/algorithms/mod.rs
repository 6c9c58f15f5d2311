//! Update rules and the value-function abstraction they operate on.
//!
//! Every rule consumes [`Transition`]s and a [`ValueFunction`], which maps a
//! state to one value per action (after-state values for Hex). The flat
//! parameter vector of the value function is the `θ` of the update formulas.
//!
//! Transitions carry a discount `γ`. Ordinary episodic tasks use `γ = 1`. In
//! mirrored self-play the next decision belongs to the opponent, whose
//! after-state values are the negation of ours in a zero-sum game; those
//! transitions use `γ = −1`, which turns every bootstrap into a negamax backup.

mod actor_critic;
mod approx;
mod log;
mod pbe;
mod td;

pub use actor_critic::{actor_critic_step, Actor, NaturalGradientState};
pub use approx::{LinearValues, NeuralValues, RnnValues, SeqState, TabularValues};
pub use log::{parse_transition_log, write_transition_log};
pub use pbe::{mse_batch_step, pbe_batch_step, regression_loss, DualNetState, PbeReport, PBE_BATCH};
pub use td::{
    gradient_td_update, greedy_gq_update, gtd2_update, q_learning_update, sarsa_update, tdc_update, CorrectionState,
    GtdKind, Trace, ValueRule,
};

use rand::Rng;

use crate::action::ActionMask;
use crate::error::{Error, Result};
use crate::neural::{RmsPropState, OUTPUTS};
use crate::scalar::Scalar;

/// One step of experience.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition<S, T> {
    pub s: S,
    pub a: usize,
    pub r: T,
    pub s_next: S,
    pub legal_next: ActionMask,
    /// Action actually chosen in `s_next`; absent on terminal transitions.
    pub a_next: Option<usize>,
    pub terminal: bool,
    pub discount: T,
}

/// Differentiable action-value approximator.
pub trait ValueFunction<T: Scalar>: Clone + Send + Sync {
    type State: Clone + Send + Sync;

    fn num_params(&self) -> usize;
    fn params(&self) -> &[T];
    /// `θ ← θ + s·d`, keeping any structural constraints (masked taps).
    fn add_scaled(&mut self, s: T, d: &[T]);
    /// One value per action index; only legal entries are meaningful.
    fn values(&self, s: &Self::State) -> [T; OUTPUTS];
    /// `∇θ v̂(s, a)`.
    fn grad(&self, s: &Self::State, a: usize) -> Vec<T>;
    /// `∇²θ v̂(s, a)·w`; zero for approximators linear in `θ`.
    fn hvp(&self, _s: &Self::State, _a: usize, _w: &[T]) -> Vec<T> {
        vec![T::zero(); self.num_params()]
    }
    /// Whether [`hvp`](Self::hvp) can be nonzero.
    fn has_curvature(&self) -> bool {
        false
    }
    /// One optimizer step against gradient `g`.
    fn rmsprop_step(&mut self, opt: &mut RmsPropState<T>, g: &[T]) -> Result<()>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Bootstrap from the action actually taken next.
    Sarsa,
    /// Bootstrap from the best legal next action.
    QMax,
}

/// Legal argmax, ties broken toward the lowest index.
pub fn greedy<T: Scalar>(values: &[T; OUTPUTS], legal: ActionMask) -> Result<usize> {
    let mut best: Option<usize> = None;
    for i in legal.iter() {
        if i >= OUTPUTS {
            return Err(Error::usage(format!("action {i} outside the value vector")));
        }
        if best.is_none_or(|b| values[i] > values[b]) {
            best = Some(i);
        }
    }
    best.ok_or_else(|| Error::usage("no legal action"))
}

/// ε-greedy selection: uniform over legal actions with probability `ε`, otherwise greedy.
pub fn epsilon_greedy<T: Scalar, R: Rng + ?Sized>(
    values: &[T; OUTPUTS],
    legal: ActionMask,
    epsilon: f64,
    rng: &mut R,
) -> Result<usize> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::usage(format!("epsilon {epsilon} outside [0, 1]")));
    }
    let g = greedy(values, legal)?;
    if rng.gen::<f64>() < epsilon {
        Ok(legal.nth(rng.gen_range(0..legal.len())).expect("nonempty mask"))
    } else {
        Ok(g)
    }
}

/// Bootstrap action and its value in `s_next`, or `None` on terminal transitions.
pub fn bootstrap<T: Scalar, V: ValueFunction<T>>(
    vf: &V,
    t: &Transition<V::State, T>,
    target: Target,
) -> Result<Option<(usize, T)>> {
    if t.terminal {
        return Ok(None);
    }
    let values = vf.values(&t.s_next);
    let b = match target {
        Target::Sarsa => t
            .a_next
            .ok_or_else(|| Error::usage("sarsa target needs the next action on a non-terminal transition"))?,
        Target::QMax => greedy(&values, t.legal_next)?,
    };
    if b >= OUTPUTS {
        return Err(Error::usage(format!("next action {b} out of range")));
    }
    Ok(Some((b, values[b])))
}

/// `δ = r + γ·bootstrap − v̂(s, a)`, the bootstrap being 0 on terminal transitions.
pub fn td_delta<T: Scalar, V: ValueFunction<T>>(vf: &V, t: &Transition<V::State, T>, target: Target) -> Result<T> {
    let boot = bootstrap(vf, t, target)?.map_or(T::zero(), |(_, v)| v);
    Ok(t.r + t.discount * boot - vf.values(&t.s)[t.a])
}
