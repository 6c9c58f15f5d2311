//! Semi-gradient and gradient-TD rules.
//!
//! The gradient-TD family keeps secondary weights `w`. With `g = ∇v̂(s,a)`,
//! `g' = ∇v̂(s',b)`, trace `e ← γλe + g` and `h = (δ − gᵀw)·∇²v̂(s,a)·w`:
//!
//! ```text
//! w    ← w + β(δ·e − (gᵀw)·g)
//! GTD2:  θ ← θ + α[(g − γg')(eᵀw) − h]
//! TDC:   θ ← θ + α[δ·e − γ(1−λ)(eᵀw)·g' − h]
//! ```
//!
//! At `λ = 0` the trace equals `g` and both reduce to the one-step rules.
//! Greedy GQ is TDC with the greedy (max) bootstrap. Everything on the right
//! of an arrow is evaluated with the pre-update `θ` and `w`.

use crate::error::Result;
use crate::scalar::{axpy, dot, Scalar};

use super::{bootstrap, Target, Transition, ValueFunction};

/// Accumulating eligibility trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace<T> {
    pub e: Vec<T>,
    pub lambda: T,
}

impl<T: Scalar> Trace<T> {
    pub fn new(len: usize, lambda: T) -> Self {
        Trace {
            e: vec![T::zero(); len],
            lambda,
        }
    }

    pub fn reset(&mut self) {
        self.e.fill(T::zero());
    }

    /// `e ← γλ·e + g`.
    pub fn accumulate(&mut self, discount: T, g: &[T]) {
        let decay = discount * self.lambda;
        for (e, &gi) in self.e.iter_mut().zip(g) {
            *e = decay * *e + gi;
        }
    }
}

/// Secondary weights and step sizes of the two-timescale rules.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionState<T> {
    pub w: Vec<T>,
    pub alpha: T,
    pub beta: T,
}

impl<T: Scalar> CorrectionState<T> {
    pub fn new(len: usize, alpha: T, beta: T) -> Self {
        CorrectionState {
            w: vec![T::zero(); len],
            alpha,
            beta,
        }
    }
}

/// SARSA(λ): `e ← γλe + g`, `θ ← θ + αδe`. Returns `δ`.
pub fn sarsa_update<T: Scalar, V: ValueFunction<T>>(
    vf: &mut V,
    t: &Transition<V::State, T>,
    trace: &mut Trace<T>,
    alpha: T,
) -> Result<T> {
    let delta = super::td_delta(vf, t, Target::Sarsa)?;
    trace.accumulate(t.discount, &vf.grad(&t.s, t.a));
    if delta != T::zero() {
        vf.add_scaled(alpha * delta, &trace.e);
    }
    Ok(delta)
}

/// One-step Q-learning: `θ ← θ + αδ_max·g`. Returns `δ`.
pub fn q_learning_update<T: Scalar, V: ValueFunction<T>>(vf: &mut V, t: &Transition<V::State, T>, alpha: T) -> Result<T> {
    let delta = super::td_delta(vf, t, Target::QMax)?;
    if delta != T::zero() {
        let g = vf.grad(&t.s, t.a);
        vf.add_scaled(alpha * delta, &g);
    }
    Ok(delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GtdKind {
    Gtd2,
    Tdc,
    GreedyGq,
}

/// Shared implementation of the gradient-TD family. Returns `δ`.
pub fn gradient_td_update<T: Scalar, V: ValueFunction<T>>(
    kind: GtdKind,
    vf: &mut V,
    t: &Transition<V::State, T>,
    c: &mut CorrectionState<T>,
    trace: &mut Trace<T>,
) -> Result<T> {
    let target = match kind {
        GtdKind::GreedyGq => Target::QMax,
        GtdKind::Gtd2 | GtdKind::Tdc => Target::Sarsa,
    };
    let n = vf.num_params();
    let g = vf.grad(&t.s, t.a);
    let boot = bootstrap(vf, t, target)?;
    let v_sa = vf.values(&t.s)[t.a];
    let (g_next, v_next) = match boot {
        Some((b, v)) => (vf.grad(&t.s_next, b), v),
        None => (vec![T::zero(); n], T::zero()),
    };
    let gamma = t.discount;
    let delta = t.r + gamma * v_next - v_sa;
    trace.accumulate(gamma, &g);

    let gw = dot(&g, &c.w);
    let ew = dot(&trace.e, &c.w);
    let mut step = vec![T::zero(); n];
    match kind {
        GtdKind::Gtd2 => {
            for k in 0..n {
                step[k] = (g[k] - gamma * g_next[k]) * ew;
            }
        }
        GtdKind::Tdc | GtdKind::GreedyGq => {
            let coef = gamma * (T::one() - trace.lambda) * ew;
            for k in 0..n {
                step[k] = delta * trace.e[k] - coef * g_next[k];
            }
        }
    }
    if vf.has_curvature() {
        let h = vf.hvp(&t.s, t.a, &c.w);
        axpy(-(delta - gw), &h, &mut step);
    }

    // w ← w + β(δe − (gᵀw)g)
    axpy(c.beta * delta, &trace.e, &mut c.w);
    axpy(-(c.beta * gw), &g, &mut c.w);

    vf.add_scaled(c.alpha, &step);
    Ok(delta)
}

pub fn gtd2_update<T: Scalar, V: ValueFunction<T>>(
    vf: &mut V,
    t: &Transition<V::State, T>,
    c: &mut CorrectionState<T>,
    trace: &mut Trace<T>,
) -> Result<T> {
    gradient_td_update(GtdKind::Gtd2, vf, t, c, trace)
}

pub fn tdc_update<T: Scalar, V: ValueFunction<T>>(
    vf: &mut V,
    t: &Transition<V::State, T>,
    c: &mut CorrectionState<T>,
    trace: &mut Trace<T>,
) -> Result<T> {
    gradient_td_update(GtdKind::Tdc, vf, t, c, trace)
}

pub fn greedy_gq_update<T: Scalar, V: ValueFunction<T>>(
    vf: &mut V,
    t: &Transition<V::State, T>,
    c: &mut CorrectionState<T>,
    trace: &mut Trace<T>,
) -> Result<T> {
    gradient_td_update(GtdKind::GreedyGq, vf, t, c, trace)
}

/// An online value-learning rule with its auxiliary state.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueRule<T> {
    Sarsa { alpha: T, trace: Trace<T> },
    QLearning { alpha: T },
    GradientTd { kind: GtdKind, correction: CorrectionState<T>, trace: Trace<T> },
}

impl<T: Scalar> ValueRule<T> {
    /// Applies the rule to one transition and returns its `δ`.
    pub fn update<V: ValueFunction<T>>(&mut self, vf: &mut V, t: &Transition<V::State, T>) -> Result<T> {
        match self {
            ValueRule::Sarsa { alpha, trace } => sarsa_update(vf, t, trace, *alpha),
            ValueRule::QLearning { alpha } => q_learning_update(vf, t, *alpha),
            ValueRule::GradientTd { kind, correction, trace } => gradient_td_update(*kind, vf, t, correction, trace),
        }
    }

    /// Clears traces at an episode boundary; secondary weights persist.
    pub fn reset_episode(&mut self) {
        match self {
            ValueRule::Sarsa { trace, .. } | ValueRule::GradientTd { trace, .. } => trace.reset(),
            ValueRule::QLearning { .. } => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionMask;
    use crate::algorithms::{LinearValues, NeuralValues};
    use crate::hex::Board;
    use crate::neural::{Architecture, NetworkParams};

    fn chain() -> (LinearValues<f64>, Transition<usize, f64>) {
        let mut vf = LinearValues::one_hot(3);
        vf.params_mut().copy_from_slice(&[0.0, 0.5, 0.0]);
        let t = Transition {
            s: 0,
            a: 0,
            r: 0.0,
            s_next: 1,
            legal_next: ActionMask::all(1),
            a_next: Some(0),
            terminal: false,
            discount: 1.0,
        };
        (vf, t)
    }

    #[test]
    fn sarsa_on_a_two_state_chain_matches_hand_calculation() {
        // Table (0, 0.5, 0), α = 0.5, λ = 0.5.
        // Step 1: s0→s1, δ = 0.5, e = (1,0,0), θ0 = 0.25.
        // Step 2: s1→terminal with r = 1, δ = 0.5, e = (0.5,1,0), θ = (0.375, 0.75, 0).
        let (mut vf, t) = chain();
        let mut trace = Trace::new(3, 0.5);
        assert_eq!(sarsa_update(&mut vf, &t, &mut trace, 0.5).unwrap(), 0.5);
        assert_eq!(vf.params(), &[0.25, 0.5, 0.0]);
        let end = Transition {
            s: 1,
            r: 1.0,
            s_next: 1,
            a_next: None,
            terminal: true,
            ..t
        };
        assert_eq!(sarsa_update(&mut vf, &end, &mut trace, 0.5).unwrap(), 0.5);
        assert_eq!(vf.params(), &[0.375, 0.75, 0.0]);
    }

    #[test]
    fn zero_delta_leaves_sarsa_params_unchanged() {
        let (mut vf, t) = chain();
        vf.params_mut()[0] = 0.5;
        let before = vf.clone();
        sarsa_update(&mut vf, &t, &mut Trace::new(3, 0.9), 0.3).unwrap();
        assert_eq!(vf, before);
    }

    #[test]
    fn tdc_on_a_three_state_chain_matches_hand_calculation() {
        // θ = (0, 0.5, 0), w = (0.1, 0.2, 0), α = 0.1, β = 0.5, γ = 1.
        // δ = 0.5, gᵀw = 0.1, g' = e1:
        //   θ ← θ + α(δ·e0 − 0.1·e1) = (0.05, 0.49, 0)
        //   w ← w + β(δ − 0.1)·e0     = (0.3, 0.2, 0)
        let (mut vf, t) = chain();
        let mut c = CorrectionState::new(3, 0.1, 0.5);
        c.w.copy_from_slice(&[0.1, 0.2, 0.0]);
        tdc_update(&mut vf, &t, &mut c, &mut Trace::new(3, 0.0)).unwrap();
        let p = vf.params();
        assert!((p[0] - 0.05).abs() < 1e-15 && (p[1] - 0.49).abs() < 1e-15 && p[2] == 0.0);
        assert!((c.w[0] - 0.3).abs() < 1e-15 && (c.w[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn tdc_with_zero_w_is_semi_gradient_td() {
        let vf0 = NeuralValues::new(NetworkParams::<f64>::init(Architecture::ValueCnn, 5));
        let s = Board::new();
        let s_next = s.play_index(4).unwrap().play_index(0).unwrap();
        let t = Transition {
            s,
            a: 4,
            r: 0.0,
            s_next,
            legal_next: s_next.legal_mask(),
            a_next: Some(8),
            terminal: false,
            discount: 1.0,
        };
        let mut vf = vf0.clone();
        let mut c = CorrectionState::new(vf.num_params(), 0.01, 0.1);
        let delta = tdc_update(&mut vf, &t, &mut c, &mut Trace::new(vf0.num_params(), 0.0)).unwrap();
        let mut expect = vf0.clone();
        expect.add_scaled(0.01 * delta, &vf0.grad(&s, 4));
        for (a, b) in vf.params().iter().zip(expect.params()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn gtd2_with_zero_w_and_delta_does_nothing() {
        let (mut vf, t) = chain();
        vf.params_mut()[0] = 0.5;
        let before = vf.clone();
        let mut c = CorrectionState::new(3, 0.1, 0.1);
        gtd2_update(&mut vf, &t, &mut c, &mut Trace::new(3, 0.5)).unwrap();
        assert_eq!(vf, before);
        assert!(c.w.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn greedy_gq_with_zero_w_is_q_learning() {
        let vf0 = NeuralValues::new(NetworkParams::<f64>::init(Architecture::ValueCnn, 6));
        let s = Board::new().play_index(0).unwrap().play_index(8).unwrap();
        let s_next = s.play_index(4).unwrap().play_index(2).unwrap();
        let t = Transition {
            s,
            a: 4,
            r: 0.0,
            s_next,
            legal_next: s_next.legal_mask(),
            a_next: Some(1),
            terminal: false,
            discount: -1.0,
        };
        let mut gq = vf0.clone();
        let mut c = CorrectionState::new(gq.num_params(), 0.05, 0.1);
        let mut tr = Trace::new(gq.num_params(), 0.0);
        greedy_gq_update(&mut gq, &t, &mut c, &mut tr).unwrap();
        let mut q = vf0.clone();
        q_learning_update(&mut q, &t, 0.05).unwrap();
        for (a, b) in gq.params().iter().zip(q.params()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
