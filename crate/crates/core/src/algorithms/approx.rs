use std::sync::Arc;

use crate::encoding::{encode, EncodedState};
use crate::error::Result;
use crate::hex::{Board, Cell, Player, CELLS};
use crate::neural::{self, Architecture, NetworkParams, RmsPropState, OUTPUTS, RNN_DEPTH};
use crate::scalar::Scalar;

use super::ValueFunction;

/// Value CNN over after-states; states are boards seen by the side to move.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuralValues<T> {
    pub params: NetworkParams<T>,
}

impl<T: Scalar> NeuralValues<T> {
    pub fn new(params: NetworkParams<T>) -> Self {
        assert_eq!(params.arch(), Architecture::ValueCnn, "neural values need a value CNN");
        NeuralValues { params }
    }
}

impl<T: Scalar> ValueFunction<T> for NeuralValues<T> {
    type State = Board;

    fn num_params(&self) -> usize {
        self.params.len()
    }

    fn params(&self) -> &[T] {
        self.params.flat()
    }

    fn add_scaled(&mut self, s: T, d: &[T]) {
        self.params.add_scaled(s, d);
    }

    fn values(&self, s: &Board) -> [T; OUTPUTS] {
        neural::value_forward(&self.params, &encode(s))
    }

    fn grad(&self, s: &Board, a: usize) -> Vec<T> {
        neural::grad_value(&self.params, &encode(s), a)
    }

    fn hvp(&self, s: &Board, a: usize, w: &[T]) -> Vec<T> {
        neural::hvp_value(&self.params, &encode(s), a, w)
    }

    fn has_curvature(&self) -> bool {
        true
    }

    fn rmsprop_step(&mut self, opt: &mut RmsPropState<T>, g: &[T]) -> Result<()> {
        opt.step(&mut self.params, g)
    }
}

/// Position `t` inside a padded sequence of [`RNN_DEPTH`] encoded boards.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqState {
    pub seq: Arc<Vec<EncodedState>>,
    pub t: usize,
}

impl SeqState {
    /// Encodes `boards` and pads by repeating the last one. The sequence must
    /// hold between 1 and [`RNN_DEPTH`] boards.
    pub fn padded(boards: &[Board]) -> Result<Arc<Vec<EncodedState>>> {
        if boards.is_empty() || boards.len() > RNN_DEPTH {
            return Err(crate::error::Error::usage(format!(
                "sequence of {} boards does not fit depth {RNN_DEPTH}",
                boards.len()
            )));
        }
        let mut seq: Vec<EncodedState> = boards.iter().map(encode).collect();
        let last = seq[seq.len() - 1];
        seq.resize(RNN_DEPTH, last);
        Ok(Arc::new(seq))
    }
}

/// Value RNN; the value at step `t` depends on the sequence prefix up to `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct RnnValues<T> {
    pub params: NetworkParams<T>,
}

impl<T: Scalar> RnnValues<T> {
    pub fn new(params: NetworkParams<T>) -> Self {
        assert_eq!(params.arch(), Architecture::ValueRnn, "rnn values need a value RNN");
        RnnValues { params }
    }
}

impl<T: Scalar> ValueFunction<T> for RnnValues<T> {
    type State = SeqState;

    fn num_params(&self) -> usize {
        self.params.len()
    }

    fn params(&self) -> &[T] {
        self.params.flat()
    }

    fn add_scaled(&mut self, s: T, d: &[T]) {
        self.params.add_scaled(s, d);
    }

    fn values(&self, s: &SeqState) -> [T; OUTPUTS] {
        neural::rnn_forward(&self.params, &s.seq).expect("padded sequence")[s.t]
    }

    fn grad(&self, s: &SeqState, a: usize) -> Vec<T> {
        let mut cots = vec![[T::zero(); OUTPUTS]; RNN_DEPTH];
        cots[s.t][a] = T::one();
        neural::rnn_vjp(&self.params, &s.seq, &cots).expect("padded sequence")
    }

    fn rmsprop_step(&mut self, opt: &mut RmsPropState<T>, g: &[T]) -> Result<()> {
        opt.step(&mut self.params, g)
    }
}

const KEYS: usize = 19_683;

/// One parameter per after-state stone placement.
///
/// The extra last slot absorbs queries for occupied cells so that every
/// action index has a (never trained) value.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularValues<T> {
    theta: Vec<T>,
}

impl<T: Scalar> Default for TabularValues<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> TabularValues<T> {
    pub const DUMMY: usize = KEYS;

    pub fn new() -> Self {
        TabularValues {
            theta: vec![T::zero(); KEYS + 1],
        }
    }

    pub fn from_flat(theta: Vec<T>) -> Option<Self> {
        (theta.len() == KEYS + 1).then_some(TabularValues { theta })
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.theta
    }

    /// Parameter index of the after-state reached by playing cell `a` in `s`.
    pub fn index(s: &Board, a: usize) -> usize {
        if a >= CELLS {
            return Self::DUMMY;
        }
        let cell = Cell::from_index(a);
        if s.get(cell).is_some() {
            return Self::DUMMY;
        }
        let digit = match s.to_move() {
            Player::Red => 1,
            Player::Blue => 2,
        };
        s.grid_key() + digit * 3usize.pow(a as u32)
    }
}

impl<T: Scalar> ValueFunction<T> for TabularValues<T> {
    type State = Board;

    fn num_params(&self) -> usize {
        self.theta.len()
    }

    fn params(&self) -> &[T] {
        &self.theta
    }

    fn add_scaled(&mut self, s: T, d: &[T]) {
        crate::scalar::axpy(s, d, &mut self.theta);
    }

    fn values(&self, s: &Board) -> [T; OUTPUTS] {
        std::array::from_fn(|a| self.theta[Self::index(s, a)])
    }

    fn grad(&self, s: &Board, a: usize) -> Vec<T> {
        let mut g = vec![T::zero(); self.theta.len()];
        g[Self::index(s, a)] = T::one();
        g
    }

    fn rmsprop_step(&mut self, opt: &mut RmsPropState<T>, g: &[T]) -> Result<()> {
        opt.step_flat(&mut self.theta, g)
    }
}

/// Linear values `θᵀφ(s, a)` over an explicit feature table.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearValues<T> {
    /// `features[state][action]`.
    features: Vec<Vec<Vec<T>>>,
    theta: Vec<T>,
}

impl<T: Scalar> LinearValues<T> {
    pub fn new(features: Vec<Vec<Vec<T>>>, theta: Vec<T>) -> Self {
        assert!(features.iter().flatten().all(|phi| phi.len() == theta.len()), "feature width must match θ");
        assert!(features.iter().all(|acts| !acts.is_empty() && acts.len() <= OUTPUTS));
        LinearValues { features, theta }
    }

    /// `n` states with a single action each and indicator features.
    pub fn one_hot(n: usize) -> Self {
        let features = (0..n)
            .map(|s| vec![(0..n).map(|j| if j == s { T::one() } else { T::zero() }).collect()])
            .collect();
        LinearValues::new(features, vec![T::zero(); n])
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.theta
    }

    pub fn features(&self, s: usize, a: usize) -> &[T] {
        &self.features[s][a]
    }

    pub fn num_states(&self) -> usize {
        self.features.len()
    }
}

impl<T: Scalar> ValueFunction<T> for LinearValues<T> {
    type State = usize;

    fn num_params(&self) -> usize {
        self.theta.len()
    }

    fn params(&self) -> &[T] {
        &self.theta
    }

    fn add_scaled(&mut self, s: T, d: &[T]) {
        crate::scalar::axpy(s, d, &mut self.theta);
    }

    fn values(&self, s: &usize) -> [T; OUTPUTS] {
        let acts = &self.features[*s];
        std::array::from_fn(|a| acts.get(a).map_or(T::zero(), |phi| crate::scalar::dot(phi, &self.theta)))
    }

    fn grad(&self, s: &usize, a: usize) -> Vec<T> {
        self.features[*s][a].clone()
    }

    fn rmsprop_step(&mut self, opt: &mut RmsPropState<T>, g: &[T]) -> Result<()> {
        opt.step_flat(&mut self.theta, g)
    }
}
