//! Batch regression steps: plain mean-squared TD regression and the
//! dual-network projected-Bellman-error method.
//!
//! The dual method keeps a projection network `P` and a value network `V` of
//! the same architecture. On each batch the Q-learning targets `y` are frozen
//! from `V`, one RMSProp step fits `P` to `y`, and one RMSProp step then fits
//! `V` to the updated outputs of `P`.

use crate::error::{Error, Result};
use crate::neural::RmsPropState;
use crate::scalar::Scalar;

use super::{td_delta, Target, Transition, ValueFunction};

pub const PBE_BATCH: usize = 50;

/// Mean squared error over `(state, action)` samples and its gradient.
pub fn regression_loss<T: Scalar, V: ValueFunction<T>>(vf: &V, samples: &[(&V::State, usize)], targets: &[T]) -> (T, Vec<T>) {
    let n = T::from_usize(samples.len()).expect("batch size");
    let mut loss = T::zero();
    let mut grad = vec![T::zero(); vf.num_params()];
    for (&(s, a), &y) in samples.iter().zip(targets) {
        let err = y - vf.values(s)[a];
        loss += err * err;
        crate::scalar::axpy(-T::lit(2.0) * err / n, &vf.grad(s, a), &mut grad);
    }
    (loss / n, grad)
}

fn frozen_targets<T: Scalar, V: ValueFunction<T>>(vf: &V, batch: &[Transition<V::State, T>], target: Target) -> Result<Vec<T>> {
    batch
        .iter()
        .map(|t| Ok(td_delta(vf, t, target)? + vf.values(&t.s)[t.a]))
        .collect()
}

/// One RMSProp step on the mean squared TD error with targets frozen from `vf`.
/// Returns the batch loss before and after the step.
pub fn mse_batch_step<T: Scalar, V: ValueFunction<T>>(
    vf: &mut V,
    opt: &mut RmsPropState<T>,
    batch: &[Transition<V::State, T>],
    target: Target,
) -> Result<(T, T)> {
    if batch.is_empty() {
        return Err(Error::usage("empty batch"));
    }
    let y = frozen_targets(vf, batch, target)?;
    let samples: Vec<_> = batch.iter().map(|t| (&t.s, t.a)).collect();
    let (before, g) = regression_loss(vf, &samples, &y);
    vf.rmsprop_step(opt, &g)?;
    let (after, _) = regression_loss(vf, &samples, &y);
    Ok((before, after))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualNetState<V, T> {
    pub projection: V,
    pub value: V,
    pub opt_projection: RmsPropState<T>,
    pub opt_value: RmsPropState<T>,
}

impl<T: Scalar, V: ValueFunction<T>> DualNetState<V, T> {
    /// Both networks start as copies of `init` but own separate storage.
    pub fn new(init: V, lr_projection: T, lr_value: T) -> Self {
        let n = init.num_params();
        DualNetState {
            projection: init.clone(),
            value: init,
            opt_projection: RmsPropState::new(n, lr_projection),
            opt_value: RmsPropState::new(n, lr_value),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PbeReport<T> {
    /// Projection loss against the frozen targets before its step.
    pub projection_before: T,
    /// The same loss after the step (the projection-error metric).
    pub projection_after: T,
    /// Loss of the value network against the projection outputs, before its step.
    pub value_loss: T,
}

/// One dual-network step on exactly [`PBE_BATCH`] transitions.
pub fn pbe_batch_step<T: Scalar, V: ValueFunction<T>>(
    d: &mut DualNetState<V, T>,
    batch: &[Transition<V::State, T>],
) -> Result<PbeReport<T>> {
    if batch.len() != PBE_BATCH {
        return Err(Error::usage(format!("dual-network step needs {PBE_BATCH} transitions, got {}", batch.len())));
    }
    let y = frozen_targets(&d.value, batch, Target::QMax)?;
    let samples: Vec<_> = batch.iter().map(|t| (&t.s, t.a)).collect();

    let (projection_before, g) = regression_loss(&d.projection, &samples, &y);
    d.projection.rmsprop_step(&mut d.opt_projection, &g)?;
    let (projection_after, _) = regression_loss(&d.projection, &samples, &y);

    let py: Vec<T> = samples.iter().map(|&(s, a)| d.projection.values(s)[a]).collect();
    let (value_loss, g) = regression_loss(&d.value, &samples, &py);
    d.value.rmsprop_step(&mut d.opt_value, &g)?;
    Ok(PbeReport {
        projection_before,
        projection_after,
        value_loss,
    })
}
