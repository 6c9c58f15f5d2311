use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::NetworkParams;

/// RMSProp optimizer state for one parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RmsPropState<T> {
    acc: Vec<T>,
    pub lr: T,
    pub decay: T,
    pub damping: T,
}

impl<T: Scalar> RmsPropState<T> {
    pub const DEFAULT_DECAY: f64 = 0.9;
    pub const DEFAULT_DAMPING: f64 = 1e-6;

    pub fn new(len: usize, lr: T) -> Self {
        Self::with(len, lr, T::lit(Self::DEFAULT_DECAY), T::lit(Self::DEFAULT_DAMPING))
    }

    pub fn with(len: usize, lr: T, decay: T, damping: T) -> Self {
        RmsPropState {
            acc: vec![T::zero(); len],
            lr,
            decay,
            damping,
        }
    }

    pub fn accumulator(&self) -> &[T] {
        &self.acc
    }

    /// Updates `x` in place by one step against gradient `g` (descent).
    pub fn step_flat(&mut self, x: &mut [T], g: &[T]) -> Result<()> {
        if x.len() != self.acc.len() || g.len() != self.acc.len() {
            return Err(Error::usage(format!(
                "rmsprop state has {} entries, params {}, gradient {}",
                self.acc.len(),
                x.len(),
                g.len()
            )));
        }
        let keep = T::one() - self.decay;
        for ((a, xi), &gi) in self.acc.iter_mut().zip(x.iter_mut()).zip(g) {
            *a = self.decay * *a + keep * gi * gi;
            *xi -= self.lr * gi / (*a + self.damping).sqrt();
        }
        Ok(())
    }

    /// One step on a network; masked taps stay at zero.
    pub fn step(&mut self, p: &mut NetworkParams<T>, g: &[T]) -> Result<()> {
        self.step_flat(p.flat_mut(), g)?;
        p.apply_mask();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_only_decays_the_accumulator() {
        let mut s = RmsPropState::new(2, 0.1);
        let mut x = [1.0, -2.0];
        s.step_flat(&mut x, &[1.0, 2.0]).unwrap();
        let acc = s.accumulator().to_vec();
        let before = x;
        s.step_flat(&mut x, &[0.0, 0.0]).unwrap();
        assert_eq!(x, before);
        for (a, b) in s.accumulator().iter().zip(&acc) {
            assert!((a - 0.9 * b).abs() < 1e-15);
        }
    }

    #[test]
    fn quadratic_descends_monotonically() {
        // At the default damping of 1e-6 the iterate overshoots around step 43
        // once |x| is comparable to the step size; a larger damping keeps the
        // late steps proportional to the gradient.
        let mut s = RmsPropState::with(1, 0.1, 0.9, 1e-2);
        let mut x = [1.0f64];
        for _ in 0..50 {
            let prev = x[0].abs();
            let g = [2.0 * x[0]];
            s.step_flat(&mut x, &g).unwrap();
            assert!(x[0].abs() < prev);
        }
    }

    #[test]
    fn steady_state_steps_are_scale_invariant() {
        let mut s = RmsPropState::new(2, 0.01);
        let mut x = [0.0f64, 0.0];
        for _ in 0..500 {
            s.step_flat(&mut x, &[0.3, 3.0]).unwrap();
        }
        let before = x;
        s.step_flat(&mut x, &[0.3, 3.0]).unwrap();
        let d0 = before[0] - x[0];
        let d1 = before[1] - x[1];
        assert!((d0 - d1).abs() < 1e-4 * d1.abs());
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let mut s = RmsPropState::new(3, 0.1);
        assert!(s.step_flat(&mut [0.0; 3], &[0.0; 2]).is_err());
    }
}
