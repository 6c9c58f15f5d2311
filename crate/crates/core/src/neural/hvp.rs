use crate::encoding::EncodedState;
use crate::scalar::{Dual, Scalar};

use super::cnn::grad_value;
use super::NetworkParams;

/// Hessian-vector product `H·w` of any scalar objective whose gradient is `grad`.
///
/// `grad` is evaluated once on dual-number parameters `θ + ε·w`; the tangent
/// part of the resulting gradient is the directional derivative of the
/// gradient, i.e. `H·w`.
pub fn hvp<T: Scalar>(
    p: &NetworkParams<T>,
    w: &[T],
    grad: impl FnOnce(&NetworkParams<Dual<T>>) -> Vec<Dual<T>>,
) -> Vec<T> {
    assert_eq!(w.len(), p.len(), "direction must match the parameter count");
    let mut dual = p.map(Dual::constant);
    for (d, &wi) in dual.flat_mut().iter_mut().zip(w) {
        d.du = wi;
    }
    let mut out: Vec<T> = grad(&dual).into_iter().map(|d| d.du).collect();
    p.mask_gradient(&mut out);
    out
}

/// `∇²v̂_i(x)·w` for a value CNN.
pub fn hvp_value<T: Scalar>(p: &NetworkParams<T>, x: &EncodedState, i: usize, w: &[T]) -> Vec<T> {
    hvp(p, w, |q| grad_value(q, x, i))
}
