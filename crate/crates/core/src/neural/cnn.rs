use crate::action::ActionMask;
use crate::encoding::{EncodedState, LEN, PLANE, WIDTH};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Architecture, Kernel, NetworkParams, CONV_LAYERS, DENSE_IN, HEX_TAPS, OUTPUTS};

/// Encoded board as network input (`1` for true, `0` for false).
pub fn encoded_input<T: Scalar>(x: &EncodedState) -> Vec<T> {
    x.as_slice().iter().map(|&b| if b { T::one() } else { T::zero() }).collect()
}

/// Activations of the shared convolutional trunk, kept for the backward pass.
pub struct Trunk<T> {
    input: Vec<T>,
    act: [Vec<T>; 3],
    /// Dense-layer pre-activations.
    pub logits: [T; OUTPUTS],
}

impl<T: Scalar> Trunk<T> {
    pub fn forward(p: &NetworkParams<T>, x: &EncodedState) -> Trunk<T> {
        let input = encoded_input(x);
        let mut act = [vec![T::zero(); DENSE_IN], vec![T::zero(); DENSE_IN], vec![T::zero(); DENSE_IN]];
        conv_forward(p, 0, &input, &mut act[0]);
        let (first, rest) = act.split_at_mut(1);
        conv_forward(p, 1, &first[0], &mut rest[0]);
        let (second, third) = rest.split_at_mut(1);
        conv_forward(p, 2, &second[0], &mut third[0]);

        let w = p.dense_weights();
        let b = p.dense_bias();
        let a3 = &act[2];
        let logits = std::array::from_fn(|k| {
            let row = &w[k * DENSE_IN..(k + 1) * DENSE_IN];
            b[k] + crate::scalar::dot(row, a3)
        });
        Trunk { input, act, logits }
    }

    /// Accumulates into `grad` the parameter gradient for cotangent `d_logits` on the dense outputs.
    pub fn backward(&self, p: &NetworkParams<T>, d_logits: &[T; OUTPUTS], grad: &mut [T]) {
        let layout = p.layout();
        let w = p.dense_weights();
        let mut d_a3 = vec![T::zero(); DENSE_IN];
        for (k, &dk) in d_logits.iter().enumerate() {
            if dk == T::zero() {
                continue;
            }
            grad[layout.dense_b + k] += dk;
            let gw = &mut grad[layout.dense_w + k * DENSE_IN..layout.dense_w + (k + 1) * DENSE_IN];
            let row = &w[k * DENSE_IN..(k + 1) * DENSE_IN];
            for j in 0..DENSE_IN {
                gw[j] += dk * self.act[2][j];
                d_a3[j] += dk * row[j];
            }
        }
        let mut d_a2 = vec![T::zero(); DENSE_IN];
        conv_backward(p, 2, &self.act[1], &self.act[2], &d_a3, grad, Some(&mut d_a2));
        let mut d_a1 = vec![T::zero(); DENSE_IN];
        conv_backward(p, 1, &self.act[0], &self.act[1], &d_a2, grad, Some(&mut d_a1));
        conv_backward(p, 0, &self.input, &self.act[0], &d_a1, grad, None);
    }
}

#[inline]
fn tap(r: usize, c: usize, i: usize, j: usize) -> Option<usize> {
    let rr = (r + i).checked_sub(1)?;
    let cc = (c + j).checked_sub(1)?;
    (rr < WIDTH && cc < WIDTH).then_some(rr * WIDTH + cc)
}

fn conv_forward<T: Scalar>(p: &NetworkParams<T>, l: usize, input: &[T], out: &mut [T]) {
    let spec = &CONV_LAYERS[l];
    let bias = p.conv_bias(l);
    for (f, kernel) in spec.kernels.iter().enumerate() {
        let w = p.conv_filter(l, f);
        for r in 0..WIDTH {
            for c in 0..WIDTH {
                let mut acc = bias[f];
                for ch in 0..spec.in_channels {
                    let plane = &input[ch * PLANE..(ch + 1) * PLANE];
                    match kernel {
                        Kernel::Point => acc += w[ch] * plane[r * WIDTH + c],
                        Kernel::Hex => {
                            for (i, j) in HEX_TAPS {
                                if let Some(k) = tap(r, c, i, j) {
                                    acc += w[ch * 9 + i * 3 + j] * plane[k];
                                }
                            }
                        }
                    }
                }
                out[f * PLANE + r * WIDTH + c] = acc.squash();
            }
        }
    }
}

fn conv_backward<T: Scalar>(
    p: &NetworkParams<T>,
    l: usize,
    input: &[T],
    output: &[T],
    d_out: &[T],
    grad: &mut [T],
    mut d_in: Option<&mut [T]>,
) {
    let spec = &CONV_LAYERS[l];
    let layout = p.layout();
    let half = T::lit(0.5);
    for (f, kernel) in spec.kernels.iter().enumerate() {
        let w = p.conv_filter(l, f);
        let w_off = layout.filters[l][f];
        for r in 0..WIDTH {
            for c in 0..WIDTH {
                let o = f * PLANE + r * WIDTH + c;
                let a = output[o];
                // d/dz (2σ(z) − 1) = (1 − a²)/2
                let dz = d_out[o] * (T::one() - a * a) * half;
                if dz == T::zero() {
                    continue;
                }
                grad[layout.conv_bias[l] + f] += dz;
                for ch in 0..spec.in_channels {
                    let base = ch * PLANE;
                    match kernel {
                        Kernel::Point => {
                            let k = base + r * WIDTH + c;
                            grad[w_off + ch] += dz * input[k];
                            if let Some(d) = d_in.as_deref_mut() {
                                d[k] += dz * w[ch];
                            }
                        }
                        Kernel::Hex => {
                            for (i, j) in HEX_TAPS {
                                if let Some(k) = tap(r, c, i, j) {
                                    let wi = ch * 9 + i * 3 + j;
                                    grad[w_off + wi] += dz * input[base + k];
                                    if let Some(d) = d_in.as_deref_mut() {
                                        d[base + k] += dz * w[wi];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

fn expect_arch<T: Scalar>(p: &NetworkParams<T>, arch: Architecture) {
    assert_eq!(p.arch(), arch, "operation requires a {} network", arch.name());
}

/// After-state values for all 9 cells, each in (−1, 1). Legality is not applied.
pub fn value_forward<T: Scalar>(p: &NetworkParams<T>, x: &EncodedState) -> [T; OUTPUTS] {
    expect_arch(p, Architecture::ValueCnn);
    Trunk::forward(p, x).logits.map(Scalar::squash)
}

/// Parameter gradient of `Σ_k cot[k]·value_k`.
pub fn value_vjp<T: Scalar>(p: &NetworkParams<T>, x: &EncodedState, cot: &[T; OUTPUTS]) -> Vec<T> {
    expect_arch(p, Architecture::ValueCnn);
    let trunk = Trunk::forward(p, x);
    let half = T::lit(0.5);
    let d_logits = std::array::from_fn(|k| {
        let y = trunk.logits[k].squash();
        cot[k] * (T::one() - y * y) * half
    });
    let mut grad = vec![T::zero(); p.len()];
    trunk.backward(p, &d_logits, &mut grad);
    grad
}

/// Gradient of output `i` with respect to the flat parameter vector.
pub fn grad_value<T: Scalar>(p: &NetworkParams<T>, x: &EncodedState, i: usize) -> Vec<T> {
    assert!(i < OUTPUTS, "action index {i} out of range");
    let mut cot = [T::zero(); OUTPUTS];
    cot[i] = T::one();
    value_vjp(p, x, &cot)
}

fn masked_softmax<T: Scalar>(logits: &[T; OUTPUTS], legal: ActionMask) -> Result<[T; OUTPUTS]> {
    if legal.is_empty() || legal.iter().any(|i| i >= OUTPUTS) {
        return Err(Error::usage("policy needs at least one legal action among the 9 cells"));
    }
    let max = legal.iter().map(|i| logits[i]).fold(logits[legal.nth(0).unwrap()], Scalar::max_of);
    let mut probs = [T::zero(); OUTPUTS];
    let mut total = T::zero();
    for i in legal.iter() {
        probs[i] = (logits[i] - max).exp();
        total += probs[i];
    }
    for i in legal.iter() {
        probs[i] /= total;
    }
    Ok(probs)
}

/// Action probabilities; illegal cells get exactly 0.
pub fn policy_forward<T: Scalar>(p: &NetworkParams<T>, x: &EncodedState, legal: ActionMask) -> Result<[T; OUTPUTS]> {
    expect_arch(p, Architecture::PolicyCnn);
    masked_softmax(&Trunk::forward(p, x).logits, legal)
}

/// Parameter gradient of `Σ_k cot[k]·logit_k`.
pub fn policy_vjp<T: Scalar>(p: &NetworkParams<T>, x: &EncodedState, cot: &[T; OUTPUTS]) -> Vec<T> {
    expect_arch(p, Architecture::PolicyCnn);
    let trunk = Trunk::forward(p, x);
    let mut grad = vec![T::zero(); p.len()];
    trunk.backward(p, cot, &mut grad);
    grad
}

/// Score function `∇ log π(a | x)` together with the action probabilities.
pub fn policy_score<T: Scalar>(
    p: &NetworkParams<T>,
    x: &EncodedState,
    legal: ActionMask,
    a: usize,
) -> Result<(Vec<T>, [T; OUTPUTS])> {
    expect_arch(p, Architecture::PolicyCnn);
    if !legal.contains(a) {
        return Err(Error::usage(format!("action {a} is not legal")));
    }
    let trunk = Trunk::forward(p, x);
    let probs = masked_softmax(&trunk.logits, legal)?;
    let d_logits = std::array::from_fn(|k| if k == a { T::one() - probs[k] } else { -probs[k] });
    let mut grad = vec![T::zero(); p.len()];
    trunk.backward(p, &d_logits, &mut grad);
    Ok((grad, probs))
}

const _: () = assert!(LEN == 6 * PLANE);
