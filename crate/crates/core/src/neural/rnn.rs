use crate::encoding::EncodedState;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::cnn::Trunk;
use super::{Architecture, NetworkParams, OUTPUTS};

/// Sequence length the recurrent network is unrolled over.
pub const RNN_DEPTH: usize = 10;

type Vec9<T> = [T; OUTPUTS];

fn matvec<T: Scalar>(m: &[T], x: &Vec9<T>) -> Vec9<T> {
    std::array::from_fn(|i| crate::scalar::dot(&m[i * OUTPUTS..(i + 1) * OUTPUTS], x))
}

/// `out += mᵀ·x`
fn matvec_t_acc<T: Scalar>(m: &[T], x: &Vec9<T>, out: &mut Vec9<T>) {
    for i in 0..OUTPUTS {
        if x[i] == T::zero() {
            continue;
        }
        for j in 0..OUTPUTS {
            out[j] += m[i * OUTPUTS + j] * x[i];
        }
    }
}

/// `g += x·yᵀ` on a 9×9 row-major block.
fn outer_acc<T: Scalar>(g: &mut [T], x: &Vec9<T>, y: &Vec9<T>) {
    for i in 0..OUTPUTS {
        for j in 0..OUTPUTS {
            g[i * OUTPUTS + j] += x[i] * y[j];
        }
    }
}

fn mats<T: Scalar>(p: &NetworkParams<T>) -> [&[T]; 3] {
    assert_eq!(p.arch(), Architecture::ValueRnn, "operation requires a value-rnn network");
    p.recurrent().expect("value-rnn has recurrent weights")
}

struct StepCache<T> {
    trunk: Trunk<T>,
    z: Vec9<T>,
    h: Vec9<T>,
    y: Vec9<T>,
}

fn step_cached<T: Scalar>(p: &NetworkParams<T>, x: &EncodedState, h_prev: &Vec9<T>) -> StepCache<T> {
    let [u, w, v] = mats(p);
    let trunk = Trunk::forward(p, x);
    let z = trunk.logits.map(Scalar::squash);
    let uz = matvec(u, &z);
    let wh = matvec(w, h_prev);
    let h = std::array::from_fn(|i| (uz[i] + wh[i]).sigmoid());
    let y = matvec(v, &h).map(Scalar::squash);
    StepCache { trunk, z, h, y }
}

/// One recurrent step: returns `(y_t, h_t)` given `h_{t−1}`.
pub fn rnn_step<T: Scalar>(p: &NetworkParams<T>, x: &EncodedState, h_prev: &Vec9<T>) -> (Vec9<T>, Vec9<T>) {
    let c = step_cached(p, x, h_prev);
    (c.y, c.h)
}

fn check_len(n: usize) -> Result<()> {
    if n != RNN_DEPTH {
        return Err(Error::usage(format!("recurrent network needs exactly {RNN_DEPTH} inputs, got {n}")));
    }
    Ok(())
}

/// Outputs at every step of a length-10 sequence, starting from `h_0 = 0`.
pub fn rnn_forward<T: Scalar>(p: &NetworkParams<T>, xs: &[EncodedState]) -> Result<Vec<Vec9<T>>> {
    check_len(xs.len())?;
    let mut h = [T::zero(); OUTPUTS];
    Ok(xs
        .iter()
        .map(|x| {
            let (y, next) = rnn_step(p, x, &h);
            h = next;
            y
        })
        .collect())
}

/// Parameter gradient of `Σ_t Σ_k cots[t][k]·y_t[k]` by backpropagation through time.
pub fn rnn_vjp<T: Scalar>(p: &NetworkParams<T>, xs: &[EncodedState], cots: &[Vec9<T>]) -> Result<Vec<T>> {
    check_len(xs.len())?;
    check_len(cots.len())?;
    let mut caches = Vec::with_capacity(RNN_DEPTH);
    let mut h = [T::zero(); OUTPUTS];
    for x in xs {
        let c = step_cached(p, x, &h);
        h = c.h;
        caches.push(c);
    }

    let [u, w, v] = mats(p);
    let rec = p.layout().recurrent.expect("value-rnn has recurrent weights");
    let mut grad = vec![T::zero(); p.len()];
    let half = T::lit(0.5);
    let zero = [T::zero(); OUTPUTS];
    let mut dh_next = zero;
    for t in (0..RNN_DEPTH).rev() {
        let c = &caches[t];
        let h_prev = if t == 0 { &zero } else { &caches[t - 1].h };
        let d_o: Vec9<T> = std::array::from_fn(|k| cots[t][k] * (T::one() - c.y[k] * c.y[k]) * half);
        outer_acc(&mut grad[rec[2]..rec[2] + 81], &d_o, &c.h);
        let mut dh = dh_next;
        matvec_t_acc(v, &d_o, &mut dh);
        let da: Vec9<T> = std::array::from_fn(|k| dh[k] * c.h[k] * (T::one() - c.h[k]));
        outer_acc(&mut grad[rec[0]..rec[0] + 81], &da, &c.z);
        outer_acc(&mut grad[rec[1]..rec[1] + 81], &da, h_prev);
        let mut dz = zero;
        matvec_t_acc(u, &da, &mut dz);
        dh_next = zero;
        matvec_t_acc(w, &da, &mut dh_next);
        let d_logits = std::array::from_fn(|k| dz[k] * (T::one() - c.z[k] * c.z[k]) * half);
        c.trunk.backward(p, &d_logits, &mut grad);
    }
    Ok(grad)
}
