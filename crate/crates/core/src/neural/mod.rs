//! Minimal neural stack for the three fixed architectures.
//!
//! All three share a trunk of three "same"-padded convolutions over the
//! 6×7×7 encoding followed by a 245→9 dense layer:
//!
//! | layer | input | filters                              |
//! |-------|-------|--------------------------------------|
//! | conv1 | 6     | 2 × 1×1, 3 × hex-masked 3×3          |
//! | conv2 | 5     | 3 × 1×1, 2 × hex-masked 3×3          |
//! | conv3 | 5     | 5 × 1×1                              |
//! | dense | 245   | 9 outputs + bias                     |
//!
//! Convolutions and the value head squash with `2·sigmoid − 1`. The policy
//! head applies a masked softmax to the dense logits, and the recurrent
//! network feeds the squashed dense outputs through an Elman layer
//! `h_t = σ(U z_t + W h_{t−1})`, `y_t = 2σ(V h_t) − 1`.
//!
//! A hex filter keeps the 7 taps covering a cell and its six neighbors; the
//! top-left and bottom-right taps are frozen at zero forever.

mod checkpoint;
mod cnn;
mod hvp;
mod rmsprop;
mod rnn;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CheckpointKind};
pub use cnn::{
    encoded_input, grad_value, policy_forward, policy_score, policy_vjp, value_forward, value_vjp, Trunk,
};
pub use hvp::{hvp, hvp_value};
pub use rmsprop::RmsPropState;
pub use rnn::{rnn_forward, rnn_step, rnn_vjp, RNN_DEPTH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::{CHANNELS, PLANE};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Number of after-state outputs (one per cell).
pub const OUTPUTS: usize = 9;
/// Width of the dense layer's input: 5 channels × 7 × 7.
pub const DENSE_IN: usize = 5 * PLANE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Architecture {
    ValueCnn,
    PolicyCnn,
    ValueRnn,
}

impl Architecture {
    pub fn name(self) -> &'static str {
        match self {
            Architecture::ValueCnn => "value-cnn",
            Architecture::PolicyCnn => "policy-cnn",
            Architecture::ValueRnn => "value-rnn",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// 1×1 filter: one tap per input channel.
    Point,
    /// 3×3 filter with the two off-hex corners masked; stored as 9 taps per input channel.
    Hex,
}

impl Kernel {
    pub fn stored_taps(self) -> usize {
        match self {
            Kernel::Point => 1,
            Kernel::Hex => 9,
        }
    }

    pub fn active_taps(self) -> usize {
        match self {
            Kernel::Point => 1,
            Kernel::Hex => 7,
        }
    }
}

/// Tap offsets `(di, dj)` of a hex filter, in the 3×3 storage grid.
pub const HEX_TAPS: [(usize, usize); 7] = [(0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1)];
/// Storage positions frozen at zero in every hex filter.
pub const HEX_MASKED: [(usize, usize); 2] = [(0, 0), (2, 2)];

pub struct ConvSpec {
    pub in_channels: usize,
    pub kernels: [Kernel; 5],
}

pub const CONV_LAYERS: [ConvSpec; 3] = [
    ConvSpec {
        in_channels: CHANNELS,
        kernels: [Kernel::Point, Kernel::Point, Kernel::Hex, Kernel::Hex, Kernel::Hex],
    },
    ConvSpec {
        in_channels: 5,
        kernels: [Kernel::Point, Kernel::Point, Kernel::Point, Kernel::Hex, Kernel::Hex],
    },
    ConvSpec {
        in_channels: 5,
        kernels: [Kernel::Point; 5],
    },
];

/// Offsets of every parameter block in the flat vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    /// `[layer][filter]` start of the filter's weights.
    pub filters: [[usize; 5]; 3],
    /// `[layer]` start of the 5 biases.
    pub conv_bias: [usize; 3],
    /// 9 rows × 245, row-major.
    pub dense_w: usize,
    pub dense_b: usize,
    /// Recurrent matrices `(U, W, V)`, each 9×9 row-major.
    pub recurrent: Option<[usize; 3]>,
    pub len: usize,
}

impl Layout {
    pub fn new(arch: Architecture) -> Layout {
        let mut at = 0;
        let mut filters = [[0; 5]; 3];
        let mut conv_bias = [0; 3];
        for (l, spec) in CONV_LAYERS.iter().enumerate() {
            for (f, k) in spec.kernels.iter().enumerate() {
                filters[l][f] = at;
                at += spec.in_channels * k.stored_taps();
            }
            conv_bias[l] = at;
            at += 5;
        }
        let dense_w = at;
        at += OUTPUTS * DENSE_IN;
        let dense_b = at;
        at += OUTPUTS;
        let recurrent = (arch == Architecture::ValueRnn).then(|| {
            let r = [at, at + 81, at + 162];
            at += 243;
            r
        });
        Layout {
            filters,
            conv_bias,
            dense_w,
            dense_b,
            recurrent,
            len: at,
        }
    }

    /// Calls `f` with every flat position that is frozen at zero.
    pub fn for_each_frozen(&self, mut f: impl FnMut(usize)) {
        for (l, spec) in CONV_LAYERS.iter().enumerate() {
            for (fi, k) in spec.kernels.iter().enumerate() {
                if *k == Kernel::Hex {
                    for ch in 0..spec.in_channels {
                        for (i, j) in HEX_MASKED {
                            f(self.filters[l][fi] + ch * 9 + i * 3 + j);
                        }
                    }
                }
            }
        }
    }

    /// `true` at flat positions that are frozen at zero.
    pub fn frozen(&self) -> Vec<bool> {
        let mut frozen = vec![false; self.len];
        self.for_each_frozen(|i| frozen[i] = true);
        frozen
    }
}

/// All weights of one network, stored as a single flat vector.
///
/// Structured accessors return slices into the same storage, so the flat and
/// structured views always agree.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams<T> {
    arch: Architecture,
    layout: Layout,
    data: Vec<T>,
}

impl<T: Scalar> NetworkParams<T> {
    pub fn zeros(arch: Architecture) -> Self {
        let layout = Layout::new(arch);
        NetworkParams {
            arch,
            layout,
            data: vec![T::zero(); layout.len],
        }
    }

    /// Glorot-uniform initialization, deterministic in `seed`; masked taps and biases start at 0.
    pub fn init(arch: Architecture, seed: u64) -> Self {
        let mut p = Self::zeros(arch);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = p.layout;
        for (l, spec) in CONV_LAYERS.iter().enumerate() {
            for (f, k) in spec.kernels.iter().enumerate() {
                let taps = k.active_taps() as f64;
                let s = (6.0 / (spec.in_channels as f64 * taps + 5.0 * taps)).sqrt();
                let start = layout.filters[l][f];
                for v in &mut p.data[start..start + spec.in_channels * k.stored_taps()] {
                    *v = T::lit(rng.gen_range(-s..=s));
                }
            }
        }
        let s = (6.0 / (DENSE_IN + OUTPUTS) as f64).sqrt();
        for v in &mut p.data[layout.dense_w..layout.dense_w + OUTPUTS * DENSE_IN] {
            *v = T::lit(rng.gen_range(-s..=s));
        }
        if let Some(rec) = layout.recurrent {
            let s = (6.0 / 18.0f64).sqrt();
            for v in &mut p.data[rec[0]..rec[0] + 243] {
                *v = T::lit(rng.gen_range(-s..=s));
            }
        }
        p.apply_mask();
        p
    }

    pub fn from_flat(arch: Architecture, data: Vec<T>) -> Result<Self> {
        let layout = Layout::new(arch);
        if data.len() != layout.len {
            return Err(Error::usage(format!(
                "{} expects {} parameters, got {}",
                arch.name(),
                layout.len,
                data.len()
            )));
        }
        let mut p = NetworkParams { arch, layout, data };
        p.apply_mask();
        Ok(p)
    }

    pub fn arch(&self) -> Architecture {
        self.arch
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn flat(&self) -> &[T] {
        &self.data
    }

    /// Mutable flat view. Callers that write through it must call [`apply_mask`](Self::apply_mask).
    pub fn flat_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_flat(self) -> Vec<T> {
        self.data
    }

    /// Weights of filter `f` in conv layer `l`, laid out `[in_channel][tap]`.
    pub fn conv_filter(&self, l: usize, f: usize) -> &[T] {
        let spec = &CONV_LAYERS[l];
        let start = self.layout.filters[l][f];
        &self.data[start..start + spec.in_channels * spec.kernels[f].stored_taps()]
    }

    pub fn conv_bias(&self, l: usize) -> &[T] {
        &self.data[self.layout.conv_bias[l]..self.layout.conv_bias[l] + 5]
    }

    pub fn dense_weights(&self) -> &[T] {
        &self.data[self.layout.dense_w..self.layout.dense_w + OUTPUTS * DENSE_IN]
    }

    pub fn dense_weights_mut(&mut self) -> &mut [T] {
        let w = self.layout.dense_w;
        &mut self.data[w..w + OUTPUTS * DENSE_IN]
    }

    pub fn dense_bias(&self) -> &[T] {
        &self.data[self.layout.dense_b..self.layout.dense_b + OUTPUTS]
    }

    /// `(U, W, V)` of the recurrent layer, when present.
    pub fn recurrent(&self) -> Option<[&[T]; 3]> {
        self.layout.recurrent.map(|r| r.map(|o| &self.data[o..o + 81]))
    }

    pub fn recurrent_mut(&mut self, which: usize) -> Option<&mut [T]> {
        let o = self.layout.recurrent?[which];
        Some(&mut self.data[o..o + 81])
    }

    /// Forces every masked hex tap back to zero.
    pub fn apply_mask(&mut self) {
        let data = &mut self.data;
        self.layout.for_each_frozen(|i| data[i] = T::zero());
    }

    /// Zeroes the entries of a gradient-shaped vector at masked positions.
    pub fn mask_gradient(&self, g: &mut [T]) {
        self.layout.for_each_frozen(|i| g[i] = T::zero());
    }

    /// `θ ← θ + s·d`, then re-applies the mask.
    pub fn add_scaled(&mut self, s: T, d: &[T]) {
        crate::scalar::axpy(s, d, &mut self.data);
        self.apply_mask();
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> NetworkParams<U> {
        NetworkParams {
            arch: self.arch,
            layout: self.layout,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}
