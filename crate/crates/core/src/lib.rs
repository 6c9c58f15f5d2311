//! Reinforcement-learning harness for 3×3 Hex.

pub mod action;
pub mod algorithms;
pub mod encoding;
pub mod error;
pub mod experiments;
pub mod hex;
pub mod neural;
pub mod oracle;
pub mod scalar;
pub mod selfplay;

pub use action::ActionMask;
pub use encoding::{encode, EncodedState};
pub use error::{Error, Result};
pub use hex::{Board, Cell, Outcome, Player};
pub use scalar::{Dual, Scalar};

/// Double-precision network parameters.
pub type Params = neural::NetworkParams<f64>;
