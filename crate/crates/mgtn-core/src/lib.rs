//! Multi-graph tensor network building blocks: dense tensor algebra,
//! tensor-train decomposition, graph construction and filtering, and the
//! differentiable layers and optimizers that tie them together.

// Index arithmetic over multiple parallel buffers throughout.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod graph;
pub mod nn;
pub mod reference;
pub mod rng;
pub mod tensor;
pub mod tt;

pub use error::{CoreError, Result};
pub use tensor::{contract, mode_apply, stack, tensorize, unstack, DenseTensor, ModeSpec};
