//! Minimal deterministic tensor/autodiff engine.
//!
//! Reverse-mode differentiation over a fixed set of primitives: 1-D
//! convolution, dense layers, average pooling, element-wise exp/product,
//! activations, and MSE loss. Everything is 64-bit and single-threaded;
//! identical seeds and inputs give bit-identical parameters after any
//! number of optimizer steps.

mod checkpoint;
mod layers;
mod optim;
mod tensor;

pub use checkpoint::{load_checkpoint, save_checkpoint, Dtype};
pub use layers::{Conv1dLayer, LinearLayer, PadMode};
pub use optim::{OptimKind, OptimizerState};
pub use tensor::{
    add, avg_pool_smooth, concat, conv1d_forward, exp_clamped, gather, leaky_relu,
    linear_forward, mse_loss, mul, relu, reshape, scale, sigmoid, sub, tanh, Tensor,
};

/// Clamp bound for exponent inputs inside interactor blocks; keeps
/// exp() finite early in training.
pub const EXP_CLAMP: f64 = 10.0;
