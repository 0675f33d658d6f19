//! Learnable layer parameter containers.

use crate::rng::Stream;

use super::tensor::Tensor;

/// Boundary handling for 1-D convolutions and pooling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadMode {
    Zero,
    Replicate,
}

/// 1-D convolution, stride 1. Weights `[out_channels, in_channels, kernel]`,
/// bias `[out_channels]`. Output length is `N + 2*pad - kernel + 1`.
pub struct Conv1dLayer {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel_size: usize,
    pub pad: usize,
    pub pad_mode: PadMode,
    pub weights: Tensor,
    pub bias: Tensor,
}

impl Conv1dLayer {
    /// Seeded init, uniform in ±1/√fan_in with fan_in = in_channels·kernel.
    pub fn new(
        in_channels: usize,
        out_channels: usize,
        kernel_size: usize,
        pad: usize,
        pad_mode: PadMode,
        rng: &mut Stream,
    ) -> Conv1dLayer {
        let fan_in = (in_channels * kernel_size) as f64;
        let bound = 1.0 / fan_in.sqrt();
        let w: Vec<f64> = (0..out_channels * in_channels * kernel_size)
            .map(|_| rng.uniform_range(-bound, bound))
            .collect();
        let b: Vec<f64> = (0..out_channels)
            .map(|_| rng.uniform_range(-bound, bound))
            .collect();
        Conv1dLayer {
            in_channels,
            out_channels,
            kernel_size,
            pad,
            pad_mode,
            weights: Tensor::new(vec![out_channels, in_channels, kernel_size], w, true),
            bias: Tensor::new(vec![out_channels], b, true),
        }
    }

    /// All-zero weights and bias (used by closed-form tests and ablations).
    pub fn zeros(
        in_channels: usize,
        out_channels: usize,
        kernel_size: usize,
        pad: usize,
        pad_mode: PadMode,
    ) -> Conv1dLayer {
        Conv1dLayer {
            in_channels,
            out_channels,
            kernel_size,
            pad,
            pad_mode,
            weights: Tensor::zeros(vec![out_channels, in_channels, kernel_size], true),
            bias: Tensor::zeros(vec![out_channels], true),
        }
    }

    pub fn from_weights(
        in_channels: usize,
        out_channels: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
        pad: usize,
        pad_mode: PadMode,
    ) -> Conv1dLayer {
        let kernel_size = weights.len() / (in_channels * out_channels);
        Conv1dLayer {
            in_channels,
            out_channels,
            kernel_size,
            pad,
            pad_mode,
            weights: Tensor::new(vec![out_channels, in_channels, kernel_size], weights, true),
            bias: Tensor::new(vec![out_channels], bias, true),
        }
    }

    pub fn params(&self) -> Vec<Tensor> {
        vec![self.weights.clone(), self.bias.clone()]
    }
}

/// Dense layer: weights `[out_dim, in_dim]`, bias `[out_dim]`.
pub struct LinearLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Tensor,
    pub bias: Tensor,
}

impl LinearLayer {
    pub fn new(in_dim: usize, out_dim: usize, rng: &mut Stream) -> LinearLayer {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let w: Vec<f64> = (0..out_dim * in_dim)
            .map(|_| rng.uniform_range(-bound, bound))
            .collect();
        let b: Vec<f64> = (0..out_dim)
            .map(|_| rng.uniform_range(-bound, bound))
            .collect();
        LinearLayer {
            in_dim,
            out_dim,
            weights: Tensor::new(vec![out_dim, in_dim], w, true),
            bias: Tensor::new(vec![out_dim], b, true),
        }
    }

    /// Identity map (square). Bias zero.
    pub fn identity(dim: usize) -> LinearLayer {
        let mut w = vec![0.0; dim * dim];
        for i in 0..dim {
            w[i * dim + i] = 1.0;
        }
        LinearLayer {
            in_dim: dim,
            out_dim: dim,
            weights: Tensor::new(vec![dim, dim], w, true),
            bias: Tensor::zeros(vec![dim], true),
        }
    }

    pub fn from_weights(in_dim: usize, out_dim: usize, weights: Vec<f64>, bias: Vec<f64>) -> LinearLayer {
        assert_eq!(weights.len(), in_dim * out_dim);
        assert_eq!(bias.len(), out_dim);
        LinearLayer {
            in_dim,
            out_dim,
            weights: Tensor::new(vec![out_dim, in_dim], weights, true),
            bias: Tensor::new(vec![out_dim], bias, true),
        }
    }

    pub fn params(&self) -> Vec<Tensor> {
        vec![self.weights.clone(), self.bias.clone()]
    }
}
