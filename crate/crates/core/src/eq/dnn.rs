//! Feed-forward DNN equalizer: an affine chain over a centered window of
//! soft samples, predicting the center symbol amplitude.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::nn::{self, LinearLayer, Tensor};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Sigmoid,
    Relu,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DnnConfig {
    pub hidden: Vec<usize>,
    pub activation: Activation,
    /// Input window = pre + 1 + post.
    pub window: usize,
}

impl Default for DnnConfig {
    fn default() -> Self {
        DnnConfig {
            hidden: vec![60, 64, 18],
            activation: Activation::Relu,
            window: 33,
        }
    }
}

pub struct DnnModel {
    pub cfg: DnnConfig,
    pub layers: Vec<LinearLayer>,
}

impl DnnModel {
    pub fn new(cfg: DnnConfig, master_seed: u64) -> DnnModel {
        let mut rng = Stream::new(master_seed, "dnn-init", 0);
        let mut dims = vec![cfg.window];
        dims.extend_from_slice(&cfg.hidden);
        dims.push(1);
        let layers = dims
            .windows(2)
            .map(|d| LinearLayer::new(d[0], d[1], &mut rng))
            .collect();
        DnnModel { cfg, layers }
    }

    /// `[B, window] → [B, 1]`; hidden layers use the configured
    /// activation, the output layer is linear.
    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let mut h = x.clone();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            h = nn::linear_forward(&h, layer)?;
            if i < last {
                h = match self.cfg.activation {
                    Activation::Sigmoid => nn::sigmoid(&h),
                    Activation::Relu => nn::relu(&h),
                };
            }
        }
        Ok(h)
    }

    pub fn params(&self) -> Vec<Tensor> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }

    pub fn named_params(&self) -> Vec<(String, Tensor)> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(i, l)| {
                vec![
                    (format!("layer{i}.weight"), l.weights.clone()),
                    (format!("layer{i}.bias"), l.bias.clone()),
                ]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_output_final_bias() {
        let mut model = DnnModel::new(DnnConfig::default(), 1);
        for l in &model.layers {
            l.weights.set_data(&vec![0.0; l.weights.len()]);
            l.bias.set_data(&vec![0.0; l.bias.len()]);
        }
        let last = model.layers.len() - 1;
        model.layers[last].bias.set_data(&[0.75]);
        let x = Tensor::constant(vec![2, 33], vec![0.3; 66]);
        let y = model.forward(&x).unwrap();
        // relu path: hidden activations are relu(0) = 0 → output = bias
        assert_eq!(y.to_vec(), vec![0.75, 0.75]);
    }

    #[test]
    fn single_relu_neuron_hand_computed() {
        let cfg = DnnConfig {
            hidden: vec![1],
            activation: Activation::Relu,
            window: 2,
        };
        let model = DnnModel::new(cfg, 1);
        // h = relu(1·x0 − 2·x1 + 0.5); y = 3·h − 1
        model.layers[0].weights.set_data(&[1.0, -2.0]);
        model.layers[0].bias.set_data(&[0.5]);
        model.layers[1].weights.set_data(&[3.0]);
        model.layers[1].bias.set_data(&[-1.0]);
        let x = Tensor::constant(vec![1, 2], vec![2.0, 0.25]);
        let y = model.forward(&x).unwrap();
        // h = relu(2 − 0.5 + 0.5) = 2 → y = 5
        assert_eq!(y.to_vec(), vec![5.0]);
        // negative pre-activation clamps to bias-only output
        let x2 = Tensor::constant(vec![1, 2], vec![0.0, 1.0]);
        let y2 = model.forward(&x2).unwrap();
        assert_eq!(y2.to_vec(), vec![-1.0]);
    }

    #[test]
    fn gradient_check_full_dnn() {
        let cfg = DnnConfig {
            hidden: vec![4, 3],
            activation: Activation::Sigmoid,
            window: 5,
        };
        let model = DnnModel::new(cfg, 7);
        let mut rng = Stream::new(3, "dnn-gradcheck", 0);
        let x = Tensor::constant(
            vec![2, 5],
            (0..10).map(|_| rng.uniform_range(-1.0, 1.0)).collect(),
        );
        let t = Tensor::constant(
            vec![2, 1],
            (0..2).map(|_| rng.uniform_range(-1.0, 1.0)).collect(),
        );
        let loss = nn::mse_loss(&model.forward(&x).unwrap(), &t).unwrap();
        loss.backward().unwrap();

        let eps = 1e-5;
        for p in model.params() {
            let analytic = p.grad().unwrap();
            let base = p.to_vec();
            for i in 0..base.len() {
                let mut plus = base.clone();
                plus[i] += eps;
                p.set_data(&plus);
                let fp = nn::mse_loss(&model.forward(&x).unwrap(), &t).unwrap().value();
                let mut minus = base.clone();
                minus[i] -= eps;
                p.set_data(&minus);
                let fm = nn::mse_loss(&model.forward(&x).unwrap(), &t).unwrap().value();
                p.set_data(&base);
                let numeric = (fp - fm) / (2.0 * eps);
                let err = (analytic[i] - numeric).abs()
                    / f64::max(1.0, f64::max(analytic[i].abs(), numeric.abs()));
                assert!(err < 1e-4, "param elem {i}: {} vs {numeric}", analytic[i]);
            }
        }
    }
}
