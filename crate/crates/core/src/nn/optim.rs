//! First-order optimizers with L2 (norm-2) regularization.

use crate::error::{Error, Result};

use super::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimKind {
    /// p ← p − lr·(grad + l2·p)
    Sgd,
    /// Adam with bias correction; l2 enters the raw gradient (weight decay).
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl OptimKind {
    pub fn adam_default() -> OptimKind {
        OptimKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Optimizer state: learning rate, L2 coefficient, and per-parameter
/// auxiliary buffers (empty for plain SGD). The parameter list passed to
/// [`OptimizerState::step`] must be the same, in the same order, on every
/// call.
pub struct OptimizerState {
    pub learning_rate: f64,
    pub l2_coefficient: f64,
    pub kind: OptimKind,
    step_count: u64,
    moments: Vec<(Vec<f64>, Vec<f64>)>,
}

impl OptimizerState {
    pub fn new(learning_rate: f64, l2_coefficient: f64, kind: OptimKind) -> Result<OptimizerState> {
        if learning_rate <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "learning_rate must be > 0, got {learning_rate}"
            )));
        }
        if l2_coefficient < 0.0 {
            return Err(Error::InvalidParam(format!(
                "l2_coefficient must be >= 0, got {l2_coefficient}"
            )));
        }
        Ok(OptimizerState {
            learning_rate,
            l2_coefficient,
            kind,
            step_count: 0,
            moments: Vec::new(),
        })
    }

    /// Plain SGD at the default 1e-5 learning rate.
    pub fn sgd_default() -> OptimizerState {
        OptimizerState::new(1e-5, 0.0, OptimKind::Sgd).expect("defaults valid")
    }

    /// Apply one update from the accumulated gradients. Parameters without
    /// a gradient are left untouched.
    pub fn step(&mut self, params: &[Tensor]) {
        self.step_count += 1;
        let lr = self.learning_rate;
        let l2 = self.l2_coefficient;
        match self.kind {
            OptimKind::Sgd => {
                for p in params {
                    p.apply_to_data(|data, grad| {
                        if let Some(g) = grad {
                            for (pi, gi) in data.iter_mut().zip(g) {
                                *pi -= lr * (gi + l2 * *pi);
                            }
                        }
                    });
                }
            }
            OptimKind::Adam { beta1, beta2, eps } => {
                if self.moments.len() < params.len() {
                    for p in params.iter().skip(self.moments.len()) {
                        let n = p.len();
                        self.moments.push((vec![0.0; n], vec![0.0; n]));
                    }
                }
                let t = self.step_count as f64;
                let bc1 = 1.0 - beta1.powf(t);
                let bc2 = 1.0 - beta2.powf(t);
                for (p, (m, v)) in params.iter().zip(self.moments.iter_mut()) {
                    p.apply_to_data(|data, grad| {
                        if let Some(g) = grad {
                            for i in 0..data.len() {
                                let gt = g[i] + l2 * data[i];
                                m[i] = beta1 * m[i] + (1.0 - beta1) * gt;
                                v[i] = beta2 * v[i] + (1.0 - beta2) * gt * gt;
                                let mhat = m[i] / bc1;
                                let vhat = v[i] / bc2;
                                data[i] -= lr * mhat / (vhat.sqrt() + eps);
                            }
                        }
                    });
                }
            }
        }
    }

    /// Zero the gradient buffers of every parameter.
    pub fn zero_grad(&self, params: &[Tensor]) {
        for p in params {
            p.zero_grad();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn param(v: f64) -> Tensor {
        Tensor::new(vec![1], vec![v], true)
    }

    fn with_grad(p: &Tensor, g: f64) {
        // force a gradient by a throwaway backward of g*p
        let c = Tensor::constant(vec![1], vec![g]);
        let prod = crate::nn::mul(p, &c);
        prod.backward().unwrap();
    }

    #[test]
    fn sgd_zero_grad_keeps_param() {
        let p = param(1.0);
        with_grad(&p, 0.0);
        let mut opt = OptimizerState::new(0.1, 0.0, OptimKind::Sgd).unwrap();
        opt.step(&[p.clone()]);
        assert_eq!(p.to_vec(), vec![1.0]);
    }

    #[test]
    fn sgd_basic_step() {
        let p = param(0.0);
        with_grad(&p, 1.0);
        let mut opt = OptimizerState::new(1e-5, 0.0, OptimKind::Sgd).unwrap();
        opt.step(&[p.clone()]);
        assert_eq!(p.to_vec(), vec![-1e-5]);
    }

    #[test]
    fn sgd_l2_decay() {
        let p = param(1.0);
        with_grad(&p, 0.0);
        let mut opt = OptimizerState::new(0.1, 0.1, OptimKind::Sgd).unwrap();
        opt.step(&[p.clone()]);
        assert!((p.to_vec()[0] - 0.99).abs() < 1e-15);
    }

    #[test]
    fn invalid_lr_rejected() {
        assert!(OptimizerState::new(0.0, 0.0, OptimKind::Sgd).is_err());
        assert!(OptimizerState::new(-1.0, 0.0, OptimKind::Sgd).is_err());
    }

    #[test]
    fn adam_moves_param_toward_minimum() {
        let p = param(1.0);
        let mut opt = OptimizerState::new(0.05, 0.0, OptimKind::adam_default()).unwrap();
        // minimize p^2 via its gradient 2p
        for _ in 0..200 {
            p.zero_grad();
            let loss = crate::nn::mse_loss(&p, &Tensor::constant(vec![1], vec![0.0])).unwrap();
            loss.backward().unwrap();
            opt.step(&[p.clone()]);
        }
        assert!(p.to_vec()[0].abs() < 1e-2);
    }
}
