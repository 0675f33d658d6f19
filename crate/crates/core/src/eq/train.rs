//! Minibatch MSE training with per-epoch validation and
//! best-checkpoint selection.

use serde::{Deserialize, Serialize};

use crate::data::WindowBatch;
use crate::error::{Error, Result};
use crate::nn::{self, OptimKind, OptimizerState, Tensor};
use crate::rng::Stream;

/// Unified face of the two trainable equalizers.
pub trait WindowModel {
    /// `[B, width] → [B, output_width]`.
    fn forward_batch(&self, x: &Tensor) -> Result<Tensor>;
    fn params(&self) -> Vec<Tensor>;
    /// 1 for center-symbol prediction, the window length for
    /// sequence-to-sequence models.
    fn output_width(&self) -> usize {
        1
    }
}

impl WindowModel for super::dnn::DnnModel {
    fn forward_batch(&self, x: &Tensor) -> Result<Tensor> {
        self.forward(x)
    }
    fn params(&self) -> Vec<Tensor> {
        self.params()
    }
}

impl WindowModel for super::scinet::FcScinetModel {
    fn forward_batch(&self, x: &Tensor) -> Result<Tensor> {
        self.forward(x)
    }
    fn params(&self) -> Vec<Tensor> {
        self.params()
    }
    fn output_width(&self) -> usize {
        self.cfg.output_span
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptimizerChoice {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerChoice,
    /// Learning rate; 0 freezes the parameters (no updates at all).
    pub learning_rate: f64,
    /// Multiplicative learning-rate decay applied after each epoch.
    pub lr_decay: f64,
    pub l2_coefficient: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            batch_size: 32,
            optimizer: OptimizerChoice::Sgd,
            learning_rate: 1e-5,
            lr_decay: 1.0,
            l2_coefficient: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochStats>,
    pub best_epoch: usize,
    pub best_val_mse: f64,
}

fn batch_tensor(batch: &WindowBatch, rows: &[usize], out_w: usize) -> (Tensor, Tensor) {
    let w = batch.width;
    let mut x = Vec::with_capacity(rows.len() * w);
    let mut y = Vec::with_capacity(rows.len() * out_w);
    for r in rows {
        x.extend_from_slice(batch.row(*r));
        if out_w == 1 {
            y.push(batch.targets[*r]);
        } else {
            let tw = batch
                .targets_wide
                .as_ref()
                .expect("sequence targets required for a wide-output model");
            let off = (w - out_w) / 2;
            y.extend_from_slice(&tw[r * w + off..r * w + off + out_w]);
        }
    }
    (
        Tensor::constant(vec![rows.len(), w], x),
        Tensor::constant(vec![rows.len(), out_w], y),
    )
}

/// Mean MSE of the model over a whole batch set, in inference chunks.
pub fn evaluate_mse(model: &dyn WindowModel, batch: &WindowBatch, chunk: usize) -> Result<f64> {
    let out_w = model.output_width();
    let mut acc = 0.0;
    let mut count = 0usize;
    let rows: Vec<usize> = (0..batch.rows()).collect();
    for ch in rows.chunks(chunk) {
        let (x, y) = batch_tensor(batch, ch, out_w);
        let pred = model.forward_batch(&x)?;
        let loss = nn::mse_loss(&pred, &y)?;
        acc += loss.value() * ch.len() as f64;
        count += ch.len();
    }
    Ok(acc / count.max(1) as f64)
}

/// Center-symbol predictions over a whole batch set (normalized
/// amplitude domain). Wide-output models contribute their center column.
pub fn predict(model: &dyn WindowModel, batch: &WindowBatch, chunk: usize) -> Result<Vec<f64>> {
    let out_w = model.output_width();
    let center = out_w / 2;
    let mut out = Vec::with_capacity(batch.rows());
    let rows: Vec<usize> = (0..batch.rows()).collect();
    for ch in rows.chunks(chunk) {
        let (x, _) = batch_tensor(batch, ch, out_w);
        let pred = model.forward_batch(&x)?;
        let data = pred.data();
        if out_w == 1 {
            out.extend_from_slice(&data);
        } else {
            for r in 0..ch.len() {
                out.push(data[r * out_w + center]);
            }
        }
    }
    Ok(out)
}

/// Minibatch MSE descent with a seeded shuffle per epoch. Validation runs
/// after every epoch; the parameters of the best-validation epoch are
/// restored before returning.
pub fn train_model(
    model: &dyn WindowModel,
    train: &WindowBatch,
    val: &WindowBatch,
    cfg: &TrainConfig,
    master_seed: u64,
) -> Result<TrainReport> {
    let params = model.params();
    let frozen = cfg.learning_rate == 0.0;
    let mut opt = if frozen {
        None
    } else {
        let kind = match cfg.optimizer {
            OptimizerChoice::Sgd => OptimKind::Sgd,
            OptimizerChoice::Adam => OptimKind::adam_default(),
        };
        Some(OptimizerState::new(
            cfg.learning_rate,
            cfg.l2_coefficient,
            kind,
        )?)
    };

    let mut report = TrainReport {
        epochs: Vec::with_capacity(cfg.epochs),
        best_epoch: 0,
        best_val_mse: f64::INFINITY,
    };
    let mut best_params: Vec<Vec<f64>> = params.iter().map(|p| p.to_vec()).collect();

    let out_w = model.output_width();
    let mut order: Vec<usize> = (0..train.rows()).collect();
    for epoch in 0..cfg.epochs {
        let mut rng = Stream::new(master_seed, "train-shuffle", epoch as u64);
        rng.shuffle(&mut order);
        let mut train_acc = 0.0;
        let mut seen = 0usize;
        for (step, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let (x, y) = batch_tensor(train, chunk, out_w);
            let pred = model.forward_batch(&x)?;
            let loss = nn::mse_loss(&pred, &y)?;
            let lv = loss.value();
            if !lv.is_finite() {
                return Err(Error::NanLoss { epoch, step });
            }
            train_acc += lv * chunk.len() as f64;
            seen += chunk.len();
            if let Some(opt) = opt.as_mut() {
                opt.zero_grad(&params);
                loss.backward()?;
                opt.step(&params);
            }
        }
        let train_mse = train_acc / seen.max(1) as f64;
        let val_mse = evaluate_mse(model, val, 256)?;
        if let Some(opt) = opt.as_mut() {
            opt.learning_rate *= cfg.lr_decay;
        }
        if val_mse < report.best_val_mse {
            report.best_val_mse = val_mse;
            report.best_epoch = epoch;
            for (snap, p) in best_params.iter_mut().zip(params.iter()) {
                snap.copy_from_slice(&p.data());
            }
        }
        report.epochs.push(EpochStats {
            epoch,
            train_mse,
            val_mse,
        });
    }

    for (snap, p) in best_params.iter().zip(params.iter()) {
        p.set_data(snap);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eq::dnn::{Activation, DnnConfig, DnnModel};
    use crate::eq::scinet::{FcScinetModel, ScinetConfig};

    /// y = 0.5 · x[center] with mild noise-free structure.
    fn toy_batch(width: usize, rows: usize, seed: u64) -> WindowBatch {
        let mut rng = Stream::new(seed, "toy", 0);
        let mut inputs = Vec::with_capacity(rows * width);
        let mut targets = Vec::with_capacity(rows);
        for _ in 0..rows {
            let row: Vec<f64> = (0..width).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
            targets.push(0.5 * row[width / 2]);
            inputs.extend_from_slice(&row);
        }
        WindowBatch {
            inputs,
            targets,
            width,
            centers: (0..rows).collect(),
            targets_wide: None,
        }
    }

    #[test]
    fn zero_lr_leaves_params_unchanged() {
        let model = DnnModel::new(
            DnnConfig {
                hidden: vec![8],
                activation: Activation::Relu,
                window: 9,
            },
            3,
        );
        let before: Vec<Vec<f64>> = model.params().iter().map(|p| p.to_vec()).collect();
        let train = toy_batch(9, 64, 1);
        let val = toy_batch(9, 32, 2);
        let cfg = TrainConfig {
            epochs: 3,
            learning_rate: 0.0,
            ..Default::default()
        };
        train_model(&model, &train, &val, &cfg, 5).unwrap();
        let after: Vec<Vec<f64>> = model.params().iter().map(|p| p.to_vec()).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn toy_task_learnable_by_dnn() {
        let model = DnnModel::new(
            DnnConfig {
                hidden: vec![16, 8],
                activation: Activation::Relu,
                window: 9,
            },
            7,
        );
        let train = toy_batch(9, 512, 1);
        let val = toy_batch(9, 128, 2);
        let cfg = TrainConfig {
            epochs: 60,
            optimizer: OptimizerChoice::Adam,
            learning_rate: 1e-3,
            l2_coefficient: 0.0,
            ..Default::default()
        };
        let report = train_model(&model, &train, &val, &cfg, 11).unwrap();
        let final_mse = report.epochs.last().unwrap().train_mse;
        assert!(final_mse < 1e-2, "train MSE {final_mse}");
    }

    #[test]
    fn toy_task_learnable_by_scinet() {
        let model = FcScinetModel::new(
            ScinetConfig {
                window: 8,
                levels: 1,
                n_h: 2,
                ..Default::default()
            },
            9,
        )
        .unwrap();
        let train = toy_batch(8, 512, 3);
        let val = toy_batch(8, 128, 4);
        let cfg = TrainConfig {
            epochs: 80,
            optimizer: OptimizerChoice::Adam,
            learning_rate: 3e-3,
            l2_coefficient: 0.0,
            ..Default::default()
        };
        let report = train_model(&model, &train, &val, &cfg, 13).unwrap();
        let final_mse = report.epochs.last().unwrap().train_mse;
        assert!(final_mse < 1e-2, "train MSE {final_mse}");
    }

    #[test]
    fn seeded_rerun_identical_loss_curve() {
        let run = || {
            let model = DnnModel::new(
                DnnConfig {
                    hidden: vec![6],
                    activation: Activation::Sigmoid,
                    window: 5,
                },
                21,
            );
            let train = toy_batch(5, 128, 6);
            let val = toy_batch(5, 64, 7);
            let cfg = TrainConfig {
                epochs: 5,
                optimizer: OptimizerChoice::Adam,
                learning_rate: 1e-3,
                ..Default::default()
            };
            train_model(&model, &train, &val, &cfg, 17).unwrap()
        };
        let a = run();
        let b = run();
        for (ea, eb) in a.epochs.iter().zip(b.epochs.iter()) {
            assert_eq!(ea.train_mse.to_bits(), eb.train_mse.to_bits());
            assert_eq!(ea.val_mse.to_bits(), eb.val_mse.to_bits());
        }
    }

    #[test]
    fn best_checkpoint_no_worse_than_every_epoch() {
        let model = DnnModel::new(
            DnnConfig {
                hidden: vec![8],
                activation: Activation::Relu,
                window: 9,
            },
            5,
        );
        let train = toy_batch(9, 256, 8);
        let val = toy_batch(9, 128, 9);
        let cfg = TrainConfig {
            epochs: 20,
            optimizer: OptimizerChoice::Adam,
            learning_rate: 3e-3,
            ..Default::default()
        };
        let report = train_model(&model, &train, &val, &cfg, 23).unwrap();
        for e in &report.epochs {
            assert!(report.best_val_mse <= e.val_mse + 1e-15);
        }
        // restored params really are the best epoch's
        let val_now = evaluate_mse(&model, &val, 256).unwrap();
        assert!((val_now - report.best_val_mse).abs() < 1e-12);
    }
}
