//! The three receiver-side equalizers: decision-directed FFE-LMS, a
//! feed-forward DNN, and FC-SCINet, plus shared training and evaluation.

pub mod dnn;
pub mod ffe;
pub mod scinet;
pub mod train;

pub use dnn::{Activation, DnnConfig, DnnModel};
pub use ffe::{ffe_equalize, FfeConfig, FfeHistory};
pub use scinet::{realign_indices, split_permutation, FcScinetModel, Interactor, ScinetConfig};
pub use train::{
    evaluate_mse, predict, train_model, EpochStats, OptimizerChoice, TrainConfig, TrainReport,
    WindowModel,
};

use crate::data::WindowBatch;
use crate::error::Result;
use crate::link::{pam4, LEVEL_STD};
use crate::metrics::{count_ber, BerReport};

/// Slice model predictions (normalized amplitude domain) against the
/// batch targets and count bit errors. Wide-output models contribute
/// their center-column estimate per row.
pub fn evaluate_ber(model: &dyn WindowModel, batch: &WindowBatch) -> Result<BerReport> {
    let preds = predict(model, batch, 256)?;
    let decisions: Vec<u8> = preds
        .iter()
        .map(|p| pam4::slice_symbol(p * LEVEL_STD))
        .collect();
    let truth: Vec<u8> = batch
        .targets
        .iter()
        .map(|t| pam4::slice_symbol(t * LEVEL_STD))
        .collect();
    count_ber(&decisions, &truth)
}

/// Ensemble evaluation for sequence-to-sequence models: every window
/// covering a symbol votes with its positional estimate and the votes
/// are averaged before slicing. Center-output models degrade to
/// [`evaluate_ber`].
pub fn evaluate_ber_ensemble(model: &dyn WindowModel, batch: &WindowBatch) -> Result<BerReport> {
    let out_w = model.output_width();
    if out_w == 1 {
        return evaluate_ber(model, batch);
    }
    let width = batch.width;
    let span_half = out_w / 2;
    let max_center = batch.centers.iter().copied().max().unwrap_or(0);
    let mut sums = vec![0.0f64; max_center + span_half + 1];
    let mut counts = vec![0u32; max_center + span_half + 1];

    let rows: Vec<usize> = (0..batch.rows()).collect();
    for chunk in rows.chunks(256) {
        let mut x = Vec::with_capacity(chunk.len() * width);
        for r in chunk {
            x.extend_from_slice(batch.row(*r));
        }
        let xt = crate::nn::Tensor::constant(vec![chunk.len(), width], x);
        let pred = model.forward_batch(&xt)?;
        let data = pred.data();
        for (bi, r) in chunk.iter().enumerate() {
            let start = batch.centers[*r] - span_half;
            for j in 0..out_w {
                let idx = start + j;
                if idx < sums.len() {
                    sums[idx] += data[bi * out_w + j];
                    counts[idx] += 1;
                }
            }
        }
    }

    let mut decisions = Vec::with_capacity(batch.rows());
    let mut truth = Vec::with_capacity(batch.rows());
    for (r, center) in batch.centers.iter().enumerate() {
        if counts[*center] == 0 {
            continue;
        }
        let avg = sums[*center] / counts[*center] as f64;
        decisions.push(pam4::slice_symbol(avg * LEVEL_STD));
        truth.push(pam4::slice_symbol(batch.targets[r] * LEVEL_STD));
    }
    count_ber(&decisions, &truth)
}

/// The unequalized baseline: a least-squares affine map (gain + offset)
/// fitted on the training split, then a nearest-level slicer. This is
/// what a receiver with only AGC does.
pub struct AffineSlicer {
    pub gain: f64,
    pub offset: f64,
}

impl AffineSlicer {
    /// Fit `y ≈ gain·x + offset` over (soft, amplitude) training pairs.
    pub fn fit(soft: &[f64], amplitudes: &[f64]) -> AffineSlicer {
        let n = soft.len() as f64;
        let mx = soft.iter().sum::<f64>() / n;
        let my = amplitudes.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut var = 0.0;
        for (x, y) in soft.iter().zip(amplitudes.iter()) {
            cov += (x - mx) * (y - my);
            var += (x - mx) * (x - mx);
        }
        let gain = if var > 0.0 { cov / var } else { 0.0 };
        AffineSlicer {
            gain,
            offset: my - gain * mx,
        }
    }

    pub fn decide(&self, soft: &[f64]) -> Vec<u8> {
        soft.iter()
            .map(|x| pam4::slice_symbol(self.gain * x + self.offset))
            .collect()
    }
}
