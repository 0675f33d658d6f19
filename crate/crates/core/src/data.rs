//! Dataset construction: normalization, sliding windows, contiguous-block
//! splits and the frequency-calibration preprocessing filter.

use serde::{Deserialize, Serialize};

use crate::error::{shape_mismatch, Error, Result};
use crate::link::SymbolFrame;
use crate::rng::Stream;

/// Window geometry for the two model families.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowConfig {
    /// FC-SCINet window length p (must be divisible by 2^levels).
    pub scinet_window: usize,
    /// DNN samples before the center symbol.
    pub dnn_pre: usize,
    /// DNN samples after the center symbol.
    pub dnn_post: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            scinet_window: 64,
            dnn_pre: 16,
            dnn_post: 16,
        }
    }
}

/// How the frequency-calibration output is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FcMode {
    /// x_pre = x + x_f = 2x − x_s (high-frequency re-emphasis).
    Paper,
    /// x_pre = x_s + x_f = x (identity; kept for ablation).
    Reconstruct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowStyle {
    /// Rows of pre+1+post samples, target = center symbol.
    CenteredDnn,
    /// Rows of length p, target = center symbol.
    Scinet,
}

/// Z-score a sequence with the population std. Returns the transformed
/// sequence and the (mean, std) pair for inverse mapping at inference.
pub fn normalize(x: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    if x.len() < 2 {
        return Err(Error::InvalidParam(
            "normalize needs at least 2 samples".into(),
        ));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let std = var.sqrt();
    Ok((x.iter().map(|v| (v - mean) / std).collect(), mean, std))
}

/// One supervised batch: `rows × width` inputs, one center target per
/// row, and (window styles that support sequence prediction) the full
/// target window per row.
#[derive(Debug, Clone)]
pub struct WindowBatch {
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
    pub width: usize,
    /// Index of the center symbol of each row in the source sequence.
    pub centers: Vec<usize>,
    /// Row-major `rows × width` target windows (sequence-to-sequence
    /// training).
    pub targets_wide: Option<Vec<f64>>,
}

impl WindowBatch {
    pub fn rows(&self) -> usize {
        self.targets.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.inputs[r * self.width..(r + 1) * self.width]
    }
}

/// Slide a window of the configured style over `(x, y)` at stride 1.
pub fn make_windows(
    x: &[f64],
    y: &[f64],
    w: &WindowConfig,
    style: WindowStyle,
) -> Result<WindowBatch> {
    if x.len() != y.len() {
        return Err(shape_mismatch(format!(
            "make_windows: x has {} samples, y has {}",
            x.len(),
            y.len()
        )));
    }
    let (width, center_off) = match style {
        WindowStyle::CenteredDnn => (w.dnn_pre + 1 + w.dnn_post, w.dnn_pre),
        WindowStyle::Scinet => (w.scinet_window, w.scinet_window / 2),
    };
    if x.len() < width {
        return Err(Error::InvalidParam(format!(
            "sequence of {} samples shorter than window {width}",
            x.len()
        )));
    }
    let rows = x.len() - width + 1;
    let wide = matches!(style, WindowStyle::Scinet);
    let mut inputs = Vec::with_capacity(rows * width);
    let mut targets = Vec::with_capacity(rows);
    let mut centers = Vec::with_capacity(rows);
    let mut targets_wide = if wide {
        Some(Vec::with_capacity(rows * width))
    } else {
        None
    };
    for r in 0..rows {
        inputs.extend_from_slice(&x[r..r + width]);
        targets.push(y[r + center_off]);
        centers.push(r + center_off);
        if let Some(tw) = targets_wide.as_mut() {
            tw.extend_from_slice(&y[r..r + width]);
        }
    }
    Ok(WindowBatch {
        inputs,
        targets,
        width,
        centers,
        targets_wide,
    })
}

/// Frequency calibration on each row of a row-major `rows × width`
/// buffer: x_s = AvgPool(x), x_f = x − x_s, and x_pre = x + x_f (Paper)
/// or x_s + x_f (Reconstruct).
pub fn frequency_calibrate(
    rows: &[f64],
    width: usize,
    kernel: usize,
    mode: FcMode,
) -> Result<Vec<f64>> {
    if kernel % 2 == 0 {
        return Err(Error::InvalidParam(format!(
            "avg_pool kernel must be odd, got {kernel}"
        )));
    }
    if kernel > width {
        return Err(Error::InvalidParam(format!(
            "avg_pool kernel {kernel} exceeds window {width}"
        )));
    }
    let half = kernel / 2;
    let n_rows = rows.len() / width;
    let mut out = vec![0.0; rows.len()];
    for r in 0..n_rows {
        let x = &rows[r * width..(r + 1) * width];
        let o = &mut out[r * width..(r + 1) * width];
        for i in 0..width {
            let mut acc = 0.0;
            for d in 0..kernel {
                let m = (i + d).max(half) - half;
                acc += x[m.min(width - 1)];
            }
            let xs = acc / kernel as f64;
            o[i] = match mode {
                FcMode::Paper => 2.0 * x[i] - xs,
                FcMode::Reconstruct => x[i],
            };
        }
    }
    Ok(out)
}

/// Which split a symbol index belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Split {
    Train,
    Test,
    Val,
}

/// Contiguous-block split assignment: the sequence is cut into blocks,
/// block order is shuffled with the seed, and whole blocks are dealt to
/// train/test/val at 75/15/10. Windows never straddle block boundaries,
/// so no sample leaks between splits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub block_len: usize,
    pub assignment: Vec<Split>,
    pub n_samples: usize,
}

impl DatasetSplit {
    pub fn new(n_samples: usize, block_len: usize, seed: u64) -> DatasetSplit {
        let n_blocks = n_samples.div_ceil(block_len);
        let mut order: Vec<usize> = (0..n_blocks).collect();
        let mut rng = Stream::new(seed, "split-shuffle", 0);
        rng.shuffle(&mut order);
        let n_train = (n_blocks as f64 * 0.75).round() as usize;
        let n_test = (n_blocks as f64 * 0.15).round() as usize;
        let mut assignment = vec![Split::Val; n_blocks];
        for (rank, block) in order.into_iter().enumerate() {
            assignment[block] = if rank < n_train {
                Split::Train
            } else if rank < n_train + n_test {
                Split::Test
            } else {
                Split::Val
            };
        }
        DatasetSplit {
            block_len,
            assignment,
            n_samples,
        }
    }

    pub fn of(&self, index: usize) -> Split {
        self.assignment[index / self.block_len]
    }

    /// Contiguous index ranges belonging to one split.
    pub fn ranges(&self, split: Split) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start: Option<usize> = None;
        for (b, a) in self.assignment.iter().enumerate() {
            let lo = b * self.block_len;
            let hi = ((b + 1) * self.block_len).min(self.n_samples);
            if *a == split {
                if start.is_none() {
                    start = Some(lo);
                }
                if hi == self.n_samples {
                    out.push(start.take().unwrap()..hi);
                }
            } else if let Some(s) = start.take() {
                out.push(s..lo);
            }
        }
        out
    }

    pub fn count(&self, split: Split) -> usize {
        (0..self.n_samples).filter(|i| self.of(*i) == split).count()
    }
}

/// A capture turned into per-split window batches for one window style.
pub struct SplitWindows {
    pub train: WindowBatch,
    pub test: WindowBatch,
    pub val: WindowBatch,
}

/// Build per-split windows from a symbol frame: soft samples are
/// normalized globally, targets are the transmitted amplitudes scaled by
/// the alphabet std, and windows are generated inside each split range
/// only.
pub fn build_split_windows(
    frame: &SymbolFrame,
    split: &DatasetSplit,
    w: &WindowConfig,
    style: WindowStyle,
) -> Result<SplitWindows> {
    let (x, _mean, _std) = normalize(&frame.soft)?;
    let y: Vec<f64> = frame
        .symbols
        .iter()
        .map(|s| crate::link::amplitude(*s) / crate::link::LEVEL_STD)
        .collect();

    let build = |ranges: Vec<std::ops::Range<usize>>| -> Result<WindowBatch> {
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        let mut centers = Vec::new();
        let mut targets_wide: Option<Vec<f64>> = None;
        let mut width = 0;
        for r in ranges {
            match make_windows(&x[r.clone()], &y[r.clone()], w, style) {
                Ok(batch) => {
                    width = batch.width;
                    inputs.extend_from_slice(&batch.inputs);
                    centers.extend(batch.centers.iter().map(|c| c + r.start));
                    targets.extend_from_slice(&batch.targets);
                    if let Some(tw) = batch.targets_wide {
                        targets_wide.get_or_insert_with(Vec::new).extend_from_slice(&tw);
                    }
                }
                Err(Error::InvalidParam(_)) => continue, // range shorter than window
                Err(e) => return Err(e),
            }
        }
        if width == 0 {
            return Err(Error::InvalidParam(
                "no split range long enough for the window".into(),
            ));
        }
        Ok(WindowBatch {
            inputs,
            targets,
            width,
            centers,
            targets_wide,
        })
    };

    Ok(SplitWindows {
        train: build(split.ranges(Split::Train))?,
        test: build(split.ranges(Split::Test))?,
        val: build(split.ranges(Split::Val))?,
    })
}
