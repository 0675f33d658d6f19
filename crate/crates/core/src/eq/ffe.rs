//! Decision-directed feed-forward equalizer adapted by LMS.
//!
//! A symbol-spaced FIR with centered taps, trained on a known preamble
//! and then switched to decision-directed updates against the nearest
//! PAM-4 level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::pam4;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FfeConfig {
    /// FIR length; must be odd so the main tap is centered.
    pub n_taps: usize,
    /// LMS step size.
    pub mu: f64,
    /// Preamble length with known symbols before decision-directed mode.
    pub training_symbols: usize,
}

impl FfeConfig {
    pub fn new(n_taps: usize) -> FfeConfig {
        FfeConfig {
            n_taps,
            mu: 1e-3,
            training_symbols: 4000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_taps % 2 == 0 {
            return Err(Error::InvalidParam(format!(
                "FFE taps must be odd, got {}",
                self.n_taps
            )));
        }
        if self.mu < 0.0 {
            return Err(Error::InvalidParam("mu must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FfeHistory {
    /// (symbol index, tap vector) snapshots, every 1000 updates.
    pub snapshots: Vec<(usize, Vec<f64>)>,
    pub final_taps: Vec<f64>,
}

/// Run the equalizer over a synchronized soft-sample sequence.
///
/// `soft` is the (normalized) receiver output at 1 SpS; `targets` the
/// transmitted amplitudes (−3, −1, +1, +3), used only for the first
/// `training_symbols` updates. Returns the equalized sequence (amplitude
/// domain) and tap history. Tap energy above 1e12 aborts with the step
/// index.
pub fn ffe_equalize(soft: &[f64], targets: &[f64], cfg: &FfeConfig) -> Result<(Vec<f64>, FfeHistory)> {
    cfg.validate()?;
    if soft.len() != targets.len() {
        return Err(Error::ShapeMismatch {
            context: format!("ffe: {} samples vs {} targets", soft.len(), targets.len()),
        });
    }
    if soft.len() < cfg.n_taps {
        return Err(Error::InvalidParam(format!(
            "sequence of {} shorter than {} taps",
            soft.len(),
            cfg.n_taps
        )));
    }
    let t = cfg.n_taps;
    let half = t / 2;
    let n = soft.len();
    // center spike init
    let mut w = vec![0.0f64; t];
    w[half] = 1.0;

    let window = |n_idx: usize, k: usize| -> f64 {
        // replicate padding at the sequence edges
        let idx = (n_idx + k).max(half) - half;
        soft[idx.min(n - 1)]
    };

    let mut out = vec![0.0f64; n];
    let mut history = FfeHistory {
        snapshots: Vec::new(),
        final_taps: Vec::new(),
    };
    for i in 0..n {
        let mut y = 0.0;
        for k in 0..t {
            y += w[k] * window(i, k);
        }
        out[i] = y;
        // gear shift: a smaller step in decision-directed mode keeps the
        // taps from wandering on sliced errors
        let (desired, mu) = if i < cfg.training_symbols {
            (targets[i], cfg.mu)
        } else {
            (pam4::amplitude(pam4::slice_symbol(y)), cfg.mu / 8.0)
        };
        let e = desired - y;
        if cfg.mu != 0.0 {
            for k in 0..t {
                w[k] += mu * e * window(i, k);
            }
            if i % 1000 == 0 {
                let norm2: f64 = w.iter().map(|x| x * x).sum();
                if norm2 > 1e12 {
                    return Err(Error::FfeDiverged {
                        step: i,
                        norm: norm2.sqrt(),
                    });
                }
                history.snapshots.push((i, w.clone()));
            }
        }
    }
    history.final_taps = w;
    Ok((out, history))
}
