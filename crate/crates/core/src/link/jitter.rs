//! Residual timing jitter: per-symbol Gaussian shifts of the level
//! transitions, realized as a piecewise-linear time warp on the fine
//! grid.

use num_complex::Complex64;

use crate::rng::Stream;

use super::field::OpticalField;
use super::JitterParams;

#[derive(Debug, Clone)]
pub struct JitterStats {
    /// Applied shift of each interior transition, in unit intervals.
    pub shifts_ui: Vec<f64>,
    /// Number of raw draws clipped at ±0.5 UI.
    pub clipped: usize,
}

/// Shift each interior symbol transition by a Gaussian draw (std
/// `rms_ui`), optionally correlated across neighbouring transitions by a
/// Gaussian kernel of width `shape_std` symbols and rescaled back to
/// `rms_ui`. The leftmost and rightmost transitions are never moved.
/// Shifts beyond ±0.5 UI are clipped.
pub fn apply_timing_jitter(
    field: &OpticalField,
    j: &JitterParams,
    master_seed: u64,
    capture: u64,
) -> (OpticalField, JitterStats) {
    let n_sym = field.n_symbols();
    let sps = field.sps;
    if !j.enabled || j.rms_ui == 0.0 || n_sym < 3 {
        return (
            field.clone(),
            JitterStats {
                shifts_ui: vec![0.0; n_sym.saturating_sub(1)],
                clipped: 0,
            },
        );
    }

    let mut rng = Stream::new(master_seed, "jitter", capture);
    let n_tr = n_sym - 1; // interior transition count
    let mut shifts: Vec<f64> = (0..n_tr).map(|_| rng.gauss()).collect();

    // correlate neighbouring transitions, then restore unit variance
    if j.shape_std > 0.0 {
        let half = (3.0 * j.shape_std).ceil() as isize;
        let kernel: Vec<f64> = (-half..=half)
            .map(|d| (-0.5 * (d as f64 / j.shape_std).powi(2)).exp())
            .collect();
        let ksum: f64 = kernel.iter().sum();
        let kernel: Vec<f64> = kernel.iter().map(|k| k / ksum).collect();
        // variance of the smoothed white process is Σk²
        let var_gain: f64 = kernel.iter().map(|k| k * k).sum();
        let renorm = 1.0 / var_gain.sqrt();
        let src = shifts.clone();
        for (i, s) in shifts.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (kk, k) in kernel.iter().enumerate() {
                let idx = i as isize + kk as isize - half;
                if idx >= 0 && (idx as usize) < src.len() {
                    acc += k * src[idx as usize];
                }
            }
            *s = acc * renorm;
        }
    }

    let mut clipped = 0;
    for s in &mut shifts {
        *s *= j.rms_ui;
        if s.abs() > 0.5 {
            *s = s.clamp(-0.5, 0.5);
            clipped += 1;
        }
    }
    if j.skip_boundary_transitions {
        shifts[0] = 0.0;
        shifts[n_tr - 1] = 0.0;
    }

    // Jittered boundary positions on the fine grid. Boundary k sits
    // nominally at sample k·sps; the warp maps output time back onto
    // input time segment by segment.
    let n = field.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let boundary = |k: usize| -> f64 {
        if k == 0 || k == n_sym {
            (k * sps) as f64
        } else {
            (k * sps) as f64 + shifts[k - 1] * sps as f64
        }
    };
    for k in 0..n_sym {
        let out_lo = boundary(k);
        let out_hi = boundary(k + 1);
        let in_lo = (k * sps) as f64;
        let in_hi = ((k + 1) * sps) as f64;
        let scale = (in_hi - in_lo) / (out_hi - out_lo);
        let first = out_lo.ceil() as usize;
        let last = (out_hi.ceil() as usize).min(n);
        for idx in first..last {
            let t_in = in_lo + (idx as f64 - out_lo) * scale;
            let i0 = t_in.floor() as usize;
            let frac = t_in - i0 as f64;
            let a = field.samples[i0.min(n - 1)];
            let b = field.samples[(i0 + 1).min(n - 1)];
            out[idx] = a + (b - a) * frac;
        }
    }

    (
        OpticalField {
            samples: out,
            sample_rate_hz: field.sample_rate_hz,
            sps,
        },
        JitterStats {
            shifts_ui: shifts,
            clipped,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ramp_field(n_sym: usize, sps: usize) -> OpticalField {
        let samples: Vec<Complex64> = (0..n_sym * sps)
            .map(|i| Complex64::new(i as f64, -(i as f64) * 0.5))
            .collect();
        OpticalField {
            samples,
            sample_rate_hz: 1.0,
            sps,
        }
    }

    #[test]
    fn zero_rms_is_bit_identical() {
        let f = ramp_field(64, 8);
        let j = JitterParams {
            rms_ui: 0.0,
            ..Default::default()
        };
        let (out, stats) = apply_timing_jitter(&f, &j, 9, 0);
        assert_eq!(stats.clipped, 0);
        for (a, b) in f.samples.iter().zip(out.samples.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn shift_std_matches_rms_ui() {
        let f = ramp_field(1 << 14, 4);
        let j = JitterParams::default();
        let (_, stats) = apply_timing_jitter(&f, &j, 21, 0);
        let n = stats.shifts_ui.len() as f64;
        let mean = stats.shifts_ui.iter().sum::<f64>() / n;
        let var = stats
            .shifts_ui
            .iter()
            .map(|s| (s - mean) * (s - mean))
            .sum::<f64>()
            / n;
        let std = var.sqrt();
        assert!(
            (std - 0.1).abs() / 0.1 < 0.05,
            "applied shift std {std} vs 0.1 UI"
        );
    }

    #[test]
    fn boundary_transitions_pinned() {
        for seed in 0..5 {
            let f = ramp_field(256, 8);
            let j = JitterParams::default();
            let (_, stats) = apply_timing_jitter(&f, &j, seed, 0);
            assert_eq!(stats.shifts_ui[0], 0.0);
            assert_eq!(*stats.shifts_ui.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn waveform_length_preserved() {
        let f = ramp_field(128, 16);
        let (out, _) = apply_timing_jitter(&f, &JitterParams::default(), 5, 0);
        assert_eq!(out.len(), f.len());
    }
}
