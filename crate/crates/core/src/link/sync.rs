//! Symbol-rate synchronization: cross-correlation lag recovery and
//! sampling-phase selection by the variance-of-means criterion.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

use super::pam4;

/// Aligned pairs of transmitted symbols and received 1-SpS soft samples.
#[derive(Debug, Clone)]
pub struct SymbolFrame {
    pub symbols: Vec<u8>,
    pub soft: Vec<f64>,
    /// Recovered integer lag (fine-grid samples) between the received
    /// waveform and the transmitted sequence.
    pub lag: usize,
}

impl SymbolFrame {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Circular cross-correlation via FFT; returns the lag maximizing the
/// correlation of `wave` against the ideal rectangular symbol waveform.
fn correlation_lag(wave: &[f64], symbols: &[u8], sps: usize) -> Result<usize> {
    let n = wave.len();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mean_w = wave.iter().sum::<f64>() / n as f64;
    let mut a: Vec<Complex64> = wave.iter().map(|w| Complex64::new(w - mean_w, 0.0)).collect();
    let mut b: Vec<Complex64> = Vec::with_capacity(n);
    let mut mean_i = 0.0;
    for s in symbols {
        mean_i += pam4::amplitude(*s);
    }
    mean_i /= symbols.len() as f64;
    for s in symbols {
        let amp = pam4::amplitude(*s) - mean_i;
        for _ in 0..sps {
            b.push(Complex64::new(amp, 0.0));
        }
    }
    fft.process(&mut a);
    fft.process(&mut b);
    let mut prod: Vec<Complex64> = a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).collect();
    ifft.process(&mut prod);

    let mut best = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for (i, p) in prod.iter().enumerate() {
        let v = p.re;
        sum += v;
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    let mean = sum / n as f64;
    let spread = prod.iter().map(|p| (p.re - mean).abs()).sum::<f64>() / n as f64;
    if spread <= 1e-12 * best_v.abs().max(1e-300) || !best_v.is_finite() || best_v <= mean {
        return Err(Error::SyncAmbiguous);
    }
    Ok(best)
}

/// Recover one soft sample per symbol, aligned with the transmitted
/// sequence.
///
/// The coarse lag comes from circular cross-correlation; the sampling
/// instant within ±sps/2 of it is chosen to maximize the variance of the
/// per-level means of the downsampled sequence (widest eye).
pub fn synchronize_downsample(
    rx_wave: &[f64],
    tx_symbols: &[u8],
    sps: usize,
) -> Result<SymbolFrame> {
    let n_sym = tx_symbols.len();
    if rx_wave.len() != n_sym * sps {
        return Err(Error::ShapeMismatch {
            context: format!(
                "rx waveform has {} samples, expected {} ({} symbols × {} sps)",
                rx_wave.len(),
                n_sym * sps,
                n_sym,
                sps
            ),
        });
    }
    let n = rx_wave.len();
    let coarse = correlation_lag(rx_wave, tx_symbols, sps)?;

    let half = (sps / 2) as isize;
    let mut best_lag = coarse;
    let mut best_metric = f64::NEG_INFINITY;
    // scan by increasing |offset| so ties keep the correlation lag
    let mut offsets: Vec<isize> = (-half..=half).collect();
    offsets.sort_by_key(|d| (d.abs(), *d));
    for doff in offsets {
        let lag = ((coarse as isize + doff).rem_euclid(n as isize)) as usize;
        // per-level means of the candidate downsampled sequence
        let mut sums = [0.0f64; 4];
        let mut counts = [0usize; 4];
        for (k, s) in tx_symbols.iter().enumerate() {
            let idx = (k * sps + sps / 2 + lag) % n;
            sums[*s as usize] += rx_wave[idx];
            counts[*s as usize] += 1;
        }
        let mut means = [0.0f64; 4];
        let mut grand = 0.0;
        for l in 0..4 {
            if counts[l] > 0 {
                means[l] = sums[l] / counts[l] as f64;
            }
            grand += means[l];
        }
        grand /= 4.0;
        let metric: f64 = means.iter().map(|m| (m - grand) * (m - grand)).sum();
        if metric > best_metric {
            best_metric = metric;
            best_lag = lag;
        }
    }

    let soft: Vec<f64> = (0..n_sym)
        .map(|k| rx_wave[(k * sps + sps / 2 + best_lag) % n])
        .collect();
    Ok(SymbolFrame {
        symbols: tx_symbols.to_vec(),
        soft,
        lag: best_lag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::pam4::generate_rns_pam4;

    fn ideal_wave(symbols: &[u8], sps: usize) -> Vec<f64> {
        let mut w = Vec::with_capacity(symbols.len() * sps);
        for s in symbols {
            for _ in 0..sps {
                w.push(pam4::amplitude(*s));
            }
        }
        w
    }

    #[test]
    fn output_length_equals_symbol_count() {
        let syms = generate_rns_pam4(512, 1, 0);
        let wave = ideal_wave(&syms, 8);
        let frame = synchronize_downsample(&wave, &syms, 8).unwrap();
        assert_eq!(frame.len(), 512);
    }

    #[test]
    fn noiseless_loop_has_zero_errors() {
        let syms = generate_rns_pam4(2048, 7, 0);
        let wave = ideal_wave(&syms, 16);
        let frame = synchronize_downsample(&wave, &syms, 16).unwrap();
        let errors = frame
            .soft
            .iter()
            .zip(frame.symbols.iter())
            .filter(|(soft, sym)| pam4::slice_symbol(**soft) != **sym)
            .count();
        assert_eq!(errors, 0);
    }

    #[test]
    fn constructed_delay_recovered() {
        let syms = generate_rns_pam4(1024, 3, 0);
        let wave = ideal_wave(&syms, 8);
        let delayed: Vec<f64> = (0..wave.len())
            .map(|i| wave[(i + wave.len() - 7) % wave.len()])
            .collect();
        let frame = synchronize_downsample(&delayed, &syms, 8).unwrap();
        assert_eq!(frame.lag, 7);
        let errors = frame
            .soft
            .iter()
            .zip(frame.symbols.iter())
            .filter(|(soft, sym)| pam4::slice_symbol(**soft) != **sym)
            .count();
        assert_eq!(errors, 0);
    }

    #[test]
    fn flat_correlation_is_an_error() {
        let syms = vec![2u8; 256];
        let wave = ideal_wave(&syms, 8);
        assert!(matches!(
            synchronize_downsample(&wave, &syms, 8),
            Err(Error::SyncAmbiguous)
        ));
    }
}
