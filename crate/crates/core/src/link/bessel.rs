//! 4th-order Bessel low-pass applied in the frequency domain.
//!
//! The analog prototype is the delay-normalized reverse Bessel polynomial
//! θ4(s) = s⁴ + 10s³ + 45s² + 105s + 105 with H(s) = 105/θ4(s). The
//! frequency axis is scaled so |H| is −3 dB at the configured cutoff
//! (ω_3dB = 2.11391767 for n = 4).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// −3 dB angular frequency of the delay-normalized 4th-order prototype.
const W3DB_N4: f64 = 2.113_917_674_904_215;

/// Complex response of the normalized prototype at s = j·w.
fn prototype_response(w: f64) -> Complex64 {
    let s = Complex64::new(0.0, w);
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let denom = s4 + 10.0 * s3 + 45.0 * s2 + 105.0 * s + Complex64::new(105.0, 0.0);
    Complex64::new(105.0, 0.0) / denom
}

/// Response at physical frequency `f` for a filter cut off at `cutoff_hz`.
pub fn response(f: f64, cutoff_hz: f64) -> Complex64 {
    prototype_response(W3DB_N4 * f / cutoff_hz)
}

/// Equivalent noise bandwidth ∫|H(f)|² df (one-sided, Hz), by trapezoid
/// quadrature out to 8× the cutoff.
pub fn noise_bandwidth(cutoff_hz: f64) -> f64 {
    let n = 8192;
    let fmax = 8.0 * cutoff_hz;
    let df = fmax / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let h2 = response(i as f64 * df, cutoff_hz).norm_sqr();
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * h2;
    }
    acc * df
}

/// Filter a real waveform in place. Errors when the cutoff exceeds the
/// Nyquist frequency of the sampling grid.
pub fn filter_real(x: &mut [f64], sample_rate_hz: f64, cutoff_hz: f64) -> Result<()> {
    if cutoff_hz > sample_rate_hz / 2.0 {
        return Err(Error::InvalidParam(format!(
            "filter cutoff {:.1} GHz above Nyquist {:.1} GHz; raise sim_sps",
            cutoff_hz / 1e9,
            sample_rate_hz / 2e9
        )));
    }
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let df = sample_rate_hz / n as f64;
    for (k, b) in buf.iter_mut().enumerate() {
        let f = if k <= n / 2 {
            k as f64 * df
        } else {
            (k as f64 - n as f64) * df
        };
        *b *= response(f, cutoff_hz);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let inv_n = 1.0 / n as f64;
    for (xi, b) in x.iter_mut().zip(buf.iter()) {
        *xi = b.re * inv_n;
    }
    Ok(())
}
