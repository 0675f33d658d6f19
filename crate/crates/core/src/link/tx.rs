//! Transmitter: rectangular PAM-4 drive, driver noise, Bessel shaping,
//! EAM transmittance with chirp, laser phase noise and RIN.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::Result;
use crate::rng::Stream;

use super::bessel;
use super::field::OpticalField;
use super::{LinkConfig, NoiseSwitches, RinModel, TransmitterParams};

/// Static EAM power transmittance (linear) for a normalized drive level
/// v ∈ [0,1]. The dB attenuation follows a smoothstep S-curve between
/// −extinction (v=0) and 0 dB (v=1); the zero slope at both rails gives
/// the compressive saturation of a real absorption modulator. Drive
/// values outside [0,1] (filter overshoot) saturate smoothly.
pub fn eam_transmittance(v: f64, extinction_db: f64) -> f64 {
    let v = v.clamp(0.0, 1.0);
    let s = v * v * (3.0 - 2.0 * v);
    10f64.powf(-extinction_db * (1.0 - s) / 10.0)
}

/// Invert the transmittance by bisection (it is strictly monotone on
/// [0,1]).
fn eam_drive_for(target_t: f64, extinction_db: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if eam_transmittance(mid, extinction_db) < target_t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Drive levels per symbol such that the static optical power levels come
/// out equally spaced (the usual PAM-4 level pre-distortion at the DSP).
pub fn predistorted_drive_levels(extinction_db: f64) -> [f64; 4] {
    let t_min = 10f64.powf(-extinction_db / 10.0);
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        let target = t_min + (1.0 - t_min) * k as f64 / 3.0;
        *o = eam_drive_for(target, extinction_db);
    }
    out
}

/// Normalized relaxation-oscillation magnitude response of the RIN
/// spectrum (peak = 1): |H(f)|² = f_r⁴/((f²−f_r²)² + (γf)²) scaled by its
/// peak value.
fn rin_shape_sq(f: f64, f_r: f64, gamma: f64) -> f64 {
    let fr2 = f_r * f_r;
    let f2 = f * f;
    let raw = fr2 * fr2 / ((f2 - fr2) * (f2 - fr2) + gamma * gamma * f2);
    // peak over frequency: at resonance when underdamped, at DC otherwise
    let denom_res = gamma * gamma * (fr2 - gamma * gamma / 4.0);
    let peak = if denom_res > 0.0 {
        (fr2 * fr2 / denom_res).max(1.0)
    } else {
        1.0
    };
    raw / peak
}

/// Relative power fluctuation δ(t) with one-sided PSD
/// `rin_lin · |H(f)|²` (peak density = rin_lin).
fn shaped_rin_fluctuation(
    n: usize,
    fs: f64,
    rin_lin: f64,
    f_r: f64,
    gamma: f64,
    rng: &mut Stream,
) -> Vec<f64> {
    let mut buf: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gauss(), 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let df = fs / n as f64;
    for (k, b) in buf.iter_mut().enumerate() {
        let f = if k <= n / 2 {
            k as f64 * df
        } else {
            (n as f64 - k as f64) * df
        };
        *b *= rin_shape_sq(f, f_r, gamma).sqrt();
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    // unit-variance white input has one-sided PSD 2/fs
    let scale = (rin_lin * fs / 2.0).sqrt() / n as f64;
    buf.iter().map(|b| b.re * scale).collect()
}

/// Rectangular pulse shaping, driver noise, 4th-order Bessel electrical
/// filter, EAM transmittance + chirp, laser phase noise and RIN. The
/// output is normalized so its mean power equals the configured launch
/// power.
pub fn shape_and_modulate(
    symbols: &[u8],
    tx: &TransmitterParams,
    cfg: &LinkConfig,
    noise: &NoiseSwitches,
    master_seed: u64,
    capture: u64,
) -> Result<OpticalField> {
    let sps = cfg.sim_sps;
    let fs = cfg.sample_rate_hz();
    let n = symbols.len() * sps;
    let dt = 1.0 / fs;

    // rectangular drive at pre-distorted levels
    let levels = predistorted_drive_levels(tx.eam_extinction_db);
    let mut drive = vec![0.0f64; n];
    for (k, s) in symbols.iter().enumerate() {
        let v = levels[*s as usize];
        drive[k * sps..(k + 1) * sps].iter_mut().for_each(|d| *d = v);
    }

    if noise.driver_noise {
        let mut rng = Stream::new(master_seed, "driver-noise", capture);
        let sigma = tx.drive_noise_a_per_rthz * (fs / 2.0).sqrt() / tx.drive_swing_a;
        for d in &mut drive {
            *d += sigma * rng.gauss();
        }
    }

    bessel::filter_real(&mut drive, fs, tx.filter_cutoff_hz)?;

    // EAM: power transmittance + phase chirp φ = (α/2)·ln(P/Pref)
    let mut power: Vec<f64> = drive
        .iter()
        .map(|v| eam_transmittance(*v, tx.eam_extinction_db))
        .collect();
    let mean_p = power.iter().sum::<f64>() / power.len() as f64;

    if noise.rin {
        let mut rng = Stream::new(master_seed, "rin", capture);
        let rin_lin = 10f64.powf(tx.rin_db_per_hz / 10.0);
        match tx.rin_model {
            RinModel::White => {
                let sigma = (rin_lin * fs / 2.0).sqrt();
                for p in &mut power {
                    *p *= (1.0 + sigma * rng.gauss()).max(0.0);
                }
            }
            RinModel::Shaped => {
                let delta = shaped_rin_fluctuation(
                    n,
                    fs,
                    rin_lin,
                    tx.rin_relaxation_hz,
                    tx.rin_damping_hz,
                    &mut rng,
                );
                for (p, d) in power.iter_mut().zip(delta.iter()) {
                    *p *= (1.0 + d).max(0.0);
                }
            }
        }
    }

    let mut phase = vec![0.0f64; n];
    if tx.eam_alpha_chirp != 0.0 {
        for (ph, p) in phase.iter_mut().zip(drive.iter()) {
            let pp = eam_transmittance(*p, tx.eam_extinction_db);
            *ph += 0.5 * tx.eam_alpha_chirp * (pp / mean_p).ln();
        }
    }
    if noise.laser_phase_noise && tx.laser_linewidth_hz > 0.0 {
        let mut rng = Stream::new(master_seed, "laser-phase", capture);
        let step_std = (2.0 * std::f64::consts::PI * tx.laser_linewidth_hz * dt).sqrt();
        let mut acc = 0.0;
        for ph in phase.iter_mut() {
            acc += step_std * rng.gauss();
            *ph += acc;
        }
    }

    let samples: Vec<Complex64> = power
        .iter()
        .zip(phase.iter())
        .map(|(p, ph)| Complex64::from_polar(p.max(0.0).sqrt(), *ph))
        .collect();

    let mut field = OpticalField {
        samples,
        sample_rate_hz: fs,
        sps,
    };
    let lop_w = 10f64.powf((cfg.lop_dbm - 30.0) / 10.0);
    field.normalize_mean_power(lop_w);
    Ok(field)
}
