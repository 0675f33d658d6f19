//! APD/TIA receiver: square-law detection, shot/thermal/amplifier noise,
//! transimpedance, post-amplification and electrical filtering.

use crate::error::Result;
use crate::rng::Stream;

use super::bessel;
use super::field::OpticalField;
use super::{NoiseSwitches, ReceiverParams};

const Q_ELECTRON: f64 = 1.602_176_634e-19;

/// McIntyre excess-noise factor F(M) = k·M + (1−k)·(2 − 1/M).
pub fn excess_noise_factor(gain: f64, ionization_k: f64) -> f64 {
    ionization_k * gain + (1.0 - ionization_k) * (2.0 - 1.0 / gain)
}

/// Detect an optical field after flat-padding it by `pad_db` so the total
/// path loss matches the OPL budget. Returns the post-amplifier voltage
/// waveform at the simulation rate.
pub fn detect(
    field: &OpticalField,
    rx: &ReceiverParams,
    pad_db: f64,
    noise: &NoiseSwitches,
    master_seed: u64,
    capture: u64,
) -> Result<Vec<f64>> {
    let fs = field.sample_rate_hz;
    let pad_lin = 10f64.powf(-pad_db / 10.0);
    let r = rx.apd_responsivity_a_per_w;
    let m = rx.apd_gain;
    let f_excess = excess_noise_factor(m, rx.ionization_k);
    // white-noise per-sample variance = one-sided PSD × (fs/2)
    let half_fs = fs / 2.0;

    let mut current: Vec<f64> = field
        .samples
        .iter()
        .map(|s| r * m * (s.norm_sqr() * pad_lin))
        .collect();

    if noise.shot_noise {
        let mut rng = Stream::new(master_seed, "shot-noise", capture);
        for i in current.iter_mut() {
            // PSD 2q·R·M²·F·P with P the instantaneous optical power;
            // R·M²·F·P = M·F·(signal current)
            let psd = 2.0 * Q_ELECTRON * m * f_excess * i.abs();
            *i += (psd * half_fs).sqrt() * rng.gauss();
        }
    }
    if noise.thermal_noise {
        let mut rng = Stream::new(master_seed, "thermal-noise", capture);
        let sigma = rx.thermal_noise_a_per_rthz * half_fs.sqrt();
        for i in current.iter_mut() {
            *i += sigma * rng.gauss();
        }
    }
    if noise.postamp_noise {
        let mut rng = Stream::new(master_seed, "postamp-noise", capture);
        let sigma = rx.postamp_noise_a_per_rthz * half_fs.sqrt();
        for i in current.iter_mut() {
            *i += sigma * rng.gauss();
        }
    }

    let gain_v = 10f64.powf(rx.postamp_gain_db / 20.0);
    let mut voltage: Vec<f64> = current.iter().map(|i| i * rx.tia_ohms * gain_v).collect();
    bessel::filter_real(&mut voltage, fs, rx.filter_cutoff_hz)?;
    Ok(voltage)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn excess_noise_reference_value() {
        // F(8) with k = 0.4: 0.4·8 + 0.6·(2 − 1/8) = 4.325
        assert!((excess_noise_factor(8.0, 0.4) - 4.325).abs() < 1e-12);
    }

    #[test]
    fn noiseless_flat_field_proportional_to_power() {
        let rx = ReceiverParams::default();
        let n = 1024;
        let p_in: f64 = 1.35e-5; // W
        let field = OpticalField {
            samples: vec![Complex64::new(p_in.sqrt(), 0.0); n],
            sample_rate_hz: 800e9,
            sps: 16,
        };
        let pad_db = 3.0;
        let v = detect(&field, &rx, pad_db, &NoiseSwitches::all_off(), 1, 0).unwrap();
        let gain = rx.apd_responsivity_a_per_w
            * rx.apd_gain
            * rx.tia_ohms
            * 10f64.powf(rx.postamp_gain_db / 20.0);
        let expect = p_in * 10f64.powf(-pad_db / 10.0) * gain;
        for (i, vi) in v.iter().enumerate() {
            assert!(
                (vi - expect).abs() < 1e-9 * expect,
                "sample {i}: {vi} vs {expect}"
            );
        }
    }

    #[test]
    fn dark_noise_variance_matches_psd_integral() {
        let rx = ReceiverParams::default();
        let n = 1 << 16;
        let field = OpticalField {
            samples: vec![Complex64::new(0.0, 0.0); n],
            sample_rate_hz: 800e9,
            sps: 16,
        };
        let noise = NoiseSwitches {
            shot_noise: false,
            driver_noise: false,
            laser_phase_noise: false,
            rin: false,
            thermal_noise: true,
            postamp_noise: true,
        };
        let v = detect(&field, &rx, 28.7, &noise, 77, 0).unwrap();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;

        // oracle: current-noise PSD × filter noise bandwidth × (TIA·G)²
        let psd = rx.thermal_noise_a_per_rthz.powi(2) + rx.postamp_noise_a_per_rthz.powi(2);
        let enbw = bessel::noise_bandwidth(rx.filter_cutoff_hz);
        let gain = rx.tia_ohms * 10f64.powf(rx.postamp_gain_db / 20.0);
        let expect = psd * enbw * gain * gain;
        assert!(
            (var - expect).abs() / expect < 0.10,
            "dark variance {var:.3e} vs PSD integral {expect:.3e}"
        );
    }
}
