//! Browser bindings for the PAM-4 PON equalizer laboratory.
//!
//! Three interactive operations, each returning JSON for the static demo
//! page to render:
//!
//! - [`pulse_broadening`]: chromatic-dispersion pulse spreading against
//!   the analytic width factor.
//! - [`link_eye`]: a short seeded link capture folded into eye-diagram
//!   traces, with the unequalized BER.
//! - [`equalizer_shootout`]: FFE vs a small FC-SCINet trained in the
//!   browser, with BERs and the frequency-calibration view of a window.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ponlab_core::data::{
    build_split_windows, frequency_calibrate, normalize, DatasetSplit, FcMode, WindowConfig,
    WindowStyle,
};
use ponlab_core::eq::{
    evaluate_ber_ensemble, ffe_equalize, train_model, AffineSlicer, FcScinetModel, FfeConfig,
    OptimizerChoice, ScinetConfig, TrainConfig,
};
use ponlab_core::link::{
    self, fiber_propagate, pam4, simulate_capture, FiberParams, LinkConfig, LinkParams,
    OpticalField, Scenario,
};
use ponlab_core::metrics::count_ber;

fn err_to_js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, JsValue> {
    serde_json::to_string(value).map_err(err_to_js)
}

#[derive(Serialize)]
struct PulseBroadeningOut {
    time_ps: Vec<f64>,
    input_power: Vec<f64>,
    output_power: Vec<f64>,
    measured_factor: f64,
    analytic_factor: f64,
    distance_km: f64,
}

/// Propagate a Gaussian pulse of 1/e half-width `t0_ps` over
/// `distance_km` of fiber with dispersion `d_ps_nm_km` and report the
/// width growth next to the analytic factor.
#[wasm_bindgen]
pub fn pulse_broadening(distance_km: f64, t0_ps: f64, d_ps_nm_km: f64) -> Result<String, JsValue> {
    if !(1.0..=200.0).contains(&t0_ps) || !(0.0..=200.0).contains(&distance_km) {
        return Err(err_to_js("t0 must be 1..200 ps, distance 0..200 km"));
    }
    let n = 4096;
    let fs = 2e12;
    let dt = 1.0 / fs;
    let t0 = t0_ps * 1e-12;
    let center = n as f64 / 2.0 * dt;
    let samples: Vec<ponlab_core::num_complex::Complex64> = (0..n)
        .map(|i| {
            let t = i as f64 * dt - center;
            ponlab_core::num_complex::Complex64::new((-0.5 * (t / t0).powi(2)).exp(), 0.0)
        })
        .collect();
    let field = OpticalField {
        samples,
        sample_rate_hz: fs,
        sps: 1,
    };
    let fiber = FiberParams {
        cd_ps_nm_km: d_ps_nm_km,
        loss_db_per_km: 0.0,
        cd_slope_ps_nm2_km: 0.0,
        ..Default::default()
    };
    let cfg = LinkConfig {
        distance_km,
        scenario: Scenario::Cd,
        ..Default::default()
    };
    let out = fiber_propagate(&field, &fiber, &cfg);

    let rms = |p: &[f64]| {
        let total: f64 = p.iter().sum();
        let mean: f64 = p.iter().enumerate().map(|(i, v)| i as f64 * v).sum::<f64>() / total;
        (p.iter()
            .enumerate()
            .map(|(i, v)| (i as f64 - mean).powi(2) * v)
            .sum::<f64>()
            / total)
            .sqrt()
    };
    let pin = field.power();
    let pout = out.power();
    let measured = rms(&pout) / rms(&pin);
    let b2z = fiber.beta2(cfg.wavelength_nm) * distance_km * 1000.0;
    let analytic = (1.0 + (b2z / (t0 * t0)).powi(2)).sqrt();

    let step = n / 512;
    let sel = |p: &[f64]| -> Vec<f64> { p.iter().step_by(step).copied().collect() };
    let time_ps: Vec<f64> = (0..n)
        .step_by(step)
        .map(|i| (i as f64 * dt - center) * 1e12)
        .collect();
    to_json(&PulseBroadeningOut {
        time_ps,
        input_power: sel(&pin),
        output_power: sel(&pout),
        measured_factor: measured,
        analytic_factor: analytic,
        distance_km,
    })
}

#[derive(Serialize)]
struct EyeOut {
    /// Eye traces: rows spanning two symbol periods of the received
    /// (normalized) waveform.
    traces: Vec<Vec<f64>>,
    sps: usize,
    ber_unequalized: f64,
    scenario: String,
    distance_km: f64,
}

/// Simulate a short capture and return eye-diagram traces of the
/// received electrical waveform plus the unequalized BER.
#[wasm_bindgen]
pub fn link_eye(scenario: &str, distance_km: f64, seed: u32) -> Result<String, JsValue> {
    if !(0.0..=30.0).contains(&distance_km) {
        return Err(err_to_js("distance must be 0..30 km"));
    }
    let scenario = parse_scenario(scenario);
    let n_symbols = 1 << 12;
    let mut params = LinkParams::default();
    params.link.scenario = scenario;
    params.link.distance_km = distance_km;
    params.link.sim_sps = 8;

    // run the waveform path by hand so the pre-decision waveform is
    // available for the eye
    let mut tx = params.tx.clone();
    let mut jit = params.jitter.clone();
    if scenario == Scenario::Cd {
        tx.eam_alpha_chirp = 0.0;
        jit.enabled = false;
    }
    let symbols = link::generate_rns_pam4(n_symbols, seed as u64, 0);
    let mut field =
        link::shape_and_modulate(&symbols, &tx, &params.link, &params.noise, seed as u64, 0)
            .map_err(err_to_js)?;
    if jit.enabled && scenario == Scenario::Realistic {
        field = link::apply_timing_jitter(&field, &jit, seed as u64, 0).0;
    }
    let field = fiber_propagate(&field, &params.fiber, &params.link);
    let pad = params.link.flat_pad_db(&params.fiber).map_err(err_to_js)?;
    let wave =
        link::detect(&field, &params.rx, pad, &params.noise, seed as u64, 0).map_err(err_to_js)?;
    let frame =
        link::synchronize_downsample(&wave, &symbols, params.link.sim_sps).map_err(err_to_js)?;

    let half = n_symbols / 2;
    let amps: Vec<f64> = symbols[..half].iter().map(|s| pam4::amplitude(*s)).collect();
    let slicer = AffineSlicer::fit(&frame.soft[..half], &amps);
    let decisions = slicer.decide(&frame.soft[half..]);
    let ber = count_ber(&decisions, &symbols[half..]).map_err(err_to_js)?.ber;

    let sps = params.link.sim_sps;
    let span = 2 * sps + 1;
    let n_traces = 160;
    let (wn, _, _) = normalize(&wave).map_err(err_to_js)?;
    let mut traces = Vec::with_capacity(n_traces);
    for k in 0..n_traces {
        let start = (frame.lag + (k + 8) * sps) % (wave.len() - span);
        traces.push(wn[start..start + span].to_vec());
    }
    to_json(&EyeOut {
        traces,
        sps,
        ber_unequalized: ber,
        scenario: scenario.to_string(),
        distance_km,
    })
}

#[derive(Serialize)]
struct ShootoutOut {
    ber_none: f64,
    ber_ffe: f64,
    ber_scinet: f64,
    scinet_val_curve: Vec<f64>,
    /// One received window with its frequency-calibration decomposition.
    fc_window: Vec<f64>,
    fc_smooth: Vec<f64>,
    fc_fluct: Vec<f64>,
    fc_pre: Vec<f64>,
    scenario: String,
    distance_km: f64,
}

/// Train a small FC-SCINet against a 21-tap FFE on a short capture and
/// compare bit error rates (browser-sized workload).
#[wasm_bindgen]
pub fn equalizer_shootout(scenario: &str, distance_km: f64, seed: u32) -> Result<String, JsValue> {
    if !(0.0..=30.0).contains(&distance_km) {
        return Err(err_to_js("distance must be 0..30 km"));
    }
    let scenario = parse_scenario(scenario);
    let n_symbols = 1 << 13;
    let mut params = LinkParams::default();
    params.link.scenario = scenario;
    params.link.distance_km = distance_km;
    params.link.sim_sps = 8;
    let frame = simulate_capture(&params, n_symbols, seed as u64, 0).map_err(err_to_js)?;
    let split = DatasetSplit::new(n_symbols, 512, seed as u64);

    // unequalized baseline
    let mut train_soft = Vec::new();
    let mut train_amp = Vec::new();
    for r in split.ranges(ponlab_core::data::Split::Train) {
        for i in r {
            train_soft.push(frame.soft[i]);
            train_amp.push(pam4::amplitude(frame.symbols[i]));
        }
    }
    let slicer = AffineSlicer::fit(&train_soft, &train_amp);
    let mut none_dec = Vec::new();
    let mut none_truth = Vec::new();
    for r in split.ranges(ponlab_core::data::Split::Test) {
        for i in r {
            none_dec.push(slicer.decide(&[frame.soft[i]])[0]);
            none_truth.push(frame.symbols[i]);
        }
    }
    let ber_none = count_ber(&none_dec, &none_truth).map_err(err_to_js)?.ber;

    // FFE-21
    let (soft_norm, _, _) = normalize(&frame.soft).map_err(err_to_js)?;
    let amps: Vec<f64> = frame.symbols.iter().map(|s| pam4::amplitude(*s)).collect();
    let fcfg = FfeConfig {
        training_symbols: 2000,
        ..FfeConfig::new(21)
    };
    let (ffe_out, _) = ffe_equalize(&soft_norm, &amps, &fcfg).map_err(err_to_js)?;
    let mut ffe_dec = Vec::new();
    let mut ffe_truth = Vec::new();
    for r in split.ranges(ponlab_core::data::Split::Test) {
        for i in r {
            if i >= fcfg.training_symbols {
                ffe_dec.push(pam4::slice_symbol(ffe_out[i]));
                ffe_truth.push(frame.symbols[i]);
            }
        }
    }
    let ber_ffe = count_ber(&ffe_dec, &ffe_truth).map_err(err_to_js)?.ber;

    // browser-sized FC-SCINet
    let scfg = ScinetConfig {
        window: 32,
        levels: 2,
        n_h: 4,
        conv_kernel: 3,
        output_span: 8,
        ..Default::default()
    };
    let wcfg = WindowConfig {
        scinet_window: 32,
        ..Default::default()
    };
    let windows =
        build_split_windows(&frame, &split, &wcfg, WindowStyle::Scinet).map_err(err_to_js)?;
    let model = FcScinetModel::new(scfg, seed as u64).map_err(err_to_js)?;
    let tc = TrainConfig {
        epochs: 6,
        optimizer: OptimizerChoice::Adam,
        learning_rate: 3e-3,
        lr_decay: 0.8,
        l2_coefficient: 1e-6,
        ..Default::default()
    };
    let report =
        train_model(&model, &windows.train, &windows.val, &tc, seed as u64).map_err(err_to_js)?;
    let ber_scinet = evaluate_ber_ensemble(&model, &windows.test)
        .map_err(err_to_js)?
        .ber;

    // frequency-calibration view of one test window
    let w0 = windows.test.row(0).to_vec();
    let pre = frequency_calibrate(&w0, 32, 3, FcMode::Paper).map_err(err_to_js)?;
    let mut smooth = vec![0.0; 32];
    for (i, s) in smooth.iter_mut().enumerate() {
        let mut acc = 0.0;
        for d in 0..3usize {
            let m = (i + d).max(1) - 1;
            acc += w0[m.min(31)];
        }
        *s = acc / 3.0;
    }
    let fluct: Vec<f64> = w0.iter().zip(smooth.iter()).map(|(x, s)| x - s).collect();

    to_json(&ShootoutOut {
        ber_none,
        ber_ffe,
        ber_scinet,
        scinet_val_curve: report.epochs.iter().map(|e| e.val_mse).collect(),
        fc_window: w0,
        fc_smooth: smooth,
        fc_fluct: fluct,
        fc_pre: pre,
        scenario: scenario.to_string(),
        distance_km,
    })
}

fn parse_scenario(s: &str) -> Scenario {
    match s {
        "CD" | "cd" => Scenario::Cd,
        _ => Scenario::Realistic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_broadening_json_sane() {
        let json = pulse_broadening(10.0, 10.0, 16.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let measured = v["measured_factor"].as_f64().unwrap();
        let analytic = v["analytic_factor"].as_f64().unwrap();
        assert!((measured - analytic).abs() / analytic < 0.02);
        assert!(analytic > 1.5);
    }

    #[test]
    fn link_eye_produces_traces() {
        let json = link_eye("CD", 5.0, 7).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["traces"].as_array().unwrap().len(), 160);
        assert!(v["ber_unequalized"].as_f64().unwrap() < 0.5);
    }

    #[test]
    fn shootout_runs_at_browser_scale() {
        let json = equalizer_shootout("CD", 5.0, 3).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(v["ber_none"].as_f64().unwrap() > v["ber_scinet"].as_f64().unwrap());
        assert_eq!(v["fc_window"].as_array().unwrap().len(), 32);
    }
}
