//! End-to-end link invariants: reproducibility, convergence, closed loop.

use ponlab_core::eq::AffineSlicer;
use ponlab_core::link::{
    fiber, pam4, simulate_capture, LinkParams, NoiseSwitches, Scenario,
};
use ponlab_core::metrics::count_ber;

#[test]
fn capture_bit_identical_across_reruns() {
    let mut params = LinkParams::default();
    params.link.scenario = Scenario::Realistic;
    params.link.distance_km = 5.0;
    let a = simulate_capture(&params, 1 << 12, 7, 0).unwrap();
    let b = simulate_capture(&params, 1 << 12, 7, 0).unwrap();
    assert_eq!(a.symbols, b.symbols);
    for (x, y) in a.soft.iter().zip(b.soft.iter()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn different_captures_differ() {
    let params = LinkParams::default();
    let a = simulate_capture(&params, 1 << 12, 7, 0).unwrap();
    let b = simulate_capture(&params, 1 << 12, 7, 1).unwrap();
    assert_ne!(a.symbols, b.symbols);
}

#[test]
fn noiseless_b2b_zero_errors() {
    let mut params = LinkParams::default();
    params.link.distance_km = 0.0;
    params.noise = NoiseSwitches::all_off();
    let frame = simulate_capture(&params, 1 << 12, 3, 0).unwrap();
    let amps: Vec<f64> = frame
        .symbols
        .iter()
        .map(|s| pam4::amplitude(*s))
        .collect();
    let slicer = AffineSlicer::fit(&frame.soft, &amps);
    let report = count_ber(&slicer.decide(&frame.soft), &frame.symbols).unwrap();
    assert_eq!(report.bit_errors, 0);
}

#[test]
fn halving_step_converged_in_realistic_scenario() {
    // full Realistic waveform path, two step sizes, < 1e-3 relative RMS
    let mut params = LinkParams::default();
    params.link.scenario = Scenario::Realistic;
    params.link.distance_km = 5.0;
    params.noise = NoiseSwitches::all_off();
    params.tx.laser_linewidth_hz = 0.0;

    let symbols = ponlab_core::link::generate_rns_pam4(1 << 10, 5, 0);
    let field = ponlab_core::link::shape_and_modulate(
        &symbols,
        &params.tx,
        &params.link,
        &params.noise,
        5,
        0,
    )
    .unwrap();

    let coarse = {
        let mut f = params.fiber.clone();
        f.step_km = 0.25;
        fiber::fiber_propagate(&field, &f, &params.link)
    };
    let fine = {
        let mut f = params.fiber.clone();
        f.step_km = 0.125;
        fiber::fiber_propagate(&field, &f, &params.link)
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in coarse.samples.iter().zip(fine.samples.iter()) {
        num += (a - b).norm_sqr();
        den += a.norm_sqr();
    }
    let rel = (num / den).sqrt();
    assert!(rel < 1e-3, "step halving changes output by {rel:.2e}");
}

#[test]
fn cd_scenario_forces_kerr_and_chirp_off() {
    // CD output must be independent of n2 and chirp settings
    let n = 1 << 12;
    let mut a = LinkParams::default();
    a.link.scenario = Scenario::Cd;
    a.link.distance_km = 5.0;
    let mut b = a.clone();
    b.fiber.n2_m2_per_w = 0.0;
    b.tx.eam_alpha_chirp = 0.3;
    b.jitter.rms_ui = 0.4;
    let fa = simulate_capture(&a, n, 11, 0).unwrap();
    let fb = simulate_capture(&b, n, 11, 0).unwrap();
    for (x, y) in fa.soft.iter().zip(fb.soft.iter()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn ber_grows_with_distance_under_cd() {
    let mut bers = Vec::new();
    for dist in [0.0, 5.0, 9.0] {
        let mut params = LinkParams::default();
        params.link.scenario = Scenario::Cd;
        params.link.distance_km = dist;
        let frame = simulate_capture(&params, 1 << 13, 21, 0).unwrap();
        let amps: Vec<f64> = frame
            .symbols
            .iter()
            .map(|s| pam4::amplitude(*s))
            .collect();
        let half = frame.len() / 2;
        let slicer = AffineSlicer::fit(&frame.soft[..half], &amps[..half]);
        let report = count_ber(&slicer.decide(&frame.soft[half..]), &frame.symbols[half..]).unwrap();
        bers.push(report.ber);
    }
    assert!(bers[0] < bers[1] && bers[1] < bers[2], "bers {bers:?}");
}
