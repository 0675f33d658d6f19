// Scratch probe: trained-model BER at the acceptance-critical points (deleted before release).

use ponlab_core::data::{build_split_windows, DatasetSplit, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    evaluate_ber, train_model, AffineSlicer, DnnConfig, DnnModel, FcScinetModel, OptimizerChoice,
    ScinetConfig, TrainConfig,
};
use ponlab_core::link::{pam4, simulate_capture, LinkParams, Scenario};
use ponlab_core::metrics::count_ber;
use std::time::Instant;

fn evaluate_point(scenario: Scenario, dist: f64, n_symbols: usize, seed: u64, epochs: usize) {
    let split = DatasetSplit::new(n_symbols, 2048, seed);
    let mut p = LinkParams::default();
    p.link.scenario = scenario;
    p.link.distance_km = dist;
    let frame = simulate_capture(&p, n_symbols, seed, 0).unwrap();

    let wcfg = WindowConfig::default();
    let dnn_w = build_split_windows(&frame, &split, &wcfg, WindowStyle::CenteredDnn).unwrap();
    let sci_w = build_split_windows(&frame, &split, &wcfg, WindowStyle::Scinet).unwrap();

    let train_soft: Vec<f64> = dnn_w.train.centers.iter().map(|c| frame.soft[*c]).collect();
    let train_amp: Vec<f64> = dnn_w
        .train
        .centers
        .iter()
        .map(|c| pam4::amplitude(frame.symbols[*c]))
        .collect();
    let slicer = AffineSlicer::fit(&train_soft, &train_amp);
    let test_soft: Vec<f64> = dnn_w.test.centers.iter().map(|c| frame.soft[*c]).collect();
    let test_sym: Vec<u8> = dnn_w.test.centers.iter().map(|c| frame.symbols[*c]).collect();
    let none = count_ber(&slicer.decide(&test_soft), &test_sym).unwrap().ber;

    let t0 = Instant::now();
    let dnn = DnnModel::new(DnnConfig::default(), seed);
    let tc_dnn = TrainConfig {
        epochs,
        optimizer: OptimizerChoice::Adam,
        learning_rate: 1e-3,
        lr_decay: 0.85,
        l2_coefficient: 1e-6,
        ..Default::default()
    };
    train_model(&dnn, &dnn_w.train, &dnn_w.val, &tc_dnn, seed).unwrap();
    let dnn_ber = evaluate_ber(&dnn, &dnn_w.test).unwrap().ber;
    let t_dnn = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let sci = FcScinetModel::new(
        ScinetConfig {
            n_h: 8,
            ..Default::default()
        },
        seed,
    )
    .unwrap();
    let tc_sci = TrainConfig {
        epochs,
        optimizer: OptimizerChoice::Adam,
        learning_rate: 3e-3,
        lr_decay: 0.8,
        l2_coefficient: 1e-6,
        ..Default::default()
    };
    let rep = train_model(&sci, &sci_w.train, &sci_w.val, &tc_sci, seed).unwrap();
    let sci_ber = evaluate_ber(&sci, &sci_w.test).unwrap().ber;
    println!(
        "{scenario} d={dist}: none {none:.2e}  dnn {dnn_ber:.2e} [{t_dnn:.0}s]  scinet {sci_ber:.2e} (val {:.4}) [{:.0}s]",
        rep.best_val_mse,
        t1.elapsed().as_secs_f64()
    );
}

fn main() {
    let n = 1 << 15;
    let seed = 42;
    evaluate_point(Scenario::Cd, 9.0, n, seed, 18);
    evaluate_point(Scenario::Cd, 11.0, n, seed, 18);
    evaluate_point(Scenario::Realistic, 5.0, n, seed, 18);
}
