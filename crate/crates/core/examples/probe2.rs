// Scratch probe: noise-floor and training calibration (deleted before release).

use ponlab_core::data::{build_split_windows, DatasetSplit, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    evaluate_ber, train_model, AffineSlicer, DnnConfig, DnnModel, FcScinetModel, OptimizerChoice,
    ScinetConfig, TrainConfig,
};
use ponlab_core::link::{pam4, simulate_capture, LinkParams, Scenario};
use ponlab_core::metrics::count_ber;
use std::time::Instant;

fn none_ber(frame: &ponlab_core::link::SymbolFrame, split: &DatasetSplit) -> f64 {
    let w = WindowConfig::default();
    let dnn_w = build_split_windows(frame, split, &w, WindowStyle::CenteredDnn).unwrap();
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
    count_ber(&slicer.decide(&test_soft), &test_sym).unwrap().ber
}

fn main() {
    let n_symbols = 1 << 15;
    let seed = 42;
    let split = DatasetSplit::new(n_symbols, 2048, seed);

    println!("--- noise floor vs rx cutoff and extinction (Realistic, 0 km and 5 km) ---");
    for (rx_ghz, er_db) in [(37.5, 10.0), (30.0, 10.0), (25.0, 10.0), (25.0, 13.0), (28.0, 12.0)] {
        for dist in [0.0, 5.0] {
            let mut p = LinkParams::default();
            p.link.scenario = Scenario::Realistic;
            p.link.distance_km = dist;
            p.rx.filter_cutoff_hz = rx_ghz * 1e9;
            p.tx.eam_extinction_db = er_db;
            let frame = simulate_capture(&p, n_symbols, seed, 0).unwrap();
            let ber = none_ber(&frame, &split);
            print!("  rx {rx_ghz:4.1} GHz er {er_db:4.1} dB d={dist}: none {ber:.2e}");
        }
        println!();
    }

    println!("--- CD@9km training study (rx 30 GHz) ---");
    let mut p = LinkParams::default();
    p.link.scenario = Scenario::Cd;
    p.link.distance_km = 9.0;
    p.rx.filter_cutoff_hz = 30.0e9;
    let frame = simulate_capture(&p, n_symbols, seed, 0).unwrap();
    println!("  none: {:.2e}", none_ber(&frame, &split));

    let wcfg = WindowConfig::default();
    let dnn_w = build_split_windows(&frame, &split, &wcfg, WindowStyle::CenteredDnn).unwrap();
    let sci_w = build_split_windows(&frame, &split, &wcfg, WindowStyle::Scinet).unwrap();

    for epochs in [10usize] {
        let t = Instant::now();
        let dnn = DnnModel::new(DnnConfig::default(), seed);
        let tc = TrainConfig {
            epochs,
            optimizer: OptimizerChoice::Adam,
            learning_rate: 1e-3,
            l2_coefficient: 1e-6,
            ..Default::default()
        };
        let rep = train_model(&dnn, &dnn_w.train, &dnn_w.val, &tc, seed).unwrap();
        println!(
            "  dnn e{epochs}: ber {:.2e} best_val {:.4} [{:.0}s]",
            evaluate_ber(&dnn, &dnn_w.test).unwrap().ber,
            rep.best_val_mse,
            t.elapsed().as_secs_f64()
        );
    }

    for (n_h, lr, epochs) in [(4usize, 1e-3, 10usize), (8, 1e-3, 10), (4, 3e-3, 10)] {
        let t = Instant::now();
        let sci = FcScinetModel::new(
            ScinetConfig {
                n_h,
                ..Default::default()
            },
            seed,
        )
        .unwrap();
        let tc = TrainConfig {
            epochs,
            optimizer: OptimizerChoice::Adam,
            learning_rate: lr,
            l2_coefficient: 1e-6,
            ..Default::default()
        };
        let rep = train_model(&sci, &sci_w.train, &sci_w.val, &tc, seed).unwrap();
        let curve: Vec<String> = rep
            .epochs
            .iter()
            .map(|e| format!("{:.4}", e.val_mse))
            .collect();
        println!(
            "  scinet n_h={n_h} lr={lr} e{epochs}: ber {:.2e} val curve [{}] [{:.0}s]",
            evaluate_ber(&sci, &sci_w.test).unwrap().ber,
            curve.join(","),
            t.elapsed().as_secs_f64()
        );
    }
}
