// Scratch probe: desk-scale BER behavior across distance (deleted before release).

use ponlab_core::data::{build_split_windows, DatasetSplit, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    evaluate_ber, ffe_equalize, train_model, AffineSlicer, DnnConfig, DnnModel, FcScinetModel,
    FfeConfig, OptimizerChoice, ScinetConfig, TrainConfig,
};
use ponlab_core::link::{pam4, simulate_capture, LinkParams, Scenario};
use ponlab_core::metrics::count_ber;
use std::time::Instant;

fn main() {
    let n_symbols = 1 << 14;
    let seed = 42;
    for scenario in [Scenario::Cd, Scenario::Realistic] {
        println!("=== scenario {scenario} ===");
        for dist in [0.0, 3.0, 5.0, 7.0, 9.0, 11.0] {
            let t0 = Instant::now();
            let mut params = LinkParams::default();
            params.link.scenario = scenario;
            params.link.distance_km = dist;
            let frame = simulate_capture(&params, n_symbols, seed, 0).unwrap();

            // split + windows
            let split = DatasetSplit::new(n_symbols, 2048, seed);
            let dnn_w = build_split_windows(
                &frame,
                &split,
                &WindowConfig::default(),
                WindowStyle::CenteredDnn,
            )
            .unwrap();

            // unequalized: affine fit on train, slice test
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
            let none_ber = count_ber(&slicer.decide(&test_soft), &test_sym).unwrap().ber;

            // FFE 21 taps over the whole frame, BER on test indices
            let soft_norm = {
                let (z, _, _) = ponlab_core::data::normalize(&frame.soft).unwrap();
                z
            };
            let amps: Vec<f64> = frame.symbols.iter().map(|s| pam4::amplitude(*s)).collect();
            let (ffe_out, _) = ffe_equalize(&soft_norm, &amps, &FfeConfig::new(21)).unwrap();
            let ffe_dec: Vec<u8> = dnn_w
                .test
                .centers
                .iter()
                .map(|c| pam4::slice_symbol(ffe_out[*c]))
                .collect();
            let ffe_ber = count_ber(&ffe_dec, &test_sym).unwrap().ber;

            print!(
                "d={dist:4.1} km  none {none_ber:.2e}  ffe21 {ffe_ber:.2e}  [sim {:.1}s]",
                t0.elapsed().as_secs_f64()
            );

            if dist == 9.0 {
                // train DNN + scinet at the interesting point
                let t1 = Instant::now();
                let dnn = DnnModel::new(DnnConfig::default(), seed);
                let tc = TrainConfig {
                    epochs: 6,
                    optimizer: OptimizerChoice::Adam,
                    learning_rate: 1e-3,
                    l2_coefficient: 1e-6,
                    ..Default::default()
                };
                train_model(&dnn, &dnn_w.train, &dnn_w.val, &tc, seed).unwrap();
                let dnn_ber = evaluate_ber(&dnn, &dnn_w.test).unwrap().ber;
                let t_dnn = t1.elapsed().as_secs_f64();

                let t2 = Instant::now();
                let sci_w = build_split_windows(
                    &frame,
                    &split,
                    &WindowConfig::default(),
                    WindowStyle::Scinet,
                )
                .unwrap();
                let sci = FcScinetModel::new(ScinetConfig::default(), seed).unwrap();
                train_model(&sci, &sci_w.train, &sci_w.val, &tc, seed).unwrap();
                let sci_ber = evaluate_ber(&sci, &sci_w.test).unwrap().ber;
                print!(
                    "  dnn {dnn_ber:.2e} [{t_dnn:.0}s]  scinet {sci_ber:.2e} [{:.0}s]",
                    t2.elapsed().as_secs_f64()
                );
            }
            println!();
        }
    }
}
