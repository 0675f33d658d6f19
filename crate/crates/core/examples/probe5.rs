// Scratch probe: acceptance-scale study (deleted before release).

use ponlab_core::data::{build_split_windows, normalize, DatasetSplit, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    evaluate_ber, ffe_equalize, train_model, AffineSlicer, DnnConfig, DnnModel, FcScinetModel,
    FfeConfig, OptimizerChoice, ScinetConfig, TrainConfig,
};
use ponlab_core::link::{pam4, simulate_capture, LinkParams, Scenario};
use ponlab_core::metrics::count_ber;
use std::time::Instant;

fn main() {
    let n_symbols = 1 << 16;
    let seed = 42;
    let split = DatasetSplit::new(n_symbols, 2048, seed);
    let wcfg = WindowConfig::default();

    for (scenario, dist) in [
        (Scenario::Cd, 9.0),
        (Scenario::Cd, 11.0),
        (Scenario::Realistic, 5.0),
    ] {
        let mut p = LinkParams::default();
        p.link.scenario = scenario;
        p.link.distance_km = dist;
        let frame = simulate_capture(&p, n_symbols, seed, 0).unwrap();
        let dnn_w = build_split_windows(&frame, &split, &wcfg, WindowStyle::CenteredDnn).unwrap();
        let sci_w = build_split_windows(&frame, &split, &wcfg, WindowStyle::Scinet).unwrap();

        let test_sym: Vec<u8> = dnn_w.test.centers.iter().map(|c| frame.symbols[*c]).collect();

        // none
        let train_soft: Vec<f64> = dnn_w.train.centers.iter().map(|c| frame.soft[*c]).collect();
        let train_amp: Vec<f64> = dnn_w
            .train
            .centers
            .iter()
            .map(|c| pam4::amplitude(frame.symbols[*c]))
            .collect();
        let slicer = AffineSlicer::fit(&train_soft, &train_amp);
        let test_soft: Vec<f64> = dnn_w.test.centers.iter().map(|c| frame.soft[*c]).collect();
        let none = count_ber(&slicer.decide(&test_soft), &test_sym).unwrap().ber;

        // ffe21
        let (soft_norm, _, _) = normalize(&frame.soft).unwrap();
        let amps: Vec<f64> = frame.symbols.iter().map(|s| pam4::amplitude(*s)).collect();
        let (ffe_out, _) = ffe_equalize(&soft_norm, &amps, &FfeConfig::new(21)).unwrap();
        let ffe_dec: Vec<u8> = dnn_w
            .test
            .centers
            .iter()
            .map(|c| pam4::slice_symbol(ffe_out[*c]))
            .collect();
        let ffe = count_ber(&ffe_dec, &test_sym).unwrap().ber;

        // dnn
        let t0 = Instant::now();
        let dnn = DnnModel::new(DnnConfig::default(), seed);
        let tc = TrainConfig {
            epochs: 20,
            optimizer: OptimizerChoice::Adam,
            learning_rate: 1e-3,
            lr_decay: 0.9,
            l2_coefficient: 1e-6,
            ..Default::default()
        };
        let drep = train_model(&dnn, &dnn_w.train, &dnn_w.val, &tc, seed).unwrap();
        let dnn_ber = evaluate_ber(&dnn, &dnn_w.test).unwrap().ber;
        let t_dnn = t0.elapsed().as_secs_f64();

        println!(
            "{scenario} d={dist}: none {none:.2e} ffe21 {ffe:.2e} dnn {dnn_ber:.2e} (val {:.4}) [{t_dnn:.0}s]",
            drep.best_val_mse
        );

        for (tag, n_h, k, lr, decay, epochs) in [
            ("A", 8usize, 3usize, 3e-3, 0.9, 30usize),
            ("B", 8, 5, 5e-3, 0.85, 30),
        ] {
            let t1 = Instant::now();
            let sci = FcScinetModel::new(
                ScinetConfig {
                    n_h,
                    conv_kernel: k,
                    ..Default::default()
                },
                seed,
            )
            .unwrap();
            let tcs = TrainConfig {
                epochs,
                optimizer: OptimizerChoice::Adam,
                learning_rate: lr,
                lr_decay: decay,
                l2_coefficient: 1e-6,
                ..Default::default()
            };
            let rep = train_model(&sci, &sci_w.train, &sci_w.val, &tcs, seed).unwrap();
            let ber = evaluate_ber(&sci, &sci_w.test).unwrap().ber;
            let tail: Vec<String> = rep
                .epochs
                .iter()
                .rev()
                .take(5)
                .map(|e| format!("{:.4}", e.val_mse))
                .collect();
            println!(
                "  scinet{tag} n_h={n_h} k={k} lr={lr}: ber {ber:.2e} best_val {:.4} last5 [{}] [{:.0}s]",
                rep.best_val_mse,
                tail.join(","),
                t1.elapsed().as_secs_f64()
            );
        }
    }
}
