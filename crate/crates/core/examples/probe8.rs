// Scratch probe: speed + regularization + captures (deleted before release).

use ponlab_core::data::{build_split_windows, DatasetSplit, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    evaluate_ber, train_model, DnnConfig, DnnModel, FcScinetModel, OptimizerChoice, ScinetConfig,
    TrainConfig,
};
use ponlab_core::link::{simulate_capture, LinkParams, Scenario};
use std::time::Instant;

fn main() {
    let n_symbols = 1 << 16;
    let seed = 42;
    let split = DatasetSplit::new(n_symbols, 2048, seed);
    let wcfg = WindowConfig::default();
    let mut p = LinkParams::default();
    p.link.scenario = Scenario::Cd;
    p.link.distance_km = 9.0;
    // two captures concatenated
    let f0 = simulate_capture(&p, n_symbols, seed, 0).unwrap();
    let f1 = simulate_capture(&p, n_symbols, seed, 1).unwrap();
    let mut sci_w = build_split_windows(&f0, &split, &wcfg, WindowStyle::Scinet).unwrap();
    let s1 = build_split_windows(&f1, &split, &wcfg, WindowStyle::Scinet).unwrap();
    for (dst, src) in [
        (&mut sci_w.train, s1.train),
        (&mut sci_w.test, s1.test),
        (&mut sci_w.val, s1.val),
    ] {
        dst.inputs.extend_from_slice(&src.inputs);
        dst.targets.extend_from_slice(&src.targets);
        dst.centers
            .extend(src.centers.iter().map(|c| c + n_symbols));
        if let (Some(dw), Some(sw)) = (dst.targets_wide.as_mut(), src.targets_wide) {
            dw.extend_from_slice(&sw);
        }
    }
    let mut dnn_w = build_split_windows(&f0, &split, &wcfg, WindowStyle::CenteredDnn).unwrap();
    let d1 = build_split_windows(&f1, &split, &wcfg, WindowStyle::CenteredDnn).unwrap();
    for (dst, src) in [
        (&mut dnn_w.train, d1.train),
        (&mut dnn_w.test, d1.test),
        (&mut dnn_w.val, d1.val),
    ] {
        dst.inputs.extend_from_slice(&src.inputs);
        dst.targets.extend_from_slice(&src.targets);
        dst.centers
            .extend(src.centers.iter().map(|c| c + n_symbols));
    }
    println!("train windows: dnn {} scinet {}", dnn_w.train.rows(), sci_w.train.rows());

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
    let rep = train_model(&dnn, &dnn_w.train, &dnn_w.val, &tc, seed).unwrap();
    println!(
        "dnn 2cap: ber {:.2e} val {:.4} [{:.0}s]",
        evaluate_ber(&dnn, &dnn_w.test).unwrap().ber,
        rep.best_val_mse,
        t0.elapsed().as_secs_f64()
    );

    for (l2, epochs) in [(1e-6, 20usize), (3e-4, 20)] {
        let t1 = Instant::now();
        let sci = FcScinetModel::new(
            ScinetConfig {
                n_h: 8,
                conv_kernel: 5,
                ..Default::default()
            },
            seed,
        )
        .unwrap();
        let tcs = TrainConfig {
            epochs,
            optimizer: OptimizerChoice::Adam,
            learning_rate: 3e-3,
            lr_decay: 0.88,
            l2_coefficient: l2,
            ..Default::default()
        };
        let rep = train_model(&sci, &sci_w.train, &sci_w.val, &tcs, seed).unwrap();
        println!(
            "scinet 2cap l2={l2}: ber {:.2e} val {:.4} [{:.0}s]",
            evaluate_ber(&sci, &sci_w.test).unwrap().ber,
            rep.best_val_mse,
            t1.elapsed().as_secs_f64()
        );
    }
}
