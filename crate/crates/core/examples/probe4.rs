// Scratch probe: capacity/ablation study at CD 9 km (deleted before release).

use ponlab_core::data::{build_split_windows, DatasetSplit, FcMode, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    evaluate_ber, train_model, Activation, DnnConfig, DnnModel, FcScinetModel, OptimizerChoice,
    ScinetConfig, TrainConfig,
};
use ponlab_core::link::{simulate_capture, LinkParams, Scenario};
use std::time::Instant;

fn main() {
    let n_symbols = 1 << 15;
    let seed = 42;
    let split = DatasetSplit::new(n_symbols, 2048, seed);
    let mut p = LinkParams::default();
    p.link.scenario = Scenario::Cd;
    p.link.distance_km = 9.0;
    let frame = simulate_capture(&p, n_symbols, seed, 0).unwrap();
    let wcfg = WindowConfig::default();

    // capacity probe: big DNN over a 64-sample window
    for (hidden, window, act, lr, epochs) in [
        (vec![256usize, 128], 33usize, Activation::Relu, 1e-3, 25usize),
        (vec![256, 128], 65, Activation::Relu, 1e-3, 25),
        (vec![60, 64, 18], 65, Activation::Relu, 1e-3, 25),
    ] {
        let w2 = WindowConfig {
            scinet_window: 64,
            dnn_pre: (window - 1) / 2,
            dnn_post: (window - 1) / 2,
        };
        let dnn_w = build_split_windows(&frame, &split, &w2, WindowStyle::CenteredDnn).unwrap();
        let t = Instant::now();
        let dnn = DnnModel::new(
            DnnConfig {
                hidden: hidden.clone(),
                activation: act,
                window,
            },
            seed,
        );
        let tc = TrainConfig {
            epochs,
            optimizer: OptimizerChoice::Adam,
            learning_rate: lr,
            lr_decay: 0.9,
            l2_coefficient: 0.0,
            ..Default::default()
        };
        let rep = train_model(&dnn, &dnn_w.train, &dnn_w.val, &tc, seed).unwrap();
        println!(
            "dnn {hidden:?} w{window}: ber {:.2e} val {:.4} train {:.4} [{:.0}s]",
            evaluate_ber(&dnn, &dnn_w.test).unwrap().ber,
            rep.best_val_mse,
            rep.epochs.last().unwrap().train_mse,
            t.elapsed().as_secs_f64()
        );
    }

    // scinet ablation: fc mode, deeper features
    let sci_w = build_split_windows(&frame, &split, &wcfg, WindowStyle::Scinet).unwrap();
    for (fc_mode, n_h, lr) in [
        (FcMode::Paper, 16usize, 3e-3),
        (FcMode::Reconstruct, 8, 3e-3),
    ] {
        let t = Instant::now();
        let sci = FcScinetModel::new(
            ScinetConfig {
                n_h,
                fc_mode,
                ..Default::default()
            },
            seed,
        )
        .unwrap();
        let tc = TrainConfig {
            epochs: 15,
            optimizer: OptimizerChoice::Adam,
            learning_rate: lr,
            lr_decay: 0.85,
            l2_coefficient: 0.0,
            ..Default::default()
        };
        let rep = train_model(&sci, &sci_w.train, &sci_w.val, &tc, seed).unwrap();
        println!(
            "scinet fc={fc_mode:?} n_h={n_h}: ber {:.2e} val {:.4} train {:.4} [{:.0}s]",
            evaluate_ber(&sci, &sci_w.test).unwrap().ber,
            rep.best_val_mse,
            rep.epochs.last().unwrap().train_mse,
            t.elapsed().as_secs_f64()
        );
    }
}
