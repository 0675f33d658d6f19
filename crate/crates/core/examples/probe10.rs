// Scratch probe: 11 km differentiation study (deleted before release).

use ponlab_core::data::{build_split_windows, DatasetSplit, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    predict, train_model, DnnConfig, DnnModel, FcScinetModel, OptimizerChoice, ScinetConfig,
    TrainConfig, WindowModel,
};
use ponlab_core::link::{pam4, simulate_capture, LinkParams, Scenario, SymbolFrame, LEVEL_STD};
use ponlab_core::metrics::count_ber;
use std::time::Instant;

fn merge(
    frames: &[SymbolFrame],
    split: &DatasetSplit,
    wcfg: &WindowConfig,
    style: WindowStyle,
    n_symbols: usize,
) -> ponlab_core::data::SplitWindows {
    let mut out = build_split_windows(&frames[0], split, wcfg, style).unwrap();
    for (ci, f) in frames.iter().enumerate().skip(1) {
        let p = build_split_windows(f, split, wcfg, style).unwrap();
        for (dst, src) in [
            (&mut out.train, p.train),
            (&mut out.test, p.test),
            (&mut out.val, p.val),
        ] {
            dst.inputs.extend_from_slice(&src.inputs);
            dst.targets.extend_from_slice(&src.targets);
            dst.centers.extend(src.centers.iter().map(|c| c + ci * n_symbols));
            if let (Some(dw), Some(sw)) = (dst.targets_wide.as_mut(), src.targets_wide) {
                dw.extend_from_slice(&sw);
            }
        }
    }
    out
}

/// Decide by nearest class-conditional mean fitted on (pred, truth) pairs.
fn class_mean_ber(
    preds_train: &[f64],
    truth_train: &[u8],
    preds_test: &[f64],
    truth_test: &[u8],
) -> f64 {
    let mut sums = [0.0f64; 4];
    let mut counts = [0usize; 4];
    for (p, t) in preds_train.iter().zip(truth_train.iter()) {
        sums[*t as usize] += p;
        counts[*t as usize] += 1;
    }
    let means: Vec<f64> = (0..4).map(|l| sums[l] / counts[l].max(1) as f64).collect();
    let decisions: Vec<u8> = preds_test
        .iter()
        .map(|p| {
            let mut best = 0u8;
            let mut bd = f64::INFINITY;
            for (l, m) in means.iter().enumerate() {
                let d = (p - m).abs();
                if d < bd {
                    bd = d;
                    best = l as u8;
                }
            }
            best
        })
        .collect();
    count_ber(&decisions, truth_test).unwrap().ber
}

fn eval_both(
    model: &dyn WindowModel,
    train: &ponlab_core::data::WindowBatch,
    test: &ponlab_core::data::WindowBatch,
) -> (f64, f64) {
    let tr_pred = predict(model, train, 512).unwrap();
    let te_pred = predict(model, test, 512).unwrap();
    let tr_truth: Vec<u8> = train
        .targets
        .iter()
        .map(|t| pam4::slice_symbol(t * LEVEL_STD))
        .collect();
    let te_truth: Vec<u8> = test
        .targets
        .iter()
        .map(|t| pam4::slice_symbol(t * LEVEL_STD))
        .collect();
    let fixed: Vec<u8> = te_pred
        .iter()
        .map(|p| pam4::slice_symbol(p * LEVEL_STD))
        .collect();
    let fixed_ber = count_ber(&fixed, &te_truth).unwrap().ber;
    let cm_ber = class_mean_ber(&tr_pred, &tr_truth, &te_pred, &te_truth);
    (fixed_ber, cm_ber)
}

fn main() {
    let n_symbols = 1 << 16;
    let seed = 42;
    let split = DatasetSplit::new(n_symbols, 2048, seed);
    let wcfg = WindowConfig::default();
    let mut p = LinkParams::default();
    p.link.scenario = Scenario::Cd;
    p.link.distance_km = 11.0;
    let frames: Vec<SymbolFrame> = (0..2)
        .map(|c| simulate_capture(&p, n_symbols, seed, c).unwrap())
        .collect();
    let dnn_w = merge(&frames, &split, &wcfg, WindowStyle::CenteredDnn, n_symbols);
    let sci_w = merge(&frames, &split, &wcfg, WindowStyle::Scinet, n_symbols);

    let t0 = Instant::now();
    let dnn = DnnModel::new(DnnConfig::default(), seed);
    let tc = TrainConfig {
        epochs: 24,
        optimizer: OptimizerChoice::Adam,
        learning_rate: 1e-3,
        lr_decay: 0.92,
        l2_coefficient: 1e-5,
        ..Default::default()
    };
    let rep = train_model(&dnn, &dnn_w.train, &dnn_w.val, &tc, seed).unwrap();
    let (fixed, cm) = eval_both(&dnn, &dnn_w.train, &dnn_w.test);
    println!(
        "dnn: fixed {fixed:.2e} classmean {cm:.2e} val {:.4} train {:.4} [{:.0}s]",
        rep.best_val_mse,
        rep.epochs.last().unwrap().train_mse,
        t0.elapsed().as_secs_f64()
    );

    for (tag, n_h, l2, epochs, lr, decay, fck) in [
        ("A", 8usize, 3e-4, 36usize, 3e-3, 0.92, 3usize),
        ("B", 16, 1e-3, 24, 3e-3, 0.9, 3),
    ] {
        let t1 = Instant::now();
        let sci = FcScinetModel::new(
            ScinetConfig {
                n_h,
                conv_kernel: 5,
                fc_kernel: fck,
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
            l2_coefficient: l2,
            ..Default::default()
        };
        let rep = train_model(&sci, &sci_w.train, &sci_w.val, &tcs, seed).unwrap();
        let (fixed, cm) = eval_both(&sci, &sci_w.train, &sci_w.test);
        println!(
            "scinet{tag} n_h={n_h} l2={l2}: fixed {fixed:.2e} classmean {cm:.2e} val {:.4} train {:.4} [{:.0}s]",
            rep.best_val_mse,
            rep.epochs.last().unwrap().train_mse,
            t1.elapsed().as_secs_f64()
        );
    }
}
