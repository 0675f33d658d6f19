// Scratch probe: high-capacity regularized scinet at 11 km (deleted before release).

use ponlab_core::data::{build_split_windows, DatasetSplit, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    evaluate_ber_ensemble, train_model, FcScinetModel, OptimizerChoice, ScinetConfig, TrainConfig,
};
use ponlab_core::link::{simulate_capture, LinkParams, Scenario, SymbolFrame};
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
    let sci_w = merge(&frames, &split, &wcfg, WindowStyle::Scinet, n_symbols);

    for (tag, n_h, l2, lr, epochs, batch) in [
        ("n16-b64", 16usize, 1e-3, 2.5e-3, 16usize, 64usize),
        ("n16-b32", 16, 1e-3, 2.5e-3, 16, 32),
    ] {
        let t1 = Instant::now();
        let sci = FcScinetModel::new(
            ScinetConfig {
                n_h,
                output_span: 8,
                ..Default::default()
            },
            seed,
        )
        .unwrap();
        let tcs = TrainConfig {
            epochs,
            batch_size: batch,
            optimizer: OptimizerChoice::Adam,
            learning_rate: lr,
            lr_decay: 0.88,
            l2_coefficient: l2,
        };
        let rep = train_model(&sci, &sci_w.train, &sci_w.val, &tcs, seed).unwrap();
        println!(
            "scinet {tag}: ensemble {:.3e} val {:.4} train {:.4} [{:.0}s]",
            evaluate_ber_ensemble(&sci, &sci_w.test).unwrap().ber,
            rep.best_val_mse,
            rep.epochs.last().unwrap().train_mse,
            t1.elapsed().as_secs_f64()
        );
    }
}
