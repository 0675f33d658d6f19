// Scratch probe: centered span-8 head with ensemble at 11 km (deleted before release).

use ponlab_core::data::{build_split_windows, DatasetSplit, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    evaluate_ber, evaluate_ber_ensemble, train_model, FcScinetModel, OptimizerChoice,
    ScinetConfig, TrainConfig,
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
    for dist in [11.0, 9.0] {
        let mut p = LinkParams::default();
        p.link.scenario = Scenario::Cd;
        p.link.distance_km = dist;
        let frames: Vec<SymbolFrame> = (0..2)
            .map(|c| simulate_capture(&p, n_symbols, seed, c).unwrap())
            .collect();
        let sci_w = merge(&frames, &split, &wcfg, WindowStyle::Scinet, n_symbols);

        let t1 = Instant::now();
        let sci = FcScinetModel::new(
            ScinetConfig {
                n_h: 8,
                conv_kernel: 5,
                deep_stack: false,
                output_span: 8,
                ..Default::default()
            },
            seed,
        )
        .unwrap();
        let tcs = TrainConfig {
            epochs: 18,
            optimizer: OptimizerChoice::Adam,
            learning_rate: 3e-3,
            lr_decay: 0.88,
            l2_coefficient: 3e-4,
            ..Default::default()
        };
        let rep = train_model(&sci, &sci_w.train, &sci_w.val, &tcs, seed).unwrap();
        let center = evaluate_ber(&sci, &sci_w.test).unwrap().ber;
        let ens = evaluate_ber_ensemble(&sci, &sci_w.test).unwrap().ber;
        println!(
            "d={dist} scinet span8: center {center:.2e} ensemble {ens:.2e} val {:.4} train {:.4} [{:.0}s]",
            rep.best_val_mse,
            rep.epochs.last().unwrap().train_mse,
            t1.elapsed().as_secs_f64()
        );
    }
}
