// Scratch probe: TX bandwidth and the equalizer gap (deleted before release).

use ponlab_core::data::{build_split_windows, normalize, DatasetSplit, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    evaluate_ber, ffe_equalize, train_model, AffineSlicer, DnnConfig, DnnModel, FcScinetModel,
    FfeConfig, OptimizerChoice, ScinetConfig, TrainConfig,
};
use ponlab_core::link::{pam4, simulate_capture, LinkParams, Scenario, SymbolFrame};
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

fn main() {
    let n_symbols = 1 << 16;
    let seed = 42;
    let split = DatasetSplit::new(n_symbols, 2048, seed);
    let wcfg = WindowConfig::default();

    for tx_ghz in [37.5, 25.0] {
        let mut p = LinkParams::default();
        p.link.scenario = Scenario::Cd;
        p.link.distance_km = 9.0;
        p.tx.filter_cutoff_hz = tx_ghz * 1e9;
        let frames: Vec<SymbolFrame> = (0..2)
            .map(|c| simulate_capture(&p, n_symbols, seed, c).unwrap())
            .collect();
        let dnn_w = merge(&frames, &split, &wcfg, WindowStyle::CenteredDnn, n_symbols);
        let sci_w = merge(&frames, &split, &wcfg, WindowStyle::Scinet, n_symbols);

        // none + ffe on first capture only (cheap indicators)
        let f0 = &frames[0];
        let mut tr_soft = Vec::new();
        let mut tr_amp = Vec::new();
        for r in split.ranges(ponlab_core::data::Split::Train) {
            for i in r {
                tr_soft.push(f0.soft[i]);
                tr_amp.push(pam4::amplitude(f0.symbols[i]));
            }
        }
        let slicer = AffineSlicer::fit(&tr_soft, &tr_amp);
        let mut d = Vec::new();
        let mut t = Vec::new();
        for r in split.ranges(ponlab_core::data::Split::Test) {
            for i in r {
                d.push(slicer.decide(&[f0.soft[i]])[0]);
                t.push(f0.symbols[i]);
            }
        }
        let none = count_ber(&d, &t).unwrap().ber;
        let (sn, _, _) = normalize(&f0.soft).unwrap();
        let amps: Vec<f64> = f0.symbols.iter().map(|s| pam4::amplitude(*s)).collect();
        let (fo, _) = ffe_equalize(&sn, &amps, &FfeConfig::new(21)).unwrap();
        let mut fd = Vec::new();
        let mut ft = Vec::new();
        for r in split.ranges(ponlab_core::data::Split::Test) {
            for i in r {
                if i >= 4000 {
                    fd.push(pam4::slice_symbol(fo[i]));
                    ft.push(f0.symbols[i]);
                }
            }
        }
        let ffe = count_ber(&fd, &ft).unwrap().ber;

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
        let td = t0.elapsed().as_secs_f64();

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
            epochs: 24,
            optimizer: OptimizerChoice::Adam,
            learning_rate: 3e-3,
            lr_decay: 0.88,
            l2_coefficient: 3e-4,
            ..Default::default()
        };
        let srep = train_model(&sci, &sci_w.train, &sci_w.val, &tcs, seed).unwrap();
        let sci_ber = evaluate_ber(&sci, &sci_w.test).unwrap().ber;
        println!(
            "tx {tx_ghz} GHz: none {none:.2e} ffe21 {ffe:.2e} dnn {dnn_ber:.2e} (v{:.4}) [{td:.0}s] scinet {sci_ber:.2e} (v{:.4}) [{:.0}s]",
            drep.best_val_mse,
            srep.best_val_mse,
            t1.elapsed().as_secs_f64()
        );
    }
}
