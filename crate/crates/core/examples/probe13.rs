// Scratch probe: full acceptance-protocol dry run (deleted before release).

use ponlab_core::data::{build_split_windows, normalize, DatasetSplit, WindowConfig, WindowStyle};
use ponlab_core::eq::{
    evaluate_ber, evaluate_ber_ensemble, ffe_equalize, train_model, AffineSlicer, DnnConfig,
    DnnModel, FcScinetModel, FfeConfig, OptimizerChoice, ScinetConfig, TrainConfig,
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

fn run_point(scenario: Scenario, dist: f64) -> (f64, f64, f64, f64) {
    let n_symbols = 1 << 16;
    let seed = 42;
    let split = DatasetSplit::new(n_symbols, 2048, seed);
    let wcfg = WindowConfig::default();
    let mut p = LinkParams::default();
    p.link.scenario = scenario;
    p.link.distance_km = dist;
    let frames: Vec<SymbolFrame> = (0..2)
        .map(|c| simulate_capture(&p, n_symbols, seed, c).unwrap())
        .collect();
    let dnn_w = merge(&frames, &split, &wcfg, WindowStyle::CenteredDnn, n_symbols);
    let sci_w = merge(&frames, &split, &wcfg, WindowStyle::Scinet, n_symbols);

    // none
    let mut decisions = Vec::new();
    let mut truth = Vec::new();
    for f in &frames {
        let mut tr_s = Vec::new();
        let mut tr_a = Vec::new();
        for r in split.ranges(ponlab_core::data::Split::Train) {
            for i in r {
                tr_s.push(f.soft[i]);
                tr_a.push(pam4::amplitude(f.symbols[i]));
            }
        }
        let slicer = AffineSlicer::fit(&tr_s, &tr_a);
        for r in split.ranges(ponlab_core::data::Split::Test) {
            for i in r {
                decisions.push(slicer.decide(&[f.soft[i]])[0]);
                truth.push(f.symbols[i]);
            }
        }
    }
    let none = count_ber(&decisions, &truth).unwrap().ber;

    // ffe21
    let mut fd = Vec::new();
    let mut ft = Vec::new();
    for f in &frames {
        let (sn, _, _) = normalize(&f.soft).unwrap();
        let amps: Vec<f64> = f.symbols.iter().map(|s| pam4::amplitude(*s)).collect();
        let (fo, _) = ffe_equalize(&sn, &amps, &FfeConfig::new(21)).unwrap();
        for r in split.ranges(ponlab_core::data::Split::Test) {
            for i in r {
                if i >= 4000 {
                    fd.push(pam4::slice_symbol(fo[i]));
                    ft.push(f.symbols[i]);
                }
            }
        }
    }
    let ffe = count_ber(&fd, &ft).unwrap().ber;

    // dnn
    let dnn = DnnModel::new(DnnConfig::default(), seed);
    let tc_dnn = TrainConfig {
        epochs: 20,
        optimizer: OptimizerChoice::Adam,
        learning_rate: 1e-3,
        lr_decay: 0.9,
        l2_coefficient: 1e-5,
        ..Default::default()
    };
    train_model(&dnn, &dnn_w.train, &dnn_w.val, &tc_dnn, seed).unwrap();
    let dnn_ber = evaluate_ber(&dnn, &dnn_w.test).unwrap().ber;

    // fc-scinet (span-8 head, ensemble decisions)
    let sci = FcScinetModel::new(
        ScinetConfig {
            output_span: 8,
            ..Default::default()
        },
        seed,
    )
    .unwrap();
    let tc_sci = TrainConfig {
        epochs: 18,
        optimizer: OptimizerChoice::Adam,
        learning_rate: 3e-3,
        lr_decay: 0.88,
        l2_coefficient: 3e-4,
        ..Default::default()
    };
    train_model(&sci, &sci_w.train, &sci_w.val, &tc_sci, seed).unwrap();
    let sci_ber = evaluate_ber_ensemble(&sci, &sci_w.test).unwrap().ber;

    (none, ffe, dnn_ber, sci_ber)
}

fn main() {
    let t0 = Instant::now();
    for dist in [5.0, 7.0, 9.0, 11.0] {
        let t = Instant::now();
        let (none, ffe, dnn, sci) = run_point(Scenario::Cd, dist);
        println!(
            "CD d={dist}: none {none:.3e} ffe21 {ffe:.3e} dnn {dnn:.3e} scinet {sci:.3e} [{:.0}s]",
            t.elapsed().as_secs_f64()
        );
    }
    println!("criterion-7 protocol total: {:.0}s", t0.elapsed().as_secs_f64());

    let t = Instant::now();
    let (none, ffe, dnn, sci) = run_point(Scenario::Realistic, 5.0);
    println!(
        "Realistic d=5: none {none:.3e} ffe21 {ffe:.3e} dnn {dnn:.3e} scinet {sci:.3e} [{:.0}s]",
        t.elapsed().as_secs_f64()
    );
}
