//! Acceptance suite: one test per criterion, each printing a pass line
//! with its measured numbers (run with `--nocapture` to see them).

use ponlab_core::data::{DatasetSplit, WindowConfig};
use ponlab_core::eq::{ffe_equalize, FfeConfig, FcScinetModel, ScinetConfig};
use ponlab_core::link::{
    simulate_capture, FiberParams, LinkConfig, LinkParams, NoiseSwitches, OpticalField, Scenario,
};
use ponlab_core::metrics::{self, count_ber, prb, rmps_dnn, ComplexityParams};
use ponlab_core::nn::{self, Tensor};
use ponlab_core::rng::Stream;

// ---------------------------------------------------------------- 1 ----

#[test]
fn criterion_1_table1_arithmetic() {
    let p = ComplexityParams {
        n_e: 30,
        n_s: 33,
        n_c: 1,
        hidden: vec![60, 64, 18],
        n_o: 1,
        ..Default::default()
    };
    let dnn = rmps_dnn(&p);
    assert_eq!(dnn, 209_700, "rmps_dnn(30,33,1,[60,64,18],1)");

    use metrics::reference as r;
    let cases = [
        ("dnn/CD", r::DNN_RMPS, r::DNN_MBER_CD, 18_854.55),
        ("dnn/Real", r::DNN_RMPS, r::DNN_MBER_REAL, 18_300.94),
        ("scinet/CD", r::SCINET_RMPS, r::SCINET_MBER_CD, 13.31),
        ("scinet/Real", r::SCINET_RMPS, r::SCINET_MBER_REAL, 1_765.31),
    ];
    for (name, rm, mb, expect) in cases {
        let got = prb(rm, mb);
        let rel = (got - expect).abs() / expect;
        assert!(rel < 1e-3, "{name}: prb {got} vs published {expect}");
    }
    println!("criterion 1 PASS: rmps_dnn = {dnn}; all four PRB products within 0.1%");
}

// ---------------------------------------------------------------- 2 ----

#[test]
fn criterion_2_complexity_ratio() {
    use metrics::reference as r;
    let reduction = (r::DNN_RMPS - r::SCINET_RMPS) as f64 / r::DNN_RMPS as f64 * 100.0;
    assert!(
        (reduction - 10.577).abs() < 0.01,
        "reduction {reduction:.4}% vs published 10.577%"
    );
    println!("criterion 2 PASS: complexity reduction {reduction:.3}% (published 10.577%)");
}

// ---------------------------------------------------------------- 3 ----

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / f64::max(1.0, f64::max(a.abs(), b.abs()))
}

/// Central finite differences of `loss()` w.r.t. every element of `p`.
fn fd_check(p: &Tensor, loss: &dyn Fn() -> f64, analytic: &[f64], tol: f64, what: &str) {
    let eps = 1e-5;
    let base = p.to_vec();
    for i in 0..base.len() {
        let mut plus = base.clone();
        plus[i] += eps;
        p.set_data(&plus);
        let fp = loss();
        let mut minus = base.clone();
        minus[i] -= eps;
        p.set_data(&minus);
        let fm = loss();
        p.set_data(&base);
        let numeric = (fp - fm) / (2.0 * eps);
        let err = rel_err(analytic[i], numeric);
        assert!(
            err <= tol,
            "{what}[{i}]: analytic {} vs numeric {numeric} (rel {err:.2e})",
            analytic[i]
        );
    }
}

#[test]
fn criterion_3_gradient_oracle() {
    use ponlab_core::eq::Interactor;
    use ponlab_core::nn::{Conv1dLayer, LinearLayer, PadMode};

    let start = std::time::Instant::now();
    let mut checked = 0usize;

    // single layers at 1e-4
    for trial in 0..20u64 {
        let mut rng = Stream::new(100 + trial, "acc3-conv", trial);
        let (ci, co, k, n) = (1 + trial as usize % 2, 1 + trial as usize % 3, 3, 8);
        let layer = Conv1dLayer::new(ci, co, k, 1, PadMode::Replicate, &mut rng);
        let x = Tensor::constant(
            vec![ci, n],
            (0..ci * n).map(|_| rng.uniform_range(-1.0, 1.0)).collect(),
        );
        let t = Tensor::constant(
            vec![co, n],
            (0..co * n).map(|_| rng.uniform_range(-1.0, 1.0)).collect(),
        );
        let loss = nn::mse_loss(&nn::conv1d_forward(&x, &layer).unwrap(), &t).unwrap();
        loss.backward().unwrap();
        let f = {
            let (w, b, x, t) = (layer.weights.clone(), layer.bias.clone(), x.clone(), t.clone());
            move || {
                let l = Conv1dLayer {
                    in_channels: ci,
                    out_channels: co,
                    kernel_size: k,
                    pad: 1,
                    pad_mode: PadMode::Replicate,
                    weights: w.clone(),
                    bias: b.clone(),
                };
                nn::mse_loss(&nn::conv1d_forward(&x, &l).unwrap(), &t).unwrap().value()
            }
        };
        fd_check(&layer.weights, &f, &layer.weights.grad().unwrap(), 1e-4, "conv.w");
        checked += 1;

        let mut rng = Stream::new(200 + trial, "acc3-linear", trial);
        let (din, dout) = (3 + trial as usize % 4, 1 + trial as usize % 3);
        let lin = LinearLayer::new(din, dout, &mut rng);
        let x = Tensor::constant(
            vec![din],
            (0..din).map(|_| rng.uniform_range(-1.0, 1.0)).collect(),
        );
        let t = Tensor::constant(
            vec![dout],
            (0..dout).map(|_| rng.uniform_range(-1.0, 1.0)).collect(),
        );
        let loss = nn::mse_loss(&nn::linear_forward(&x, &lin).unwrap(), &t).unwrap();
        loss.backward().unwrap();
        let f = {
            let (w, b, x, t) = (lin.weights.clone(), lin.bias.clone(), x.clone(), t.clone());
            move || {
                let l = LinearLayer {
                    in_dim: din,
                    out_dim: dout,
                    weights: w.clone(),
                    bias: b.clone(),
                };
                nn::mse_loss(&nn::linear_forward(&x, &l).unwrap(), &t).unwrap().value()
            }
        };
        fd_check(&lin.weights, &f, &lin.weights.grad().unwrap(), 1e-4, "lin.w");
        checked += 1;
    }

    // interactor + decomp + full model at 1e-3 over >= 20 trials
    for trial in 0..20u64 {
        let mut rng = Stream::new(300 + trial, "acc3-interactor", trial);
        let node = Interactor::new(2, 3, true, &mut rng);
        let x = Tensor::constant(
            vec![1, 1, 8],
            (0..8).map(|_| rng.uniform_range(-1.0, 1.0)).collect(),
        );
        let t = Tensor::constant(
            vec![1, 1, 4],
            (0..4).map(|_| rng.uniform_range(-1.0, 1.0)).collect(),
        );
        let (even, odd) = node.forward(&x).unwrap();
        let loss = nn::mse_loss(&nn::add(&even, &odd), &nn::scale(&t, 2.0)).unwrap();
        loss.backward().unwrap();
        let psi_w = node.psi.expand.weights.clone();
        let analytic = psi_w.grad().unwrap();
        let f = {
            let (x, t) = (x.clone(), t.clone());
            let node = &node;
            move || {
                let (e, o) = node.forward(&x).unwrap();
                nn::mse_loss(&nn::add(&e, &o), &nn::scale(&t, 2.0)).unwrap().value()
            }
        };
        fd_check(&psi_w, &f, &analytic, 1e-3, "interactor.psi");
        checked += 1;

        // decomp + full model, p=8, L=1
        let model = FcScinetModel::new(
            ScinetConfig {
                window: 8,
                levels: 1,
                n_h: 2,
                conv_kernel: 3,
                ..Default::default()
            },
            400 + trial,
        )
        .unwrap();
        let mut rng = Stream::new(500 + trial, "acc3-model", trial);
        let x = Tensor::constant(
            vec![2, 8],
            (0..16).map(|_| rng.uniform_range(-1.0, 1.0)).collect(),
        );
        let t = Tensor::constant(
            vec![2, 1],
            (0..2).map(|_| rng.uniform_range(-1.0, 1.0)).collect(),
        );
        let loss = nn::mse_loss(&model.forward(&x).unwrap(), &t).unwrap();
        loss.backward().unwrap();
        let f = {
            let (x, t) = (x.clone(), t.clone());
            let model = &model;
            move || nn::mse_loss(&model.forward(&x).unwrap(), &t).unwrap().value()
        };
        // decomp weights and a tree conv weight, through the whole model
        let ws = model.w_s.weights.clone();
        fd_check(&ws, &f, &ws.grad().unwrap(), 1e-3, "decomp.ws");
        let rho_w = model.tree[0].rho.project.weights.clone();
        fd_check(&rho_w, &f, &rho_w.grad().unwrap(), 1e-3, "model.rho");
        checked += 2;
    }

    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 60.0, "gradient oracle took {dt:.1}s (budget 60s)");
    println!("criterion 3 PASS: {checked} gradient checks against central differences in {dt:.1}s");
}

// ---------------------------------------------------------------- 4 ----

/// Independent closed-form reference for the zero-conv SCIBlock: tag
/// every sample with its original coordinate, apply the ±1 swap rule
/// recursively, and realign by sorting on the tags.
fn reference_zero_conv_sciblock(x: &[f64], levels: usize) -> Vec<f64> {
    fn node(items: Vec<(usize, f64)>, depth: usize) -> Vec<(usize, f64)> {
        let even: Vec<(usize, f64)> = items.iter().step_by(2).copied().collect();
        let odd: Vec<(usize, f64)> = items.iter().skip(1).step_by(2).copied().collect();
        // zero convs: exp(0) = 1 ⇒ even' = odd − 1, odd' = even + 1,
        // each keeping the POSITION of the branch it lands in
        let even_p: Vec<(usize, f64)> = even
            .iter()
            .zip(odd.iter())
            .map(|((ie, _), (_, vo))| (*ie, vo - 1.0))
            .collect();
        let odd_p: Vec<(usize, f64)> = even
            .iter()
            .zip(odd.iter())
            .map(|((_, ve), (io, _))| (*io, ve + 1.0))
            .collect();
        if depth == 1 {
            let mut out = even_p;
            out.extend(odd_p);
            out
        } else {
            let mut out = node(even_p, depth - 1);
            out.extend(node(odd_p, depth - 1));
            out
        }
    }
    let tagged: Vec<(usize, f64)> = x.iter().copied().enumerate().collect();
    let mut leaves = node(tagged, levels);
    leaves.sort_by_key(|(i, _)| *i);
    leaves.into_iter().map(|(_, v)| v).collect()
}

#[test]
fn criterion_4_permutation_oracle() {
    use ponlab_core::eq::{realign_indices, split_permutation};

    // pure split/realign is the identity for every feasible (p, L)
    let mut combos = 0;
    for p in [4usize, 8, 16, 32, 64] {
        for l in 1..=p.trailing_zeros() as usize {
            let perm = split_permutation(p, l);
            let inv = realign_indices(p, l);
            let data: Vec<f64> = (0..p).map(|v| v as f64 * 0.5 - 3.0).collect();
            let split: Vec<f64> = perm.iter().map(|j| data[*j]).collect();
            let back: Vec<f64> = inv.iter().map(|j| split[*j]).collect();
            assert_eq!(back, data, "identity fails at p={p} L={l}");
            combos += 1;
        }
    }

    // zero-weight interactors: exact match against the tagged reference
    for (p, l) in [(8usize, 1usize), (8, 2), (16, 2), (64, 3)] {
        let model = FcScinetModel::zeroed(ScinetConfig {
            window: p,
            levels: l,
            n_h: 2,
            conv_kernel: 3,
            ..Default::default()
        })
        .unwrap();
        let mut rng = Stream::new(7, "acc4", (p * 10 + l) as u64);
        let data: Vec<f64> = (0..p).map(|_| rng.uniform_range(-2.0, 2.0)).collect();
        let x = Tensor::constant(vec![1, 1, p], data.clone());
        let got = model.sciblock_forward(&x).unwrap().to_vec();
        let expect = reference_zero_conv_sciblock(&data, l);
        assert_eq!(got.len(), expect.len());
        for (i, (g, e)) in got.iter().zip(expect.iter()).enumerate() {
            assert!(
                (g - e).abs() < 1e-12,
                "p={p} L={l} sample {i}: {g} vs reference {e}"
            );
        }
    }
    println!("criterion 4 PASS: split/realign identity on {combos} (p,L) combos; zero-conv closed form exact");
}

// ---------------------------------------------------------------- 5 ----

#[test]
fn criterion_5_physics_oracles() {
    // (a) Gaussian broadening within 1%
    let fs = 800e9;
    let t0 = 10e-12;
    let n = 1 << 14;
    let dt = 1.0 / fs;
    let center = n as f64 / 2.0 * dt;
    let samples: Vec<ponlab_core::num_complex::Complex64> = (0..n)
        .map(|i| {
            let t = i as f64 * dt - center;
            ponlab_core::num_complex::Complex64::new((-0.5 * (t / t0).powi(2)).exp(), 0.0)
        })
        .collect();
    let field = OpticalField {
        samples,
        sample_rate_hz: fs,
        sps: 1,
    };
    let fiber = FiberParams {
        loss_db_per_km: 0.0,
        cd_slope_ps_nm2_km: 0.0,
        ..Default::default()
    };
    let cfg = LinkConfig {
        distance_km: 8.0,
        scenario: Scenario::Cd,
        ..Default::default()
    };
    let out = ponlab_core::link::fiber_propagate(&field, &fiber, &cfg);
    let rms = |f: &OpticalField| {
        let p = f.power();
        let total: f64 = p.iter().sum();
        let mean: f64 = p.iter().enumerate().map(|(i, v)| i as f64 * v).sum::<f64>() / total;
        (p.iter()
            .enumerate()
            .map(|(i, v)| (i as f64 - mean).powi(2) * v)
            .sum::<f64>()
            / total)
            .sqrt()
    };
    let got = rms(&out) / rms(&field);
    let b2z = fiber.beta2(cfg.wavelength_nm) * 8000.0;
    let expect = (1.0 + (b2z / (t0 * t0)).powi(2)).sqrt();
    let rel_a = (got - expect).abs() / expect;
    assert!(rel_a < 0.01, "broadening {got} vs analytic {expect}");

    // (b) split-step with γ=0 matches the one-shot CD filter to 1e-9
    let one = ponlab_core::link::fiber::propagate_linear_steps(&field, &fiber, &cfg, 1);
    let mut worst: f64 = 0.0;
    for steps in [7usize, 32] {
        let many = ponlab_core::link::fiber::propagate_linear_steps(&field, &fiber, &cfg, steps);
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, b) in one.samples.iter().zip(many.samples.iter()) {
            num += (a - b).norm_sqr();
            den += a.norm_sqr();
        }
        worst = worst.max((num / den).sqrt());
    }
    assert!(worst < 1e-9, "split-step vs one-shot rel RMS {worst:.2e}");

    // (c) 10 km at 0.2 dB/km loses exactly 2 dB
    let lossy = FiberParams::default();
    let cfg10 = LinkConfig {
        distance_km: 10.0,
        scenario: Scenario::Cd,
        ..Default::default()
    };
    let out10 = ponlab_core::link::fiber_propagate(&field, &lossy, &cfg10);
    let drop_db = 10.0 * (field.energy() / out10.energy()).log10();
    assert!((drop_db - 2.0).abs() < 1e-9, "energy drop {drop_db} dB");

    println!(
        "criterion 5 PASS: broadening rel err {rel_a:.2e}; split-step vs one-shot {worst:.1e}; loss drop {drop_db:.12} dB"
    );
}

// ---------------------------------------------------------------- 6 ----

#[test]
fn criterion_6_closed_loop_sanity() {
    let mut params = LinkParams::default();
    params.link.distance_km = 0.0;
    params.link.scenario = Scenario::Cd;
    params.noise = NoiseSwitches::all_off();
    let n = 1 << 13;
    let frame = simulate_capture(&params, n, 9, 0).expect("capture");
    // unequalized receiver: affine gain/offset + slicer
    let amps: Vec<f64> = frame
        .symbols
        .iter()
        .map(|s| ponlab_core::link::amplitude(*s))
        .collect();
    let slicer = ponlab_core::eq::AffineSlicer::fit(&frame.soft, &amps);
    let decisions = slicer.decide(&frame.soft);
    let report = count_ber(&decisions, &frame.symbols).unwrap();
    assert_eq!(report.bit_errors, 0, "noiseless B2B BER {}", report.ber);
    println!(
        "criterion 6 PASS: 0 km noiseless BER = 0 over {} bits",
        report.bits_counted
    );
}

// ------------------------------------------------------------- 7 & 8 ---
// Desk-scale trained criteria live in acceptance_trained.rs (same
// target, longer runtime); kept separate so the fast criteria stay fast.

// ---------------------------------------------------------------- 9 ----

#[test]
fn criterion_9_determinism() {
    // small sweep run twice must produce byte-identical CSV
    let mut cfg = ponlab_cli_test_config();
    cfg.distances_km = vec![0.0, 2.0];
    let run = |cfg: &_| {
        let outcomes = ponlab_cli::runner::run_sweep(cfg).expect("sweep");
        ponlab_cli::runner::sweep_csv(cfg, &outcomes).expect("csv")
    };
    let a = run(&cfg);
    let b = run(&cfg);
    assert_eq!(a, b, "CSV outputs differ between identical runs");
    assert!(a.lines().count() > 2);
    println!(
        "criterion 9 PASS: {} CSV bytes byte-identical across reruns",
        a.len()
    );
}

fn ponlab_cli_test_config() -> ponlab_cli::config::ExperimentConfig {
    let mut cfg = ponlab_cli::config::ExperimentConfig::default();
    cfg.n_symbols = 1 << 12;
    cfg.n_captures = 1;
    cfg.split_block_len = 512;
    cfg.equalizers = vec![
        ponlab_cli::config::EqualizerKind::None,
        ponlab_cli::config::EqualizerKind::Ffe9,
    ];
    cfg.ffe.training_symbols = 1000;
    cfg
}

// FFE sanity used by the spec's per-operation examples: ISI-free input
// keeps a spike tap profile.
#[test]
fn ffe_center_spike_on_identity_channel() {
    let syms = ponlab_core::link::generate_rns_pam4(8192, 3, 0);
    let amps: Vec<f64> = syms
        .iter()
        .map(|s| ponlab_core::link::amplitude(*s))
        .collect();
    let soft: Vec<f64> = amps.iter().map(|a| a / ponlab_core::link::LEVEL_STD).collect();
    let cfg = FfeConfig {
        training_symbols: 6000,
        ..FfeConfig::new(9)
    };
    let (_, hist) = ffe_equalize(&soft, &amps, &cfg).unwrap();
    assert!((hist.final_taps[4] - ponlab_core::link::LEVEL_STD).abs() < 0.1);
}

#[test]
fn dataset_split_counts() {
    let split = DatasetSplit::new(1 << 14, 1024, 5);
    let w = WindowConfig::default();
    assert_eq!(w.dnn_pre + 1 + w.dnn_post, 33);
    let total = split.count(ponlab_core::data::Split::Train)
        + split.count(ponlab_core::data::Split::Test)
        + split.count(ponlab_core::data::Split::Val);
    assert_eq!(total, 1 << 14);
}
