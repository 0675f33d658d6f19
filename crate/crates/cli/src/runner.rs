//! Grid execution: simulate → dataset → train/adapt → evaluate, per
//! (distance × equalizer) point, with CSV and SVG outputs.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use ponlab_core::data::{
    build_split_windows, normalize, DatasetSplit, SplitWindows, WindowConfig, WindowStyle,
};
use ponlab_core::eq::{
    evaluate_ber, evaluate_ber_ensemble, ffe_equalize, train_model, AffineSlicer, DnnModel,
    FcScinetModel, FfeConfig, ScinetConfig, TrainReport,
};
use ponlab_core::link::{pam4, simulate_capture, LinkParams, SymbolFrame};
use ponlab_core::metrics::{count_ber, BerReport};
use ponlab_core::{Error, Result};

use crate::config::{EqualizerKind, ExperimentConfig};
use crate::svg;

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub distance_km: f64,
    pub equalizer: EqualizerKind,
    pub outcome: std::result::Result<BerReport, String>,
}

struct PointData {
    frames: Vec<SymbolFrame>,
    split: DatasetSplit,
}

fn simulate_point(cfg: &ExperimentConfig, distance_km: f64) -> Result<PointData> {
    let mut link: LinkParams = cfg.link.clone();
    link.link.distance_km = distance_km;
    let frames: Vec<SymbolFrame> = (0..cfg.n_captures)
        .map(|c| simulate_capture(&link, cfg.n_symbols, cfg.master_seed, c as u64))
        .collect::<Result<_>>()?;
    let split = DatasetSplit::new(cfg.n_symbols, cfg.split_block_len, cfg.master_seed);
    Ok(PointData { frames, split })
}

fn concat_windows(
    frames: &[SymbolFrame],
    split: &DatasetSplit,
    w: &WindowConfig,
    style: WindowStyle,
) -> Result<SplitWindows> {
    let mut parts = frames
        .iter()
        .map(|f| build_split_windows(f, split, w, style))
        .collect::<Result<Vec<_>>>()?;
    let n_symbols = split.n_samples;
    let mut merged = parts.remove(0);
    for (ci, p) in parts.into_iter().enumerate() {
        // keep per-capture center indices disjoint so ensemble votes
        // never mix captures
        let offset = (ci + 1) * n_symbols;
        for (dst, src) in [
            (&mut merged.train, p.train),
            (&mut merged.test, p.test),
            (&mut merged.val, p.val),
        ] {
            dst.inputs.extend_from_slice(&src.inputs);
            dst.targets.extend_from_slice(&src.targets);
            dst.centers.extend(src.centers.iter().map(|c| c + offset));
            if let (Some(dw), Some(sw)) = (dst.targets_wide.as_mut(), src.targets_wide) {
                dw.extend_from_slice(&sw);
            }
        }
    }
    Ok(merged)
}

/// Test-split BER of the adapted FFE over every capture.
fn ffe_point(data: &PointData, cfg: &ExperimentConfig, n_taps: usize) -> Result<BerReport> {
    let fcfg = FfeConfig {
        n_taps,
        mu: cfg.ffe.mu,
        training_symbols: cfg.ffe.training_symbols,
    };
    let mut decisions = Vec::new();
    let mut truth = Vec::new();
    for frame in &data.frames {
        let (soft_norm, _, _) = normalize(&frame.soft)?;
        let amps: Vec<f64> = frame.symbols.iter().map(|s| pam4::amplitude(*s)).collect();
        let (out, _) = ffe_equalize(&soft_norm, &amps, &fcfg)?;
        for r in data.split.ranges(ponlab_core::data::Split::Test) {
            for i in r {
                // keep the adaptation preamble out of the count
                if i >= fcfg.training_symbols {
                    decisions.push(pam4::slice_symbol(out[i]));
                    truth.push(frame.symbols[i]);
                }
            }
        }
    }
    count_ber(&decisions, &truth)
}

fn none_point(data: &PointData) -> Result<BerReport> {
    let mut decisions = Vec::new();
    let mut truth = Vec::new();
    for frame in &data.frames {
        let mut train_soft = Vec::new();
        let mut train_amp = Vec::new();
        for r in data.split.ranges(ponlab_core::data::Split::Train) {
            for i in r {
                train_soft.push(frame.soft[i]);
                train_amp.push(pam4::amplitude(frame.symbols[i]));
            }
        }
        let slicer = AffineSlicer::fit(&train_soft, &train_amp);
        for r in data.split.ranges(ponlab_core::data::Split::Test) {
            for i in r {
                decisions.push(
                    slicer.decide(&[frame.soft[i]])[0],
                );
                truth.push(frame.symbols[i]);
            }
        }
    }
    count_ber(&decisions, &truth)
}

fn dnn_point(data: &PointData, cfg: &ExperimentConfig) -> Result<(BerReport, TrainReport)> {
    let windows = concat_windows(&data.frames, &data.split, &cfg.window, WindowStyle::CenteredDnn)?;
    let model = DnnModel::new(cfg.dnn.clone(), cfg.master_seed);
    let report = train_model(
        &model,
        &windows.train,
        &windows.val,
        &cfg.training_dnn,
        cfg.master_seed,
    )?;
    Ok((evaluate_ber(&model, &windows.test)?, report))
}

fn scinet_point(
    data: &PointData,
    cfg: &ExperimentConfig,
    override_cfg: Option<ScinetConfig>,
) -> Result<(BerReport, TrainReport)> {
    let scfg = override_cfg.unwrap_or_else(|| cfg.scinet.clone());
    let mut wcfg = cfg.window.clone();
    wcfg.scinet_window = scfg.window;
    let windows = concat_windows(&data.frames, &data.split, &wcfg, WindowStyle::Scinet)?;
    let model = FcScinetModel::new(scfg, cfg.master_seed)?;
    let report = train_model(
        &model,
        &windows.train,
        &windows.val,
        &cfg.training_scinet,
        cfg.master_seed,
    )?;
    Ok((evaluate_ber_ensemble(&model, &windows.test)?, report))
}

/// Evaluate one equalizer at one distance.
pub fn run_point(
    cfg: &ExperimentConfig,
    data: &PointData,
    distance_km: f64,
    eq: EqualizerKind,
) -> PointOutcome {
    let result: Result<BerReport> = match eq {
        EqualizerKind::None => none_point(data),
        EqualizerKind::Ffe9 => ffe_point(data, cfg, 9),
        EqualizerKind::Ffe21 => ffe_point(data, cfg, 21),
        EqualizerKind::Dnn => dnn_point(data, cfg).map(|(b, _)| b),
        EqualizerKind::FcScinet => scinet_point(data, cfg, None).map(|(b, _)| b),
    };
    PointOutcome {
        distance_km,
        equalizer: eq,
        outcome: result.map_err(|e| e.to_string()),
    }
}

/// The full (distance × equalizer) sweep. Distances simulate in
/// parallel; outcome order is deterministic regardless of scheduling.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<PointOutcome>> {
    cfg.validate()?;
    let results: Vec<Vec<PointOutcome>> = cfg
        .distances_km
        .par_iter()
        .map(|d| match simulate_point(cfg, *d) {
            Ok(data) => cfg
                .equalizers
                .iter()
                .map(|eq| run_point(cfg, &data, *d, *eq))
                .collect(),
            Err(e) => cfg
                .equalizers
                .iter()
                .map(|eq| PointOutcome {
                    distance_km: *d,
                    equalizer: *eq,
                    outcome: Err(e.to_string()),
                })
                .collect(),
        })
        .collect();
    Ok(results.into_iter().flatten().collect())
}

/// CSV with one row per grid point; schema:
/// `distance_km,scenario,equalizer,ber,bit_errors,bits_counted,symbol_errors,seed,config_hash,status`.
pub fn sweep_csv(cfg: &ExperimentConfig, outcomes: &[PointOutcome]) -> Result<String> {
    let hash = cfg.hash()?;
    let mut out = String::from(
        "distance_km,scenario,equalizer,ber,bit_errors,bits_counted,symbol_errors,seed,config_hash,status\n",
    );
    for o in outcomes {
        match &o.outcome {
            Ok(r) => out.push_str(&format!(
                "{:.3},{},{},{:.6e},{},{},{},{},{},ok\n",
                o.distance_km,
                cfg.link.link.scenario,
                o.equalizer,
                r.ber,
                r.bit_errors,
                r.bits_counted,
                r.symbol_errors,
                cfg.master_seed,
                hash
            )),
            Err(msg) => out.push_str(&format!(
                "{:.3},{},{},,,,,{},{},failed: {}\n",
                o.distance_km,
                cfg.link.link.scenario,
                o.equalizer,
                cfg.master_seed,
                hash,
                msg.replace(',', ";")
            )),
        }
    }
    Ok(out)
}

/// BER-vs-distance plot derived from the outcomes, with the 1e-2 FEC
/// reference line.
pub fn sweep_plot(cfg: &ExperimentConfig, outcomes: &[PointOutcome]) -> String {
    let mut series = Vec::new();
    for eq in &cfg.equalizers {
        let points: Vec<(f64, f64)> = outcomes
            .iter()
            .filter(|o| o.equalizer == *eq)
            .filter_map(|o| o.outcome.as_ref().ok().map(|r| (o.distance_km, r.ber)))
            .collect();
        if !points.is_empty() {
            series.push(svg::Series {
                name: eq.to_string(),
                points,
            });
        }
    }
    svg::line_plot_log_y(
        &format!("BER vs distance ({})", cfg.link.link.scenario),
        "distance [km]",
        "BER",
        &series,
        Some((1e-2, "FEC limit")),
    )
}

pub fn write_sweep_outputs(
    cfg: &ExperimentConfig,
    outcomes: &[PointOutcome],
    dir: &Path,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("sweep.csv"), sweep_csv(cfg, outcomes)?)?;
    fs::write(dir.join("ber_vs_distance.svg"), sweep_plot(cfg, outcomes))?;
    Ok(())
}

/// Hyperparameter map over (window p × levels L) at one distance; cells
/// with p not divisible by 2^L are skipped as infeasible.
pub struct HypermapResult {
    pub windows: Vec<usize>,
    pub levels: Vec<usize>,
    /// `cells[level_idx][window_idx]`.
    pub cells: Vec<Vec<Option<f64>>>,
    pub argmin: Option<(usize, usize, f64)>,
}

pub fn run_hypermap(
    cfg: &ExperimentConfig,
    distance_km: f64,
    windows: &[usize],
    levels: &[usize],
) -> Result<HypermapResult> {
    cfg.validate()?;
    let data = simulate_point(cfg, distance_km)?;
    let mut cells = vec![vec![None; windows.len()]; levels.len()];
    let mut argmin: Option<(usize, usize, f64)> = None;
    for (li, l) in levels.iter().enumerate() {
        for (wi, w) in windows.iter().enumerate() {
            if *l == 0 || w % (1 << *l) != 0 || (w >> *l) == 0 {
                continue; // infeasible cell
            }
            let scfg = ScinetConfig {
                window: *w,
                levels: *l,
                ..cfg.scinet.clone()
            };
            match scinet_point(&data, cfg, Some(scfg)) {
                Ok((report, _)) => {
                    cells[li][wi] = Some(report.ber);
                    if argmin.map(|(_, _, b)| report.ber < b).unwrap_or(true) {
                        argmin = Some((*w, *l, report.ber));
                    }
                }
                Err(e) => {
                    eprintln!("hypermap cell p={w} L={l} failed: {e}");
                }
            }
        }
    }
    Ok(HypermapResult {
        windows: windows.to_vec(),
        levels: levels.to_vec(),
        cells,
        argmin,
    })
}

pub fn hypermap_csv(cfg: &ExperimentConfig, distance_km: f64, map: &HypermapResult) -> Result<String> {
    let hash = cfg.hash()?;
    let mut out = String::from("window,levels,distance_km,ber,seed,config_hash,status\n");
    for (li, l) in map.levels.iter().enumerate() {
        for (wi, w) in map.windows.iter().enumerate() {
            match map.cells[li][wi] {
                Some(ber) => out.push_str(&format!(
                    "{w},{l},{distance_km:.3},{ber:.6e},{},{hash},ok\n",
                    cfg.master_seed
                )),
                None => out.push_str(&format!(
                    "{w},{l},{distance_km:.3},,{},{hash},infeasible\n",
                    cfg.master_seed
                )),
            }
        }
    }
    Ok(out)
}

pub fn write_hypermap_outputs(
    cfg: &ExperimentConfig,
    distance_km: f64,
    map: &HypermapResult,
    dir: &Path,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("hypermap.csv"), hypermap_csv(cfg, distance_km, map)?)?;
    let x_ticks: Vec<String> = map.windows.iter().map(|w| w.to_string()).collect();
    let y_ticks: Vec<String> = map.levels.iter().map(|l| l.to_string()).collect();
    fs::write(
        dir.join("hypermap.svg"),
        svg::heatmap_log(
            &format!("BER map at {distance_km} km ({})", cfg.link.link.scenario),
            "window p",
            "levels L",
            &x_ticks,
            &y_ticks,
            &map.cells,
        ),
    )?;
    Ok(())
}

/// Simulate-only entry for the `simulate` subcommand: dump waveform-less
/// symbol frames per capture plus a dataset cache.
pub fn run_simulate(cfg: &ExperimentConfig, distance_km: f64, dir: &Path) -> Result<()> {
    cfg.validate()?;
    fs::create_dir_all(dir)?;
    let hash = cfg.hash()?;
    let mut link = cfg.link.clone();
    link.link.distance_km = distance_km;
    let split = DatasetSplit::new(cfg.n_symbols, cfg.split_block_len, cfg.master_seed);
    for c in 0..cfg.n_captures {
        let frame = simulate_capture(&link, cfg.n_symbols, cfg.master_seed, c as u64)?;
        let base = dir.join(format!("capture{c:03}"));
        ponlab_core::io::save_frame(&base, &frame, cfg.master_seed, &hash)?;
        let (norm, mean, std) = normalize(&frame.soft)?;
        ponlab_core::io::save_dataset(
            &dir.join(format!("dataset{c:03}")),
            &norm,
            &frame.symbols,
            &cfg.window,
            mean,
            std,
            &split,
            &hash,
        )?;
    }
    Ok(())
}

/// Train one model at one distance, save checkpoint + training log CSV.
pub fn run_train(
    cfg: &ExperimentConfig,
    distance_km: f64,
    eq: EqualizerKind,
    dir: &Path,
) -> Result<()> {
    cfg.validate()?;
    fs::create_dir_all(dir)?;
    let data = simulate_point(cfg, distance_km)?;
    let (report, named) = match eq {
        EqualizerKind::Dnn => {
            let windows =
                concat_windows(&data.frames, &data.split, &cfg.window, WindowStyle::CenteredDnn)?;
            let model = DnnModel::new(cfg.dnn.clone(), cfg.master_seed);
            let report = train_model(
                &model,
                &windows.train,
                &windows.val,
                &cfg.training_dnn,
                cfg.master_seed,
            )?;
            (report, model.named_params())
        }
        EqualizerKind::FcScinet => {
            let mut wcfg = cfg.window.clone();
            wcfg.scinet_window = cfg.scinet.window;
            let windows = concat_windows(&data.frames, &data.split, &wcfg, WindowStyle::Scinet)?;
            let model = FcScinetModel::new(cfg.scinet.clone(), cfg.master_seed)?;
            let report = train_model(
                &model,
                &windows.train,
                &windows.val,
                &cfg.training_scinet,
                cfg.master_seed,
            )?;
            (report, model.named_params())
        }
        other => {
            return Err(Error::InvalidParam(format!(
                "equalizer '{other}' has no trainable parameters"
            )))
        }
    };
    // keep checkpoint basenames dot-free so the .bin/.json extensions
    // attach cleanly
    let tag = format!("{eq}_d{distance_km:.1}").replace('.', "p");
    ponlab_core::nn::save_checkpoint(&dir.join(&tag), &named, ponlab_core::nn::Dtype::F64)?;
    let mut log = String::from("epoch,train_mse,val_mse\n");
    for e in &report.epochs {
        log.push_str(&format!("{},{:.9e},{:.9e}\n", e.epoch, e.train_mse, e.val_mse));
    }
    fs::write(dir.join(format!("{tag}_training.csv")), log)?;
    Ok(())
}

/// Evaluate one equalizer at one distance and print/write the report.
pub fn run_evaluate(
    cfg: &ExperimentConfig,
    distance_km: f64,
    eq: EqualizerKind,
    dir: &Path,
) -> Result<PointOutcome> {
    cfg.validate()?;
    fs::create_dir_all(dir)?;
    let data = simulate_point(cfg, distance_km)?;
    let outcome = run_point(cfg, &data, distance_km, eq);
    let single = [outcome.clone()];
    fs::write(
        dir.join(format!("evaluate_{eq}_d{distance_km:.1}.csv")),
        sweep_csv(cfg, &single)?,
    )?;
    Ok(outcome)
}
