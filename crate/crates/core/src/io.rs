//! Binary dump formats with JSON sidecars: waveforms, symbol frames and
//! dataset caches.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::data::{DatasetSplit, WindowConfig};
use crate::error::{Error, Result};
use crate::link::{OpticalField, SymbolFrame};

/// FNV-1a over a canonical JSON encoding; embedded in every output file
/// so reruns can be matched to their exact configuration.
pub fn config_hash<T: Serialize>(cfg: &T) -> Result<String> {
    let json = serde_json::to_string(cfg)?;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in json.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    Ok(format!("{h:016x}"))
}

#[derive(Serialize, Deserialize)]
struct WaveformSidecar {
    format: String,
    sample_rate_hz: f64,
    sps: usize,
    length: usize,
    seed: u64,
    config_hash: String,
}

/// Write `<base>.iq` (little-endian f64 I/Q pairs) + `<base>.json`.
pub fn save_waveform(base: &Path, field: &OpticalField, seed: u64, config_hash: &str) -> Result<()> {
    let mut payload = Vec::with_capacity(field.len() * 16);
    for s in &field.samples {
        payload.extend_from_slice(&s.re.to_le_bytes());
        payload.extend_from_slice(&s.im.to_le_bytes());
    }
    let mut f = fs::File::create(base.with_extension("iq"))?;
    f.write_all(&payload)?;
    let sidecar = WaveformSidecar {
        format: "ponlab-waveform-v1".into(),
        sample_rate_hz: field.sample_rate_hz,
        sps: field.sps,
        length: field.len(),
        seed,
        config_hash: config_hash.into(),
    };
    fs::write(
        base.with_extension("json"),
        serde_json::to_string_pretty(&sidecar)?,
    )?;
    Ok(())
}

pub fn load_waveform(base: &Path) -> Result<(OpticalField, u64)> {
    let sidecar: WaveformSidecar =
        serde_json::from_str(&fs::read_to_string(base.with_extension("json"))?)?;
    let payload = fs::read(base.with_extension("iq"))?;
    if payload.len() != sidecar.length * 16 {
        return Err(Error::InvalidParam(format!(
            "waveform payload {} bytes, sidecar says {} samples",
            payload.len(),
            sidecar.length
        )));
    }
    let samples: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Ok((
        OpticalField {
            samples,
            sample_rate_hz: sidecar.sample_rate_hz,
            sps: sidecar.sps,
        },
        sidecar.seed,
    ))
}

#[derive(Serialize, Deserialize)]
struct FrameSidecar {
    format: String,
    n_symbols: usize,
    lag: usize,
    seed: u64,
    config_hash: String,
}

/// Write `<base>.soft` (little-endian f64), `<base>.sym` (raw bytes) and
/// `<base>.json`.
pub fn save_frame(base: &Path, frame: &SymbolFrame, seed: u64, config_hash: &str) -> Result<()> {
    let mut soft = Vec::with_capacity(frame.soft.len() * 8);
    for v in &frame.soft {
        soft.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(base.with_extension("soft"), &soft)?;
    fs::write(base.with_extension("sym"), &frame.symbols)?;
    let sidecar = FrameSidecar {
        format: "ponlab-frame-v1".into(),
        n_symbols: frame.len(),
        lag: frame.lag,
        seed,
        config_hash: config_hash.into(),
    };
    fs::write(
        base.with_extension("json"),
        serde_json::to_string_pretty(&sidecar)?,
    )?;
    Ok(())
}

pub fn load_frame(base: &Path) -> Result<SymbolFrame> {
    let sidecar: FrameSidecar =
        serde_json::from_str(&fs::read_to_string(base.with_extension("json"))?)?;
    let soft_raw = fs::read(base.with_extension("soft"))?;
    let symbols = fs::read(base.with_extension("sym"))?;
    if soft_raw.len() != sidecar.n_symbols * 8 || symbols.len() != sidecar.n_symbols {
        return Err(Error::InvalidParam("frame payload length mismatch".into()));
    }
    let soft: Vec<f64> = soft_raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(SymbolFrame {
        symbols,
        soft,
        lag: sidecar.lag,
    })
}

#[derive(Serialize, Deserialize)]
struct DatasetSidecar {
    format: String,
    window: WindowConfig,
    norm_mean: f64,
    norm_std: f64,
    split: DatasetSplit,
    config_hash: String,
    n_soft: usize,
}

/// Dataset cache: normalized soft samples (little-endian f64) + symbols,
/// with the window config, normalization stats and split map in the
/// header.
#[allow(clippy::too_many_arguments)]
pub fn save_dataset(
    base: &Path,
    soft_normalized: &[f64],
    symbols: &[u8],
    window: &WindowConfig,
    norm_mean: f64,
    norm_std: f64,
    split: &DatasetSplit,
    config_hash: &str,
) -> Result<()> {
    let mut payload = Vec::with_capacity(soft_normalized.len() * 8);
    for v in soft_normalized {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(base.with_extension("f64"), &payload)?;
    fs::write(base.with_extension("sym"), symbols)?;
    let sidecar = DatasetSidecar {
        format: "ponlab-dataset-v1".into(),
        window: window.clone(),
        norm_mean,
        norm_std,
        split: split.clone(),
        config_hash: config_hash.into(),
        n_soft: soft_normalized.len(),
    };
    fs::write(
        base.with_extension("json"),
        serde_json::to_string_pretty(&sidecar)?,
    )?;
    Ok(())
}
