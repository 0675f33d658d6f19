//! Parameter checkpoint files.
//!
//! Layout: `<base>.bin` holds the raw little-endian float payload of all
//! tensors back to back; `<base>.json` is a sidecar describing names,
//! shapes, dtype and offsets (in elements) into the payload.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{shape_mismatch, Result};

use super::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dtype {
    #[serde(rename = "f32")]
    F32,
    #[serde(rename = "f64")]
    F64,
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
    offset: usize,
    len: usize,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    format: String,
    dtype: Dtype,
    byte_order: String,
    tensors: Vec<TensorEntry>,
}

/// Write `<base>.bin` + `<base>.json` for the named tensors, in order.
pub fn save_checkpoint(base: &Path, named: &[(String, Tensor)], dtype: Dtype) -> Result<()> {
    let mut entries = Vec::with_capacity(named.len());
    let mut payload: Vec<u8> = Vec::new();
    let mut offset = 0usize;
    for (name, t) in named {
        let data = t.to_vec();
        entries.push(TensorEntry {
            name: name.clone(),
            shape: t.shape(),
            offset,
            len: data.len(),
        });
        match dtype {
            Dtype::F64 => {
                for v in &data {
                    payload.extend_from_slice(&v.to_le_bytes());
                }
            }
            Dtype::F32 => {
                for v in &data {
                    payload.extend_from_slice(&(*v as f32).to_le_bytes());
                }
            }
        }
        offset += data.len();
    }
    let sidecar = Sidecar {
        format: "ponlab-checkpoint-v1".to_string(),
        dtype,
        byte_order: "little".to_string(),
        tensors: entries,
    };
    let mut bin = fs::File::create(base.with_extension("bin"))?;
    bin.write_all(&payload)?;
    let json = serde_json::to_string_pretty(&sidecar)?;
    fs::write(base.with_extension("json"), json)?;
    Ok(())
}

/// Read back a checkpoint as `(name, tensor)` pairs in file order.
pub fn load_checkpoint(base: &Path) -> Result<Vec<(String, Tensor)>> {
    let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(base.with_extension("json"))?)?;
    let payload = fs::read(base.with_extension("bin"))?;
    let elem = match sidecar.dtype {
        Dtype::F32 => 4,
        Dtype::F64 => 8,
    };
    let mut out = Vec::with_capacity(sidecar.tensors.len());
    for e in &sidecar.tensors {
        let start = e.offset * elem;
        let end = start + e.len * elem;
        if end > payload.len() {
            return Err(shape_mismatch(format!(
                "checkpoint payload too short for tensor '{}'",
                e.name
            )));
        }
        let mut data = Vec::with_capacity(e.len);
        match sidecar.dtype {
            Dtype::F64 => {
                for chunk in payload[start..end].chunks_exact(8) {
                    data.push(f64::from_le_bytes(chunk.try_into().unwrap()));
                }
            }
            Dtype::F32 => {
                for chunk in payload[start..end].chunks_exact(4) {
                    data.push(f32::from_le_bytes(chunk.try_into().unwrap()) as f64);
                }
            }
        }
        if e.shape.iter().product::<usize>() != data.len() {
            return Err(shape_mismatch(format!(
                "checkpoint tensor '{}': shape {:?} vs {} elements",
                e.name,
                e.shape,
                data.len()
            )));
        }
        out.push((e.name.clone(), Tensor::new(e.shape.clone(), data, true)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_f64() {
        let dir = std::env::temp_dir().join("ponlab-ckpt-test");
        fs::create_dir_all(&dir).unwrap();
        let base = dir.join("model");
        let t1 = Tensor::new(vec![2, 3], vec![1.0, -2.0, 3.0, 4.5, 0.0, -0.125], true);
        let t2 = Tensor::new(vec![1], vec![42.0], true);
        save_checkpoint(
            &base,
            &[("w".to_string(), t1.clone()), ("b".to_string(), t2.clone())],
            Dtype::F64,
        )
        .unwrap();
        let loaded = load_checkpoint(&base).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded[0].0, "w");
        assert_eq!(loaded[0].1.shape(), vec![2, 3]);
        assert_eq!(loaded[0].1.to_vec(), t1.to_vec());
        assert_eq!(loaded[1].1.to_vec(), t2.to_vec());
    }

    #[test]
    fn f32_quantizes() {
        let dir = std::env::temp_dir().join("ponlab-ckpt-test-f32");
        fs::create_dir_all(&dir).unwrap();
        let base = dir.join("model");
        let t = Tensor::new(vec![2], vec![0.1, 1e-40], true);
        save_checkpoint(&base, &[("t".to_string(), t)], Dtype::F32).unwrap();
        let loaded = load_checkpoint(&base).unwrap();
        let v = loaded[0].1.to_vec();
        assert!((v[0] - 0.1).abs() < 1e-7);
    }
}
