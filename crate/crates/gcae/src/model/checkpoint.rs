//! Binary model checkpoints.
//!
//! Layout: 8-byte magic `GCAE\0CKP`, u32 LE format version, u32 LE header
//! length, a JSON header (variant, dimensions, vocabulary hash, tensor
//! manifest), then every tensor's values as little-endian f64 in manifest
//! order. Values survive a save/load round trip bit for bit.
//!
//! The vocabulary hash travels with the weights so a checkpoint cannot be
//! silently evaluated against a different token mapping.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, ModelConfig, ModelVariant};

const MAGIC: &[u8; 8] = b"GCAE\0CKP";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TensorMeta {
    name: String,
    rows: usize,
    cols: usize,
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    variant: ModelVariant,
    config: ModelConfig,
    vocab_hash: String,
    tensors: Vec<TensorMeta>,
}

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

pub fn save_checkpoint(model: &Model, vocab_hash: &str, path: &Path) -> Result<()> {
    let tensors = model.params.tensors();
    let header = CheckpointHeader {
        variant: model.variant,
        config: model.config.clone(),
        vocab_hash: vocab_hash.to_string(),
        tensors: tensors
            .iter()
            .map(|t| TensorMeta {
                name: t.name.clone(),
                rows: t.rows,
                cols: t.cols,
            })
            .collect(),
    };
    let header_bytes = serde_json::to_vec(&header)
        .map_err(|e| Error::Data(format!("encoding checkpoint header: {e}")))?;

    let file = File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    let ctx = || format!("writing {}", path.display());
    w.write_all(MAGIC).map_err(|e| Error::io(ctx(), e))?;
    w.write_all(&VERSION.to_le_bytes()).map_err(|e| Error::io(ctx(), e))?;
    w.write_all(&(header_bytes.len() as u32).to_le_bytes())
        .map_err(|e| Error::io(ctx(), e))?;
    w.write_all(&header_bytes).map_err(|e| Error::io(ctx(), e))?;
    for t in &tensors {
        for v in t.data {
            w.write_all(&v.to_le_bytes()).map_err(|e| Error::io(ctx(), e))?;
        }
    }
    w.flush().map_err(|e| Error::io(ctx(), e))?;
    Ok(())
}

/// Reads a checkpoint back into a model, returning it with the stored
/// vocabulary hash.
pub fn load_checkpoint(path: &Path) -> Result<(Model, String)> {
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| parse_err(path, "file too short for a checkpoint"))?;
    if &magic != MAGIC {
        return Err(parse_err(path, "bad magic: not a checkpoint file"));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)
        .map_err(|_| parse_err(path, "missing format version"))?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(parse_err(
            path,
            format!("unsupported checkpoint version {version} (expected {VERSION})"),
        ));
    }
    r.read_exact(&mut word)
        .map_err(|_| parse_err(path, "missing header length"))?;
    let header_len = u32::from_le_bytes(word) as usize;
    let mut header_bytes = vec![0u8; header_len];
    r.read_exact(&mut header_bytes)
        .map_err(|_| parse_err(path, "truncated header"))?;
    let header: CheckpointHeader = serde_json::from_slice(&header_bytes)
        .map_err(|e| parse_err(path, format!("invalid header: {e}")))?;

    let mut model = Model::new(header.variant, &header.config, 0)?;
    {
        let mut views = model.params.tensors_mut();
        if views.len() != header.tensors.len() {
            return Err(parse_err(
                path,
                format!(
                    "tensor manifest lists {} tensors, variant needs {}",
                    header.tensors.len(),
                    views.len()
                ),
            ));
        }
        let mut buf = Vec::new();
        for (view, meta) in views.iter_mut().zip(&header.tensors) {
            if view.name != meta.name || view.rows != meta.rows || view.cols != meta.cols {
                return Err(parse_err(
                    path,
                    format!(
                        "tensor mismatch: file has {} ({}x{}), variant needs {} ({}x{})",
                        meta.name, meta.rows, meta.cols, view.name, view.rows, view.cols
                    ),
                ));
            }
            let n = meta.rows * meta.cols;
            buf.resize(n * 8, 0);
            r.read_exact(&mut buf)
                .map_err(|_| parse_err(path, format!("truncated payload in tensor {}", meta.name)))?;
            for (i, v) in view.data.iter_mut().enumerate() {
                let mut bytes = [0u8; 8];
                bytes.copy_from_slice(&buf[i * 8..i * 8 + 8]);
                *v = f64::from_le_bytes(bytes);
            }
        }
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing).map_err(|e| Error::io("reading", e))? != 0 {
        return Err(parse_err(path, "trailing bytes after final tensor"));
    }
    Ok((model, header.vocab_hash))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GateKind, ModelVariant};

    fn tiny_config() -> ModelConfig {
        ModelConfig {
            vocab_size: 12,
            embed_dim: 4,
            widths: vec![2, 3],
            filters_per_width: 3,
            class_count: 3,
            aspect_count: 4,
            term_width: 2,
            term_filters: 5,
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        for variant in [
            ModelVariant::gcae_acsa(GateKind::Gtru),
            ModelVariant::gcae_atsa(GateKind::Gtu),
            ModelVariant::cnn(),
            ModelVariant::gcn(GateKind::Glu),
        ] {
            let model = Model::new(variant, &tiny_config(), 99).unwrap();
            let path = dir.path().join(format!("{}.ckpt", variant.name()));
            save_checkpoint(&model, "hash123", &path).unwrap();
            let (loaded, hash) = load_checkpoint(&path).unwrap();
            assert_eq!(hash, "hash123");
            assert_eq!(loaded.variant, model.variant);
            assert_eq!(loaded.config, model.config);
            assert_eq!(loaded.params, model.params, "{}", variant.name());
        }
    }

    #[test]
    fn loaded_model_predicts_identically() {
        use crate::model::AspectInput;
        let dir = tempfile::tempdir().unwrap();
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &tiny_config(), 7).unwrap();
        let path = dir.path().join("m.ckpt");
        save_checkpoint(&model, "h", &path).unwrap();
        let (loaded, _) = load_checkpoint(&path).unwrap();
        let tokens = [2usize, 3, 4, 5, 6];
        let a = model.forward(&tokens, Some(AspectInput::Category(1))).unwrap();
        let b = loaded.forward(&tokens, Some(AspectInput::Category(1))).unwrap();
        assert_eq!(a.probs, b.probs);
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bogus.ckpt");
        std::fs::write(&path, b"NOTACKPT rest of file").unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(err.to_string().contains("magic"), "{err}");
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let model = Model::new(ModelVariant::cnn(), &tiny_config(), 1).unwrap();
        let path = dir.path().join("full.ckpt");
        save_checkpoint(&model, "h", &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let cut = dir.path().join("cut.ckpt");
        std::fs::write(&cut, &bytes[..bytes.len() - 16]).unwrap();
        let err = load_checkpoint(&cut).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let model = Model::new(ModelVariant::cnn(), &tiny_config(), 1).unwrap();
        let path = dir.path().join("full.ckpt");
        save_checkpoint(&model, "h", &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.extend_from_slice(&[0u8; 8]);
        std::fs::write(&path, &bytes).unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
