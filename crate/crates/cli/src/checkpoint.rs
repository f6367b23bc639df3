//! Model checkpoints.
//!
//! Layout: an 8-byte magic, a little-endian u32 header length, a JSON
//! header, then every state tensor's values as little-endian f64 in
//! visit order. The header pins the format version, the model kind, the
//! architecture, each layer's name and shape, and the training position,
//! so a load either rebuilds the exact model (batch-norm running
//! statistics included) or fails with a reason. Optimizer moments are
//! deliberately not stored: a resumed run restarts Adam from zeroed
//! moments, which the save/resume contract accepts in exchange for
//! checkpoints that depend only on the model.

use crate::error::{CliError, Result};
use heartgan_core::model::{DiscriminatorArch, DiscriminatorModel, GeneratorArch, GeneratorModel};
use heartgan_core::params::ParamSet;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub const MAGIC: &[u8; 8] = b"HEARTGAN";
pub const FORMAT_VERSION: u32 = 1;
pub const KIND_GENERATOR: &str = "generator";
pub const KIND_DISCRIMINATOR: &str = "discriminator";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerDesc {
    pub name: String,
    pub shape: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub model_kind: String,
    pub arch: serde_json::Value,
    pub layers: Vec<LayerDesc>,
    pub training_step: u64,
    pub epoch: usize,
    pub seed: u64,
    /// Hash of the training configuration that produced the weights;
    /// resuming refuses to continue under a different configuration.
    pub config_sha256: String,
}

/// Training position stored alongside the weights.
#[derive(Debug, Clone)]
pub struct TrainState {
    pub training_step: u64,
    pub epoch: usize,
    pub seed: u64,
    pub config_sha256: String,
}

fn corrupt(path: &Path, detail: impl std::fmt::Display) -> CliError {
    CliError::checkpoint(format!("corrupt checkpoint {}: {detail}", path.display()))
}

fn collect(model: &dyn ParamSet) -> (Vec<LayerDesc>, Vec<u8>) {
    let mut layers = Vec::new();
    let mut bytes = Vec::new();
    model.for_each_state(&mut |name, t| {
        layers.push(LayerDesc { name: name.to_string(), shape: t.shape().to_vec() });
        for v in t.data() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    });
    (layers, bytes)
}

fn save(
    path: &Path,
    kind: &str,
    arch: serde_json::Value,
    model: &dyn ParamSet,
    ts: &TrainState,
) -> Result<()> {
    let (layers, data) = collect(model);
    let header = CheckpointHeader {
        format_version: FORMAT_VERSION,
        model_kind: kind.to_string(),
        arch,
        layers,
        training_step: ts.training_step,
        epoch: ts.epoch,
        seed: ts.seed,
        config_sha256: ts.config_sha256.clone(),
    };
    let header_json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(12 + header_json.len() + data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(header_json.len() as u32).to_le_bytes());
    out.extend_from_slice(&header_json);
    out.extend_from_slice(&data);
    crate::util::write_file(path, &out)
}

pub fn save_generator(path: &Path, g: &GeneratorModel, ts: &TrainState) -> Result<()> {
    let arch = serde_json::to_value(g.arch()).expect("arch serializes");
    save(path, KIND_GENERATOR, arch, g, ts)
}

pub fn save_discriminator(path: &Path, d: &DiscriminatorModel, ts: &TrainState) -> Result<()> {
    let arch = serde_json::to_value(d.arch()).expect("arch serializes");
    save(path, KIND_DISCRIMINATOR, arch, d, ts)
}

fn split_header(path: &Path, bytes: &[u8]) -> Result<(CheckpointHeader, usize)> {
    if bytes.len() < MAGIC.len() + 4 {
        return Err(corrupt(path, "shorter than the fixed prefix"));
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(corrupt(path, "bad magic"));
    }
    let header_len =
        u32::from_le_bytes(bytes[MAGIC.len()..MAGIC.len() + 4].try_into().unwrap()) as usize;
    let body = MAGIC.len() + 4;
    if bytes.len() < body + header_len {
        return Err(corrupt(path, "header truncated"));
    }
    let header: CheckpointHeader = serde_json::from_slice(&bytes[body..body + header_len])
        .map_err(|e| corrupt(path, format!("bad header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(CliError::checkpoint(format!(
            "{}: format version {} is not the supported {FORMAT_VERSION}",
            path.display(),
            header.format_version
        )));
    }
    Ok((header, body + header_len))
}

/// Reads just the header; resume scans use this to rank checkpoints.
pub fn read_header(path: &Path) -> Result<CheckpointHeader> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(split_header(path, &bytes)?.0)
}

fn parse(path: &Path) -> Result<(CheckpointHeader, Vec<f64>)> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let (header, data_start) = split_header(path, &bytes)?;
    let expected: usize = header.layers.iter().map(|l| l.shape.iter().product::<usize>()).sum();
    let data = &bytes[data_start..];
    if data.len() != expected * 8 {
        return Err(corrupt(
            path,
            format!("data section holds {} bytes, layer table needs {}", data.len(), expected * 8),
        ));
    }
    let values = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((header, values))
}

fn expect_kind(path: &Path, header: &CheckpointHeader, kind: &str) -> Result<()> {
    if header.model_kind != kind {
        return Err(CliError::checkpoint(format!(
            "{}: holds a {} model, expected a {kind}",
            path.display(),
            header.model_kind
        )));
    }
    Ok(())
}

fn fill(
    path: &Path,
    model: &mut dyn ParamSet,
    header: &CheckpointHeader,
    values: &[f64],
) -> Result<()> {
    let mut err: Option<CliError> = None;
    let mut offset = 0usize;
    let mut idx = 0usize;
    model.for_each_state_mut(&mut |name, t| {
        if err.is_some() {
            return;
        }
        match header.layers.get(idx) {
            None => err = Some(corrupt(path, format!("no entry for layer {name}"))),
            Some(desc) if desc.name != name || desc.shape != t.shape() => {
                err = Some(corrupt(
                    path,
                    format!(
                        "layer {idx} is {}{:?}, model expects {name}{:?}",
                        desc.name,
                        desc.shape,
                        t.shape()
                    ),
                ))
            }
            Some(_) => {
                let len = t.len();
                t.data_mut().copy_from_slice(&values[offset..offset + len]);
                offset += len;
            }
        }
        idx += 1;
    });
    if let Some(e) = err {
        return Err(e);
    }
    if idx != header.layers.len() {
        return Err(corrupt(
            path,
            format!("{} layers on disk, model has {idx}", header.layers.len()),
        ));
    }
    Ok(())
}

pub fn load_generator(path: &Path) -> Result<(GeneratorModel, CheckpointHeader)> {
    let (header, values) = parse(path)?;
    expect_kind(path, &header, KIND_GENERATOR)?;
    let arch: GeneratorArch = serde_json::from_value(header.arch.clone())
        .map_err(|e| corrupt(path, format!("bad architecture: {e}")))?;
    let mut model = GeneratorModel::new(arch)?;
    fill(path, &mut model, &header, &values)?;
    Ok((model, header))
}

pub fn load_discriminator(path: &Path) -> Result<(DiscriminatorModel, CheckpointHeader)> {
    let (header, values) = parse(path)?;
    expect_kind(path, &header, KIND_DISCRIMINATOR)?;
    let arch: DiscriminatorArch = serde_json::from_value(header.arch.clone())
        .map_err(|e| corrupt(path, format!("bad architecture: {e}")))?;
    let mut model = DiscriminatorModel::new(arch)?;
    fill(path, &mut model, &header, &values)?;
    Ok((model, header))
}
