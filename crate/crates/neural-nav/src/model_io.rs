use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::params::{Hyperparams, ModelParams};
use crate::tensor::Tensor;
use crate::NavError;

const MAGIC: &[u8; 8] = b"NEUGNAV1";
const VERSION: u32 = 1;

/// Serializes all model tensors (little-endian f32 payloads) plus the
/// hyperparameter block. Byte-exact across save/load/save cycles.
pub fn save_model(params: &ModelParams, path: impl AsRef<Path>) -> Result<(), NavError> {
    save_with_extras(params, &[], path)
}

/// Model file plus extra named tensors (optimizer state in checkpoints).
/// Extra names must start with `opt.`.
pub fn save_with_extras(
    params: &ModelParams,
    extras: &[(String, Tensor)],
    path: impl AsRef<Path>,
) -> Result<(), NavError> {
    let mut named: Vec<(String, Tensor)> = Vec::new();
    params.visit(|name, t| named.push((name.to_string(), t.clone())));
    for (name, t) in extras {
        debug_assert!(name.starts_with("opt."));
        named.push((name.clone(), t.clone()));
    }

    let file = fs::File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC)?;
    write_u32(&mut w, VERSION)?;
    for value in hyperparam_block(&params.hp) {
        write_u32(&mut w, value)?;
    }
    write_u32(&mut w, named.len() as u32)?;
    for (name, tensor) in &named {
        write_u32(&mut w, name.len() as u32)?;
        w.write_all(name.as_bytes())?;
        write_u32(&mut w, tensor.shape().len() as u32)?;
        for &dim in tensor.shape() {
            write_u32(&mut w, dim as u32)?;
        }
        for &v in tensor.data() {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelParams, NavError> {
    let (params, extras) = load_with_extras(path)?;
    if let Some(name) = extras.keys().next() {
        return Err(NavError::Load(format!("unexpected tensor `{name}` in model file")));
    }
    Ok(params)
}

pub fn load_with_extras(
    path: impl AsRef<Path>,
) -> Result<(ModelParams, BTreeMap<String, Tensor>), NavError> {
    let file = fs::File::open(path.as_ref())?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 8];
    read_exact(&mut r, &mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(NavError::Load("bad magic; not a model file".into()));
    }
    let version = read_u32(&mut r, "version")?;
    if version != VERSION {
        return Err(NavError::Load(format!(
            "unsupported format version {version}, expected {VERSION}"
        )));
    }
    let block: Vec<u32> = (0..9)
        .map(|_| read_u32(&mut r, "hyperparameters"))
        .collect::<Result<_, _>>()?;
    let hp = hyperparams_from_block(&block)?;

    let count = read_u32(&mut r, "tensor count")? as usize;
    let mut tensors: BTreeMap<String, Tensor> = BTreeMap::new();
    for _ in 0..count {
        let name_len = read_u32(&mut r, "tensor name length")? as usize;
        let mut name_bytes = vec![0u8; name_len];
        read_exact(&mut r, &mut name_bytes, "tensor name")?;
        let name = String::from_utf8(name_bytes)
            .map_err(|_| NavError::Load("tensor name is not UTF-8".into()))?;
        let rank = read_u32(&mut r, "tensor rank")? as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(read_u32(&mut r, "tensor dims")? as usize);
        }
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut buf = [0u8; 4];
        for _ in 0..len {
            read_exact(&mut r, &mut buf, &format!("data of `{name}`"))?;
            data.push(f32::from_le_bytes(buf) as f64);
        }
        if tensors.insert(name.clone(), Tensor::from_vec(&shape, data)).is_some() {
            return Err(NavError::Load(format!("duplicate tensor `{name}`")));
        }
    }

    // place every expected tensor, validating shapes against the hyperparams
    let mut params = zeros_for(hp)?;
    let mut missing = Vec::new();
    params.visit_mut(|name, t| match tensors.remove(name) {
        Some(loaded) => {
            if loaded.shape() == t.shape() {
                *t = loaded;
            } else {
                missing.push(NavError::Load(format!(
                    "tensor `{name}` has shape {:?}, expected {:?}",
                    loaded.shape(),
                    t.shape()
                )));
            }
        }
        None => missing.push(NavError::Load(format!("missing tensor `{name}`"))),
    });
    if let Some(err) = missing.into_iter().next() {
        return Err(err);
    }
    let extras = tensors;
    for name in extras.keys() {
        if !name.starts_with("opt.") {
            return Err(NavError::Load(format!("unknown tensor `{name}`")));
        }
    }
    Ok((params, extras))
}

fn zeros_for(hp: Hyperparams) -> Result<ModelParams, NavError> {
    let mut params = ModelParams::init(hp, 0)?;
    params.visit_mut(|_, t| t.fill(0.0));
    Ok(params)
}

fn hyperparam_block(hp: &Hyperparams) -> [u32; 9] {
    [
        hp.dim as u32,
        hp.layers as u32,
        hp.heads as u32,
        hp.ffn_dim as u32,
        hp.window as u32,
        hp.vocab as u32,
        hp.label_vocab as u32,
        hp.max_len as u32,
        hp.gcn_layers as u32,
    ]
}

fn hyperparams_from_block(block: &[u32]) -> Result<Hyperparams, NavError> {
    let hp = Hyperparams {
        dim: block[0] as usize,
        layers: block[1] as usize,
        heads: block[2] as usize,
        ffn_dim: block[3] as usize,
        window: block[4] as usize,
        vocab: block[5] as usize,
        label_vocab: block[6] as usize,
        max_len: block[7] as usize,
        gcn_layers: block[8] as usize,
    };
    hp.validate()?;
    Ok(hp)
}

fn write_u32(w: &mut impl Write, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn read_u32(r: &mut impl Read, what: &str) -> Result<u32, NavError> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf, what)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], what: &str) -> Result<(), NavError> {
    r.read_exact(buf)
        .map_err(|_| NavError::Load(format!("truncated file while reading {what}")))
}
