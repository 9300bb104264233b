//! Little-endian model file:
//!
//! ```text
//! "BGEP" | version u32 | N u64 | d u32 | objective u8 | N·d f32 (row-major) | a f64 | b f64
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::{BernoulliModel, DistEmbModel, EmbeddingParams, NceModel};

const MAGIC: &[u8; 4] = b"BGEP";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    BernoulliHamming,
    DistEmbL2,
}

impl ObjectiveKind {
    fn tag(self) -> u8 {
        match self {
            ObjectiveKind::BernoulliHamming => 0,
            ObjectiveKind::DistEmbL2 => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(ObjectiveKind::BernoulliHamming),
            1 => Ok(ObjectiveKind::DistEmbL2),
            t => Err(Error::Format(format!("unknown objective tag {t}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Checkpoint {
    Bernoulli(BernoulliModel),
    DistEmb(DistEmbModel),
}

impl Checkpoint {
    pub fn params(&self) -> &EmbeddingParams {
        match self {
            Checkpoint::Bernoulli(m) => m.params(),
            Checkpoint::DistEmb(m) => m.params(),
        }
    }

    pub fn objective(&self) -> ObjectiveKind {
        match self {
            Checkpoint::Bernoulli(_) => ObjectiveKind::BernoulliHamming,
            Checkpoint::DistEmb(_) => ObjectiveKind::DistEmbL2,
        }
    }
}

/// Parameters are narrowed to f32 on disk.
pub fn write_checkpoint<M: NceModel, W: Write>(mut w: W, model: &M) -> Result<()> {
    let p = model.params();
    let dim = u32::try_from(p.dim()).map_err(|_| Error::InvalidArgument("dimension exceeds u32".into()))?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(p.num_nodes() as u64).to_le_bytes())?;
    w.write_all(&dim.to_le_bytes())?;
    w.write_all(&[model.objective().tag()])?;
    let mut buf = Vec::with_capacity(p.values().len() * 4);
    for &v in p.values() {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    w.write_all(&p.scale.to_le_bytes())?;
    w.write_all(&p.bias.to_le_bytes())?;
    Ok(())
}

fn read_array<const K: usize, R: Read>(r: &mut R) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated model file".into()),
        _ => Error::Io(e),
    })?;
    Ok(b)
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Checkpoint> {
    if &read_array::<4, _>(&mut r)? != MAGIC {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported model version {version}")));
    }
    let num_nodes = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let dim = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let objective = ObjectiveKind::from_tag(read_array::<1, _>(&mut r)?[0])?;
    let count = num_nodes
        .checked_mul(dim)
        .ok_or_else(|| Error::Format("model dimensions overflow".into()))?;
    let mut raw = Vec::new();
    raw.try_reserve_exact(count * 4).map_err(|_| Error::OutOfMemory(count * 4))?;
    raw.resize(count * 4, 0);
    r.read_exact(&mut raw)
        .map_err(|_| Error::Format("truncated model parameters".into()))?;
    let values = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let scale = f64::from_le_bytes(read_array(&mut r)?);
    let bias = f64::from_le_bytes(read_array(&mut r)?);
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after model".into()));
    }
    let params = EmbeddingParams::new(num_nodes, dim, values, scale, bias)?;
    Ok(match objective {
        ObjectiveKind::BernoulliHamming => Checkpoint::Bernoulli(BernoulliModel::from_params(params)),
        ObjectiveKind::DistEmbL2 => Checkpoint::DistEmb(DistEmbModel::from_params(params)),
    })
}
