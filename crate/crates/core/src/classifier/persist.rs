//! Binary model files.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! "DLAM" | u32 version | u32 len, task name | u64 dim | u64 hash seed
//! | u64 train seed | u32 epochs | f64 lr | f64 l2 | f64 final loss
//! | u32 K | K*dim f64 weights | K f64 bias | u64 FNV-1a of all prior bytes
//! ```

use super::features::{fnv1a64, FeatureConfig};
use super::linear::{LinearModel, TrainingMeta};
use super::{ClassifierError, Task};
use std::io::Write;
use std::path::Path;

pub const MODEL_MAGIC: &[u8; 4] = b"DLAM";
pub const MODEL_VERSION: u32 = 1;

pub fn encode_model(m: &LinearModel) -> Vec<u8> {
    let mut b = Vec::with_capacity(64 + 8 * (m.weights.len() + m.bias.len()));
    b.extend_from_slice(MODEL_MAGIC);
    b.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    let name = m.task.name().as_bytes();
    b.extend_from_slice(&(name.len() as u32).to_le_bytes());
    b.extend_from_slice(name);
    b.extend_from_slice(&(m.features.dim as u64).to_le_bytes());
    b.extend_from_slice(&m.features.hash_seed.to_le_bytes());
    b.extend_from_slice(&m.meta.seed.to_le_bytes());
    b.extend_from_slice(&m.meta.epochs.to_le_bytes());
    b.extend_from_slice(&m.meta.lr.to_le_bytes());
    b.extend_from_slice(&m.meta.l2.to_le_bytes());
    b.extend_from_slice(&m.meta.final_loss.to_le_bytes());
    b.extend_from_slice(&(m.bias.len() as u32).to_le_bytes());
    for v in m.weights.iter().chain(&m.bias) {
        b.extend_from_slice(&v.to_le_bytes());
    }
    let sum = fnv1a64(&b);
    b.extend_from_slice(&sum.to_le_bytes());
    b
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ClassifierError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| ClassifierError::CorruptModel("truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, ClassifierError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ClassifierError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, ClassifierError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_model(bytes: &[u8]) -> Result<LinearModel, ClassifierError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != MODEL_MAGIC {
        return Err(ClassifierError::CorruptModel("bad magic".into()));
    }
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(ClassifierError::VersionMismatch(version));
    }
    if bytes.len() < 16 {
        return Err(ClassifierError::CorruptModel("truncated".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    if fnv1a64(body) != u64::from_le_bytes(tail.try_into().unwrap()) {
        return Err(ClassifierError::CorruptModel("checksum mismatch".into()));
    }
    let mut r = Reader { buf: body, pos: 8 };
    let name_len = r.u32()? as usize;
    let name = std::str::from_utf8(r.take(name_len)?)
        .map_err(|_| ClassifierError::CorruptModel("task name is not UTF-8".into()))?;
    let task: Task = name
        .parse()
        .map_err(|_| ClassifierError::CorruptModel(format!("unknown task {name:?}")))?;
    let dim = r.u64()? as usize;
    if !dim.is_power_of_two() {
        return Err(ClassifierError::CorruptModel(format!("dimension {dim} is not a power of two")));
    }
    let hash_seed = r.u64()?;
    let meta = TrainingMeta {
        seed: r.u64()?,
        epochs: r.u32()?,
        lr: r.f64()?,
        l2: r.f64()?,
        final_loss: r.f64()?,
    };
    let k = r.u32()? as usize;
    if k != task.num_labels() {
        return Err(ClassifierError::CorruptModel(format!(
            "{k} labels stored for task {task} with {}",
            task.num_labels()
        )));
    }
    let expected = k
        .checked_mul(dim)
        .and_then(|n| n.checked_add(k))
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| ClassifierError::CorruptModel("parameter count overflows".into()))?;
    if body.len() - r.pos != expected {
        return Err(ClassifierError::CorruptModel("parameter block has the wrong size".into()));
    }
    let params: Vec<f64> = (0..k * dim + k).map(|_| r.f64()).collect::<Result<_, _>>()?;
    let (weights, bias) = params.split_at(k * dim);
    Ok(LinearModel {
        task,
        features: FeatureConfig { dim, hash_seed },
        weights: weights.to_vec(),
        bias: bias.to_vec(),
        meta,
    })
}

/// Writes the model atomically (temporary file in the target directory,
/// then rename).
pub fn save_model(model: &LinearModel, path: &Path) -> Result<(), ClassifierError> {
    let io = |source| ClassifierError::IoFailure {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(&encode_model(model)).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<LinearModel, ClassifierError> {
    let bytes = std::fs::read(path).map_err(|source| ClassifierError::IoFailure {
        path: path.display().to_string(),
        source,
    })?;
    decode_model(&bytes)
}
