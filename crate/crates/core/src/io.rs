//! On-disk formats shared by the library and CLI: the raw float-tensor
//! container, pose/gravity JSON ingestion, and atomic file writes.
//!
//! Raw tensor layout (extension-agnostic, conventionally `.pten`): the magic
//! bytes `PTEN`, a little-endian `u32` rank in 1..=4, `rank` little-endian
//! `u32` dims, then the row-major payload as little-endian `f32`. The byte
//! length must match the dims exactly; trailing bytes are an error. Floats
//! round-trip bitwise.

use crate::error::{Error, Result};
use crate::sphere::{Rotation3, UnitVec3};
use serde::Deserialize;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

/// Write `bytes` to `path` atomically: a unique sibling temp file is written,
/// flushed, then renamed over the target, so readers never observe partial
/// files.
pub fn atomic_write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("path has no file name: {}", path.display())))?;
    let tmp = path.with_file_name(format!(
        ".{}.tmp-{}-{n}",
        file_name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| -> Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

/// A rank-1..4 row-major float tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTensorFile {
    pub dims: Vec<usize>,
    pub data: Vec<f32>,
}

const MAGIC: &[u8; 4] = b"PTEN";

impl RawTensorFile {
    pub fn new(dims: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        if dims.is_empty() || dims.len() > 4 {
            return Err(Error::invalid(format!(
                "tensor rank must be 1..=4, got {}",
                dims.len()
            )));
        }
        let elems = dims.iter().try_fold(1usize, |acc, &d| {
            if d == 0 {
                None
            } else {
                acc.checked_mul(d)
            }
        });
        match elems {
            Some(n) if n == data.len() => Ok(RawTensorFile { dims, data }),
            _ => Err(Error::invalid(format!(
                "tensor dims {dims:?} do not match {} elements",
                data.len()
            ))),
        }
    }

    /// Read and strictly validate a raw tensor.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path)?;
        let fail = |detail: String| Error::format(Some(path), detail);
        if bytes.len() < 8 || &bytes[..4] != MAGIC {
            return Err(fail("not a raw tensor (missing PTEN magic)".into()));
        }
        let rank = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        if !(1..=4).contains(&rank) {
            return Err(fail(format!("tensor rank must be 1..=4, got {rank}")));
        }
        let header = 8 + 4 * rank;
        if bytes.len() < header {
            return Err(fail("truncated tensor header".into()));
        }
        let mut dims = Vec::with_capacity(rank);
        let mut elems = 1usize;
        for r in 0..rank {
            let d = u32::from_le_bytes(bytes[8 + 4 * r..12 + 4 * r].try_into().unwrap()) as usize;
            if d == 0 {
                return Err(fail(format!("dimension {r} is zero")));
            }
            elems = elems
                .checked_mul(d)
                .ok_or_else(|| fail("tensor dims overflow".into()))?;
            dims.push(d);
        }
        let expected = header + 4 * elems;
        if bytes.len() != expected {
            return Err(fail(format!(
                "payload length {} does not match dims {dims:?} (expected {expected} bytes total)",
                bytes.len() - header
            )));
        }
        let data = bytes[header..]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Ok(RawTensorFile { dims, data })
    }

    /// Serialize and write atomically.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut bytes = Vec::with_capacity(8 + 4 * self.dims.len() + 4 * self.data.len());
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&(self.dims.len() as u32).to_le_bytes());
        for &d in &self.dims {
            if d > u32::MAX as usize {
                return Err(Error::invalid(format!("dimension {d} exceeds u32")));
            }
            bytes.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for &v in &self.data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        atomic_write_bytes(path.as_ref(), &bytes)
    }
}

/// Per-frame camera-to-world poses plus optional gravity estimates, as
/// consumed by the canonicalization pipeline.
#[derive(Debug, Clone)]
pub struct PoseGravityFile {
    pub poses: Vec<Rotation3>,
    pub gravity: Vec<UnitVec3>,
}

/// One pose: either 9 row-major numbers or 3 rows of 3.
#[derive(Deserialize)]
#[serde(untagged)]
enum PoseRepr {
    Nested([[f64; 3]; 3]),
    Flat([f64; 9]),
}

#[derive(Deserialize)]
struct PoseGravityRepr {
    poses: Vec<PoseRepr>,
    #[serde(default)]
    gravity: Vec<[f64; 3]>,
}

impl PoseGravityFile {
    /// Load and validate. Poses must be rotations (orthonormal, det +1);
    /// gravity vectors must be unit within 1e−3 and are renormalized.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let repr: PoseGravityRepr = serde_json::from_str(&text)
            .map_err(|e| Error::format(Some(path), format!("pose JSON: {e}")))?;
        let mut poses = Vec::with_capacity(repr.poses.len());
        for (idx, p) in repr.poses.into_iter().enumerate() {
            let rows = match p {
                PoseRepr::Nested(rows) => rows,
                PoseRepr::Flat(f) => [
                    [f[0], f[1], f[2]],
                    [f[3], f[4], f[5]],
                    [f[6], f[7], f[8]],
                ],
            };
            let rot = Rotation3::from_rows(rows)
                .map_err(|e| Error::format(Some(path), format!("pose {idx}: {e}")))?;
            poses.push(rot);
        }
        let mut gravity = Vec::with_capacity(repr.gravity.len());
        for (idx, [x, y, z]) in repr.gravity.into_iter().enumerate() {
            let norm = (x * x + y * y + z * z).sqrt();
            if (norm - 1.0).abs() > 1e-3 {
                return Err(Error::format(
                    Some(path),
                    format!("gravity {idx}: norm {norm} is not within 1e-3 of unit"),
                ));
            }
            let v = UnitVec3::normalize(x, y, z)
                .map_err(|e| Error::format(Some(path), format!("gravity {idx}: {e}")))?;
            gravity.push(v);
        }
        Ok(PoseGravityFile { poses, gravity })
    }
}
