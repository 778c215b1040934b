//! JSON formats for disks, maps and polytopes.
//!
//! Every rational is written as the string `"p/q"` (or `"p"`), so files
//! round-trip exactly.

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{SLDisk, Tri};
use crate::exact::Point;

pub const DISK_VERSION: &str = "sl-disk/1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format version {0:?}")]
    Version(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DiskRepr {
    #[serde(default = "default_version")]
    version: String,
    vertices: Vec<Point>,
    triangles: Vec<Tri>,
}

fn default_version() -> String {
    DISK_VERSION.to_string()
}

/// Serde adapter for [`SLDisk`]; the boundary is derived on load, and the
/// result is not validated (callers run [`SLDisk::validate`]).
pub mod disk_repr {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &SLDisk, ser: S) -> Result<S::Ok, S::Error> {
        DiskRepr {
            version: DISK_VERSION.to_string(),
            vertices: d.vertices().to_vec(),
            triangles: d.triangles().to_vec(),
        }
        .serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<SLDisk, D::Error> {
        let r = DiskRepr::deserialize(de)?;
        if r.version != DISK_VERSION {
            return Err(serde::de::Error::custom(format!("unsupported version {:?}", r.version)));
        }
        Ok(SLDisk::unchecked(r.vertices, r.triangles))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct DiskWrap(#[serde(with = "disk_repr")] SLDisk);

pub fn disk_to_json(d: &SLDisk) -> String {
    to_json(&DiskWrap(d.clone()))
}

pub fn disk_from_json(s: &str) -> Result<SLDisk, IoError> {
    let w: DiskWrap = serde_json::from_str(s)?;
    Ok(w.0)
}

/// Pretty JSON with a trailing newline. Output is deterministic: maps are
/// ordered and there is no floating point.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T, IoError> {
    Ok(serde_json::from_str(s)?)
}

pub fn read_json<T: DeserializeOwned>(path: &std::path::Path) -> Result<T, IoError> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn read_disk(path: &std::path::Path) -> Result<SLDisk, IoError> {
    disk_from_json(&std::fs::read_to_string(path)?)
}
