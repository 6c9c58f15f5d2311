//! Checkpoint file: `HEXNN1`, an architecture tag byte, the parameter count as
//! little-endian u64, then that many little-endian f64 values.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{Architecture, NetworkParams};

const MAGIC: &[u8; 6] = b"HEXNN1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckpointKind {
    Network(Architecture),
    /// After-state value table of the tabular learner.
    Tabular,
}

impl CheckpointKind {
    fn tag(self) -> u8 {
        match self {
            CheckpointKind::Network(Architecture::ValueCnn) => 0,
            CheckpointKind::Network(Architecture::PolicyCnn) => 1,
            CheckpointKind::Network(Architecture::ValueRnn) => 2,
            CheckpointKind::Tabular => 3,
        }
    }

    fn from_tag(t: u8) -> Result<Self> {
        Ok(match t {
            0 => CheckpointKind::Network(Architecture::ValueCnn),
            1 => CheckpointKind::Network(Architecture::PolicyCnn),
            2 => CheckpointKind::Network(Architecture::ValueRnn),
            3 => CheckpointKind::Tabular,
            _ => return Err(Error::format(format!("unknown architecture tag {t}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub kind: CheckpointKind,
    pub values: Vec<f64>,
}

impl Checkpoint {
    pub fn from_params(p: &NetworkParams<f64>) -> Self {
        Checkpoint {
            kind: CheckpointKind::Network(p.arch()),
            values: p.flat().to_vec(),
        }
    }

    pub fn into_params(self) -> Result<NetworkParams<f64>> {
        match self.kind {
            CheckpointKind::Network(arch) => NetworkParams::from_flat(arch, self.values),
            CheckpointKind::Tabular => Err(Error::format("checkpoint holds a table, not a network")),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(15 + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.push(self.kind.tag());
        out.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = bytes;
        let mut magic = [0u8; 6];
        read_exact(&mut r, &mut magic)?;
        if &magic != MAGIC {
            return Err(Error::format("bad checkpoint magic"));
        }
        let mut tag = [0u8; 1];
        read_exact(&mut r, &mut tag)?;
        let kind = CheckpointKind::from_tag(tag[0])?;
        let mut n = [0u8; 8];
        read_exact(&mut r, &mut n)?;
        let n = u64::from_le_bytes(n) as usize;
        if r.len() != 8 * n {
            return Err(Error::format(format!("checkpoint declares {n} values but carries {} bytes", r.len())));
        }
        let values = r.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Checkpoint { kind, values })
    }
}

fn read_exact(r: &mut &[u8], buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|_| Error::format("truncated checkpoint"))
}

pub fn write_checkpoint(path: &Path, c: &Checkpoint) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&c.to_bytes())?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    Checkpoint::from_bytes(&std::fs::read(path)?)
}
