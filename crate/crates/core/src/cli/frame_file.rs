//! Frame container.
//!
//! ```text
//! GAUGEWAVE-FRAME 1\n
//! <one line of JSON metadata>\n
//! <chunk 0><chunk 1>...
//! ```
//!
//! Each chunk is `len` little-endian `f64` values, in the order listed in
//! `metadata.chunks`. Node ordering inside a chunk is that of
//! [`CartesianGrid`](crate::electrodynamics::CartesianGrid): `x₁` fastest.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::electrodynamics::{CartesianFieldFrame, CartesianGrid};
use crate::error::{Error, Result};

pub const MAGIC: &str = "GAUGEWAVE-FRAME 1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkInfo {
    pub name: String,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMetadata {
    pub grid: CartesianGrid,
    pub time: f64,
    pub velocity: [f64; 3],
    pub gamma: f64,
    pub omega0: f64,
    pub omega: f64,
    pub k1: f64,
    pub q: f64,
    pub warnings: Vec<String>,
    pub chunks: Vec<ChunkInfo>,
}

fn chunks(frame: &CartesianFieldFrame) -> Vec<(String, &[f64])> {
    let mut out: Vec<(String, &[f64])> = vec![
        ("psi_re".into(), &frame.psi_re),
        ("psi_im".into(), &frame.psi_im),
        ("phi".into(), &frame.phi_pot),
        ("rho".into(), &frame.rho),
    ];
    for (name, v) in [("a", &frame.a_pot), ("e", &frame.e_field), ("h", &frame.h_field), ("j", &frame.j_current)] {
        for (c, comp) in v.iter().enumerate() {
            out.push((format!("{name}{}", c + 1), comp));
        }
    }
    out
}

pub fn write_frame(path: &Path, frame: &CartesianFieldFrame) -> Result<()> {
    let data = chunks(frame);
    let meta = FrameMetadata {
        grid: frame.grid,
        time: frame.time,
        velocity: frame.velocity,
        gamma: frame.gamma,
        omega0: frame.omega0,
        omega: frame.omega,
        k1: frame.k1,
        q: frame.q,
        warnings: frame.warnings.clone(),
        chunks: data.iter().map(|(n, v)| ChunkInfo { name: n.clone(), len: v.len() }).collect(),
    };
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "{}", serde_json::to_string(&meta).map_err(|e| Error::Parse(e.to_string()))?)?;
    for (_, values) in &data {
        for v in *values {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_frame(path: &Path) -> Result<(FrameMetadata, Vec<(String, Vec<f64>)>)> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut line = String::new();
    r.read_line(&mut line)?;
    if line.trim_end() != MAGIC {
        return Err(Error::Parse(format!("{}: not a frame file", path.display())));
    }
    line.clear();
    r.read_line(&mut line)?;
    let meta: FrameMetadata =
        serde_json::from_str(&line).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut out = Vec::with_capacity(meta.chunks.len());
    let mut buf = [0u8; 8];
    for chunk in &meta.chunks {
        let mut values = Vec::with_capacity(chunk.len);
        for _ in 0..chunk.len {
            r.read_exact(&mut buf)
                .map_err(|_| Error::Parse(format!("{}: chunk {} is truncated", path.display(), chunk.name)))?;
            values.push(f64::from_le_bytes(buf));
        }
        out.push((chunk.name.clone(), values));
    }
    Ok((meta, out))
}
