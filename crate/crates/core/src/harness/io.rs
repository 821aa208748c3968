//! `LPF1` field files, their JSON sidecars and small output helpers.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{RealField, SpectralField, TorusGrid, C64};

const MAGIC: &[u8; 4] = b"LPF1";
const VERSION: u32 = 1;

/// Contents of an `LPF1` file.
#[derive(Clone, Debug)]
pub enum FieldFile {
    Spectral(SpectralField),
    Real(RealField),
}

fn encode(grid: &TorusGrid, tag: u8, comps: &[Vec<C64>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(29 + comps.len() * grid.len() * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&2u32.to_le_bytes());
    out.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    out.extend_from_slice(&grid.period().to_le_bytes());
    out.extend_from_slice(&(comps.len() as u32).to_le_bytes());
    out.push(tag);
    for c in comps {
        for v in c {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    out
}

pub fn write_spectral(path: &Path, f: &SpectralField) -> Result<()> {
    write_bytes(path, &encode(f.grid(), 0, f.components()))
}

pub fn write_real(path: &Path, f: &RealField) -> Result<()> {
    write_bytes(path, &encode(f.grid(), 1, f.components()))
}

fn take<'a>(buf: &mut &'a [u8], n: usize) -> Result<&'a [u8]> {
    if buf.len() < n {
        return Err(Error::Format("truncated LPF1 file".into()));
    }
    let (head, tail) = buf.split_at(n);
    *buf = tail;
    Ok(head)
}

fn u32_at(buf: &mut &[u8]) -> Result<u32> {
    Ok(u32::from_le_bytes(take(buf, 4)?.try_into().expect("four bytes")))
}

fn f64_at(buf: &mut &[u8]) -> Result<f64> {
    Ok(f64::from_le_bytes(take(buf, 8)?.try_into().expect("eight bytes")))
}

pub fn decode(bytes: &[u8]) -> Result<FieldFile> {
    let mut buf = bytes;
    if take(&mut buf, 4)? != MAGIC {
        return Err(Error::Format("missing LPF1 magic".into()));
    }
    let version = u32_at(&mut buf)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let d = u32_at(&mut buf)?;
    if d != 2 {
        return Err(Error::Format(format!("dimension {d} is not 2")));
    }
    let n = u32_at(&mut buf)? as usize;
    let l = f64_at(&mut buf)?;
    let ncomp = u32_at(&mut buf)? as usize;
    let tag = take(&mut buf, 1)?[0];
    let grid = TorusGrid::new(n, l)?;
    if buf.len() != ncomp * grid.len() * 16 {
        return Err(Error::Format(format!(
            "payload holds {} bytes, expected {}",
            buf.len(),
            ncomp * grid.len() * 16
        )));
    }
    let mut comps = Vec::with_capacity(ncomp);
    for _ in 0..ncomp {
        let mut c = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = f64_at(&mut buf)?;
            let im = f64_at(&mut buf)?;
            c.push(C64::new(re, im));
        }
        comps.push(c);
    }
    match tag {
        0 => Ok(FieldFile::Spectral(SpectralField::new(grid, comps)?)),
        1 => Ok(FieldFile::Real(RealField::new(grid, comps)?)),
        t => Err(Error::Format(format!("unknown domain tag {t}"))),
    }
}

pub fn read_field(path: &Path) -> Result<FieldFile> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

/// Sidecar written next to every field file.
#[derive(Clone, Debug, Serialize)]
pub struct Meta<P: Serialize> {
    pub format: &'static str,
    pub op: String,
    pub code_version: &'static str,
    pub parameters: P,
}

impl<P: Serialize> Meta<P> {
    pub fn new(op: &str, parameters: P) -> Self {
        Self { format: "LPF1", op: op.into(), code_version: env!("CARGO_PKG_VERSION"), parameters }
    }
}

/// `dir/u0.lpf1` -> `dir/u0.meta.json`.
pub fn meta_path(field: &Path) -> PathBuf {
    field.with_extension("meta.json")
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_bytes(path, s.as_bytes())
}
