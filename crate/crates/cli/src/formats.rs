//! Binary kernel-cache (`LSKT`) and field-snapshot (`LSFD`) files.
//!
//! Both are little-endian with a fixed header followed by raw `f64` arrays.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use landau_core::KernelTables;

use crate::error::{CliError, Result};

pub const KERNEL_MAGIC: &[u8; 4] = b"LSKT";
pub const SNAPSHOT_MAGIC: &[u8; 4] = b"LSFD";
pub const VERSION: u32 = 1;

/// Physical samples of a field on the `P^3` grid, row-major with `v3`
/// fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub points: usize,
    pub half_width: f64,
    pub gamma: f64,
    pub t: f64,
    pub values: Vec<f64>,
}

struct Reader<'a, R> {
    inner: R,
    path: &'a Path,
}

impl<R: Read> Reader<'_, R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                self.malformed("truncated file")
            } else {
                CliError::io(self.path, e)
            }
        })?;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        if &self.bytes::<4>()? != magic {
            return Err(self.malformed(&format!(
                "bad magic, expected {}",
                String::from_utf8_lossy(magic)
            )));
        }
        let version = self.u32()?;
        if version != VERSION {
            return Err(self.malformed(&format!("unsupported version {version}")));
        }
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        let mut extra = [0u8; 1];
        match self.inner.read(&mut extra) {
            Ok(0) => Ok(()),
            Ok(_) => Err(self.malformed("trailing bytes")),
            Err(e) => Err(CliError::io(self.path, e)),
        }
    }

    fn malformed(&self, msg: &str) -> CliError {
        CliError::Format {
            path: self.path.to_path_buf(),
            msg: msg.to_string(),
        }
    }
}

fn open(path: &Path) -> Result<Reader<'_, BufReader<File>>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(Reader {
        inner: BufReader::new(file),
        path,
    })
}

fn write_all(path: &Path, fill: impl FnOnce(&mut Vec<u8>)) -> Result<()> {
    let mut bytes = Vec::new();
    fill(&mut bytes);
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

fn put_f64s(out: &mut Vec<u8>, xs: &[f64]) {
    for x in xs {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

fn dimension(points: usize) -> u32 {
    u32::try_from(points).expect("grid dimension exceeds u32")
}

fn cube(reader: &Reader<'_, impl Read>, p: u32) -> Result<usize> {
    let p = p as usize;
    if p == 0 || p > 4096 {
        return Err(reader.malformed(&format!("implausible grid dimension {p}")));
    }
    Ok(p * p * p)
}

pub fn write_kernel_cache(path: &Path, tables: &KernelTables) -> Result<()> {
    write_all(path, |out| {
        out.extend_from_slice(KERNEL_MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&tables.gamma().to_le_bytes());
        out.extend_from_slice(&tables.half_width().to_le_bytes());
        out.extend_from_slice(&dimension(tables.points()).to_le_bytes());
        put_f64s(out, tables.a());
        put_f64s(out, tables.b());
        for t in 0..6 {
            put_f64s(out, tables.c(t));
        }
    })
}

pub fn read_kernel_cache(path: &Path) -> Result<KernelTables> {
    let mut r = open(path)?;
    r.header(KERNEL_MAGIC)?;
    let gamma = r.f64()?;
    let half_width = r.f64()?;
    let p = r.u32()?;
    let len = cube(&r, p)?;
    let a = r.f64s(len)?;
    let b = r.f64s(len)?;
    let c = [
        r.f64s(len)?,
        r.f64s(len)?,
        r.f64s(len)?,
        r.f64s(len)?,
        r.f64s(len)?,
        r.f64s(len)?,
    ];
    r.finish()?;
    Ok(KernelTables::from_parts(
        gamma, half_width, p as usize, a, b, c,
    )?)
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    assert_eq!(
        snap.values.len(),
        snap.points.pow(3),
        "snapshot size mismatch"
    );
    write_all(path, |out| {
        out.extend_from_slice(SNAPSHOT_MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&dimension(snap.points).to_le_bytes());
        out.extend_from_slice(&snap.half_width.to_le_bytes());
        out.extend_from_slice(&snap.gamma.to_le_bytes());
        out.extend_from_slice(&snap.t.to_le_bytes());
        put_f64s(out, &snap.values);
    })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut r = open(path)?;
    r.header(SNAPSHOT_MAGIC)?;
    let p = r.u32()?;
    let half_width = r.f64()?;
    let gamma = r.f64()?;
    let t = r.f64()?;
    let len = cube(&r, p)?;
    let values = r.f64s(len)?;
    r.finish()?;
    Ok(Snapshot {
        points: p as usize,
        half_width,
        gamma,
        t,
        values,
    })
}
