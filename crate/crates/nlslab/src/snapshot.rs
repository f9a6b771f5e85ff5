//! Binary state snapshots: magic "NLSS", a format version, the grid
//! geometry, the time tag, and the raw samples, all little-endian and
//! fixed-width so files round trip bit-exactly across platforms.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"NLSS";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Write a field to disk. Layout: magic, version (u32), dimension (u32),
/// points per axis (u32 each), half length per axis (f64 each), time
/// (f64), then `M^d` samples as interleaved re/im f64 pairs, row-major.
pub fn save_snapshot(field: &Field, path: &Path) -> Result<()> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(40 + 16 * field.values().len());
    buf.extend_from_slice(&SNAPSHOT_MAGIC);
    buf.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    for _ in 0..grid.dim() {
        buf.extend_from_slice(&(grid.points_per_axis() as u32).to_le_bytes());
    }
    for _ in 0..grid.dim() {
        buf.extend_from_slice(&grid.half_length().to_le_bytes());
    }
    buf.extend_from_slice(&field.time().to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.offset + n > self.bytes.len() {
            return Err(Error::Format {
                offset: self.bytes.len() as u64,
                message: format!(
                    "truncated while reading {what}: need {n} bytes at offset {}, file has {}",
                    self.offset,
                    self.bytes.len()
                ),
            });
        }
        let s = &self.bytes[self.offset..self.offset + n];
        self.offset += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let s = self.take(4, what)?;
        Ok(u32::from_le_bytes(s.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let s = self.take(8, what)?;
        Ok(f64::from_le_bytes(s.try_into().unwrap()))
    }
}

/// Read a snapshot back. Rejects wrong magic, unknown versions, geometry
/// the grid module cannot represent, and truncated or oversized payloads,
/// naming the byte offset of the problem.
pub fn load_snapshot(path: &Path) -> Result<Field> {
    let bytes = fs::read(path)?;
    let mut r = Reader { bytes: &bytes, offset: 0 };

    let magic = r.take(4, "magic")?;
    if magic != SNAPSHOT_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!("bad magic {magic:02x?}, expected \"NLSS\""),
        });
    }
    let version_at = r.offset;
    let version = r.u32("version")?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format {
            offset: version_at as u64,
            message: format!("unsupported version {version}, this build reads {SNAPSHOT_VERSION}"),
        });
    }
    let dim_at = r.offset;
    let dim = r.u32("dimension")? as usize;
    if dim == 0 || dim > 2 {
        return Err(Error::Format {
            offset: dim_at as u64,
            message: format!("dimension {dim} outside the supported range 1..=2"),
        });
    }
    let points_at = r.offset;
    let mut points = Vec::with_capacity(dim);
    for _ in 0..dim {
        points.push(r.u32("points per axis")? as usize);
    }
    if points.iter().any(|&m| m != points[0]) {
        return Err(Error::Format {
            offset: points_at as u64,
            message: format!("anisotropic point counts {points:?} are not supported"),
        });
    }
    let lengths_at = r.offset;
    let mut lengths = Vec::with_capacity(dim);
    for _ in 0..dim {
        lengths.push(r.f64("half length per axis")?);
    }
    if lengths.iter().any(|&l| l.to_bits() != lengths[0].to_bits()) {
        return Err(Error::Format {
            offset: lengths_at as u64,
            message: format!("anisotropic half lengths {lengths:?} are not supported"),
        });
    }
    let time = r.f64("time tag")?;

    let grid = Grid::new(lengths[0], points[0], dim).map_err(|e| Error::Format {
        offset: points_at as u64,
        message: format!("invalid grid geometry: {e}"),
    })?;
    let n = grid.len();
    let payload_at = r.offset;
    let payload = r.take(16 * n, "samples")?;
    if r.offset != bytes.len() {
        return Err(Error::Format {
            offset: r.offset as u64,
            message: format!(
                "{} trailing bytes after the {n}-sample payload",
                bytes.len() - r.offset
            ),
        });
    }
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let at = 16 * i;
        let re = f64::from_le_bytes(payload[at..at + 8].try_into().unwrap());
        let im = f64::from_le_bytes(payload[at + 8..at + 16].try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    Field::from_values(&grid, time, values).map_err(|e| Error::Format {
        offset: payload_at as u64,
        message: format!("payload rejected: {e}"),
    })
}
