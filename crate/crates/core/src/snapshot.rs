//! KPF1 binary field snapshots.
//!
//! Layout: magic `KPF1`, then little-endian `u32` version (1), `u64 nx`, `u64 ny`,
//! `f64 Lx`, `f64 Ly`, `f64 t`, followed by `nx * ny` samples in `j * nx + i` order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{KpError, Result};
use crate::spectral::{Grid2D, RealField};

const MAGIC: &[u8; 4] = b"KPF1";
const VERSION: u32 = 1;

/// A field together with its time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: RealField,
}

pub fn write_snapshot(w: &mut impl Write, field: &RealField, t: f64) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.nx() as u64).to_le_bytes())?;
    w.write_all(&(g.ny() as u64).to_le_bytes())?;
    w.write_all(&g.lx().to_le_bytes())?;
    w.write_all(&g.ly().to_le_bytes())?;
    w.write_all(&t.to_le_bytes())?;
    for v in field.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| KpError::Format(format!("truncated header: {e}")))?;
    Ok(buf)
}

pub fn read_snapshot(r: &mut impl Read) -> Result<Snapshot> {
    let magic: [u8; 4] = read_array(r)?;
    if &magic != MAGIC {
        return Err(KpError::Format(format!("bad magic {magic:?}")));
    }
    let version = u32::from_le_bytes(read_array(r)?);
    if version != VERSION {
        return Err(KpError::Format(format!("unsupported version {version}")));
    }
    let nx = u64::from_le_bytes(read_array(r)?) as usize;
    let ny = u64::from_le_bytes(read_array(r)?) as usize;
    let lx = f64::from_le_bytes(read_array(r)?);
    let ly = f64::from_le_bytes(read_array(r)?);
    let t = f64::from_le_bytes(read_array(r)?);
    let grid = Grid2D::new(nx, ny, lx, ly)?;
    let mut bytes = vec![0u8; grid.len() * 8];
    r.read_exact(&mut bytes)
        .map_err(|e| KpError::Format(format!("truncated samples: {e}")))?;
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(Snapshot {
        t,
        field: RealField::new(&grid, data)?,
    })
}

pub fn save(path: impl AsRef<Path>, field: &RealField, t: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_snapshot(&mut w, field, t)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Snapshot> {
    read_snapshot(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid2D::new(16, 8, 3.5, 1.25).unwrap();
        let f = RealField::from_fn(&g, |x, y| (x * 1.7).sin() * y.exp() + 1e-300);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.125).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 16 + 24 + 8 * g.len());
        let s = read_snapshot(&mut buf.as_slice()).unwrap();
        assert_eq!(s.t, 0.125);
        assert_eq!(s.field.grid(), &g);
        for (a, b) in s.field.data().iter().zip(f.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let g = Grid2D::new(8, 8, 1.0, 1.0).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &RealField::zeros(&g), 0.0).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_snapshot(&mut bad.as_slice()),
            Err(KpError::Format(_))
        ));
        buf.truncate(buf.len() - 3);
        assert!(matches!(
            read_snapshot(&mut buf.as_slice()),
            Err(KpError::Format(_))
        ));
    }
}
