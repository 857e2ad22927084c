//! Binary state snapshots.
//!
//! Layout (all little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "GVNS"
//! 4       4     version (u32, currently 1)
//! 8       8     d (u64)
//! 16      8     nx (u64)
//! 24      8     nv (u64)
//! 32      8     M (u64)
//! 40      8     Lv (f64)
//! 48      8     t (f64)
//! 56      8     s (f64)
//! 64      8     sigma (f64)
//! 72      8     lambda (f64)
//! 80      8     f_len (u64) = Nx^d * Nv^d
//! 88      ...   f values (f64), row-major [x1(,x2), v1(,v2)], last fastest
//! ...     ...   u coefficients per component: Nx^d complex as (re, im) f64
//!               pairs, FFT index order, last spatial axis fastest
//! end-4   4     CRC32 (IEEE) of every preceding byte
//! ```
//!
//! Writing then reading then writing again reproduces identical bytes.

use crate::error::{GvnsError, Result};
use crate::field::{DistPhysical, FluidSpectral};
use crate::grid::PhaseGrid;
use num_complex::Complex64;
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"GVNS";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub grid: PhaseGrid,
    pub m: usize,
    pub t: f64,
    pub s: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub f: DistPhysical,
    pub u: FluidSpectral,
}

fn put_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(buf: &mut Vec<u8>, v: f64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(GvnsError::Snapshot(format!(
                "truncated file: wanted {} bytes at offset {}, have {}",
                n,
                self.pos,
                self.buf.len()
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn to_bytes(snap: &Snapshot) -> Vec<u8> {
    let g = &snap.grid;
    let mut buf = Vec::with_capacity(92 + 8 * g.len() + 16 * g.d * g.nxd());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    put_u64(&mut buf, g.d as u64);
    put_u64(&mut buf, g.nx as u64);
    put_u64(&mut buf, g.nv as u64);
    put_u64(&mut buf, snap.m as u64);
    put_f64(&mut buf, g.lv);
    put_f64(&mut buf, snap.t);
    put_f64(&mut buf, snap.s);
    put_f64(&mut buf, snap.sigma);
    put_f64(&mut buf, snap.lambda);
    put_u64(&mut buf, snap.f.values.len() as u64);
    for v in &snap.f.values {
        put_f64(&mut buf, *v);
    }
    for comp in &snap.u.coeffs {
        for z in comp {
            put_f64(&mut buf, z.re);
            put_f64(&mut buf, z.im);
        }
    }
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    buf
}

pub fn from_bytes(buf: &[u8]) -> Result<Snapshot> {
    if buf.len() < 92 {
        return Err(GvnsError::Snapshot(format!(
            "file too short: {} bytes",
            buf.len()
        )));
    }
    let (body, crc_bytes) = buf.split_at(buf.len() - 4);
    let stored = u32::from_le_bytes(crc_bytes.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(GvnsError::SnapshotCrc {
            offset: body.len() as u64,
            stored,
            computed,
        });
    }
    let mut r = Reader { buf: body, pos: 0 };
    let magic = r.take(4)?;
    if magic != MAGIC {
        return Err(GvnsError::Snapshot(format!(
            "bad magic {:?}, expected {:?}",
            magic, MAGIC
        )));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(GvnsError::SnapshotVersion {
            found: version,
            supported: VERSION,
        });
    }
    let d = r.u64()? as usize;
    let nx = r.u64()? as usize;
    let nv = r.u64()? as usize;
    let m = r.u64()? as usize;
    let lv = r.f64()?;
    let t = r.f64()?;
    let s = r.f64()?;
    let sigma = r.f64()?;
    let lambda = r.f64()?;
    let grid = PhaseGrid::new(d, nx, nv, lv).map_err(|e| GvnsError::Snapshot(e.to_string()))?;
    let f_len = r.u64()? as usize;
    if f_len != grid.len() {
        return Err(GvnsError::Snapshot(format!(
            "f length {} does not match grid ({})",
            f_len,
            grid.len()
        )));
    }
    let mut f = DistPhysical::zeros(&grid);
    for v in f.values.iter_mut() {
        *v = r.f64()?;
    }
    let mut u = FluidSpectral::zeros(&grid);
    for comp in u.coeffs.iter_mut() {
        for z in comp.iter_mut() {
            let re = r.f64()?;
            let im = r.f64()?;
            *z = Complex64::new(re, im);
        }
    }
    if r.pos != body.len() {
        return Err(GvnsError::Snapshot(format!(
            "{} trailing bytes before checksum",
            body.len() - r.pos
        )));
    }
    Ok(Snapshot {
        grid,
        m,
        t,
        s,
        sigma,
        lambda,
        f,
        u,
    })
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    std::fs::write(path, to_bytes(snap))?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let buf = std::fs::read(path)?;
    from_bytes(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_snapshot(seed: u64) -> Snapshot {
        let grid = PhaseGrid::new(2, 6, 4, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = DistPhysical::zeros(&grid);
        for v in f.values.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let mut u = FluidSpectral::zeros(&grid);
        for comp in u.coeffs.iter_mut() {
            for z in comp.iter_mut() {
                *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        Snapshot {
            grid,
            m: 2,
            t: 0.375,
            s: 0.5,
            sigma: 4.0,
            lambda: 0.41,
            f,
            u,
        }
    }

    #[test]
    fn round_trip_is_bitwise() {
        let snap = random_snapshot(1);
        let bytes = to_bytes(&snap);
        let back = from_bytes(&bytes).unwrap();
        let again = to_bytes(&back);
        assert_eq!(bytes, again);
        assert_eq!(back.t, snap.t);
        assert_eq!(back.f.values, snap.f.values);
        assert_eq!(back.u.coeffs, snap.u.coeffs);
    }

    #[test]
    fn corruption_is_detected() {
        let snap = random_snapshot(2);
        let mut bytes = to_bytes(&snap);
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40;
        match from_bytes(&bytes) {
            Err(GvnsError::SnapshotCrc { offset, .. }) => {
                assert_eq!(offset as usize, bytes.len() - 4);
            }
            other => panic!("expected CRC error, got {other:?}"),
        }
    }

    #[test]
    fn unsupported_version_is_rejected() {
        let snap = random_snapshot(3);
        let mut bytes = to_bytes(&snap);
        bytes[4..8].copy_from_slice(&(VERSION + 1).to_le_bytes());
        // refresh the checksum so only the version gate trips
        let body_len = bytes.len() - 4;
        let crc = crc32fast::hash(&bytes[..body_len]);
        bytes[body_len..].copy_from_slice(&crc.to_le_bytes());
        assert!(matches!(
            from_bytes(&bytes),
            Err(GvnsError::SnapshotVersion { found, .. }) if found == VERSION + 1
        ));
    }

    #[test]
    fn truncation_is_detected() {
        let snap = random_snapshot(4);
        let bytes = to_bytes(&snap);
        let res = from_bytes(&bytes[..bytes.len() - 9]);
        assert!(res.is_err());
    }
}
