//! The binary snapshot format: byte-identical round trips and CRC-protected
//! corruption detection.

use gvns::field::{DistPhysical, FluidSpectral};
use gvns::grid::PhaseGrid;
use gvns::snapshot::{from_bytes, to_bytes, Snapshot};
use num_complex::Complex64;

fn main() {
    let grid = PhaseGrid::new(2, 8, 8, 3.0).unwrap();
    let f = DistPhysical::from_fn(&grid, |x, v| {
        (1.0 + 0.3 * x[0].cos()) * (-(v[0] * v[0] + v[1] * v[1])).exp()
    });
    let mut u = FluidSpectral::zeros(&grid);
    u.coeffs[0][3] = Complex64::new(0.25, -0.125);
    let snap = Snapshot {
        grid,
        m: 2,
        t: 0.75,
        s: 0.5,
        sigma: 4.0,
        lambda: 0.31,
        f,
        u,
    };

    let bytes = to_bytes(&snap);
    println!("snapshot size: {} bytes (magic GVNS, version 1, CRC32 trailer)", bytes.len());

    let back = from_bytes(&bytes).unwrap();
    let again = to_bytes(&back);
    println!("write -> read -> write byte-identical: {}", bytes == again);

    let mut corrupt = bytes.clone();
    corrupt[bytes.len() / 2] ^= 0x01;
    match from_bytes(&corrupt) {
        Err(e) => println!("single flipped bit detected: {e}"),
        Ok(_) => println!("corruption NOT detected (bug!)"),
    }

    let mut wrong_version = bytes.clone();
    wrong_version[4..8].copy_from_slice(&2u32.to_le_bytes());
    let body = wrong_version.len() - 4;
    let crc = crc32fast::hash(&wrong_version[..body]);
    wrong_version[body..].copy_from_slice(&crc.to_le_bytes());
    match from_bytes(&wrong_version) {
        Err(e) => println!("future version rejected: {e}"),
        Ok(_) => println!("version gate missing (bug!)"),
    }
}
