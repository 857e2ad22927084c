use crate::error::{GvnsError, Result};
use std::f64::consts::PI;

/// Discretization of the phase space T^d x [-Lv, Lv)^d.
///
/// Space is the torus [0, 2pi)^d with integer wavenumbers
/// k in {-Nx/2, ..., Nx/2-1} per axis; velocity is a centered box treated
/// as periodic with dual frequencies eta_j = j * (pi/Lv),
/// j in {-Nv/2, ..., Nv/2-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub d: usize,
    pub nx: usize,
    pub nv: usize,
    pub lv: f64,
}

impl PhaseGrid {
    pub fn new(d: usize, nx: usize, nv: usize, lv: f64) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(GvnsError::ConfigGeneral {
                message: format!("spatial dimension must be 1 or 2, got {d}"),
            });
        }
        if nx < 4 || nx % 2 != 0 || nv < 4 || nv % 2 != 0 {
            return Err(GvnsError::ConfigGeneral {
                message: format!("grid sizes must be even and >= 4, got nx={nx}, nv={nv}"),
            });
        }
        if !(lv > 0.0) {
            return Err(GvnsError::ConfigGeneral {
                message: format!("velocity half-width must be positive, got {lv}"),
            });
        }
        Ok(Self { d, nx, nv, lv })
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI / self.nx as f64
    }

    pub fn dv(&self) -> f64 {
        2.0 * self.lv / self.nv as f64
    }

    /// Frequency spacing of the velocity dual grid.
    pub fn deta(&self) -> f64 {
        PI / self.lv
    }

    /// Points in the spatial grid (Nx^d).
    pub fn nxd(&self) -> usize {
        self.nx.pow(self.d as u32)
    }

    /// Points in the velocity grid (Nv^d).
    pub fn nvd(&self) -> usize {
        self.nv.pow(self.d as u32)
    }

    /// Points in the full phase-space grid.
    pub fn len(&self) -> usize {
        self.nxd() * self.nvd()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn v_coord(&self, m: usize) -> f64 {
        -self.lv + m as f64 * self.dv()
    }

    /// Signed wavenumber for FFT-ordered index i on an axis of n points.
    pub fn signed_freq(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        Self::signed_freq(i, self.nx) as f64
    }

    pub fn eta(&self, j: usize) -> f64 {
        Self::signed_freq(j, self.nv) as f64 * self.deta()
    }

    /// Decompose a flat row-major index over `axes` dims of size n.
    pub fn unflatten(mut flat: usize, n: usize, d: usize) -> [usize; 2] {
        let mut out = [0usize; 2];
        for a in (0..d).rev() {
            out[a] = flat % n;
            flat /= n;
        }
        out
    }

    /// Spatial wavenumber vector for a flat spectral index (length d).
    pub fn k_vec(&self, k_flat: usize) -> [f64; 2] {
        let idx = Self::unflatten(k_flat, self.nx, self.d);
        let mut out = [0.0; 2];
        for a in 0..self.d {
            out[a] = Self::signed_freq(idx[a], self.nx) as f64;
        }
        out
    }

    /// Velocity-frequency vector for a flat dual index (length d).
    pub fn eta_vec(&self, j_flat: usize) -> [f64; 2] {
        let idx = Self::unflatten(j_flat, self.nv, self.d);
        let mut out = [0.0; 2];
        for a in 0..self.d {
            out[a] = Self::signed_freq(idx[a], self.nv) as f64 * self.deta();
        }
        out
    }

    /// Velocity coordinate vector for a flat physical index (length d).
    pub fn v_vec(&self, m_flat: usize) -> [f64; 2] {
        let idx = Self::unflatten(m_flat, self.nv, self.d);
        let mut out = [0.0; 2];
        for a in 0..self.d {
            out[a] = self.v_coord(idx[a]);
        }
        out
    }

    pub fn x_vec(&self, i_flat: usize) -> [f64; 2] {
        let idx = Self::unflatten(i_flat, self.nx, self.d);
        let mut out = [0.0; 2];
        for a in 0..self.d {
            out[a] = self.x_coord(idx[a]);
        }
        out
    }

    /// |k|^2 for a flat spectral index.
    pub fn k_sq(&self, k_flat: usize) -> f64 {
        let k = self.k_vec(k_flat);
        k[..self.d].iter().map(|x| x * x).sum()
    }
}

/// Multi-indices alpha with |alpha| <= m over d velocity axes, in a fixed
/// deterministic order (graded lexicographic).
pub fn multi_indices(d: usize, m: usize) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for total in 0..=m {
        if d == 1 {
            out.push([total, 0]);
        } else {
            for a1 in (0..=total).rev() {
                out.push([a1, total - a1]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacings_are_consistent() {
        let g = PhaseGrid::new(1, 32, 64, 6.0).unwrap();
        assert!((g.dx() * g.nx as f64 - 2.0 * PI).abs() < 1e-14);
        assert!((g.dv() * g.nv as f64 - 2.0 * g.lv).abs() < 1e-14);
        assert!((g.dv() * g.deta() * g.nv as f64 - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(PhaseGrid::new(1, 3, 8, 1.0).is_err());
        assert!(PhaseGrid::new(1, 8, 7, 1.0).is_err());
        assert!(PhaseGrid::new(3, 8, 8, 1.0).is_err());
        assert!(PhaseGrid::new(1, 8, 8, 0.0).is_err());
    }

    #[test]
    fn signed_freq_layout() {
        let n = 8;
        let freqs: Vec<i64> = (0..n).map(|i| PhaseGrid::signed_freq(i, n)).collect();
        assert_eq!(freqs, vec![0, 1, 2, 3, -4, -3, -2, -1]);
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(1, 2).len(), 3);
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(2, 0), vec![[0, 0]]);
    }
}
