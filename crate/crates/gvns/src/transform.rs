//! Forward/inverse spectral transforms, dealiasing and moments.
//!
//! Conventions (fixed across the crate):
//!
//! * `f_hat_k(eta_j) = Nx^{-d} dv^d (-1)^{sum j_a} DFT[f]`, which discretizes
//!   `(2pi)^{-d} iint e^{-ik.x - iv.eta} f dx dv` with equi-weight quadrature.
//! * `u_hat_k = Nx^{-d} DFT[u]`, the torus Fourier-series coefficient.
//! * Inversion: `f = (2Lv)^{-d} IDFT[(-1)^{sum j_a} f_hat]`,
//!   `u = IDFT[u_hat]` (IDFT unnormalized).
//! * Parseval with these conventions reads
//!   `sum_{k,j} |f_hat|^2 deta^d  =  dx^d dv^d sum |f|^2` (factor exactly 1),
//!   and `sum_k |u_hat_k|^2 = (2pi)^{-d} * dx^d sum |u|^2`.

use crate::error::{GvnsError, Result};
use crate::field::{DistPhysical, DistSpectral, FluidSpectral, MomentFields};
use crate::grid::PhaseGrid;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// FFT plans for one grid. Plans are internally synchronized; one workspace
/// can be shared across threads.
pub struct SpectralWorkspace {
    pub grid: PhaseGrid,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_v: Arc<dyn Fft<f64>>,
    inv_v: Arc<dyn Fft<f64>>,
}

impl SpectralWorkspace {
    pub fn new(grid: &PhaseGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid: grid.clone(),
            fwd_x: planner.plan_fft_forward(grid.nx),
            inv_x: planner.plan_fft_inverse(grid.nx),
            fwd_v: planner.plan_fft_forward(grid.nv),
            inv_v: planner.plan_fft_inverse(grid.nv),
        }
    }

    fn phase_shape(&self) -> Vec<usize> {
        let g = &self.grid;
        let mut s = vec![g.nx; g.d];
        s.extend(std::iter::repeat(g.nv).take(g.d));
        s
    }

    /// In-place 1-D transform along `axis` of a row-major array of `shape`.
    pub fn fft_axis(&self, data: &mut [Complex64], shape: &[usize], axis: usize, plan: &Arc<dyn Fft<f64>>) {
        let n = shape[axis];
        debug_assert_eq!(plan.len(), n);
        let stride: usize = shape[axis + 1..].iter().product();
        let total: usize = shape.iter().product();
        debug_assert_eq!(data.len(), total);
        let lanes = total / n;
        let block = stride * n;
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        if stride == 1 {
            for lane in data.chunks_exact_mut(n) {
                plan.process_with_scratch(lane, &mut scratch);
            }
        } else {
            let mut lane_buf = vec![Complex64::default(); n];
            for outer in 0..lanes {
                let start = (outer / stride) * block + (outer % stride);
                for t in 0..n {
                    lane_buf[t] = data[start + t * stride];
                }
                plan.process_with_scratch(&mut lane_buf, &mut scratch);
                for t in 0..n {
                    data[start + t * stride] = lane_buf[t];
                }
            }
        }
    }

    /// Forward FFT over the spatial axes of the phase array (mixed (k, v) rep).
    pub fn fft_x_axes(&self, data: &mut [Complex64], forward: bool) {
        let shape = self.phase_shape();
        let plan = if forward { &self.fwd_x } else { &self.inv_x };
        for a in 0..self.grid.d {
            self.fft_axis(data, &shape, a, plan);
        }
    }

    /// Forward/inverse FFT over the dual-velocity axes.
    pub fn fft_v_axes(&self, data: &mut [Complex64], forward: bool) {
        let shape = self.phase_shape();
        let plan = if forward { &self.fwd_v } else { &self.inv_v };
        for a in self.grid.d..2 * self.grid.d {
            self.fft_axis(data, &shape, a, plan);
        }
    }

    /// Parity sign (-1)^{sum_a j_a} for a flat dual-velocity index.
    fn eta_sign(&self, j_flat: usize) -> f64 {
        let g = &self.grid;
        let idx = PhaseGrid::unflatten(j_flat, g.nv, g.d);
        let s: usize = idx[..g.d].iter().sum();
        if s % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Full phase-space forward transform.
    ///
    /// Rejects non-finite input with the flat index of the first offender.
    pub fn to_spectral(&self, f: &DistPhysical) -> Result<DistSpectral> {
        if let Some(index) = f.values.iter().position(|v| !v.is_finite()) {
            return Err(GvnsError::NonFiniteInput { index });
        }
        let g = &self.grid;
        let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft_x_axes(&mut buf, true);
        self.fft_v_axes(&mut buf, true);
        let scale = g.dv().powi(g.d as i32) / g.nxd() as f64;
        let nvd = g.nvd();
        for kf in 0..g.nxd() {
            for jf in 0..nvd {
                buf[kf * nvd + jf] *= scale * self.eta_sign(jf);
            }
        }
        Ok(DistSpectral {
            grid: g.clone(),
            coeffs: buf,
        })
    }

    /// Inverse of `to_spectral`. Returns the field together with the maximum
    /// imaginary residual relative to the field scale; a large residual means
    /// the coefficients were not conjugate-symmetric.
    pub fn to_physical(&self, fh: &DistSpectral) -> (DistPhysical, f64) {
        let g = &self.grid;
        let nvd = g.nvd();
        let mut buf = fh.coeffs.clone();
        for kf in 0..g.nxd() {
            for jf in 0..nvd {
                buf[kf * nvd + jf] *= self.eta_sign(jf);
            }
        }
        self.fft_x_axes(&mut buf, false);
        self.fft_v_axes(&mut buf, false);
        let scale = (2.0 * g.lv).powi(g.d as i32).recip();
        let mut values = vec![0.0; g.len()];
        let mut max_re = 0.0f64;
        let mut max_im = 0.0f64;
        for (o, z) in values.iter_mut().zip(buf.iter()) {
            let v = z.re * scale;
            *o = v;
            max_re = max_re.max(v.abs());
            max_im = max_im.max((z.im * scale).abs());
        }
        let residual = if max_re <= f64::MIN_POSITIVE {
            max_im
        } else {
            max_im / max_re
        };
        (
            DistPhysical {
                grid: g.clone(),
                values,
            },
            residual,
        )
    }

    /// Max relative deviation from f_hat_{-k}(-eta) = conj(f_hat_k(eta)).
    pub fn conjugate_symmetry_residual(&self, fh: &DistSpectral) -> f64 {
        let g = &self.grid;
        let nvd = g.nvd();
        let mirror = |i: usize, n: usize| (n - i) % n;
        let mut max_dev = 0.0f64;
        let mut max_mag = 0.0f64;
        for kf in 0..g.nxd() {
            let ki = PhaseGrid::unflatten(kf, g.nx, g.d);
            let mut km = 0usize;
            for a in 0..g.d {
                km = km * g.nx + mirror(ki[a], g.nx);
            }
            for jf in 0..nvd {
                let ji = PhaseGrid::unflatten(jf, g.nv, g.d);
                let mut jm = 0usize;
                for a in 0..g.d {
                    jm = jm * g.nv + mirror(ji[a], g.nv);
                }
                let z = fh.coeffs[kf * nvd + jf];
                let zm = fh.coeffs[km * nvd + jm];
                max_dev = max_dev.max((zm - z.conj()).norm());
                max_mag = max_mag.max(z.norm());
            }
        }
        if max_mag <= f64::MIN_POSITIVE {
            0.0
        } else {
            max_dev / max_mag
        }
    }

    /// Spatial forward transform of a scalar field on the x-grid
    /// (torus-series convention with the Nx^{-d} factor).
    pub fn x_forward(&self, field: &[f64]) -> Vec<Complex64> {
        let g = &self.grid;
        let mut buf: Vec<Complex64> = field.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let shape = vec![g.nx; g.d];
        for a in 0..g.d {
            self.fft_axis(&mut buf, &shape, a, &self.fwd_x);
        }
        let scale = (g.nxd() as f64).recip();
        for z in buf.iter_mut() {
            *z *= scale;
        }
        buf
    }

    /// Inverse spatial transform; returns the real part (imaginary residual
    /// is roundoff for conjugate-symmetric input).
    pub fn x_inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let g = &self.grid;
        let mut buf = coeffs.to_vec();
        let shape = vec![g.nx; g.d];
        for a in 0..g.d {
            self.fft_axis(&mut buf, &shape, a, &self.inv_x);
        }
        buf.iter().map(|z| z.re).collect()
    }

    pub fn fluid_to_physical(&self, uh: &FluidSpectral) -> Vec<Vec<f64>> {
        uh.coeffs.iter().map(|c| self.x_inverse(c)).collect()
    }

    pub fn fluid_from_physical(&self, grid: &PhaseGrid, comps: &[Vec<f64>]) -> FluidSpectral {
        FluidSpectral {
            grid: grid.clone(),
            coeffs: comps.iter().map(|c| self.x_forward(c)).collect(),
        }
    }

    /// Spectral gradient of a scalar x-field: returns d physical components.
    pub fn x_gradient(&self, coeffs: &[Complex64]) -> Vec<Vec<f64>> {
        let g = &self.grid;
        let mut out = Vec::with_capacity(g.d);
        for a in 0..g.d {
            let mut da: Vec<Complex64> = Vec::with_capacity(coeffs.len());
            for (kf, &z) in coeffs.iter().enumerate() {
                let k = g.k_vec(kf);
                da.push(Complex64::new(0.0, k[a]) * z);
            }
            out.push(self.x_inverse(&da));
        }
        out
    }
}

/// 2/3-rule dealiasing threshold test for one signed frequency.
fn aliased(freq: i64, n: usize) -> bool {
    (freq.unsigned_abs() as f64) > n as f64 / 3.0
}

/// Zero every coefficient with any |k_a| > Nx/3 or |j_a| > Nv/3 (2/3 rule).
pub fn dealias_dist(fh: &mut DistSpectral) {
    let g = fh.grid.clone();
    let nvd = g.nvd();
    for kf in 0..g.nxd() {
        let ki = PhaseGrid::unflatten(kf, g.nx, g.d);
        let kill_k = (0..g.d).any(|a| aliased(PhaseGrid::signed_freq(ki[a], g.nx), g.nx));
        for jf in 0..nvd {
            let ji = PhaseGrid::unflatten(jf, g.nv, g.d);
            let kill = kill_k
                || (0..g.d).any(|a| aliased(PhaseGrid::signed_freq(ji[a], g.nv), g.nv));
            if kill {
                fh.coeffs[kf * nvd + jf] = Complex64::default();
            }
        }
    }
}

/// Same rule on a fluid field (spatial frequencies only).
pub fn dealias_fluid(uh: &mut FluidSpectral) {
    let g = uh.grid.clone();
    for kf in 0..g.nxd() {
        let ki = PhaseGrid::unflatten(kf, g.nx, g.d);
        if (0..g.d).any(|a| aliased(PhaseGrid::signed_freq(ki[a], g.nx), g.nx)) {
            for comp in uh.coeffs.iter_mut() {
                comp[kf] = Complex64::default();
            }
        }
    }
}

/// rho(x_i) = dv^d sum_j f(x_i, v_j), j(x_i) = dv^d sum_j v_j f(x_i, v_j).
pub fn compute_moments(f: &DistPhysical) -> MomentFields {
    let g = &f.grid;
    let nvd = g.nvd();
    let dvd = g.dv().powi(g.d as i32);
    let mut rho = vec![0.0; g.nxd()];
    let mut j = vec![vec![0.0; g.nxd()]; g.d];
    for xf in 0..g.nxd() {
        let mut r = 0.0;
        let mut cur = [0.0f64; 2];
        for vf in 0..nvd {
            let w = f.values[xf * nvd + vf];
            r += w;
            let v = g.v_vec(vf);
            for a in 0..g.d {
                cur[a] += v[a] * w;
            }
        }
        rho[xf] = r * dvd;
        for a in 0..g.d {
            j[a][xf] = cur[a] * dvd;
        }
    }
    MomentFields {
        grid: g.clone(),
        rho,
        j,
    }
}
