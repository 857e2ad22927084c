//! Vlasov transport: exact spectral shear in x and the drag/force step in
//! the velocity variable.
//!
//! The v-step solves  df/dt + (u(x) - v).grad_v f - d f = 0  with u frozen:
//! the exact flow is affine per axis, f(tau, v) = e^{d tau} f0(u + (v-u)e^tau).
//! In the dual variable this is  f_tilde(tau, eta) =
//! e^{-i u.eta (1 - e^{-tau})} f_tilde(0, eta e^{-tau}), which the default
//! `Spectral` mode evaluates exactly from the grid samples (the eta = 0 row
//! is the mass and maps to itself, so mass is conserved to roundoff).
//! `Cubic` is a cheaper semi-Lagrangian alternative with periodic cubic
//! Lagrange interpolation.

use crate::field::DistPhysical;
use crate::grid::PhaseGrid;
use crate::transform::SpectralWorkspace;
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VInterp {
    Spectral,
    Cubic,
}

/// Dense resampling operators for one drag step of size tau, stored as
/// split real/imaginary planes so the inner dot products vectorize.
///
/// `dtft[j][m] = e^{-i b v_m eta_j}` evaluates the exact transform of the
/// grid samples at the compressed frequencies b eta_j (b = e^{-tau});
/// `inv[m][j] = e^{+i v_m eta_j} / Nv` maps back to grid values.
pub struct DragOperator {
    pub tau: f64,
    b: f64,
    nv: usize,
    dtft_re: Vec<f64>,
    dtft_im: Vec<f64>,
    inv_re: Vec<f64>,
    inv_im: Vec<f64>,
    /// eta values in FFT order, for the u-dependent phase.
    etas: Vec<f64>,
}

/// Split-complex lane scratch for the drag passes.
struct LaneBuf {
    re: Vec<f64>,
    im: Vec<f64>,
    sre: Vec<f64>,
    sim: Vec<f64>,
}

impl LaneBuf {
    fn new(nv: usize) -> Self {
        Self {
            re: vec![0.0; nv],
            im: vec![0.0; nv],
            sre: vec![0.0; nv],
            sim: vec![0.0; nv],
        }
    }
}

impl DragOperator {
    pub fn new(grid: &PhaseGrid, tau: f64) -> Self {
        let nv = grid.nv;
        let b = (-tau).exp();
        let etas: Vec<f64> = (0..nv).map(|j| grid.eta(j)).collect();
        let mut dtft_re = vec![0.0; nv * nv];
        let mut dtft_im = vec![0.0; nv * nv];
        let mut inv_re = vec![0.0; nv * nv];
        let mut inv_im = vec![0.0; nv * nv];
        for m in 0..nv {
            let v = grid.v_coord(m);
            for j in 0..nv {
                let fwd = Complex64::from_polar(1.0, -b * v * etas[j]);
                dtft_re[j * nv + m] = fwd.re;
                dtft_im[j * nv + m] = fwd.im;
                let bck = Complex64::from_polar(1.0 / nv as f64, v * etas[j]);
                inv_re[m * nv + j] = bck.re;
                inv_im[m * nv + j] = bck.im;
            }
        }
        Self {
            tau,
            b,
            nv,
            dtft_re,
            dtft_im,
            inv_re,
            inv_im,
            etas,
        }
    }

    /// One 1-D drag pass on a split-complex lane, in place.
    /// `u` is the frozen velocity component at this spatial point.
    fn apply_lane(&self, buf: &mut LaneBuf, u: f64) {
        let nv = self.nv;
        let shift = u * (1.0 - self.b);
        for j in 0..nv {
            let rr = &self.dtft_re[j * nv..(j + 1) * nv];
            let ri = &self.dtft_im[j * nv..(j + 1) * nv];
            let mut ar = 0.0;
            let mut ai = 0.0;
            for m in 0..nv {
                ar += rr[m] * buf.re[m] - ri[m] * buf.im[m];
                ai += rr[m] * buf.im[m] + ri[m] * buf.re[m];
            }
            let (ps, pc) = (-shift * self.etas[j]).sin_cos();
            buf.sre[j] = ar * pc - ai * ps;
            buf.sim[j] = ar * ps + ai * pc;
        }
        for m in 0..nv {
            let rr = &self.inv_re[m * nv..(m + 1) * nv];
            let ri = &self.inv_im[m * nv..(m + 1) * nv];
            let mut ar = 0.0;
            let mut ai = 0.0;
            for j in 0..nv {
                ar += rr[j] * buf.sre[j] - ri[j] * buf.sim[j];
                ai += rr[j] * buf.sim[j] + ri[j] * buf.sre[j];
            }
            buf.re[m] = ar;
            buf.im[m] = ai;
        }
    }

    /// Drag pass on a whole [m][lane] panel (lane index contiguous):
    /// out = Inv . diag(phase(u)) . Dtft . in, applied to every lane at once.
    fn apply_panel(&self, panel: &mut PanelBuf, u: f64, lanes: usize) {
        let nv = self.nv;
        let shift = u * (1.0 - self.b);
        panel.mre[..nv * lanes].fill(0.0);
        panel.mim[..nv * lanes].fill(0.0);
        for j in 0..nv {
            let acc_re = &mut panel.mre[j * lanes..(j + 1) * lanes];
            let acc_im = &mut panel.mim[j * lanes..(j + 1) * lanes];
            for m in 0..nv {
                let cr = self.dtft_re[j * nv + m];
                let ci = self.dtft_im[j * nv + m];
                let in_re = &panel.re[m * lanes..(m + 1) * lanes];
                let in_im = &panel.im[m * lanes..(m + 1) * lanes];
                for l in 0..lanes {
                    acc_re[l] += cr * in_re[l] - ci * in_im[l];
                    acc_im[l] += cr * in_im[l] + ci * in_re[l];
                }
            }
            let (ps, pc) = (-shift * self.etas[j]).sin_cos();
            for l in 0..lanes {
                let ar = acc_re[l];
                let ai = acc_im[l];
                acc_re[l] = ar * pc - ai * ps;
                acc_im[l] = ar * ps + ai * pc;
            }
        }
        panel.re[..nv * lanes].fill(0.0);
        panel.im[..nv * lanes].fill(0.0);
        for m in 0..nv {
            let out_re = &mut panel.re[m * lanes..(m + 1) * lanes];
            let out_im = &mut panel.im[m * lanes..(m + 1) * lanes];
            for j in 0..nv {
                let cr = self.inv_re[m * nv + j];
                let ci = self.inv_im[m * nv + j];
                let in_re = &panel.mre[j * lanes..(j + 1) * lanes];
                let in_im = &panel.mim[j * lanes..(j + 1) * lanes];
                for l in 0..lanes {
                    out_re[l] += cr * in_re[l] - ci * in_im[l];
                    out_im[l] += cr * in_im[l] + ci * in_re[l];
                }
            }
        }
    }
}

/// [m][lane] work panels for `apply_panel`.
struct PanelBuf {
    re: Vec<f64>,
    im: Vec<f64>,
    mre: Vec<f64>,
    mim: Vec<f64>,
}

impl PanelBuf {
    fn new(n: usize) -> Self {
        Self {
            re: vec![0.0; n],
            im: vec![0.0; n],
            mre: vec![0.0; n],
            mim: vec![0.0; n],
        }
    }
}

/// Periodic cubic Lagrange interpolation of `lane` at fractional position
/// `pos` (grid units).
fn cubic_interp(lane: &[f64], pos: f64) -> f64 {
    let n = lane.len() as isize;
    let base = pos.floor();
    let t = pos - base;
    let i0 = base as isize;
    let idx = |i: isize| lane[(((i % n) + n) % n) as usize];
    let wm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
    wm1 * idx(i0 - 1) + w0 * idx(i0) + w1 * idx(i0 + 1) + w2 * idx(i0 + 2)
}

/// Drag/force step over the whole phase grid. `u_phys` holds the frozen
/// velocity field per component on the x-grid (empty slice = u identically 0).
pub fn drag_step(
    f: &mut DistPhysical,
    u_phys: &[Vec<f64>],
    op: &DragOperator,
    mode: VInterp,
) {
    let g = f.grid.clone();
    let nvd = g.nvd();
    let nv = g.nv;
    match mode {
        VInterp::Spectral => {
            if g.d == 1 {
                f.values
                    .par_chunks_mut(nvd)
                    .enumerate()
                    .for_each_init(
                        || LaneBuf::new(nv),
                        |buf, (xf, block)| {
                            let u = if u_phys.is_empty() { 0.0 } else { u_phys[0][xf] };
                            buf.re.copy_from_slice(block);
                            buf.im.fill(0.0);
                            op.apply_lane(buf, u);
                            block.copy_from_slice(&buf.re);
                        },
                    );
            } else {
                // the block is [v1][v2] with v2 contiguous; axis v1 is
                // already panel-shaped, axis v2 works on the transpose
                let transpose = |src_re: &mut [f64], src_im: &mut [f64], tmp: &mut [f64], n: usize| {
                    tmp[..n * n].copy_from_slice(src_re);
                    for i in 0..n {
                        for j in 0..n {
                            src_re[j * n + i] = tmp[i * n + j];
                        }
                    }
                    tmp[..n * n].copy_from_slice(src_im);
                    for i in 0..n {
                        for j in 0..n {
                            src_im[j * n + i] = tmp[i * n + j];
                        }
                    }
                };
                f.values
                    .par_chunks_mut(nvd)
                    .enumerate()
                    .for_each_init(
                        || (PanelBuf::new(nvd), vec![0.0f64; nvd]),
                        |(panel, tmp), (xf, block)| {
                            let u = |axis: usize| {
                                if u_phys.is_empty() {
                                    0.0
                                } else {
                                    u_phys[axis][xf]
                                }
                            };
                            panel.re.copy_from_slice(block);
                            panel.im.fill(0.0);
                            op.apply_panel(panel, u(0), nv);
                            transpose(&mut panel.re, &mut panel.im, tmp, nv);
                            op.apply_panel(panel, u(1), nv);
                            transpose(&mut panel.re, &mut panel.im, tmp, nv);
                            block.copy_from_slice(&panel.re);
                        },
                    );
            }
        }
        VInterp::Cubic => {
            let etau = op.tau.exp();
            let dv = g.dv();
            let lv = g.lv;
            f.values
                .par_chunks_mut(nvd)
                .enumerate()
                .for_each(|(xf, block)| {
                    let mut lane = vec![0.0f64; nv];
                    for axis in 0..g.d {
                        let u = if u_phys.is_empty() { 0.0 } else { u_phys[axis][xf] };
                        let stride = if axis == g.d - 1 { 1 } else { nv };
                        let lanes = nvd / nv;
                        for outer in 0..lanes {
                            let start = (outer / stride) * (stride * nv) + (outer % stride);
                            for t in 0..nv {
                                lane[t] = block[start + t * stride];
                            }
                            for m in 0..nv {
                                let v = g.v_coord(m);
                                let w = u + (v - u) * etau;
                                let pos = (w + lv) / dv;
                                block[start + m * stride] = etau * cubic_interp(&lane, pos);
                            }
                        }
                    }
                });
        }
    }
}

/// Phase tables for the exact x-shear: multiply the mixed (k, v)
/// representation by e^{-i k.v tau}, separable per axis.
pub struct ShearOperator {
    pub tau: f64,
    /// per axis: Nx x Nv table of e^{-i k v tau}.
    tables: Vec<Vec<Complex64>>,
}

impl ShearOperator {
    pub fn new(grid: &PhaseGrid, tau: f64) -> Self {
        let mut tables = Vec::with_capacity(grid.d);
        for _ in 0..grid.d {
            let mut t = vec![Complex64::default(); grid.nx * grid.nv];
            for ki in 0..grid.nx {
                let k = grid.wavenumber(ki);
                for mi in 0..grid.nv {
                    let v = grid.v_coord(mi);
                    t[ki * grid.nv + mi] = Complex64::from_polar(1.0, -k * v * tau);
                }
            }
            tables.push(t);
        }
        Self { tau, tables }
    }
}

/// Exact transport step for df/dt + v.grad_x f = 0 over tau.
pub fn shear_step(f: &mut DistPhysical, op: &ShearOperator, ws: &SpectralWorkspace) {
    let g = f.grid.clone();
    let nvd = g.nvd();
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    ws.fft_x_axes(&mut buf, true);
    let scale = (g.nxd() as f64).recip();
    buf.par_chunks_mut(nvd).enumerate().for_each(|(kf, block)| {
        let ki = PhaseGrid::unflatten(kf, g.nx, g.d);
        for (vf, z) in block.iter_mut().enumerate() {
            let vi = PhaseGrid::unflatten(vf, g.nv, g.d);
            let mut ph = Complex64::new(scale, 0.0);
            for a in 0..g.d {
                ph *= op.tables[a][ki[a] * g.nv + vi[a]];
            }
            *z *= ph;
        }
    });
    ws.fft_x_axes(&mut buf, false);
    for (o, z) in f.values.iter_mut().zip(buf.iter()) {
        *o = z.re;
    }
}
