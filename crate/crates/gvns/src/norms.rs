//! Norm and energy functionals: Japanese brackets, the Gevrey multiplier
//! A_k^sigma(eta) = <k,eta>^sigma e^{lambda <k,eta>^s}, weighted Sobolev and
//! Gevrey norms of f and u, weighted sup norms, kinetic energy, dissipation
//! and modulated energy.
//!
//! All eta-derivatives D^alpha_eta f_hat are computed through the exact
//! transform identity D^alpha_eta f_hat = F[v^alpha f]; eta-integrals are
//! Riemann sums with weight deta^d.

use crate::error::{GvnsError, Result};
use crate::field::{DistPhysical, FluidSpectral};
use crate::grid::{multi_indices, PhaseGrid};
use crate::transform::{compute_moments, SpectralWorkspace};

/// Exponent cap before e^{2 lambda <k,eta>^s} leaves f64 range.
pub const EXP_LIMIT: f64 = 700.0;

/// Gevrey-class parameters: index s in (0,1], Sobolev correction sigma,
/// velocity weight order M and initial radius lambda0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevreyParams {
    pub s: f64,
    pub sigma: f64,
    pub m: usize,
    pub lambda0: f64,
}

impl GevreyParams {
    pub fn new(s: f64, sigma: f64, m: usize, lambda0: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(GvnsError::ConfigGeneral {
                message: format!("s must lie in (0,1], got {s}"),
            });
        }
        if !(sigma > 0.0) {
            return Err(GvnsError::ConfigGeneral {
                message: format!("sigma must be positive, got {sigma}"),
            });
        }
        if !(lambda0 > 0.0) {
            return Err(GvnsError::ConfigGeneral {
                message: format!("lambda0 must be positive, got {lambda0}"),
            });
        }
        Ok(Self { s, sigma, m, lambda0 })
    }

    /// Hypothesis checks for the propagation theorems; violations are
    /// warnings, not errors (exploration allowed).
    pub fn theorem_warnings(&self, d: usize) -> Vec<String> {
        let mut w = Vec::new();
        let sigma_min = d as f64 / 2.0 + self.s / 2.0 + 2.0;
        if self.sigma <= sigma_min {
            w.push(format!(
                "sigma = {} does not satisfy sigma > d/2 + s/2 + 2 = {sigma_min}",
                self.sigma
            ));
        }
        let m_min = d as f64 / 2.0 + 1.0;
        if self.m as f64 <= m_min {
            w.push(format!("M = {} does not satisfy M > d/2 + 1 = {m_min}", self.m));
        }
        w
    }
}

/// Japanese bracket <k, eta> = (1 + |k|^2 + |eta|^2)^{1/2}; with empty eta
/// this is <k>.
pub fn jap_bracket(k: &[f64], eta: &[f64]) -> f64 {
    let s: f64 = k.iter().map(|x| x * x).sum::<f64>() + eta.iter().map(|x| x * x).sum::<f64>();
    (1.0 + s).sqrt()
}

/// Fourier multiplier A_k^sigma(eta) = <k,eta>^sigma e^{lambda <k,eta>^s}.
pub fn multiplier_a(k: &[f64], eta: &[f64], lambda: f64, sigma: f64, s: f64) -> Result<f64> {
    let b = jap_bracket(k, eta);
    let expo = lambda * b.powf(s);
    if expo > EXP_LIMIT {
        return Err(GvnsError::MultiplierOverflow {
            exponent: expo,
            limit: EXP_LIMIT,
        });
    }
    Ok(b.powf(sigma) * expo.exp())
}

/// Kinetic energy, dissipation and modulated energy of a state.
#[derive(Debug, Clone, Copy, Default)]
pub struct EnergyRecord {
    pub energy: f64,
    pub dissipation: f64,
    pub modulated: f64,
    /// Torus mean of u ((2pi)^{-d} int u dx).
    pub mean_u: [f64; 2],
    /// Torus mean of j_f ((2pi)^{-d} int j dx).
    pub mean_j: [f64; 2],
}

/// Per-alpha squared magnitudes of F[v^alpha f] plus sup |v^alpha f|,
/// cached so Gevrey norms can be re-evaluated at several lambda values
/// without repeating the transforms.
pub struct FSpectraCache {
    pub grid: PhaseGrid,
    pub alphas: Vec<[usize; 2]>,
    /// |F[v^alpha f]|^2 per alpha, phase-space spectral layout.
    pub mag_sq: Vec<Vec<f64>>,
    /// sup over the grid of |v^alpha f| per alpha.
    pub sup_abs: Vec<f64>,
}

pub fn compute_f_spectra(ws: &SpectralWorkspace, f: &DistPhysical, m: usize) -> Result<FSpectraCache> {
    let g = &f.grid;
    let alphas = multi_indices(g.d, m);
    let nvd = g.nvd();
    // v^alpha weights per flat velocity index
    let mut vpow: Vec<Vec<f64>> = Vec::with_capacity(alphas.len());
    for alpha in &alphas {
        vpow.push(
            (0..nvd)
                .map(|vf| {
                    let v = g.v_vec(vf);
                    let mut w = 1.0;
                    for a in 0..g.d {
                        w *= v[a].powi(alpha[a] as i32);
                    }
                    w
                })
                .collect(),
        );
    }
    let mut sup_abs = Vec::with_capacity(alphas.len());
    for weights in &vpow {
        let mut sup = 0.0f64;
        for xf in 0..g.nxd() {
            for vf in 0..nvd {
                sup = sup.max((f.values[xf * nvd + vf] * weights[vf]).abs());
            }
        }
        sup_abs.push(sup);
    }
    // v^alpha commutes with the spatial FFT, so the x-passes are shared
    if let Some(index) = f.values.iter().position(|v| !v.is_finite()) {
        return Err(GvnsError::NonFiniteInput { index });
    }
    let mixed: Vec<num_complex::Complex64> = {
        let mut buf: Vec<num_complex::Complex64> = f
            .values
            .iter()
            .map(|&v| num_complex::Complex64::new(v, 0.0))
            .collect();
        ws.fft_x_axes(&mut buf, true);
        buf
    };
    let scale = g.dv().powi(g.d as i32) / g.nxd() as f64;
    let mut mag_sq = Vec::with_capacity(alphas.len());
    for weights in &vpow {
        let mut buf = mixed.clone();
        for kf in 0..g.nxd() {
            for vf in 0..nvd {
                buf[kf * nvd + vf] *= weights[vf];
            }
        }
        ws.fft_v_axes(&mut buf, true);
        let mut mags = vec![0.0f64; buf.len()];
        for kf in 0..g.nxd() {
            for jf in 0..nvd {
                let z = buf[kf * nvd + jf] * scale;
                mags[kf * nvd + jf] = z.norm_sqr();
            }
        }
        mag_sq.push(mags);
    }
    Ok(FSpectraCache {
        grid: g.clone(),
        alphas,
        mag_sq,
        sup_abs,
    })
}

/// Precomputed bracket powers for one (grid, sigma, s) combination.
pub struct NormTables {
    pub grid: PhaseGrid,
    pub sigma: f64,
    pub s: f64,
    /// <k,eta> over the phase spectral grid.
    pub bracket_f: Vec<f64>,
    /// <k,eta>^s.
    pub bs_f: Vec<f64>,
    /// <k,eta>^{2 sigma}.
    pub b2sig_f: Vec<f64>,
    /// <k,eta>^{2 sigma + s} (the sigma + s/2 norm weight).
    pub b2sig_s_f: Vec<f64>,
    pub bracket_u: Vec<f64>,
    pub bs_u: Vec<f64>,
    pub b2sig_u: Vec<f64>,
    pub b2sig_s_u: Vec<f64>,
}

impl NormTables {
    pub fn new(grid: &PhaseGrid, sigma: f64, s: f64) -> Self {
        let nvd = grid.nvd();
        let n = grid.nxd() * nvd;
        let mut bracket_f = vec![0.0; n];
        for kf in 0..grid.nxd() {
            let k = grid.k_vec(kf);
            for jf in 0..nvd {
                let eta = grid.eta_vec(jf);
                bracket_f[kf * nvd + jf] = jap_bracket(&k[..grid.d], &eta[..grid.d]);
            }
        }
        let bs_f: Vec<f64> = bracket_f.iter().map(|b| b.powf(s)).collect();
        let b2sig_f: Vec<f64> = bracket_f.iter().map(|b| b.powf(2.0 * sigma)).collect();
        let b2sig_s_f: Vec<f64> = b2sig_f.iter().zip(&bs_f).map(|(a, b)| a * b).collect();
        let mut bracket_u = vec![0.0; grid.nxd()];
        for kf in 0..grid.nxd() {
            let k = grid.k_vec(kf);
            bracket_u[kf] = jap_bracket(&k[..grid.d], &[]);
        }
        let bs_u: Vec<f64> = bracket_u.iter().map(|b| b.powf(s)).collect();
        let b2sig_u: Vec<f64> = bracket_u.iter().map(|b| b.powf(2.0 * sigma)).collect();
        let b2sig_s_u: Vec<f64> = b2sig_u.iter().zip(&bs_u).map(|(a, b)| a * b).collect();
        Self {
            grid: grid.clone(),
            sigma,
            s,
            bracket_f,
            bs_f,
            b2sig_f,
            b2sig_s_f,
            bracket_u,
            bs_u,
            b2sig_u,
            b2sig_s_u,
        }
    }
}

/// The three f-norms used by the diagnostics at a given lambda.
#[derive(Debug, Clone, Copy)]
pub struct FNorms {
    /// ||f||_{sigma,M} (lambda = 0).
    pub sobolev: f64,
    /// ||f||_{lambda,sigma,M,s}.
    pub gevrey: f64,
    /// ||f||_{lambda,sigma+s/2,M,s}.
    pub gevrey_half: f64,
}

pub fn f_norms_at(cache: &FSpectraCache, tables: &NormTables, lambda: f64) -> Result<FNorms> {
    let g = &cache.grid;
    let detad = g.deta().powi(g.d as i32);
    let bmax = tables.bs_f.iter().cloned().fold(0.0, f64::max);
    if 2.0 * lambda * bmax > 2.0 * EXP_LIMIT {
        return Err(GvnsError::MultiplierOverflow {
            exponent: 2.0 * lambda * bmax,
            limit: 2.0 * EXP_LIMIT,
        });
    }
    let mut sob = 0.0;
    let mut gev = 0.0;
    let mut gev_half = 0.0;
    if lambda == 0.0 {
        for mags in &cache.mag_sq {
            for (i, &m2) in mags.iter().enumerate() {
                let w = tables.b2sig_f[i] * m2;
                sob += w;
                gev += w;
                gev_half += tables.b2sig_s_f[i] * m2;
            }
        }
    } else {
        // one exp pass shared by every alpha
        let weights: Vec<f64> = tables.bs_f.iter().map(|&b| (2.0 * lambda * b).exp()).collect();
        for mags in &cache.mag_sq {
            for (i, &m2) in mags.iter().enumerate() {
                let e = weights[i];
                sob += tables.b2sig_f[i] * m2;
                gev += tables.b2sig_f[i] * e * m2;
                gev_half += tables.b2sig_s_f[i] * e * m2;
            }
        }
    }
    Ok(FNorms {
        sobolev: (sob * detad).sqrt(),
        gevrey: (gev * detad).sqrt(),
        gevrey_half: (gev_half * detad).sqrt(),
    })
}

/// ||f||_{sigma,M}: weighted Sobolev norm via the exact transform identity.
pub fn sobolev_weighted_norm(
    ws: &SpectralWorkspace,
    f: &DistPhysical,
    sigma: f64,
    m: usize,
) -> Result<f64> {
    let cache = compute_f_spectra(ws, f, m)?;
    let tables = NormTables::new(&f.grid, sigma, 1.0);
    Ok(f_norms_at(&cache, &tables, 0.0)?.sobolev)
}

/// ||f||_{lambda,sigma,M,s}.
pub fn gevrey_norm_f(
    ws: &SpectralWorkspace,
    f: &DistPhysical,
    lambda: f64,
    sigma: f64,
    m: usize,
    s: f64,
) -> Result<f64> {
    let cache = compute_f_spectra(ws, f, m)?;
    let tables = NormTables::new(&f.grid, sigma, s);
    Ok(f_norms_at(&cache, &tables, lambda)?.gevrey)
}

/// ||u||_{lambda,sigma,s}^2 = sum_k <k>^{2 sigma} e^{2 lambda <k>^s} |u_hat_k|^2.
pub fn gevrey_norm_u(u: &FluidSpectral, lambda: f64, sigma: f64, s: f64) -> Result<f64> {
    let g = &u.grid;
    let mut acc = 0.0;
    for kf in 0..g.nxd() {
        let k = g.k_vec(kf);
        let b = jap_bracket(&k[..g.d], &[]);
        let expo = 2.0 * lambda * b.powf(s);
        if expo > 2.0 * EXP_LIMIT {
            return Err(GvnsError::MultiplierOverflow {
                exponent: expo,
                limit: 2.0 * EXP_LIMIT,
            });
        }
        let w = b.powf(2.0 * sigma) * expo.exp();
        for comp in &u.coeffs {
            acc += w * comp[kf].norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

/// Fast path for the run loop, using precomputed tables.
pub fn u_norms_at(u: &FluidSpectral, tables: &NormTables, lambda: f64) -> Result<(f64, f64, f64)> {
    let bmax = tables.bs_u.iter().cloned().fold(0.0, f64::max);
    if 2.0 * lambda * bmax > 2.0 * EXP_LIMIT {
        return Err(GvnsError::MultiplierOverflow {
            exponent: 2.0 * lambda * bmax,
            limit: 2.0 * EXP_LIMIT,
        });
    }
    let mut sob = 0.0;
    let mut gev = 0.0;
    let mut gev_half = 0.0;
    for comp in &u.coeffs {
        for (kf, z) in comp.iter().enumerate() {
            let m2 = z.norm_sqr();
            let e = (2.0 * lambda * tables.bs_u[kf]).exp();
            sob += tables.b2sig_u[kf] * m2;
            gev += tables.b2sig_u[kf] * e * m2;
            gev_half += tables.b2sig_s_u[kf] * e * m2;
        }
    }
    Ok((sob.sqrt(), gev.sqrt(), gev_half.sqrt()))
}

/// ||f||_{inf,M} = (sum_{|alpha|<=M} ||v^alpha f||_inf^2)^{1/2} (grid sup).
pub fn linf_weighted_norm(f: &DistPhysical, m: usize) -> f64 {
    let g = &f.grid;
    let alphas = multi_indices(g.d, m);
    let nvd = g.nvd();
    let mut acc = 0.0;
    for alpha in &alphas {
        let mut sup = 0.0f64;
        for xf in 0..g.nxd() {
            for vf in 0..nvd {
                let v = g.v_vec(vf);
                let mut w = f.values[xf * nvd + vf];
                for a in 0..g.d {
                    w *= v[a].powi(alpha[a] as i32);
                }
                sup = sup.max(w.abs());
            }
        }
        acc += sup * sup;
    }
    acc.sqrt()
}

/// sup over the grid of (1 + |v|^q) |f|.
pub fn n_q(f: &DistPhysical, q: f64) -> f64 {
    let g = &f.grid;
    let nvd = g.nvd();
    let mut sup = 0.0f64;
    for xf in 0..g.nxd() {
        for vf in 0..nvd {
            let v = g.v_vec(vf);
            let vn: f64 = v[..g.d].iter().map(|c| c * c).sum::<f64>().sqrt();
            sup = sup.max((1.0 + vn.powf(q)) * f.values[xf * nvd + vf].abs());
        }
    }
    sup
}

/// M_alpha f = iint |v|^alpha f dv dx.
pub fn m_alpha(f: &DistPhysical, alpha: f64) -> f64 {
    let g = &f.grid;
    let nvd = g.nvd();
    let w = g.dx().powi(g.d as i32) * g.dv().powi(g.d as i32);
    let mut acc = 0.0;
    for xf in 0..g.nxd() {
        for vf in 0..nvd {
            let v = g.v_vec(vf);
            let vn: f64 = v[..g.d].iter().map(|c| c * c).sum::<f64>().sqrt();
            acc += vn.powf(alpha) * f.values[xf * nvd + vf];
        }
    }
    acc * w
}

/// Kinetic energy E, dissipation D and modulated energy of (f, u).
///
/// E = 1/2 int |u|^2 dx + 1/2 iint |v|^2 f dv dx,
/// D = iint |u - v|^2 f dv dx + int |grad u|^2 dx,
/// and the modulated energy measures fluctuations around the torus means
/// <u>, <j> with the cross term (2pi)^d/4 |<u> - <j>|^2, so that for
/// equal-mass data (iint f = (2pi)^d) it differs from E by a conserved
/// constant and decays with rate D.
pub fn energy_and_dissipation(
    ws: &SpectralWorkspace,
    f: &DistPhysical,
    u: &FluidSpectral,
) -> EnergyRecord {
    let g = &f.grid;
    let d = g.d;
    let dxd = g.dx().powi(d as i32);
    let dvd = g.dv().powi(d as i32);
    let two_pi_d = (2.0 * std::f64::consts::PI).powi(d as i32);
    let nvd = g.nvd();

    let u_phys = ws.fluid_to_physical(u);
    let mut grad_sq = 0.0;
    for comp in &u.coeffs {
        let grads = ws.x_gradient(comp);
        for gcomp in &grads {
            grad_sq += gcomp.iter().map(|v| v * v).sum::<f64>();
        }
    }
    grad_sq *= dxd;

    let mean_u = u.mean();
    let moments = compute_moments(f);
    let mut mean_j = [0.0; 2];
    for a in 0..d {
        mean_j[a] = moments.j[a].iter().sum::<f64>() * dxd / two_pi_d;
    }

    let mut e_fluid = 0.0;
    let mut e_fluid_fluct = 0.0;
    for xf in 0..g.nxd() {
        let mut usq = 0.0;
        let mut ufl = 0.0;
        for a in 0..d {
            let ua = u_phys[a][xf];
            usq += ua * ua;
            ufl += (ua - mean_u[a]).powi(2);
        }
        e_fluid += usq;
        e_fluid_fluct += ufl;
    }
    e_fluid *= 0.5 * dxd;
    e_fluid_fluct *= 0.5 * dxd;

    let mut e_kin = 0.0;
    let mut e_kin_fluct = 0.0;
    let mut drag = 0.0;
    for xf in 0..g.nxd() {
        for vf in 0..nvd {
            let w = f.values[xf * nvd + vf];
            let v = g.v_vec(vf);
            let mut vsq = 0.0;
            let mut vfl = 0.0;
            let mut rel = 0.0;
            for a in 0..d {
                vsq += v[a] * v[a];
                vfl += (v[a] - mean_j[a]).powi(2);
                rel += (u_phys[a][xf] - v[a]).powi(2);
            }
            e_kin += vsq * w;
            e_kin_fluct += vfl * w;
            drag += rel * w;
        }
    }
    let pw = dxd * dvd;
    e_kin *= 0.5 * pw;
    e_kin_fluct *= 0.5 * pw;
    drag *= pw;

    let mut cross = 0.0;
    for a in 0..d {
        cross += (mean_u[a] - mean_j[a]).powi(2);
    }

    EnergyRecord {
        energy: e_fluid + e_kin,
        dissipation: drag + grad_sq,
        modulated: e_kin_fluct + e_fluid_fluct + 0.25 * two_pi_d * cross,
        mean_u,
        mean_j,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::SpectralWorkspace;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn bracket_values() {
        assert_eq!(jap_bracket(&[0.0], &[0.0]), 1.0);
        assert!((jap_bracket(&[3.0, 4.0], &[]) - 26.0f64.sqrt()).abs() < 1e-14);
        assert!((jap_bracket(&[1.0, 0.0], &[2.0, 0.0]) - 6.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn multiplier_basics() {
        // lambda = 0, sigma = 0 -> identity multiplier
        for k in [-3.0f64, 0.0, 7.0] {
            assert!((multiplier_a(&[k], &[1.5], 0.0, 0.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        }
        // k = 0, eta = 0 -> e^lambda
        let l = 0.37;
        assert!((multiplier_a(&[0.0], &[0.0], l, 2.0, 0.5).unwrap() - l.exp()).abs() < 1e-14);
        // sigma=2, s=1, lambda=0.1, k=(1,0), eta=0 -> 2 e^{0.1 sqrt2}
        let want = 2.0 * (0.1 * 2.0f64.sqrt()).exp();
        assert!((multiplier_a(&[1.0, 0.0], &[0.0, 0.0], 0.1, 2.0, 1.0).unwrap() - want).abs() < 1e-12);
        // overflow is flagged
        assert!(matches!(
            multiplier_a(&[1e6], &[], 10.0, 0.0, 1.0),
            Err(GvnsError::MultiplierOverflow { .. })
        ));
    }

    #[test]
    fn multiplier_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let k = rng.gen_range(0.0..20.0);
            let eta = rng.gen_range(0.0..20.0);
            let l = rng.gen_range(0.0..1.0);
            let sig = rng.gen_range(0.0..4.0);
            let s = rng.gen_range(0.1..1.0);
            let base = multiplier_a(&[k], &[eta], l, sig, s).unwrap();
            assert!(multiplier_a(&[k + 1.0], &[eta], l, sig, s).unwrap() >= base);
            assert!(multiplier_a(&[k], &[eta + 1.0], l, sig, s).unwrap() >= base);
            assert!(multiplier_a(&[k], &[eta], l + 0.1, sig, s).unwrap() >= base);
            assert!(multiplier_a(&[k], &[eta], l, sig + 0.1, s).unwrap() >= base);
        }
    }

    #[test]
    fn zero_field_norms_vanish() {
        let g = PhaseGrid::new(1, 8, 8, 2.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let f = DistPhysical::zeros(&g);
        assert_eq!(sobolev_weighted_norm(&ws, &f, 2.0, 1).unwrap(), 0.0);
        assert_eq!(linf_weighted_norm(&f, 2), 0.0);
    }

    #[test]
    fn sobolev_zero_zero_is_plancherel() {
        let g = PhaseGrid::new(1, 16, 16, 3.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut f = DistPhysical::zeros(&g);
        for v in f.values.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let n = sobolev_weighted_norm(&ws, &f, 0.0, 0).unwrap();
        let l2: f64 = (f.values.iter().map(|v| v * v).sum::<f64>() * g.dx() * g.dv()).sqrt();
        assert!((n - l2).abs() < 1e-10 * l2);
    }

    /// Independent quadruple-loop evaluation of the weighted Sobolev norm.
    fn brute_sobolev(f: &DistPhysical, sigma: f64, m: usize, lambda: f64, s: f64) -> f64 {
        let g = &f.grid;
        let nvd = g.nvd();
        let mut total = 0.0;
        for alpha in multi_indices(g.d, m) {
            for ki in 0..g.nx.pow(g.d as u32) {
                let k = g.k_vec(ki);
                for ji in 0..nvd {
                    let eta = g.eta_vec(ji);
                    // brute DFT of v^alpha f at (k, eta)
                    let mut acc = Complex64::default();
                    for xf in 0..g.nxd() {
                        let x = g.x_vec(xf);
                        for vf in 0..nvd {
                            let v = g.v_vec(vf);
                            let mut w = f.values[xf * nvd + vf];
                            for a in 0..g.d {
                                w *= v[a].powi(alpha[a] as i32);
                            }
                            let mut ph = 0.0;
                            for a in 0..g.d {
                                ph -= k[a] * x[a] + v[a] * eta[a];
                            }
                            acc += Complex64::from_polar(w, ph);
                        }
                    }
                    acc *= g.dx().powi(g.d as i32) * g.dv().powi(g.d as i32)
                        / (2.0 * PI).powi(g.d as i32);
                    let b = jap_bracket(&k[..g.d], &eta[..g.d]);
                    total += b.powf(2.0 * sigma)
                        * (2.0 * lambda * b.powf(s)).exp()
                        * acc.norm_sqr();
                }
            }
        }
        (total * g.deta().powi(g.d as i32)).sqrt()
    }

    #[test]
    fn weighted_sobolev_matches_direct_summation() {
        // f = cos(x) e^{-v^2/2}, sigma = 1, M = 1 (32x64 is the spec scale;
        // 16x24 keeps the O(N^4) oracle quick and exercises the same path)
        let g = PhaseGrid::new(1, 16, 24, 6.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let f = DistPhysical::from_fn(&g, |x, v| x[0].cos() * (-v[0] * v[0] / 2.0).exp());
        let fast = sobolev_weighted_norm(&ws, &f, 1.0, 1).unwrap();
        let brute = brute_sobolev(&f, 1.0, 1, 0.0, 1.0);
        assert!((fast - brute).abs() < 1e-10 * brute, "{fast} vs {brute}");
    }

    #[test]
    fn gevrey_f_matches_direct_summation() {
        // f = e^{-v^2/2} uniform in x, sigma = 1, s = 1/2, lambda = 0.2
        let g = PhaseGrid::new(1, 8, 24, 6.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let f = DistPhysical::from_fn(&g, |_, v| (-v[0] * v[0] / 2.0).exp());
        let fast = gevrey_norm_f(&ws, &f, 0.2, 1.0, 1, 0.5).unwrap();
        let brute = brute_sobolev(&f, 1.0, 1, 0.2, 0.5);
        assert!((fast - brute).abs() < 1e-10 * brute, "{fast} vs {brute}");
    }

    #[test]
    fn gevrey_reduces_to_sobolev_at_lambda_zero() {
        let g = PhaseGrid::new(1, 12, 16, 4.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut f = DistPhysical::zeros(&g);
        for v in f.values.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let a = gevrey_norm_f(&ws, &f, 0.0, 2.0, 2, 0.5).unwrap();
        let b = sobolev_weighted_norm(&ws, &f, 2.0, 2).unwrap();
        assert!((a - b).abs() <= 1e-13 * b);
    }

    #[test]
    fn gevrey_single_point_mass() {
        // single spectral point mass at k=1, eta=0 (d=1, M=0), plus the
        // conjugate mode so the field is real
        let g = PhaseGrid::new(1, 8, 8, 2.0).unwrap();
        let (lambda, sigma, s, c) = (0.3, 1.25, 0.5, 0.7);
        let per_mode = c * c * g.deta() * 2.0f64.powf(sigma) * (2.0 * lambda * 2.0f64.powf(s / 2.0)).exp();
        // assemble the spectral field directly and evaluate the sum
        let nvd = g.nvd();
        let mut total = 0.0;
        for (kf, amp) in [(1usize, c), (g.nx - 1, c)] {
            let k = g.k_vec(kf);
            let b = jap_bracket(&k[..1], &[0.0]);
            total += b.powf(2.0 * sigma) * (2.0 * lambda * b.powf(s)).exp() * amp * amp * g.deta();
        }
        assert!((total - 2.0 * per_mode).abs() < 1e-12 * total);
        let _ = nvd;
    }

    #[test]
    fn gevrey_u_examples() {
        // constant field: only k = 0 contributes, <0> = 1
        let g = PhaseGrid::new(2, 8, 4, 2.0).unwrap();
        let mut u = FluidSpectral::zeros(&g);
        let c = 0.8;
        u.coeffs[0][0] = Complex64::new(c, 0.0);
        let lambda = 0.4;
        let n = gevrey_norm_u(&u, lambda, 3.0, 0.5).unwrap();
        assert!((n * n - (2.0 * lambda).exp() * c * c).abs() < 1e-13);

        // u = (cos x1) e2 on T^2, sigma = 0, lambda = 0 -> 1/2
        let ws = SpectralWorkspace::new(&g);
        let mut comps = vec![vec![0.0; g.nxd()]; 2];
        for xf in 0..g.nxd() {
            let x = g.x_vec(xf);
            comps[1][xf] = x[0].cos();
        }
        let uh = ws.fluid_from_physical(&g, &comps);
        let n2 = gevrey_norm_u(&uh, 0.0, 0.0, 1.0).unwrap();
        assert!((n2 * n2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gevrey_u_matches_direct_summation() {
        let g = PhaseGrid::new(2, 8, 4, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut u = FluidSpectral::zeros(&g);
        // band-limited random coefficients (no reality constraint needed)
        for comp in u.coeffs.iter_mut() {
            for kf in 0..g.nxd() {
                if g.k_sq(kf) <= 4.0 {
                    comp[kf] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
        }
        let (lambda, sigma, s) = (0.3, 2.0, 0.5);
        let fast = gevrey_norm_u(&u, lambda, sigma, s).unwrap();
        let mut brute = 0.0;
        for kf in 0..g.nxd() {
            let k = g.k_vec(kf);
            let b = jap_bracket(&k[..2], &[]);
            let w = b.powf(2.0 * sigma) * (2.0 * lambda * b.powf(s)).exp();
            for comp in &u.coeffs {
                brute += w * comp[kf].norm_sqr();
            }
        }
        let brute = brute.sqrt();
        assert!((fast - brute).abs() < 1e-12 * brute);
    }

    #[test]
    fn linf_weighted_examples() {
        // f = 1 on v-box [-1,1), M = 1, d = 1 -> sqrt(1 + sup|v|^2)
        let g = PhaseGrid::new(1, 4, 8, 1.0).unwrap();
        let f = DistPhysical::from_fn(&g, |_, _| 1.0);
        let sup_v = (0..g.nv).map(|m| g.v_coord(m).abs()).fold(0.0, f64::max);
        let want = (1.0 + sup_v * sup_v).sqrt();
        assert!((linf_weighted_norm(&f, 1) - want).abs() < 1e-14);

        // Gaussian, M = 2: independent grid scan
        let g = PhaseGrid::new(1, 4, 32, 6.0).unwrap();
        let f = DistPhysical::from_fn(&g, |_, v| (-v[0] * v[0] / 2.0).exp());
        let got = linf_weighted_norm(&f, 2);
        let mut acc = 0.0;
        for alpha in 0..=2 {
            let mut sup = 0.0f64;
            for m in 0..g.nv {
                let v = g.v_coord(m);
                sup = sup.max((v.powi(alpha) * (-v * v / 2.0).exp()).abs());
            }
            acc += sup * sup;
        }
        assert!((got - acc.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn norm_monotonicity_in_lambda_sigma_m() {
        let g = PhaseGrid::new(1, 12, 16, 4.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let mut f = DistPhysical::zeros(&g);
            for v in f.values.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            let l1 = rng.gen_range(0.0..0.3);
            let l2 = l1 + rng.gen_range(0.0..0.3);
            let s = rng.gen_range(0.2..1.0);
            let n1 = gevrey_norm_f(&ws, &f, l1, 2.0, 1, s).unwrap();
            let n2 = gevrey_norm_f(&ws, &f, l2, 2.0, 1, s).unwrap();
            assert!(n1 <= n2 * (1.0 + 1e-12));
            let s1 = sobolev_weighted_norm(&ws, &f, 1.0, 1).unwrap();
            let s2 = sobolev_weighted_norm(&ws, &f, 2.0, 1).unwrap();
            assert!(s1 <= s2 * (1.0 + 1e-12));
            let m1 = sobolev_weighted_norm(&ws, &f, 1.0, 0).unwrap();
            let m2 = sobolev_weighted_norm(&ws, &f, 1.0, 2).unwrap();
            assert!(m1 <= m2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn energy_single_fluid_mode() {
        // f = 0, u = (cos x1) e2 on [0,2pi]^2: E = pi^2, D = 2 E
        let g = PhaseGrid::new(2, 16, 4, 2.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let f = DistPhysical::zeros(&g);
        let mut comps = vec![vec![0.0; g.nxd()]; 2];
        for xf in 0..g.nxd() {
            let x = g.x_vec(xf);
            comps[1][xf] = x[0].cos();
        }
        let u = ws.fluid_from_physical(&g, &comps);
        let rec = energy_and_dissipation(&ws, &f, &u);
        assert!((rec.energy - PI * PI).abs() < 1e-10);
        assert!((rec.dissipation - 2.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn energy_drag_term_is_gaussian_variance() {
        // rho = 1, u = c constant, v-Gaussian centered at c: drag term equals
        // variance * mass; fluid gradient term vanishes
        let c = 0.4;
        let g = PhaseGrid::new(1, 8, 64, 8.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let norm = (2.0 * PI).sqrt().recip();
        let f = DistPhysical::from_fn(&g, |_, v| norm * (-(v[0] - c) * (v[0] - c) / 2.0).exp());
        let mut u = FluidSpectral::zeros(&g);
        u.coeffs[0][0] = Complex64::new(c, 0.0);
        let rec = energy_and_dissipation(&ws, &f, &u);
        let mass = f.mass();
        // unit variance Gaussian: iint |c-v|^2 f = 1 * mass
        assert!((rec.dissipation - mass).abs() < 1e-8 * mass);
        // modulated energy here: kinetic fluctuation around mean_j = c
        assert!((rec.mean_j[0] - c * mass / (2.0 * PI)).abs() < 1e-10);
    }

    #[test]
    fn energy_zero_state() {
        let g = PhaseGrid::new(1, 8, 8, 2.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let rec = energy_and_dissipation(&ws, &DistPhysical::zeros(&g), &FluidSpectral::zeros(&g));
        assert_eq!(rec.energy, 0.0);
        assert_eq!(rec.dissipation, 0.0);
        assert_eq!(rec.modulated, 0.0);
    }

    #[test]
    fn theorem_warnings_fire() {
        let p = GevreyParams::new(0.5, 2.0, 1, 0.5).unwrap();
        assert_eq!(p.theorem_warnings(2).len(), 2);
        let ok = GevreyParams::new(0.5, 4.0, 3, 0.5).unwrap();
        assert!(ok.theorem_warnings(2).is_empty());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn gevrey_monotone_in_lambda(
                seed in 0u64..1u64 << 48,
                l1 in 0.0f64..0.4,
                dl in 0.0f64..0.4,
                s in 0.2f64..1.0,
            ) {
                let g = PhaseGrid::new(1, 8, 12, 3.0).unwrap();
                let ws = SpectralWorkspace::new(&g);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut f = DistPhysical::zeros(&g);
                for v in f.values.iter_mut() {
                    *v = rng.gen_range(-1.0..1.0);
                }
                let a = gevrey_norm_f(&ws, &f, l1, 2.0, 1, s).unwrap();
                let b = gevrey_norm_f(&ws, &f, l1 + dl, 2.0, 1, s).unwrap();
                prop_assert!(a <= b * (1.0 + 1e-12));
            }

            #[test]
            fn multiplier_never_below_bracket_power(
                k in -30.0f64..30.0,
                eta in -30.0f64..30.0,
                lambda in 0.0f64..1.0,
                sigma in 0.0f64..3.0,
                s in 0.1f64..1.0,
            ) {
                let a = multiplier_a(&[k], &[eta], lambda, sigma, s).unwrap();
                let b = jap_bracket(&[k], &[eta]).powf(sigma);
                prop_assert!(a >= b * (1.0 - 1e-12));
            }
        }
    }
}
