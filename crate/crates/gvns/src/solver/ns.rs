//! Pseudo-spectral Navier-Stokes step: exact integrating factor for the
//! diffusion, explicit RK2/RK4 stages for the dealiased advection and the
//! Brinkman force j_f - rho_f u, Leray projection after every stage.
//! Pressure is never formed.
//!
//! In d = 1 the Leray projector kills every k != 0 mode (1 - k k / |k|^2 = 0
//! for scalars), which forces u spatially uniform; the k = 0 mode then obeys
//! d<u>/dt = <j> - <rho u>, the exact reduced dynamics.

use crate::error::{GvnsError, Result};
use crate::field::FluidSpectral;
use crate::transform::{dealias_fluid, SpectralWorkspace};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsScheme {
    Rk2,
    Rk4,
}

/// Frozen kinetic sources for one fluid step.
pub struct BrinkmanSource {
    /// rho_f on the x-grid.
    pub rho_phys: Vec<f64>,
    /// j_f spectral coefficients per component.
    pub j_hat: Vec<Vec<Complex64>>,
}

/// Project onto divergence-free fields: u_hat -= k (k . u_hat) / |k|^2.
pub fn leray_project(uh: &mut FluidSpectral) {
    let g = uh.grid.clone();
    for kf in 0..g.nxd() {
        let k = g.k_vec(kf);
        let ksq = g.k_sq(kf);
        if ksq == 0.0 {
            continue;
        }
        let mut dot = Complex64::default();
        for a in 0..g.d {
            dot += Complex64::new(k[a], 0.0) * uh.coeffs[a][kf];
        }
        dot /= ksq;
        for a in 0..g.d {
            uh.coeffs[a][kf] -= Complex64::new(k[a], 0.0) * dot;
        }
    }
}

/// Projected, dealiased right-hand side N(u) = P[ -(u.grad)u + j - rho u ]
/// (terms per toggles), excluding the diffusion handled by the integrating
/// factor.
pub fn ns_rhs(
    ws: &SpectralWorkspace,
    uh: &FluidSpectral,
    source: Option<&BrinkmanSource>,
    nonlinearity: bool,
) -> FluidSpectral {
    let g = uh.grid.clone();
    let mut out = FluidSpectral::zeros(&g);
    let needs_phys = nonlinearity || source.is_some();
    let u_phys = if needs_phys {
        ws.fluid_to_physical(uh)
    } else {
        Vec::new()
    };

    if nonlinearity {
        for a in 0..g.d {
            let grads = ws.x_gradient(&uh.coeffs[a]);
            let mut adv = vec![0.0; g.nxd()];
            for xf in 0..g.nxd() {
                let mut acc = 0.0;
                for b in 0..g.d {
                    acc += u_phys[b][xf] * grads[b][xf];
                }
                adv[xf] = acc;
            }
            let adv_hat = ws.x_forward(&adv);
            for (o, z) in out.coeffs[a].iter_mut().zip(adv_hat.iter()) {
                *o -= z;
            }
        }
    }

    if let Some(src) = source {
        for a in 0..g.d {
            let mut drag = vec![0.0; g.nxd()];
            for xf in 0..g.nxd() {
                drag[xf] = src.rho_phys[xf] * u_phys[a][xf];
            }
            let drag_hat = ws.x_forward(&drag);
            for kf in 0..g.nxd() {
                out.coeffs[a][kf] += src.j_hat[a][kf] - drag_hat[kf];
            }
        }
    }

    dealias_fluid(&mut out);
    leray_project(&mut out);
    out
}

fn axpy(y: &mut FluidSpectral, a: f64, x: &FluidSpectral) {
    for (yc, xc) in y.coeffs.iter_mut().zip(x.coeffs.iter()) {
        for (yz, xz) in yc.iter_mut().zip(xc.iter()) {
            *yz += a * xz;
        }
    }
}

fn scaled(u: &FluidSpectral, factors: &[f64]) -> FluidSpectral {
    let mut out = u.clone();
    for comp in out.coeffs.iter_mut() {
        for (z, &e) in comp.iter_mut().zip(factors.iter()) {
            *z *= e;
        }
    }
    out
}

/// Advance the fluid by dt with f (hence rho, j) frozen.
pub fn ns_substep(
    ws: &SpectralWorkspace,
    uh: &FluidSpectral,
    source: Option<&BrinkmanSource>,
    dt: f64,
    scheme: NsScheme,
    nonlinearity: bool,
    t: f64,
) -> Result<FluidSpectral> {
    let g = uh.grid.clone();
    let e_half: Vec<f64> = (0..g.nxd()).map(|kf| (-g.k_sq(kf) * dt / 2.0).exp()).collect();
    let e_full: Vec<f64> = (0..g.nxd()).map(|kf| (-g.k_sq(kf) * dt).exp()).collect();

    let mut next = match scheme {
        NsScheme::Rk2 => {
            // Lawson midpoint: exact diffusion, second order in the rest.
            let k1 = ns_rhs(ws, uh, source, nonlinearity);
            let mut mid = uh.clone();
            axpy(&mut mid, dt / 2.0, &k1);
            let mid = scaled(&mid, &e_half);
            let k2 = ns_rhs(ws, &mid, source, nonlinearity);
            let mut out = scaled(uh, &e_full);
            axpy(&mut out, dt, &scaled(&k2, &e_half));
            out
        }
        NsScheme::Rk4 => {
            let k1 = ns_rhs(ws, uh, source, nonlinearity);
            let mut s2 = uh.clone();
            axpy(&mut s2, dt / 2.0, &k1);
            let s2 = scaled(&s2, &e_half);
            let k2 = ns_rhs(ws, &s2, source, nonlinearity);
            let mut s3 = scaled(uh, &e_half);
            axpy(&mut s3, dt / 2.0, &k2);
            let k3 = ns_rhs(ws, &s3, source, nonlinearity);
            let mut s4 = scaled(uh, &e_full);
            axpy(&mut s4, dt, &scaled(&k3, &e_half));
            let k4 = ns_rhs(ws, &s4, source, nonlinearity);
            let mut out = scaled(uh, &e_full);
            axpy(&mut out, dt / 6.0, &scaled(&k1, &e_full));
            axpy(&mut out, dt / 3.0, &scaled(&k2, &e_half));
            axpy(&mut out, dt / 3.0, &scaled(&k3, &e_half));
            axpy(&mut out, dt / 6.0, &k4);
            out
        }
    };

    leray_project(&mut next);
    let before = uh.max_abs();
    let after = next.max_abs();
    if before > 1e-14 && after > 10.0 * before {
        return Err(GvnsError::Instability {
            t,
            factor: after / before,
        });
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PhaseGrid;
    use num_complex::Complex64;

    fn taylor_green(ws: &SpectralWorkspace, g: &PhaseGrid, amp: f64) -> FluidSpectral {
        let mut comps = vec![vec![0.0; g.nxd()]; 2];
        for xf in 0..g.nxd() {
            let x = g.x_vec(xf);
            comps[0][xf] = amp * x[0].sin() * x[1].cos();
            comps[1][xf] = -amp * x[0].cos() * x[1].sin();
        }
        ws.fluid_from_physical(g, &comps)
    }

    #[test]
    fn pure_heat_decay_is_exact() {
        // single divergence-free mode, nonlinearity disabled
        let g = PhaseGrid::new(2, 16, 4, 2.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let mut u = FluidSpectral::zeros(&g);
        // k = (1, 0): u along e2 is divergence-free
        let amp = Complex64::new(0.3, -0.1);
        u.coeffs[1][1 * g.nx + 0] = amp;
        u.coeffs[1][(g.nx - 1) * g.nx + 0] = amp.conj();
        let dt = 0.05;
        let mut cur = u.clone();
        for i in 0..20 {
            cur = ns_substep(&ws, &cur, None, dt, NsScheme::Rk2, false, i as f64 * dt).unwrap();
        }
        let t = 20.0 * dt;
        let want = amp * (-t).exp(); // |k|^2 = 1
        let got = cur.coeffs[1][1 * g.nx + 0];
        assert!((got - want).norm() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn taylor_green_nonlinearity_projects_away() {
        let g = PhaseGrid::new(2, 32, 4, 2.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let u = taylor_green(&ws, &g, 1.0);
        let rhs = ns_rhs(&ws, &u, None, true);
        assert!(rhs.max_abs() < 1e-13, "TG advection should be a pure gradient");
    }

    #[test]
    fn taylor_green_decays_exactly() {
        let g = PhaseGrid::new(2, 32, 4, 2.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let u0 = taylor_green(&ws, &g, 1.0);
        let dt = 1e-2;
        let mut u = u0.clone();
        for i in 0..50 {
            u = ns_substep(&ws, &u, None, dt, NsScheme::Rk2, true, i as f64 * dt).unwrap();
        }
        let t = 0.5;
        let decay = (-2.0f64 * t).exp();
        let mut err = 0.0f64;
        for a in 0..2 {
            for kf in 0..g.nxd() {
                err = err.max((u.coeffs[a][kf] - u0.coeffs[a][kf] * decay).norm());
            }
        }
        assert!(err < 1e-12, "TG coefficient error {err}");
        assert!(u.divergence_residual() < 1e-12);
    }

    #[test]
    fn mean_velocity_ode_in_1d() {
        // u0 = 0, frozen f with rho = 1, j = c: d<u>/dt = c - <u>
        let g = PhaseGrid::new(1, 16, 4, 2.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let c = 0.8;
        let src = BrinkmanSource {
            rho_phys: vec![1.0; g.nxd()],
            j_hat: vec![{
                let mut j = vec![Complex64::default(); g.nxd()];
                j[0] = Complex64::new(c, 0.0);
                j
            }],
        };
        let mut u = FluidSpectral::zeros(&g);
        let dt = 1e-3;
        let steps = 500;
        for i in 0..steps {
            u = ns_substep(&ws, &u, Some(&src), dt, NsScheme::Rk2, true, i as f64 * dt).unwrap();
        }
        let t = steps as f64 * dt;
        let want = c * (1.0 - (-t).exp());
        let got = u.coeffs[0][0].re;
        assert!((got - want).abs() < 1e-7, "{got} vs {want}");
        // all k != 0 modes killed by the 1-d projector
        for kf in 1..g.nxd() {
            assert!(u.coeffs[0][kf].norm() < 1e-15);
        }
    }

    #[test]
    fn instability_sentinel_fires() {
        let g = PhaseGrid::new(1, 8, 4, 2.0).unwrap();
        let ws = SpectralWorkspace::new(&g);
        let mut u = FluidSpectral::zeros(&g);
        u.coeffs[0][0] = Complex64::new(1e-3, 0.0);
        // huge forcing on the mean mode blows past the 10x sentinel
        let src = BrinkmanSource {
            rho_phys: vec![0.0; g.nxd()],
            j_hat: vec![{
                let mut j = vec![Complex64::default(); g.nxd()];
                j[0] = Complex64::new(1.0, 0.0);
                j
            }],
        };
        let res = ns_substep(&ws, &u, Some(&src), 1.0, NsScheme::Rk2, false, 0.0);
        assert!(matches!(res, Err(GvnsError::Instability { .. })));
    }
}
