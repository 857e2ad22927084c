//! Particle characteristics (X, V): dX/ds = V, dV/ds = u(s, X) - V,
//! integrated by RK4 forward or backward, with spectral evaluation of u at
//! off-grid positions and linear interpolation of u in time.

use crate::field::FluidSpectral;
use crate::grid::PhaseGrid;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Particle ensemble at a common time.
#[derive(Debug, Clone)]
pub struct CharacteristicState {
    pub t: f64,
    pub x: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
}

impl CharacteristicState {
    pub fn max_speed(&self) -> f64 {
        self.v
            .iter()
            .map(|v| (v[0] * v[0] + v[1] * v[1]).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Time series of fluid fields for u(s, x) lookups.
pub struct VelocitySeries {
    pub times: Vec<f64>,
    pub fields: Vec<FluidSpectral>,
}

impl VelocitySeries {
    pub fn frozen(u: FluidSpectral) -> Self {
        Self {
            times: vec![0.0],
            fields: vec![u],
        }
    }

    /// Evaluate u(s, x) with linear interpolation in time and exact Fourier
    /// summation in space.
    pub fn eval(&self, s: f64, x: &[f64; 2]) -> [f64; 2] {
        let n = self.times.len();
        if n == 1 {
            return eval_field_at(&self.fields[0], x);
        }
        let s = s.clamp(self.times[0], self.times[n - 1]);
        let hi = match self
            .times
            .binary_search_by(|t| t.partial_cmp(&s).unwrap())
        {
            Ok(i) => i.max(1),
            Err(i) => i.clamp(1, n - 1),
        };
        let lo = hi - 1;
        let span = self.times[hi] - self.times[lo];
        let theta = if span > 0.0 { (s - self.times[lo]) / span } else { 0.0 };
        let a = eval_field_at(&self.fields[lo], x);
        let b = eval_field_at(&self.fields[hi], x);
        [
            (1.0 - theta) * a[0] + theta * b[0],
            (1.0 - theta) * a[1] + theta * b[1],
        ]
    }
}

/// Exact evaluation of the Fourier series at an off-grid point.
pub fn eval_field_at(u: &FluidSpectral, x: &[f64; 2]) -> [f64; 2] {
    let g = &u.grid;
    // per-axis phase tables e^{i k x_a}
    let mut phases: Vec<Vec<Complex64>> = Vec::with_capacity(g.d);
    for a in 0..g.d {
        phases.push(
            (0..g.nx)
                .map(|ki| Complex64::from_polar(1.0, g.wavenumber(ki) * x[a]))
                .collect(),
        );
    }
    let mut out = [0.0; 2];
    for a in 0..g.d {
        let mut acc = Complex64::default();
        for kf in 0..g.nxd() {
            let ki = PhaseGrid::unflatten(kf, g.nx, g.d);
            let mut ph = phases[0][ki[0]];
            if g.d == 2 {
                ph *= phases[1][ki[1]];
            }
            acc += u.coeffs[a][kf] * ph;
        }
        out[a] = acc.re;
    }
    out
}

fn wrap(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x % two_pi;
    if y < 0.0 {
        y += two_pi;
    }
    y
}

/// RK4 trace of the ensemble from t0 to t1 (either direction) with step
/// magnitude `dt`. X is wrapped to [0, 2pi)^d after each step.
pub fn integrate_characteristics(
    series: &VelocitySeries,
    particles: &CharacteristicState,
    t0: f64,
    t1: f64,
    dt: f64,
) -> CharacteristicState {
    let d = series.fields[0].grid.d;
    let mut state = particles.clone();
    state.t = t0;
    let total = t1 - t0;
    if total == 0.0 {
        return state;
    }
    let nsteps = (total.abs() / dt).ceil().max(1.0) as usize;
    let h = total / nsteps as f64;
    let rhs = |s: f64, x: &[f64; 2], v: &[f64; 2]| -> ([f64; 2], [f64; 2]) {
        let u = series.eval(s, x);
        let mut dv = [0.0; 2];
        for a in 0..d {
            dv[a] = u[a] - v[a];
        }
        (*v, dv)
    };
    for step in 0..nsteps {
        let s = t0 + step as f64 * h;
        for p in 0..state.x.len() {
            let x0 = state.x[p];
            let v0 = state.v[p];
            let (kx1, kv1) = rhs(s, &x0, &v0);
            let x1 = add(&x0, &kx1, h / 2.0, d);
            let v1 = add(&v0, &kv1, h / 2.0, d);
            let (kx2, kv2) = rhs(s + h / 2.0, &x1, &v1);
            let x2 = add(&x0, &kx2, h / 2.0, d);
            let v2 = add(&v0, &kv2, h / 2.0, d);
            let (kx3, kv3) = rhs(s + h / 2.0, &x2, &v2);
            let x3 = add(&x0, &kx3, h, d);
            let v3 = add(&v0, &kv3, h, d);
            let (kx4, kv4) = rhs(s + h, &x3, &v3);
            for a in 0..d {
                state.x[p][a] = wrap(
                    x0[a] + h / 6.0 * (kx1[a] + 2.0 * kx2[a] + 2.0 * kx3[a] + kx4[a]),
                );
                state.v[p][a] = v0[a] + h / 6.0 * (kv1[a] + 2.0 * kv2[a] + 2.0 * kv3[a] + kv4[a]);
            }
        }
    }
    state.t = t1;
    state
}

fn add(x: &[f64; 2], k: &[f64; 2], h: f64, d: usize) -> [f64; 2] {
    let mut out = [0.0; 2];
    for a in 0..d {
        out[a] = x[a] + h * k[a];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn zero_series(d: usize, nx: usize) -> VelocitySeries {
        let g = PhaseGrid::new(d, nx, 4, 2.0).unwrap();
        VelocitySeries::frozen(FluidSpectral::zeros(&g))
    }

    #[test]
    fn free_motion_closed_form_backward() {
        // u = 0: tracing backward from (x, v) at t to s = 0 gives
        // V(0) = v e^{t}, X(0) = x - v (e^{t} - 1)
        let series = zero_series(1, 8);
        let t = 0.5;
        let start = CharacteristicState {
            t,
            x: vec![[1.0, 0.0], [4.0, 0.0]],
            v: vec![[0.3, 0.0], [-0.7, 0.0]],
        };
        let end = integrate_characteristics(&series, &start, t, 0.0, 1e-3);
        for (p, (x0, v0)) in start.x.iter().zip(start.v.iter()).enumerate() {
            let want_v = v0[0] * t.exp();
            let want_x = wrap(x0[0] - v0[0] * (t.exp() - 1.0));
            assert!((end.v[p][0] - want_v).abs() < 1e-8);
            assert!((end.x[p][0] - want_x).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_u_closed_form() {
        let g = PhaseGrid::new(1, 8, 4, 2.0).unwrap();
        let c = 0.4;
        let mut u = FluidSpectral::zeros(&g);
        u.coeffs[0][0] = Complex64::new(c, 0.0);
        let series = VelocitySeries::frozen(u);
        let t = 0.5;
        let start = CharacteristicState {
            t,
            x: vec![[2.0, 0.0]],
            v: vec![[1.1, 0.0]],
        };
        // backward: V(s) = c + (v - c) e^{t - s}
        let end = integrate_characteristics(&series, &start, t, 0.0, 1e-3);
        let want = c + (1.1 - c) * t.exp();
        assert!((end.v[0][0] - want).abs() < 1e-8, "{} vs {want}", end.v[0][0]);
    }

    #[test]
    fn rk4_self_convergence_order() {
        // generic frozen u: halving dt shrinks the error ~16x
        let g = PhaseGrid::new(2, 8, 4, 2.0).unwrap();
        let ws = crate::transform::SpectralWorkspace::new(&g);
        let mut comps = vec![vec![0.0; g.nxd()]; 2];
        for xf in 0..g.nxd() {
            let x = g.x_vec(xf);
            comps[0][xf] = 0.5 * x[1].sin();
            comps[1][xf] = -0.5 * (x[0] + 1.0).cos();
        }
        let series = VelocitySeries::frozen(ws.fluid_from_physical(&g, &comps));
        let start = CharacteristicState {
            t: 0.0,
            x: vec![[1.2, 2.3]],
            v: vec![[0.4, -0.2]],
        };
        let run = |dt: f64| integrate_characteristics(&series, &start, 0.0, 1.0, dt);
        let fine = run(0.003125);
        let err = |s: &CharacteristicState| {
            ((s.v[0][0] - fine.v[0][0]).powi(2) + (s.v[0][1] - fine.v[0][1]).powi(2)).sqrt()
        };
        let e1 = err(&run(0.05));
        let e2 = err(&run(0.025));
        let ratio = e1 / e2;
        assert!(ratio > 10.0 && ratio < 24.0, "expected ~16, got {ratio}");
    }
}
