use crate::grid::PhaseGrid;
use num_complex::Complex64;

/// Distribution f on the physical phase-space grid, row-major
/// [x1(,x2), v1(,v2)] with the last velocity axis fastest.
#[derive(Debug, Clone)]
pub struct DistPhysical {
    pub grid: PhaseGrid,
    pub values: Vec<f64>,
}

impl DistPhysical {
    pub fn zeros(grid: &PhaseGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: &PhaseGrid, mut f: impl FnMut(&[f64], &[f64]) -> f64) -> Self {
        let nvd = grid.nvd();
        let mut values = vec![0.0; grid.len()];
        for xf in 0..grid.nxd() {
            let x = grid.x_vec(xf);
            for vf in 0..nvd {
                let v = grid.v_vec(vf);
                values[xf * nvd + vf] = f(&x[..grid.d], &v[..grid.d]);
            }
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// Total mass: dx^d * sum_x rho(x), sharing the moment summation tree.
    pub fn mass(&self) -> f64 {
        let dxd = self.grid.dx().powi(self.grid.d as i32);
        let dvd = self.grid.dv().powi(self.grid.d as i32);
        let nvd = self.grid.nvd();
        let mut total = 0.0;
        for xf in 0..self.grid.nxd() {
            let mut rho = 0.0;
            for vf in 0..nvd {
                rho += self.values[xf * nvd + vf];
            }
            total += rho * dvd;
        }
        total * dxd
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Fraction of |f| mass in the outer 10% shell of the velocity box
    /// (any |v_a| >= 0.9 Lv). Returns 0 for an identically tiny field.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let g = &self.grid;
        let nvd = g.nvd();
        let edge = 0.9 * g.lv;
        let mut total = 0.0;
        let mut boundary = 0.0;
        for xf in 0..g.nxd() {
            for vf in 0..nvd {
                let w = self.values[xf * nvd + vf].abs();
                total += w;
                let v = g.v_vec(vf);
                if v[..g.d].iter().any(|c| c.abs() >= edge) {
                    boundary += w;
                }
            }
        }
        if total <= f64::MIN_POSITIVE {
            0.0
        } else {
            boundary / total
        }
    }
}

/// Fourier coefficients f_hat_k(eta_j), FFT-ordered on both index groups,
/// row-major [k1(,k2), j1(,j2)] with the last dual-velocity axis fastest.
#[derive(Debug, Clone)]
pub struct DistSpectral {
    pub grid: PhaseGrid,
    pub coeffs: Vec<Complex64>,
}

impl DistSpectral {
    pub fn zeros(grid: &PhaseGrid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }
}

/// Fluid velocity coefficients u_hat_k per component, FFT-ordered, row-major
/// over k with the last axis fastest. `coeffs[c]` is component c.
#[derive(Debug, Clone)]
pub struct FluidSpectral {
    pub grid: PhaseGrid,
    pub coeffs: Vec<Vec<Complex64>>,
}

impl FluidSpectral {
    pub fn zeros(grid: &PhaseGrid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![vec![Complex64::default(); grid.nxd()]; grid.d],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// max_k |k . u_hat_k| relative to max_k |u_hat_k|.
    pub fn divergence_residual(&self) -> f64 {
        let g = &self.grid;
        let mut max_div = 0.0f64;
        let mut max_u = 0.0f64;
        for kf in 0..g.nxd() {
            let k = g.k_vec(kf);
            let mut div = Complex64::default();
            let mut mag = 0.0;
            for (a, comp) in self.coeffs.iter().enumerate() {
                div += Complex64::new(k[a], 0.0) * comp[kf];
                mag += comp[kf].norm_sqr();
            }
            max_div = max_div.max(div.norm());
            max_u = max_u.max(mag.sqrt());
        }
        if max_u <= f64::MIN_POSITIVE {
            0.0
        } else {
            max_div / max_u
        }
    }

    /// Mean velocity over the torus: the k=0 coefficient.
    pub fn mean(&self) -> [f64; 2] {
        let mut out = [0.0; 2];
        for a in 0..self.grid.d {
            out[a] = self.coeffs[a][0].re;
        }
        out
    }
}

/// Spatial density and current of f.
#[derive(Debug, Clone)]
pub struct MomentFields {
    pub grid: PhaseGrid,
    /// rho_f(x), length Nx^d.
    pub rho: Vec<f64>,
    /// j_f(x) per component, d vectors of length Nx^d.
    pub j: Vec<Vec<f64>>,
}
