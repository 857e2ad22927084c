//! Regularity-radius tracking: the Bernoulli-type constraint ODE
//! lambda' = -lambda (1 + ||f||_{sigma,M} + ||u||_sigma)
//!           - lambda^2 (||u||_sigma + ||f||_{lambda,sigma,M,s} + ||u||_{lambda,sigma,s}),
//! its closed form through G(t), the a-priori lower bound, and an empirical
//! radius estimated from spectral decay.

use crate::error::{GvnsError, Result};

pub const LAMBDA_FLOOR: f64 = 1e-300;

/// Coefficients of the constraint ODE at one sample time.
#[derive(Debug, Clone, Copy)]
pub struct RadiusCoeffs {
    pub t: f64,
    /// Y_sob = 1 + ||f||_{sigma,M} + ||u||_sigma.
    pub y_sob: f64,
    /// Y_gev = ||u||_sigma + ||f||_{lambda,sigma,M,s} + ||u||_{lambda,sigma,s}.
    pub y_gev: f64,
}

/// lambda' = -lambda Y_sob - lambda^2 Y_gev.
pub fn lambda_rhs(lambda: f64, y_sob: f64, y_gev: f64) -> f64 {
    -lambda * y_sob - lambda * lambda * y_gev
}

/// Streaming tracker state used inside the run loop: the current radius,
/// log G(t) and the closed-form quadrature accumulator.
#[derive(Debug, Clone, Copy)]
pub struct RadiusState {
    pub t: f64,
    pub lambda: f64,
    pub log_g: f64,
    /// int_0^t Y_gev / G dtau (trapezoidal).
    pub int_ygev_over_g: f64,
    pub collapsed: bool,
}

impl RadiusState {
    pub fn new(lambda0: f64) -> Self {
        Self {
            t: 0.0,
            lambda: lambda0,
            log_g: 0.0,
            int_ygev_over_g: 0.0,
            collapsed: false,
        }
    }

    pub fn g(&self) -> f64 {
        self.log_g.exp()
    }

    /// Advance by RK4 over [prev.t, next.t] with linear-in-time coefficients,
    /// updating the closed-form accumulators with the trapezoid rule on the
    /// same two samples.
    pub fn advance(&mut self, prev: &RadiusCoeffs, next: &RadiusCoeffs, substeps: usize) {
        let h = next.t - prev.t;
        if h <= 0.0 {
            return;
        }
        let lerp = |a: f64, b: f64, th: f64| a + (b - a) * th;
        let n = substeps.max(1);
        let hh = h / n as f64;
        let mut lam = self.lambda;
        for i in 0..n {
            let th0 = i as f64 / n as f64;
            let th_half = (i as f64 + 0.5) / n as f64;
            let th1 = (i + 1) as f64 / n as f64;
            let (s0, g0) = (lerp(prev.y_sob, next.y_sob, th0), lerp(prev.y_gev, next.y_gev, th0));
            let (sh, gh) = (
                lerp(prev.y_sob, next.y_sob, th_half),
                lerp(prev.y_gev, next.y_gev, th_half),
            );
            let (s1, g1) = (lerp(prev.y_sob, next.y_sob, th1), lerp(prev.y_gev, next.y_gev, th1));
            let k1 = lambda_rhs(lam, s0, g0);
            let k2 = lambda_rhs(lam + hh / 2.0 * k1, sh, gh);
            let k3 = lambda_rhs(lam + hh / 2.0 * k2, sh, gh);
            let k4 = lambda_rhs(lam + hh * k3, s1, g1);
            lam += hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        // closed-form accumulators share the trapezoid samples
        let g_prev = self.log_g;
        let g_next = g_prev + 0.5 * h * (prev.y_sob + next.y_sob);
        self.int_ygev_over_g +=
            0.5 * h * (prev.y_gev * (-g_prev).exp() + next.y_gev * (-g_next).exp());
        self.log_g = g_next;
        self.t = next.t;
        self.lambda = lam;
        // flag, but keep the (positive, possibly denormal) value
        if !(self.lambda > LAMBDA_FLOOR) {
            self.collapsed = true;
            if self.lambda <= 0.0 {
                self.lambda = f64::MIN_POSITIVE;
            }
        }
    }

    /// Closed-form radius from the accumulated quadratures:
    /// lambda = G^{-1} (lambda0^{-1} + int Y_gev / G)^{-1}.
    pub fn closed_form(&self, lambda0: f64) -> f64 {
        (-self.log_g).exp() / (lambda0.recip() + self.int_ygev_over_g)
    }
}

/// RK4 integration of the radius ODE over a sampled coefficient series.
/// Returns lambda at each sample time (starting with lambda0 at the first).
pub fn integrate_lambda(series: &[RadiusCoeffs], lambda0: f64, substeps: usize) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(GvnsError::InsufficientData("empty coefficient series".into()));
    }
    let mut st = RadiusState::new(lambda0);
    st.t = series[0].t;
    let mut out = Vec::with_capacity(series.len());
    out.push(lambda0);
    for w in series.windows(2) {
        st.advance(&w[0], &w[1], substeps);
        if st.collapsed {
            return Err(GvnsError::RadiusCollapsed {
                t: st.t,
                floor: LAMBDA_FLOOR,
            });
        }
        out.push(st.lambda);
    }
    Ok(out)
}

/// Closed-form lambda evaluated on the same trapezoidal samples.
pub fn closed_form_lambda(series: &[RadiusCoeffs], lambda0: f64) -> Vec<f64> {
    let mut st = RadiusState::new(lambda0);
    if let Some(first) = series.first() {
        st.t = first.t;
    }
    let mut out = Vec::with_capacity(series.len());
    out.push(lambda0);
    for w in series.windows(2) {
        // reuse the quadrature updates without the RK4 state
        let h = w[1].t - w[0].t;
        let g_prev = st.log_g;
        let g_next = g_prev + 0.5 * h * (w[0].y_sob + w[1].y_sob);
        st.int_ygev_over_g +=
            0.5 * h * (w[0].y_gev * (-g_prev).exp() + w[1].y_gev * (-g_next).exp());
        st.log_g = g_next;
        out.push(st.closed_form(lambda0));
    }
    out
}

/// Lower bound (2 C3 t + lambda0^{-1})^{-1} exp[-C3 int_0^t Y_sob dtau]
/// evaluated at every sample time; `int_y_sob` holds the running trapezoid
/// of (1 + ||u||_sigma + ||f||_{sigma,M}).
pub fn lambda_lower_bound(times: &[f64], int_y_sob: &[f64], lambda0: f64, c3: f64) -> Vec<f64> {
    times
        .iter()
        .zip(int_y_sob.iter())
        .map(|(&t, &i)| (2.0 * c3 * t + lambda0.recip()).recip() * (-c3 * i).exp())
        .collect()
}

/// Result of the spectral-decay fit.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalRadius {
    pub lambda: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    /// Decay signal too weak relative to the residual.
    pub noisy: bool,
    pub shells: usize,
}

/// Least-squares fit of log(shell-max |coeff| <k,eta>^{-sigma}) against
/// -lambda <k,eta>^s over unit-width bracket shells. The shell statistic is
/// the envelope (max), anchored at the bracket of the maximizing entry.
pub fn estimate_empirical_radius<I>(entries: I, sigma: f64, s: f64) -> Result<EmpiricalRadius>
where
    I: IntoIterator<Item = (f64, f64)>, // (bracket, |coeff|)
{
    const NOISE_FLOOR: f64 = 1e-14;
    const MIN_SHELLS: usize = 6;
    let mut shells: Vec<(f64, f64)> = Vec::new(); // (bracket of argmax, max value)
    for (b, mag) in entries {
        let scaled = mag * b.powf(-sigma);
        if !scaled.is_finite() {
            continue;
        }
        let bin = b.floor().max(1.0) as usize;
        if shells.len() <= bin {
            shells.resize(bin + 1, (0.0, -1.0));
        }
        if scaled > shells[bin].1 {
            shells[bin] = (b, scaled);
        }
    }
    let pts: Vec<(f64, f64)> = shells
        .iter()
        .filter(|(_, v)| *v > NOISE_FLOOR)
        .map(|&(b, v)| (b.powf(s), v.ln()))
        .collect();
    if pts.len() < MIN_SHELLS {
        return Err(GvnsError::Underresolved {
            found: pts.len(),
            needed: MIN_SHELLS,
        });
    }
    // least squares y = c - lambda x
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let lambda = -slope;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let residual = (rss / n).sqrt();
    let x_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    let signal = lambda.abs() * (x_max - x_min);
    Ok(EmpiricalRadius {
        lambda,
        residual,
        noisy: signal < 2.0 * residual,
        shells: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PhaseGrid;
    use crate::norms::jap_bracket;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rhs_examples() {
        assert_eq!(lambda_rhs(0.0, 5.0, 7.0), 0.0);
        assert_eq!(lambda_rhs(1.0, 1.0, 1.0), -2.0);
        assert_eq!(lambda_rhs(0.5, 2.0, 4.0), -2.0);
    }

    fn constant_series(t_end: f64, n: usize, y_sob: f64, y_gev: f64) -> Vec<RadiusCoeffs> {
        (0..=n)
            .map(|i| RadiusCoeffs {
                t: i as f64 * t_end / n as f64,
                y_sob,
                y_gev,
            })
            .collect()
    }

    #[test]
    fn bernoulli_closed_form() {
        // Y_sob = Y_gev = 1, lambda0 = 1: lambda(t) = 1/(2 e^t - 1)
        let t_end = std::f64::consts::LN_2;
        let series = constant_series(t_end, 700, 1.0, 1.0);
        let lams = integrate_lambda(&series, 1.0, 1).unwrap();
        let got = *lams.last().unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-8, "{got}");
        for (i, &l) in lams.iter().enumerate() {
            let t = series[i].t;
            let want = 1.0 / (2.0 * t.exp() - 1.0);
            assert!((l - want).abs() < 1e-8);
        }
    }

    #[test]
    fn linear_ode_when_ygev_zero() {
        // lambda(t) = lambda0 e^{-int Y_sob} = lambda0 / G(t)
        let series = constant_series(1.0, 1000, 2.5, 0.0);
        let lams = integrate_lambda(&series, 0.7, 1).unwrap();
        let got = *lams.last().unwrap();
        let want = 0.7 * (-2.5f64).exp();
        assert!((got - want).abs() < 1e-9 * want.abs().max(1.0));
        let cf = closed_form_lambda(&series, 0.7);
        assert!((cf.last().unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn rk4_and_closed_form_agree_on_varying_series() {
        let dt = 5e-4;
        let n = 1000;
        let series: Vec<RadiusCoeffs> = (0..=n)
            .map(|i| {
                let t = i as f64 * dt;
                RadiusCoeffs {
                    t,
                    y_sob: 1.0 + 0.5 * (3.0 * t).sin().powi(2),
                    y_gev: 0.8 + 0.4 * (2.0 * t).cos(),
                }
            })
            .collect();
        let rk = integrate_lambda(&series, 0.5, 1).unwrap();
        let cf = closed_form_lambda(&series, 0.5);
        for (a, b) in rk.iter().zip(cf.iter()) {
            assert!((a - b).abs() <= 1e-6 * b.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn positivity_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let series: Vec<RadiusCoeffs> = (0..=200)
                .map(|i| RadiusCoeffs {
                    t: i as f64 * 0.005,
                    y_sob: rng.gen_range(0.0..4.0),
                    y_gev: rng.gen_range(0.0..4.0),
                })
                .collect();
            let lams = integrate_lambda(&series, 1.0, 1).unwrap();
            for w in lams.windows(2) {
                assert!(w[1] > 0.0);
                assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn doubling_lambda0_never_decreases_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let series: Vec<RadiusCoeffs> = (0..=100)
                .map(|i| RadiusCoeffs {
                    t: i as f64 * 0.01,
                    y_sob: rng.gen_range(0.0..3.0),
                    y_gev: rng.gen_range(0.0..3.0),
                })
                .collect();
            let l0 = rng.gen_range(0.1..1.0);
            let a = integrate_lambda(&series, l0, 1).unwrap();
            let b = integrate_lambda(&series, 2.0 * l0, 1).unwrap();
            for (x, y) in a.iter().zip(b.iter()) {
                assert!(y >= &(x * (1.0 - 1e-12)));
            }
        }
    }

    #[test]
    fn lower_bound_examples() {
        // t = 0 -> lambda0
        let b = lambda_lower_bound(&[0.0], &[0.0], 0.7, 3.0);
        assert!((b[0] - 0.7).abs() < 1e-15);
        // zero fields, C3 = 1, lambda0 = 1 -> (2t+1)^{-1} e^{-t}
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let ints: Vec<f64> = times.clone(); // integrand 1
        let b = lambda_lower_bound(&times, &ints, 1.0, 1.0);
        for (i, &t) in times.iter().enumerate() {
            let want = (2.0 * t + 1.0).recip() * (-t).exp();
            assert!((b[i] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn synthetic_spectrum_recovery() {
        // u_hat = e^{-0.5 <k>}, s = 1, sigma = 0 -> lambda ~ 0.5
        let g = PhaseGrid::new(2, 64, 4, 2.0).unwrap();
        let entries: Vec<(f64, f64)> = (0..g.nxd())
            .map(|kf| {
                let k = g.k_vec(kf);
                let b = jap_bracket(&k[..2], &[]);
                (b, (-0.5 * b).exp())
            })
            .collect();
        let fit = estimate_empirical_radius(entries, 0.0, 1.0).unwrap();
        assert!((fit.lambda - 0.5).abs() <= 0.02, "{}", fit.lambda);
        assert!(!fit.noisy);

        // |f_hat| = <k,eta>^2 e^{-0.3 <k,eta>^{1/2}}, fit with sigma=2, s=1/2
        let g = PhaseGrid::new(1, 64, 64, 8.0).unwrap();
        let mut entries = Vec::new();
        for kf in 0..g.nx {
            let k = g.wavenumber(kf);
            for jf in 0..g.nv {
                let eta = g.eta(jf);
                let b = jap_bracket(&[k], &[eta]);
                entries.push((b, b * b * (-0.3 * b.sqrt()).exp()));
            }
        }
        let fit = estimate_empirical_radius(entries, 2.0, 0.5).unwrap();
        assert!((fit.lambda - 0.3).abs() <= 0.05, "{}", fit.lambda);
    }

    #[test]
    fn white_noise_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let g = PhaseGrid::new(1, 64, 64, 8.0).unwrap();
        let mut entries = Vec::new();
        for kf in 0..g.nx {
            for jf in 0..g.nv {
                let b = jap_bracket(&[g.wavenumber(kf)], &[g.eta(jf)]);
                entries.push((b, rng.gen_range(0.5..1.0)));
            }
        }
        let fit = estimate_empirical_radius(entries, 0.0, 1.0).unwrap();
        assert!(fit.lambda.abs() < 0.05, "{}", fit.lambda);
        assert!(fit.noisy);
    }

    #[test]
    fn underresolved_is_an_error() {
        let entries = vec![(1.0, 1.0), (2.0, 0.5), (3.0, 0.2)];
        assert!(matches!(
            estimate_empirical_radius(entries, 0.0, 1.0),
            Err(GvnsError::Underresolved { .. })
        ));
    }
}
