//! Post-run verification: fits the smallest constants making each a-priori
//! bound hold along the whole diagnostics series and asserts their
//! finiteness and refinement stability.
//!
//! Fitting rules: constants outside an exponent are max-over-samples ratios;
//! constants inside an exponent (C0, C2, C3, C4, C5 and the short-time C)
//! are found by monotone bisection. Bound checks use relative slack 1e-9.

use crate::diagnostics::{DiagnosticsRow, DiagnosticsSeries};
use crate::error::{GvnsError, Result};
use serde::{Deserialize, Serialize};

pub const SLACK: f64 = 1e-9;
pub const C_FLOOR: f64 = 1e-6;
pub const C_CAP: f64 = 1e6;

/// Constants fitted from one run.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct FittedConstants {
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub c5: Option<f64>,
    pub c_short_time: Option<f64>,
    pub c_finf: Option<f64>,
    pub c_gevrey_f: Option<f64>,
    pub c_gevrey_u: Option<f64>,
}

/// Machine-readable verdict for one theorem-level check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub constants: Vec<(String, f64)>,
    /// fine / coarse fitted constants, when a refined run was supplied.
    pub refinement_ratios: Vec<(String, f64)>,
    pub details: String,
}

impl Verdict {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            pass: true,
            constants: Vec::new(),
            refinement_ratios: Vec::new(),
            details: String::new(),
        }
    }
}

/// Smallest c in [lo, hi] with holds(c) true, assuming monotonicity
/// (false below, true above). None if even hi fails.
pub fn bisect_smallest(lo: f64, hi: f64, holds: impl Fn(f64) -> bool) -> Option<f64> {
    if !holds(hi) {
        return None;
    }
    if holds(lo) {
        return Some(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt(); // geometric: the range spans many decades
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    Some(hi)
}

fn running_trapz(rows: &[DiagnosticsRow], f: impl Fn(&DiagnosticsRow) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in rows.windows(2) {
        acc += 0.5 * (w[1].t - w[0].t) * (f(&w[0]) + f(&w[1]));
        out.push(acc);
    }
    out
}

/// g(t) = exp[C0 int_0^t (||u||_{W^{1,inf}} + ||rho||_inf + ||f||_{inf,M}^2 + 1)],
/// trapezoidal quadrature on the series samples.
pub fn compute_g(series: &DiagnosticsSeries, c0: f64) -> Vec<f64> {
    running_trapz(&series.rows, |r| r.g_integrand())
        .into_iter()
        .map(|i| (c0 * i).exp())
        .collect()
}

/// Fit the smallest C0 with
/// ||f(t)||^2_{sigma,M} + ||u(t)||^2_sigma <= (initial value) g(t) for all t.
pub fn verify_sobolev_bound(series: &DiagnosticsSeries) -> Verdict {
    let mut v = Verdict::new("sobolev_bound");
    let rows = &series.rows;
    if rows.len() < 2 {
        v.pass = false;
        v.details = "series too short".into();
        return v;
    }
    let lhs: Vec<f64> = rows
        .iter()
        .map(|r| r.sob_f * r.sob_f + r.sob_u * r.sob_u)
        .collect();
    let ints = running_trapz(rows, |r| r.g_integrand());
    let lhs0 = lhs[0].max(f64::MIN_POSITIVE);
    let holds = |c0: f64| {
        lhs.iter()
            .zip(ints.iter())
            .all(|(&l, &i)| l <= lhs0 * (c0 * i).exp() * (1.0 + SLACK))
    };
    match bisect_smallest(C_FLOOR, C_CAP, holds) {
        Some(c0) => {
            v.constants.push(("C0".into(), c0));
            v.details = format!("LHS(0) = {lhs0:.6e}");
        }
        None => {
            v.pass = false;
            v.details = "no C0 below cap makes the Sobolev bound hold".into();
        }
    }
    v
}

/// Fit C1 in ||f||_{lambda,...} <= C1 (1+t) g(t) and C2 in the
/// exponential-integral bound for ||u||_{lambda,...}; g uses the fitted C0.
pub fn verify_gevrey_upper_bounds(series: &DiagnosticsSeries, c0: f64) -> Verdict {
    let mut v = Verdict::new("gevrey_upper_bounds");
    let rows = &series.rows;
    let g = compute_g(series, c0);
    let c1 = rows
        .iter()
        .zip(g.iter())
        .map(|(r, &gt)| r.gev_f / ((1.0 + r.t) * gt))
        .fold(0.0f64, f64::max)
        .max(C_FLOOR);
    v.constants.push(("C1".into(), c1));
    if !c1.is_finite() || c1 >= C_CAP {
        v.pass = false;
        v.details = format!("C1 = {c1:.3e} not finite below cap");
        return v;
    }
    // int (1+tau) g and int g on the shared samples
    let pair: Vec<(f64, f64)> = rows.iter().zip(g.iter()).map(|(r, &gt)| (r.t, gt)).collect();
    let mut int_tg = vec![0.0];
    let mut int_g = vec![0.0];
    for w in pair.windows(2) {
        let h = w[1].0 - w[0].0;
        int_tg.push(
            int_tg.last().unwrap() + 0.5 * h * ((1.0 + w[0].0) * w[0].1 + (1.0 + w[1].0) * w[1].1),
        );
        int_g.push(int_g.last().unwrap() + 0.5 * h * (w[0].1 + w[1].1));
    }
    let u0 = rows[0].gev_u;
    let holds = |c2: f64| {
        rows.iter().enumerate().all(|(i, r)| {
            r.gev_u <= (u0 + c2 * int_tg[i]) * (c2 * int_g[i]).exp() * (1.0 + SLACK)
        })
    };
    match bisect_smallest(C_FLOOR, C_CAP, holds) {
        Some(c2) => v.constants.push(("C2".into(), c2)),
        None => {
            v.pass = false;
            v.details = "no C2 below cap bounds the fluid Gevrey norm".into();
        }
    }
    v
}

/// Fit the smallest C3 with
/// lambda(t) >= (2 C3 t + lambda0^{-1})^{-1} exp[-C3 int (1 + ||u||_sigma + ||f||_{sigma,M})]
/// and assert positivity/monotonicity of the tracked radius.
pub fn verify_lambda_lower_bound(series: &DiagnosticsSeries) -> Verdict {
    let mut v = Verdict::new("lambda_lower_bound");
    let rows = &series.rows;
    let lambda0 = series.meta.lambda0;
    if rows.iter().any(|r| !(r.lambda > 0.0)) {
        v.pass = false;
        v.details = "tracked lambda is not positive at every sample".into();
        return v;
    }
    for w in rows.windows(2) {
        if w[1].lambda > w[0].lambda * (1.0 + 1e-12) {
            v.pass = false;
            v.details = format!("lambda increases at t = {}", w[1].t);
            return v;
        }
    }
    let ints = running_trapz(rows, |r| 1.0 + r.sob_u + r.sob_f);
    let holds = |c3: f64| {
        rows.iter().zip(ints.iter()).all(|(r, &i)| {
            let bound = (2.0 * c3 * r.t + lambda0.recip()).recip() * (-c3 * i).exp();
            bound <= r.lambda * (1.0 + SLACK)
        })
    };
    match bisect_smallest(C_FLOOR, C_CAP, holds) {
        Some(c3) => {
            v.constants.push(("C3".into(), c3));
            v.details = format!("lambda(end) = {:.6e}", rows.last().unwrap().lambda);
        }
        None => {
            v.pass = false;
            v.details = "no C3 below cap stays under the tracked lambda".into();
        }
    }
    v
}

/// Theorem-2 style bounds for an s = 1 run: C4, C5 and the short-time
/// Sobolev envelope Y(t) <= sqrt2 (1+Z0)^{1/2} / (1 - C t (1+Z0)^{1/2}).
pub fn verify_analytic_bounds(series: &DiagnosticsSeries) -> Result<Verdict> {
    let mut v = Verdict::new("analytic_bounds");
    if (series.meta.s - 1.0).abs() > 1e-12 {
        return Err(GvnsError::InsufficientData(format!(
            "analytic verification needs an s = 1 run, got s = {}",
            series.meta.s
        )));
    }
    let rows = &series.rows;
    let f0 = rows[0].gev_f.max(f64::MIN_POSITIVE);
    let int_1u = running_trapz(rows, |r| 1.0 + r.sob_u);
    let holds_c4 = |c4: f64| {
        rows.iter()
            .zip(int_1u.iter())
            .all(|(r, &i)| r.gev_f <= f0 * (c4 * i).exp() * (1.0 + SLACK))
    };
    match bisect_smallest(C_FLOOR, C_CAP, holds_c4) {
        Some(c4) => v.constants.push(("C4".into(), c4)),
        None => {
            v.pass = false;
            v.details = "no C4 below cap bounds the kinetic analytic norm".into();
        }
    }
    let int_f = running_trapz(rows, |r| r.gev_f);
    let int_y = running_trapz(rows, |r| r.sob_u + r.sob_f);
    let u0 = rows[0].gev_u;
    let holds_c5 = |c5: f64| {
        rows.iter().enumerate().all(|(i, r)| {
            r.gev_u <= (u0 + c5 * int_f[i]) * (c5 * int_y[i]).exp() * (1.0 + SLACK)
        })
    };
    match bisect_smallest(C_FLOOR, C_CAP, holds_c5) {
        Some(c5) => v.constants.push(("C5".into(), c5)),
        None => {
            v.pass = false;
            v.details += " no C5 below cap bounds the fluid analytic norm;";
        }
    }
    // short-time Sobolev envelope
    let z0 = rows[0].sob_u.powi(2) + rows[0].sob_f.powi(2);
    let root = (1.0 + z0).sqrt();
    let t_end = rows.last().unwrap().t;
    let c_max = (1.0 - 1e-9) / (t_end * root);
    let holds_c = |c: f64| {
        rows.iter().all(|r| {
            let denom = 1.0 - c * r.t * root;
            denom > 0.0 && r.sob_u + r.sob_f <= 2f64.sqrt() * root / denom * (1.0 + SLACK)
        })
    };
    match bisect_smallest(C_FLOOR.min(c_max / 2.0), c_max, holds_c) {
        Some(c) => {
            let t0 = (c * root).recip();
            if t_end >= t0 {
                return Err(GvnsError::HorizonExceedsT0 { t_end, t0 });
            }
            v.constants.push(("C_short_time".into(), c));
            v.constants.push(("T0".into(), t0));
            v.details = format!("Z0 = {z0:.6e}, horizon t_end = {t_end} < T0 = {t0:.6e}");
        }
        None => {
            v.pass = false;
            v.details += &format!(
                " short-time envelope infeasible below C_max = {c_max:.3e} (t_end would exceed T0);"
            );
        }
    }
    Ok(v)
}

/// Report the two blow-up criterion integrals and the time of the largest
/// integrand sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowupReport {
    pub int_gevrey_criterion: f64,
    pub int_analytic_criterion: f64,
    pub finite: bool,
    pub peak_integrand_t: f64,
    pub peak_integrand: f64,
}

pub fn blowup_criterion_monitor(series: &DiagnosticsSeries) -> BlowupReport {
    let rows = &series.rows;
    let last = rows.last().expect("non-empty series");
    let (mut peak, mut peak_t) = (f64::NEG_INFINITY, 0.0);
    for r in rows {
        let v = r.g_integrand();
        if v > peak {
            peak = v;
            peak_t = r.t;
        }
    }
    BlowupReport {
        int_gevrey_criterion: last.int_g_integrand,
        int_analytic_criterion: last.int_bu_s1,
        finite: last.int_g_integrand.is_finite() && last.int_bu_s1.is_finite(),
        peak_integrand_t: peak_t,
        peak_integrand: peak,
    }
}

/// Energy identity, pairwise decay and modulated-energy decay rate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyReport {
    pub identity_residual_max: f64,
    pub identity_tolerance: f64,
    pub pairwise_decay_ok: bool,
    /// Fitted rate r in Emod(t) ~ Emod(0) C' e^{-r t}.
    pub emod_rate: f64,
    pub emod_prefactor: f64,
    pub sup_rho_inf: f64,
    pub int_gradu_inf: f64,
    pub pass: bool,
}

pub fn verify_energy_and_modulated_decay(series: &DiagnosticsSeries) -> EnergyReport {
    let rows = &series.rows;
    let dt = series.meta.dt;
    let e0 = rows[0].energy;
    let scale = e0.abs().max(f64::MIN_POSITIVE);
    let mut residual = 0.0f64;
    for (r, &i) in rows.iter().zip(running_trapz(rows, |r| r.dissipation).iter()) {
        residual = residual.max((r.energy - e0 + i).abs());
    }
    let tol = (100.0 * dt * dt).max(1e-12) * scale;
    let ints = running_trapz(rows, |r| r.dissipation);
    let pair_tol = tol;
    let mut pairwise = true;
    'outer: for (si, s) in rows.iter().enumerate() {
        for (ti, t) in rows.iter().enumerate().skip(si + 1) {
            if t.energy + (ints[ti] - ints[si]) > s.energy + pair_tol {
                pairwise = false;
                break 'outer;
            }
        }
    }
    // log-linear regression on Emod over usable samples
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.emod > rows[0].emod.abs() * 1e-12 && r.emod > 0.0)
        .map(|r| (r.t, r.emod.ln()))
        .collect();
    let (rate, pref) = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        (
            -slope,
            intercept.exp() / rows[0].emod.abs().max(f64::MIN_POSITIVE),
        )
    } else {
        (0.0, 1.0)
    };
    let sup_rho = rows.iter().map(|r| r.rho_inf).fold(0.0, f64::max);
    EnergyReport {
        identity_residual_max: residual,
        identity_tolerance: tol,
        pairwise_decay_ok: pairwise,
        emod_rate: rate,
        emod_prefactor: pref,
        sup_rho_inf: sup_rho,
        int_gradu_inf: rows.last().unwrap().int_gradu_inf,
        pass: residual <= tol && pairwise,
    }
}

/// Fit the smallest c with
/// ||f(t)||_{inf,M} <= c e^{dt} (1 + ||u||_{L^1 L^inf}^M) ||f_0||_{inf,M}.
pub fn verify_finf_growth(series: &DiagnosticsSeries) -> Verdict {
    let mut v = Verdict::new("finf_growth");
    let rows = &series.rows;
    let d = series.meta.d as f64;
    let m = series.meta.m as i32;
    let f0 = rows[0].finf_m;
    if f0 <= f64::MIN_POSITIVE {
        let grown = rows.iter().any(|r| r.finf_m > 1e-12);
        v.pass = !grown;
        v.constants.push(("c".into(), 0.0));
        v.details = "zero initial data".into();
        return v;
    }
    let c = rows
        .iter()
        .map(|r| r.finf_m / ((d * r.t).exp() * (1.0 + r.int_u_inf.powi(m)) * f0))
        .fold(0.0f64, f64::max);
    v.constants.push(("c".into(), c));
    v.pass = c.is_finite() && c < C_CAP;
    v
}

/// Monitor the two Gevrey differential inequalities along the run: the
/// centered difference of ||.||^2 must be dominated by C times the
/// nonnegative right-hand-side groups plus the exactly-signed
/// (lambda' + ...) <sigma+s/2> term kept at unit constant when favorable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffIneqReport {
    pub c_f: Option<f64>,
    pub c_u: Option<f64>,
    pub excluded_f: usize,
    pub excluded_u: usize,
    pub checked: usize,
    pub pass: bool,
}

pub fn monitor_gevrey_differential_inequalities(series: &DiagnosticsSeries) -> DiffIneqReport {
    let rows = &series.rows;
    let n = rows.len();
    if n < 3 {
        return DiffIneqReport {
            c_f: None,
            c_u: None,
            excluded_f: 0,
            excluded_u: 0,
            checked: 0,
            pass: false,
        };
    }
    struct Sample {
        lhs: f64,
        groups: f64,
        coef_term_pos: f64,
        coef_term_neg: f64,
        noise: f64,
    }
    let mut f_samples = Vec::new();
    let mut u_samples = Vec::new();
    for i in 1..n - 1 {
        let (a, b, c) = (&rows[i - 1], &rows[i], &rows[i + 1]);
        let h = c.t - a.t;
        if h <= 0.0 {
            continue;
        }
        let lam_dot = (c.lambda - a.lambda) / h;
        let lam = b.lambda;
        // kinetic inequality
        let lhs_f = 0.5 * (c.gev_f.powi(2) - a.gev_f.powi(2)) / h;
        let groups_f = (b.u_w1inf() + 1.0) * b.gev_f.powi(2)
            + b.sob_u * b.sob_f * b.gev_f
            + (lam * b.sob_f + lam * lam * b.gev_f) * b.gev_u_half * b.gev_f_half;
        let coef_f = lam_dot + lam * (1.0 + b.sob_u) + lam * lam * b.gev_u;
        let fh2 = b.gev_f_half.powi(2);
        f_samples.push(Sample {
            lhs: lhs_f,
            groups: groups_f,
            coef_term_pos: coef_f.max(0.0) * fh2,
            coef_term_neg: coef_f.min(0.0) * fh2,
            noise: 1e-12 * b.gev_f.powi(2).max(1e-300) / h,
        });
        // fluid inequality (dissipation dropped from the left side)
        let lhs_u = 0.5 * (c.gev_u.powi(2) - a.gev_u.powi(2)) / h;
        let groups_u = (b.gradu_inf + b.sob_f + lam * lam * b.gev_f) * b.gev_u.powi(2)
            + b.sob_u.powi(2) * b.gev_u
            + b.gev_f * b.gev_u;
        let coef_u = lam_dot + lam * b.sob_u + lam * lam * (b.sob_u + b.gev_u);
        let uh2 = b.gev_u_half.powi(2);
        u_samples.push(Sample {
            lhs: lhs_u,
            groups: groups_u,
            coef_term_pos: coef_u.max(0.0) * uh2,
            coef_term_neg: coef_u.min(0.0) * uh2,
            noise: 1e-12 * b.gev_u.powi(2).max(1e-300) / h,
        });
    }
    let fit = |samples: &[Sample]| -> (Option<f64>, usize) {
        let usable: Vec<&Sample> = samples.iter().filter(|s| s.groups >= 10.0 * s.noise).collect();
        let excluded = samples.len() - usable.len();
        if usable.is_empty() {
            return (Some(C_FLOOR), excluded);
        }
        let holds = |c: f64| {
            usable.iter().all(|s| {
                s.lhs <= c * (s.groups + s.coef_term_pos) + s.coef_term_neg + s.noise
            })
        };
        (bisect_smallest(C_FLOOR, C_CAP, holds), excluded)
    };
    let (c_f, excluded_f) = fit(&f_samples);
    let (c_u, excluded_u) = fit(&u_samples);
    DiffIneqReport {
        c_f,
        c_u,
        excluded_f,
        excluded_u,
        checked: f_samples.len(),
        pass: c_f.is_some() && c_u.is_some(),
    }
}

/// All verdicts for one run, with refinement ratios against an optional
/// refined run (halved dt or doubled grid).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub verdicts: Vec<Verdict>,
    pub blowup: BlowupReport,
    pub energy: EnergyReport,
    pub diff_ineq: DiffIneqReport,
    pub constants: FittedConstants,
    pub all_pass: bool,
}

fn constant(v: &Verdict, name: &str) -> Option<f64> {
    v.constants
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, c)| *c)
}

pub fn fit_all(series: &DiagnosticsSeries) -> VerifyOutput {
    let mut verdicts = Vec::new();
    let sob = verify_sobolev_bound(series);
    let c0 = constant(&sob, "C0");
    let mut constants = FittedConstants {
        c0,
        ..Default::default()
    };
    verdicts.push(sob);
    if let Some(c0) = c0 {
        let gv = verify_gevrey_upper_bounds(series, c0);
        constants.c1 = constant(&gv, "C1");
        constants.c2 = constant(&gv, "C2");
        verdicts.push(gv);
    }
    let lb = verify_lambda_lower_bound(series);
    constants.c3 = constant(&lb, "C3");
    verdicts.push(lb);
    if (series.meta.s - 1.0).abs() < 1e-12 {
        match verify_analytic_bounds(series) {
            Ok(av) => {
                constants.c4 = constant(&av, "C4");
                constants.c5 = constant(&av, "C5");
                constants.c_short_time = constant(&av, "C_short_time");
                verdicts.push(av);
            }
            Err(e) => {
                let mut v = Verdict::new("analytic_bounds");
                v.pass = false;
                v.details = e.to_string();
                verdicts.push(v);
            }
        }
    }
    let finf = verify_finf_growth(series);
    constants.c_finf = constant(&finf, "c");
    verdicts.push(finf);
    let blowup = blowup_criterion_monitor(series);
    let energy = verify_energy_and_modulated_decay(series);
    let diff_ineq = monitor_gevrey_differential_inequalities(series);
    constants.c_gevrey_f = diff_ineq.c_f;
    constants.c_gevrey_u = diff_ineq.c_u;
    let all_pass = verdicts.iter().all(|v| v.pass)
        && blowup.finite
        && energy.pass
        && diff_ineq.pass;
    VerifyOutput {
        verdicts,
        blowup,
        energy,
        diff_ineq,
        constants,
        all_pass,
    }
}

/// Ratios fine/coarse for every constant fitted in both runs.
pub fn refinement_ratios(coarse: &FittedConstants, fine: &FittedConstants) -> Vec<(String, f64)> {
    let pairs = [
        ("C0", coarse.c0, fine.c0),
        ("C1", coarse.c1, fine.c1),
        ("C2", coarse.c2, fine.c2),
        ("C3", coarse.c3, fine.c3),
        ("C4", coarse.c4, fine.c4),
        ("C5", coarse.c5, fine.c5),
        ("C_short_time", coarse.c_short_time, fine.c_short_time),
        ("c_finf", coarse.c_finf, fine.c_finf),
        ("c_gevrey_f", coarse.c_gevrey_f, fine.c_gevrey_f),
        ("c_gevrey_u", coarse.c_gevrey_u, fine.c_gevrey_u),
    ];
    pairs
        .iter()
        .filter_map(|(name, c, f)| match (c, f) {
            (Some(c), Some(f)) if *c > 0.0 => Some((name.to_string(), f / c)),
            _ => None,
        })
        .collect()
}
