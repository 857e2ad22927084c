//! Per-step diagnostics rows and the versioned CSV schema.
//!
//! Schema `gvns-diagnostics-v1`: one metadata comment line, one header line,
//! then one row per sample with the columns of [`COLUMNS`] in order. Floats
//! are written as `{:.17e}` so identical runs produce identical bytes.

use crate::error::{GvnsError, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub const CSV_SCHEMA: &str = "gvns-diagnostics-v1";

pub const COLUMNS: [&str; 35] = [
    "t",
    "mass",
    "mass_drift",
    "min_f",
    "boundary_frac",
    "div_residual",
    "sob_f",
    "sob_u",
    "gev_f",
    "gev_u",
    "gev_f_half",
    "gev_u_half",
    "finf_m",
    "u_inf",
    "gradu_inf",
    "rho_inf",
    "energy",
    "dissipation",
    "emod",
    "mean_u_1",
    "mean_u_2",
    "mean_j_1",
    "mean_j_2",
    "lambda",
    "big_g",
    "lambda_emp",
    "lambda_emp_res",
    "support_radius",
    "n_q",
    "m_alpha",
    "int_g_integrand",
    "int_bu_s1",
    "int_gradu_inf",
    "int_u_inf",
    "int_diss",
];

/// One diagnostics sample.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass: f64,
    /// |mass - previous mass| / initial mass, per sample interval.
    pub mass_drift: f64,
    pub min_f: f64,
    pub boundary_frac: f64,
    pub div_residual: f64,
    /// ||f||_{sigma,M}.
    pub sob_f: f64,
    /// ||u||_sigma.
    pub sob_u: f64,
    /// ||f||_{lambda,sigma,M,s} at this row's lambda.
    pub gev_f: f64,
    pub gev_u: f64,
    /// ||f||_{lambda,sigma+s/2,M,s}.
    pub gev_f_half: f64,
    pub gev_u_half: f64,
    /// ||f||_{inf,M}.
    pub finf_m: f64,
    pub u_inf: f64,
    pub gradu_inf: f64,
    pub rho_inf: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub emod: f64,
    pub mean_u: [f64; 2],
    pub mean_j: [f64; 2],
    pub lambda: f64,
    pub big_g: f64,
    pub lambda_emp: f64,
    pub lambda_emp_res: f64,
    pub support_radius: f64,
    pub n_q: f64,
    pub m_alpha: f64,
    /// Running trapezoids from t = 0.
    pub int_g_integrand: f64,
    pub int_bu_s1: f64,
    pub int_gradu_inf: f64,
    pub int_u_inf: f64,
    pub int_diss: f64,
}

impl DiagnosticsRow {
    /// ||u||_{W^{1,inf}} = grid sup |u| + grid sup |grad u|.
    pub fn u_w1inf(&self) -> f64 {
        self.u_inf + self.gradu_inf
    }

    /// Integrand of g(t): ||u||_{W^{1,inf}} + ||rho||_inf + ||f||_{inf,M}^2 + 1.
    pub fn g_integrand(&self) -> f64 {
        self.u_w1inf() + self.rho_inf + self.finf_m * self.finf_m + 1.0
    }

    fn values(&self) -> [f64; 35] {
        [
            self.t,
            self.mass,
            self.mass_drift,
            self.min_f,
            self.boundary_frac,
            self.div_residual,
            self.sob_f,
            self.sob_u,
            self.gev_f,
            self.gev_u,
            self.gev_f_half,
            self.gev_u_half,
            self.finf_m,
            self.u_inf,
            self.gradu_inf,
            self.rho_inf,
            self.energy,
            self.dissipation,
            self.emod,
            self.mean_u[0],
            self.mean_u[1],
            self.mean_j[0],
            self.mean_j[1],
            self.lambda,
            self.big_g,
            self.lambda_emp,
            self.lambda_emp_res,
            self.support_radius,
            self.n_q,
            self.m_alpha,
            self.int_g_integrand,
            self.int_bu_s1,
            self.int_gradu_inf,
            self.int_u_inf,
            self.int_diss,
        ]
    }

    fn from_values(v: &[f64]) -> Self {
        let mut row = Self::default();
        row.t = v[0];
        row.mass = v[1];
        row.mass_drift = v[2];
        row.min_f = v[3];
        row.boundary_frac = v[4];
        row.div_residual = v[5];
        row.sob_f = v[6];
        row.sob_u = v[7];
        row.gev_f = v[8];
        row.gev_u = v[9];
        row.gev_f_half = v[10];
        row.gev_u_half = v[11];
        row.finf_m = v[12];
        row.u_inf = v[13];
        row.gradu_inf = v[14];
        row.rho_inf = v[15];
        row.energy = v[16];
        row.dissipation = v[17];
        row.emod = v[18];
        row.mean_u = [v[19], v[20]];
        row.mean_j = [v[21], v[22]];
        row.lambda = v[23];
        row.big_g = v[24];
        row.lambda_emp = v[25];
        row.lambda_emp_res = v[26];
        row.support_radius = v[27];
        row.n_q = v[28];
        row.m_alpha = v[29];
        row.int_g_integrand = v[30];
        row.int_bu_s1 = v[31];
        row.int_gradu_inf = v[32];
        row.int_u_inf = v[33];
        row.int_diss = v[34];
        row
    }
}

/// Run metadata the verifier needs alongside the rows.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SeriesMeta {
    pub d: usize,
    pub s: f64,
    pub sigma: f64,
    pub m: usize,
    pub lambda0: f64,
    pub dt: f64,
    pub q: f64,
    pub alpha_moment: f64,
}

#[derive(Debug, Clone)]
pub struct DiagnosticsSeries {
    pub meta: SeriesMeta,
    pub rows: Vec<DiagnosticsRow>,
}

impl DiagnosticsSeries {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        writeln!(
            out,
            "# {CSV_SCHEMA} d={} s={:.17e} sigma={:.17e} m={} lambda0={:.17e} dt={:.17e} q={:.17e} alpha={:.17e}",
            self.meta.d,
            self.meta.s,
            self.meta.sigma,
            self.meta.m,
            self.meta.lambda0,
            self.meta.dt,
            self.meta.q,
            self.meta.alpha_moment
        )?;
        writeln!(out, "{}", COLUMNS.join(","))?;
        for row in &self.rows {
            let vals = row.values();
            let line: Vec<String> = vals.iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut lines = BufReader::new(file).lines();
        let meta_line = lines
            .next()
            .ok_or_else(|| GvnsError::InsufficientData("empty diagnostics file".into()))??;
        let meta = parse_meta(&meta_line)?;
        let header = lines
            .next()
            .ok_or_else(|| GvnsError::InsufficientData("missing header line".into()))??;
        if header != COLUMNS.join(",") {
            return Err(GvnsError::InsufficientData(format!(
                "unexpected column header: {header}"
            )));
        }
        let mut rows = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| GvnsError::InsufficientData(format!("bad row: {e}")))?;
            if vals.len() != COLUMNS.len() {
                return Err(GvnsError::InsufficientData(format!(
                    "row has {} columns, expected {}",
                    vals.len(),
                    COLUMNS.len()
                )));
            }
            rows.push(DiagnosticsRow::from_values(&vals));
        }
        Ok(Self { meta, rows })
    }
}

fn parse_meta(line: &str) -> Result<SeriesMeta> {
    let body = line
        .strip_prefix(&format!("# {CSV_SCHEMA} "))
        .ok_or_else(|| GvnsError::InsufficientData(format!("unknown schema line: {line}")))?;
    let mut d = None;
    let mut s = None;
    let mut sigma = None;
    let mut m = None;
    let mut lambda0 = None;
    let mut dt = None;
    let mut q = None;
    let mut alpha = None;
    for tok in body.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| GvnsError::InsufficientData(format!("bad meta token {tok}")))?;
        match k {
            "d" => d = v.parse::<usize>().ok(),
            "s" => s = v.parse::<f64>().ok(),
            "sigma" => sigma = v.parse::<f64>().ok(),
            "m" => m = v.parse::<usize>().ok(),
            "lambda0" => lambda0 = v.parse::<f64>().ok(),
            "dt" => dt = v.parse::<f64>().ok(),
            "q" => q = v.parse::<f64>().ok(),
            "alpha" => alpha = v.parse::<f64>().ok(),
            _ => {}
        }
    }
    Ok(SeriesMeta {
        d: d.ok_or_else(|| GvnsError::InsufficientData("meta missing d".into()))?,
        s: s.ok_or_else(|| GvnsError::InsufficientData("meta missing s".into()))?,
        sigma: sigma.ok_or_else(|| GvnsError::InsufficientData("meta missing sigma".into()))?,
        m: m.ok_or_else(|| GvnsError::InsufficientData("meta missing m".into()))?,
        lambda0: lambda0.ok_or_else(|| GvnsError::InsufficientData("meta missing lambda0".into()))?,
        dt: dt.ok_or_else(|| GvnsError::InsufficientData("meta missing dt".into()))?,
        q: q.unwrap_or(5.0),
        alpha_moment: alpha.unwrap_or(4.0),
    })
}
