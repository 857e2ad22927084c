//! Human-readable run summary assembled from a run directory.

use crate::diagnostics::DiagnosticsSeries;
use crate::error::Result;
use std::fmt::Write as _;
use std::path::Path;

pub fn render_report(dir: &Path) -> Result<String> {
    let series = DiagnosticsSeries::read_csv(&dir.join("diagnostics.csv"))?;
    let mut out = String::new();
    let m = &series.meta;
    writeln!(out, "run directory: {}", dir.display()).ok();
    writeln!(
        out,
        "parameters: d={} s={} sigma={} M={} lambda0={} dt={}",
        m.d, m.s, m.sigma, m.m, m.lambda0, m.dt
    )
    .ok();
    writeln!(out, "samples: {}", series.rows.len()).ok();
    if let (Some(first), Some(last)) = (series.rows.first(), series.rows.last()) {
        writeln!(out, "time span: [{:.6}, {:.6}]", first.t, last.t).ok();
        writeln!(out, "{:<28}{:>16}{:>16}", "quantity", "initial", "final").ok();
        let rows = [
            ("mass", first.mass, last.mass),
            ("energy E", first.energy, last.energy),
            ("dissipation D", first.dissipation, last.dissipation),
            ("modulated energy", first.emod, last.emod),
            ("||f||_{sigma,M}", first.sob_f, last.sob_f),
            ("||u||_sigma", first.sob_u, last.sob_u),
            ("||f||_{lambda,sigma,M,s}", first.gev_f, last.gev_f),
            ("||u||_{lambda,sigma,s}", first.gev_u, last.gev_u),
            ("||f||_{inf,M}", first.finf_m, last.finf_m),
            ("lambda(t)", first.lambda, last.lambda),
            ("lambda_emp(t)", first.lambda_emp, last.lambda_emp),
            ("G(t)", first.big_g, last.big_g),
            ("support radius", first.support_radius, last.support_radius),
        ];
        for (name, a, b) in rows {
            writeln!(out, "{name:<28}{a:>16.6e}{b:>16.6e}").ok();
        }
        let max_drift = series
            .rows
            .iter()
            .map(|r| r.mass_drift)
            .fold(0.0f64, f64::max);
        let max_div = series
            .rows
            .iter()
            .map(|r| r.div_residual)
            .fold(0.0f64, f64::max);
        writeln!(out, "max per-sample mass drift: {max_drift:.3e}").ok();
        writeln!(out, "max divergence residual:   {max_div:.3e}").ok();
    }
    if dir.join("run_summary.json").exists() {
        writeln!(out, "summary: {}", dir.join("run_summary.json").display()).ok();
    }
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path();
        if p.extension().map(|e| e == "json").unwrap_or(false)
            && p.file_name()
                .map(|n| n.to_string_lossy().starts_with("verdict_"))
                .unwrap_or(false)
        {
            writeln!(out, "verdict: {}", p.display()).ok();
        }
    }
    writeln!(out, "csv (plot source): {}", dir.join("diagnostics.csv").display()).ok();
    Ok(out)
}
