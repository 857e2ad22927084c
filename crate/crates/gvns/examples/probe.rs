// scratch calibration probe (will be replaced by the real examples)
use gvns::config::parse_config;
use gvns::run::run_in_memory;
use std::time::Instant;

fn main() {
    let dt = std::env::args()
        .nth(1)
        .and_then(|s| s.parse::<f64>().ok())
        .unwrap_or(0.01);
    let t_end = std::env::args()
        .nth(2)
        .and_then(|s| s.parse::<f64>().ok())
        .unwrap_or(1.0);
    let diag = std::env::args()
        .nth(3)
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(1);
    let cfg = parse_config(&format!(
        "d = 2\nnx = 32\nnv = 32\nlv = 4\ndt = {dt}\nt_end = {t_end}\ndiag_every = {diag}\n\
         s = 0.5\nsigma = 4\nm = 2\nlambda0 = 0.5\n\
         initial = coupled_small\nic_theta = 0.85\nic_epsilon = 0.2\nic_drift = 0.1\nic_u_amplitude = 0.05\nboundary_limit = 2e-3\n"
    ))
    .unwrap();
    let start = Instant::now();
    let (series, summary, _) = run_in_memory(&cfg).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let r0 = &series.rows[0];
    let rn = series.rows.last().unwrap();
    let mut max_drift = 0.0f64;
    let mut max_div = 0.0f64;
    let mut max_bnd = 0.0f64;
    let mut max_res = 0.0f64;
    for r in &series.rows {
        max_drift = max_drift.max(r.mass_drift);
        max_div = max_div.max(r.div_residual);
        max_bnd = max_bnd.max(r.boundary_frac);
        max_res = max_res.max((r.energy - r0.energy + r.int_diss).abs());
    }
    println!("elapsed          {elapsed:.2} s for {} steps", summary.steps);
    println!("E(0)             {:.6e}", r0.energy);
    println!("energy residual  {:.6e}  (tol 1e-4 E0 = {:.3e})", max_res, 1e-4 * r0.energy);
    println!("mass drift max   {:.3e}", max_drift);
    println!("div residual max {:.3e}", max_div);
    println!("boundary max     {:.3e}", max_bnd);
    println!("sob_f  {:.4e} -> {:.4e}", r0.sob_f, rn.sob_f);
    println!("sob_u  {:.4e} -> {:.4e}", r0.sob_u, rn.sob_u);
    println!("gev_f  {:.4e} -> {:.4e}", r0.gev_f, rn.gev_f);
    println!("gev_u  {:.4e} -> {:.4e}", r0.gev_u, rn.gev_u);
    println!("finf   {:.4e} -> {:.4e}", r0.finf_m, rn.finf_m);
    println!("lambda {:.4e} -> {:.4e}", r0.lambda, rn.lambda);
    println!("emod   {:.4e} -> {:.4e}", r0.emod, rn.emod);
    println!("rho_inf {:.4e} -> {:.4e}", r0.rho_inf, rn.rho_inf);
    println!("lambda_emp {:.4e} -> {:.4e}", r0.lambda_emp, rn.lambda_emp);
    println!("warnings: {:?}", summary.solver_warnings);
}
