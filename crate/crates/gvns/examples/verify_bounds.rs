//! Run-then-verify pipeline: executes a small coupled run at two time steps,
//! fits the constants of every a-priori bound along the trajectories and
//! prints the verdicts with their refinement ratios.

use gvns::config::parse_config;
use gvns::run::run_in_memory;
use gvns::verify::{fit_all, refinement_ratios};

fn main() {
    let cfg_text = |dt: f64| {
        format!(
            "d = 2\nnx = 16\nnv = 16\nlv = 4\ndt = {dt}\nt_end = 0.5\n\
             s = 0.5\nsigma = 4\nm = 2\nlambda0 = 0.5\n\
             initial = coupled_small\nic_theta = 0.85\nic_epsilon = 0.2\n\
             ic_drift = 0.1\nic_u_amplitude = 0.05\nboundary_limit = 1e-3\n"
        )
    };
    let (base, _, _) = run_in_memory(&parse_config(&cfg_text(0.01)).unwrap()).unwrap();
    let (fine, _, _) = run_in_memory(&parse_config(&cfg_text(0.005)).unwrap()).unwrap();
    let base_fit = fit_all(&base);
    let fine_fit = fit_all(&fine);

    for v in &base_fit.verdicts {
        let consts: Vec<String> = v
            .constants
            .iter()
            .map(|(n, c)| format!("{n} = {c:.4e}"))
            .collect();
        println!(
            "{:<22} {}  {}",
            v.name,
            if v.pass { "PASS" } else { "FAIL" },
            consts.join(", ")
        );
    }
    println!(
        "energy identity       residual {:.3e} (tol {:.3e}), modulated decay rate {:.3}",
        base_fit.energy.identity_residual_max,
        base_fit.energy.identity_tolerance,
        base_fit.energy.emod_rate
    );
    println!(
        "blow-up monitor       int(gevrey) = {:.4e}, int(analytic) = {:.4e}, peak at t = {:.3}",
        base_fit.blowup.int_gevrey_criterion,
        base_fit.blowup.int_analytic_criterion,
        base_fit.blowup.peak_integrand_t
    );
    println!(
        "gevrey diff. ineq.    C_f = {:?}, C_u = {:?} ({} interior samples, {} excluded)",
        base_fit.diff_ineq.c_f,
        base_fit.diff_ineq.c_u,
        base_fit.diff_ineq.checked,
        base_fit.diff_ineq.excluded_f
    );
    println!("refinement ratios (dt -> dt/2):");
    for (name, ratio) in refinement_ratios(&base_fit.constants, &fine_fit.constants) {
        println!("  {name:<14} {ratio:.4}");
    }
}
