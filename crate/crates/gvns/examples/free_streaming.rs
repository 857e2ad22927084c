//! Kinetic transport benchmark: with u = 0 the distribution follows the
//! closed-form characteristics f(t,x,v) = e^{dt} f0(x - v(e^t - 1), v e^t).
//! Prints the sup-norm error against the exact solution and the decay of
//! the empirical regularity radius as the spectrum widens.

use gvns::config::parse_config;
use gvns::field::DistPhysical;
use gvns::run::run_in_memory;

fn main() {
    let t_end: f64 = 0.5;
    let cfg = parse_config(&format!(
        "d = 1\nnx = 64\nnv = 64\nlv = 8\ndt = 1e-3\nt_end = {t_end}\n\
         initial = free_streaming\nbrinkman = false\ndiag_every = 50\nboundary_limit = 0.5\n"
    ))
    .unwrap();
    let (series, _, state) = run_in_memory(&cfg).unwrap();

    let profile = gvns::run::free_streaming_profile(&state.f.grid);
    let exact = DistPhysical::from_fn(&state.f.grid, |x, v| {
        let x0 = x[0] - v[0] * (t_end.exp() - 1.0);
        let v0 = v[0] * t_end.exp();
        t_end.exp() * x0.cos() * profile(v0)
    });
    let err = state
        .f
        .values
        .iter()
        .zip(exact.values.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    println!("free streaming (u = 0), 64x64 phase grid, dt = 1e-3");
    println!("L_inf error vs closed form at t = {t_end}: {err:.3e}");
    println!("{:<8}{:>14}{:>14}{:>16}", "t", "||f||_inf,M", "lambda_emp", "support radius");
    for row in &series.rows {
        println!(
            "{:<8.3}{:>14.6e}{:>14.6}{:>16.4}",
            row.t, row.finf_m, row.lambda_emp, row.support_radius
        );
    }
}
