//! Pure-fluid benchmark: the Taylor-Green vortex, whose advection term is a
//! pure gradient, so the Leray-projected dynamics reduce to exact heat decay
//! u(t) = e^{-2t} u0. Prints the coefficient-wise error of the solver.

use gvns::config::parse_config;
use gvns::grid::PhaseGrid;
use gvns::run::run_in_memory;
use gvns::transform::SpectralWorkspace;

fn main() {
    let t_end = 0.5;
    let cfg = parse_config(&format!(
        "d = 2\nnx = 64\nnv = 4\nlv = 2\ndt = 1e-3\nt_end = {t_end}\n\
         initial = taylor_green\ndiag_every = 100\n"
    ))
    .unwrap();
    let (series, _, state) = run_in_memory(&cfg).unwrap();

    let grid = PhaseGrid::new(2, 64, 4, 2.0).unwrap();
    let ws = SpectralWorkspace::new(&grid);
    let u = ws.fluid_to_physical(&state.u);
    let decay = (-2.0f64 * t_end).exp();
    let mut err_sq = 0.0;
    for xf in 0..grid.nxd() {
        let x = grid.x_vec(xf);
        err_sq += (u[0][xf] - decay * x[0].sin() * x[1].cos()).powi(2)
            + (u[1][xf] + decay * x[0].cos() * x[1].sin()).powi(2);
    }
    let err = (err_sq * grid.dx() * grid.dx()).sqrt();

    println!("Taylor-Green vortex, 64^2 grid, dt = 1e-3, t_end = {t_end}");
    println!("exact solution:   u(t) = e^(-2t) u0");
    println!("L2 error:         {err:.3e}");
    println!("{:<10}{:>14}{:>14}{:>16}", "t", "E(t)", "E0 e^(-4t)", "div residual");
    for row in &series.rows {
        let exact = series.rows[0].energy * (-4.0 * row.t).exp();
        println!(
            "{:<10.3}{:>14.6e}{:>14.6e}{:>16.3e}",
            row.t, row.energy, exact, row.div_residual
        );
    }
}
