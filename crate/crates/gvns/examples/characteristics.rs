//! Particle characteristics: RK4 tracing of (X, V) through a frozen velocity
//! field, forward and backward, with the e^t growth of backward-traced
//! speeds and the grid-based support radius.

use gvns::field::{DistPhysical, FluidSpectral};
use gvns::grid::PhaseGrid;
use gvns::solver::characteristics::{
    integrate_characteristics, CharacteristicState, VelocitySeries,
};
use gvns::solver::support_radius;
use gvns::transform::SpectralWorkspace;

fn main() {
    let grid = PhaseGrid::new(2, 16, 16, 4.0).unwrap();
    let ws = SpectralWorkspace::new(&grid);
    let mut comps = vec![vec![0.0; grid.nxd()]; 2];
    for xf in 0..grid.nxd() {
        let x = grid.x_vec(xf);
        comps[0][xf] = 0.3 * x[1].sin();
        comps[1][xf] = 0.3 * x[0].sin();
    }
    let series = VelocitySeries::frozen(ws.fluid_from_physical(&grid, &comps));

    let start = CharacteristicState {
        t: 0.0,
        x: vec![[0.5, 1.0], [3.0, 2.0], [5.0, 4.0]],
        v: vec![[1.0, 0.0], [-0.5, 0.8], [0.2, -1.1]],
    };
    let fwd = integrate_characteristics(&series, &start, 0.0, 1.0, 1e-3);
    println!("forward tracing to t = 1 (drag relaxes speeds toward u):");
    for p in 0..start.x.len() {
        println!(
            "  particle {p}: X = ({:.3}, {:.3}), |V| {:.3} -> {:.3}",
            fwd.x[p][0],
            fwd.x[p][1],
            (start.v[p][0].powi(2) + start.v[p][1].powi(2)).sqrt(),
            (fwd.v[p][0].powi(2) + fwd.v[p][1].powi(2)).sqrt(),
        );
    }

    // backward tracing from t: speeds grow like e^t when u = 0
    let zero = VelocitySeries::frozen(FluidSpectral::zeros(&grid));
    let t = 0.7f64;
    let at_t = CharacteristicState {
        t,
        x: start.x.clone(),
        v: start.v.clone(),
    };
    let back = integrate_characteristics(&zero, &at_t, t, 0.0, 1e-3);
    println!(
        "backward speeds with u = 0: max |V| ratio {:.6} (e^t = {:.6})",
        back.max_speed() / at_t.max_speed(),
        t.exp()
    );

    let f = DistPhysical::from_fn(&grid, |_, v| {
        let r2 = v[0] * v[0] + v[1] * v[1];
        if r2 <= 4.0 {
            (-r2 / 0.8).exp()
        } else {
            0.0
        }
    });
    let (radius, empty) = support_radius(&f);
    println!("grid support radius of a |v| <= 2 truncated Gaussian: {radius:.3} (empty: {empty})");
}
