// scratch: localize the gevrey-profile free-streaming error
use gvns::field::DistPhysical;
use gvns::grid::PhaseGrid;
use gvns::run::free_streaming_profile;
use gvns::solver::{SimState, SolverOptions, Stepper};
use gvns::transform::SpectralWorkspace;

fn main() {
    let g = PhaseGrid::new(1, 64, 64, 8.0).unwrap();
    let ws = SpectralWorkspace::new(&g);
    let p = free_streaming_profile(&g);
    println!("g(0)={:.4e} g(2.8)={:.4e} g(7.75)={:.4e} g(-8)={:.4e} g(13.19)={:.4e}",
        p(0.0), p(2.8), p(7.75), p(-8.0), p(13.19));
    let mut st = SimState::new(&g);
    st.f = DistPhysical::from_fn(&g, |x, v| x[0].cos() * p(v[0]));
    let mut opts = SolverOptions::default();
    opts.brinkman = false;
    opts.boundary_limit = 1.0;
    let mut stepper = Stepper::new(&g, 1e-3, opts);
    for _ in 0..500 {
        stepper.step(&ws, &mut st).unwrap();
    }
    let t: f64 = 0.5;
    let mut worst = (0.0f64, 0usize, 0usize, 0.0, 0.0);
    let nvd = g.nvd();
    for xf in 0..g.nxd() {
        let x = g.x_coord(xf);
        for vf in 0..nvd {
            let v = g.v_coord(vf);
            let x0 = x - v * (t.exp() - 1.0);
            let v0 = v * t.exp();
            let want = t.exp() * x0.cos() * p(v0);
            let got = st.f.values[xf * nvd + vf];
            let e = (got - want).abs();
            if e > worst.0 {
                worst = (e, xf, vf, got, want);
            }
        }
    }
    println!(
        "worst err {:.3e} at x={:.3} v={:.3} (got {:.4e}, want {:.4e})",
        worst.0,
        g.x_coord(worst.1),
        g.v_coord(worst.2),
        worst.3,
        worst.4
    );
}
