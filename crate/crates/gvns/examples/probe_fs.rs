// scratch: boundary fraction trajectory under free streaming
use gvns::field::DistPhysical;
use gvns::grid::PhaseGrid;
use gvns::run::free_streaming_profile;
use gvns::solver::{SimState, SolverOptions, Stepper};
use gvns::transform::SpectralWorkspace;

fn main() {
    let g = PhaseGrid::new(1, 64, 64, 8.0).unwrap();
    let ws = SpectralWorkspace::new(&g);
    for mode in ["gauss", "gevrey"] {
        let mut st = SimState::new(&g);
        st.f = match mode {
            "gauss" => DistPhysical::from_fn(&g, |x, v| x[0].cos() * (-v[0] * v[0] / 2.0).exp()),
            _ => {
                let p = free_streaming_profile(&g);
                DistPhysical::from_fn(&g, |x, v| x[0].cos() * p(v[0]))
            }
        };
        let mut opts = SolverOptions::default();
        opts.brinkman = false;
        opts.boundary_limit = 1.0; // observe, never abort
        let mut stepper = Stepper::new(&g, 1e-3, opts);
        print!("{mode}: ");
        for i in 1..=500 {
            stepper.step(&ws, &mut st).unwrap();
            if i % 100 == 0 {
                print!("t={:.1} frac={:.2e}  ", st.t, st.f.boundary_mass_fraction());
            }
        }
        // L_inf error vs closed form at t=0.5
        let t: f64 = 0.5;
        let p = free_streaming_profile(&g);
        let exact = DistPhysical::from_fn(&g, |x, v| {
            let x0 = x[0] - v[0] * (t.exp() - 1.0);
            let v0 = v[0] * t.exp();
            let prof = match mode {
                "gauss" => (-v0 * v0 / 2.0).exp(),
                _ => p(v0),
            };
            t.exp() * x0.cos() * prof
        });
        let err = st.f.values.iter().zip(exact.values.iter())
            .map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        println!("Linf_err={err:.3e}");
    }
}
