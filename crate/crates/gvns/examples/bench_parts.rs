use gvns::field::DistPhysical;
use gvns::grid::PhaseGrid;
use gvns::norms::compute_f_spectra;
use gvns::solver::vlasov::{drag_step, shear_step, DragOperator, ShearOperator, VInterp};
use gvns::transform::SpectralWorkspace;
use std::time::Instant;

fn main() {
    let g = PhaseGrid::new(2, 32, 32, 4.0).unwrap();
    let ws = SpectralWorkspace::new(&g);
    let mut f = DistPhysical::from_fn(&g, |x, v| {
        (1.0 + 0.2 * x[0].cos()) * (-(v[0] * v[0] + v[1] * v[1]) / 1.4).exp()
    });
    let u = vec![vec![0.05; g.nxd()]; 2];
    let dop = DragOperator::new(&g, 0.005);
    let sop = ShearOperator::new(&g, 0.0025);
    let t = Instant::now();
    for _ in 0..10 { drag_step(&mut f, &u, &dop, VInterp::Spectral); }
    println!("drag      {:>8.1} ms/call", t.elapsed().as_secs_f64() * 100.0);
    let t = Instant::now();
    for _ in 0..10 { shear_step(&mut f, &sop, &ws); }
    println!("shear     {:>8.1} ms/call", t.elapsed().as_secs_f64() * 100.0);
    let t = Instant::now();
    for _ in 0..10 { let _ = compute_f_spectra(&ws, &f, 2).unwrap(); }
    println!("spectra   {:>8.1} ms/call", t.elapsed().as_secs_f64() * 100.0);
    let t = Instant::now();
    for _ in 0..10 { let _ = ws.to_spectral(&f).unwrap(); }
    println!("full fft  {:>8.1} ms/call", t.elapsed().as_secs_f64() * 100.0);
}
