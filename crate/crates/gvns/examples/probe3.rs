// scratch: criterion-3 numbers at two dts
use gvns::config::parse_config;
use gvns::run::run_in_memory;

fn main() {
    let run = |dt: f64| {
        let cfg = parse_config(&format!(
            "d = 2\nnx = 32\nnv = 32\nlv = 5\ndt = {dt}\nt_end = 1.0\n\
             s = 0.5\nsigma = 4\nm = 2\nlambda0 = 0.5\n\
             initial = coupled_band\nic_amplitude = 0.05\nic_theta = 2.0\n\
             ic_epsilon = 0.2\nic_drift = 0.1\nic_u_amplitude = 0.05\n\
             boundary_limit = 0.1\n"
        ))
        .unwrap();
        run_in_memory(&cfg).unwrap().0
    };
    for dt in [0.02, 0.01, 0.005] {
        let series = run(dt);
        let e0 = series.rows[0].energy;
        let mut res = 0.0f64;
        let mut drift = 0.0f64;
        let mut div = 0.0f64;
        for r in series.rows.iter() {
            res = res.max((r.energy - e0 + r.int_diss).abs());
            div = div.max(r.div_residual);
        }
        for r in series.rows.iter().skip(1) {
            drift = drift.max(r.mass_drift);
        }
        println!("dt={dt}: residual={res:.6e} (tol {:.3e}) drift={drift:.3e} div={div:.3e} lambda_end={:.4e}",
            1e-4 * e0, series.rows.last().unwrap().lambda);
    }
}
