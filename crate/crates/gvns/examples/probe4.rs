// scratch: residual time-profile and toggle bisection
use gvns::config::parse_config;
use gvns::run::run_in_memory;

fn run(dt: f64, extra: &str) -> gvns::DiagnosticsSeries {
    let cfg = parse_config(&format!(
        "d = 2\nnx = 32\nnv = 32\nlv = 5\ndt = {dt}\nt_end = 1.0\n\
         s = 0.5\nsigma = 4\nm = 2\nlambda0 = 0.5\n\
         initial = coupled_band\nic_amplitude = 0.05\nic_theta = 1.5\n\
         ic_epsilon = 0.2\nic_drift = 0.1\nic_u_amplitude = 0.05\n\
         boundary_limit = 0.05\n{extra}"
    ))
    .unwrap();
    run_in_memory(&cfg).unwrap().0
}

fn main() {
    for (dt, extra, label) in [
        (0.02, "", "base dt=0.02"),
        (0.01, "", "base dt=0.01"),
        (0.02, "ic_drift = 0\n", "drift=0"),
        (0.02, "ic_u_amplitude = 0\n", "u_amp=0"),
        (0.02, "ic_epsilon = 0\n", "eps=0"),
    ] {
        // NOTE: duplicate keys are rejected, so the variations replace via extra-first
        let series = if extra.is_empty() {
            run(dt, "")
        } else {
            // rebuild the config with the overridden value
            let base = format!(
                "d = 2\nnx = 32\nnv = 32\nlv = 5\ndt = {dt}\nt_end = 1.0\n\
                 s = 0.5\nsigma = 4\nm = 2\nlambda0 = 0.5\n\
                 initial = coupled_band\nic_amplitude = 0.05\nic_theta = 1.5\n\
                 boundary_limit = 0.05\n"
            );
            let tail = match label {
                "drift=0" => "ic_epsilon = 0.2\nic_drift = 0\nic_u_amplitude = 0.05\n",
                "u_amp=0" => "ic_epsilon = 0.2\nic_drift = 0.1\nic_u_amplitude = 0\n",
                _ => "ic_epsilon = 0\nic_drift = 0.1\nic_u_amplitude = 0.05\n",
            };
            run_in_memory(&parse_config(&format!("{base}{tail}")).unwrap())
                .unwrap()
                .0
        };
        let e0 = series.rows[0].energy;
        let mut res_max = 0.0f64;
        print!("{label:<14}");
        let n = series.rows.len();
        for (i, r) in series.rows.iter().enumerate() {
            let res = r.energy - e0 + r.int_diss;
            res_max = res_max.max(res.abs());
            if i % (n / 5).max(1) == 0 && i > 0 {
                print!(" t={:.1}:{:+.2e}", r.t, res);
            }
        }
        println!("  max={res_max:.3e}");
    }
}
