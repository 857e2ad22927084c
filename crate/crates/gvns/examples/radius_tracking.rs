//! The regularity-radius ODE
//!   lambda' = -lambda (1 + ||f||_{s,M} + ||u||_s)
//!             - lambda^2 (||u||_s + ||f||_{l,s,M} + ||u||_{l,s}),
//! integrated by RK4 and cross-validated against its closed form through
//! G(t), plus the a-priori lower bound with a fitted constant.

use gvns::radius::{closed_form_lambda, integrate_lambda, lambda_lower_bound, RadiusCoeffs};

fn main() {
    // constant coefficients: the Bernoulli solution 1/(2 e^t - 1)
    let n = 1000;
    let t_end = std::f64::consts::LN_2;
    let series: Vec<RadiusCoeffs> = (0..=n)
        .map(|i| RadiusCoeffs {
            t: i as f64 * t_end / n as f64,
            y_sob: 1.0,
            y_gev: 1.0,
        })
        .collect();
    let rk = integrate_lambda(&series, 1.0, 1).unwrap();
    println!("Bernoulli check: lambda(ln 2) = {:.10} (exact 1/3)", rk.last().unwrap());

    // a synthetic time-varying coefficient series
    let series: Vec<RadiusCoeffs> = (0..=800)
        .map(|i| {
            let t = i as f64 * 1e-3;
            RadiusCoeffs {
                t,
                y_sob: 1.0 + 0.8 * (4.0 * t).sin().powi(2),
                y_gev: 0.5 + 0.3 * (3.0 * t).cos(),
            }
        })
        .collect();
    let lambda0 = 0.5;
    let rk = integrate_lambda(&series, lambda0, 1).unwrap();
    let cf = closed_form_lambda(&series, lambda0);
    let times: Vec<f64> = series.iter().map(|c| c.t).collect();
    let mut int_ysob = vec![0.0];
    for w in series.windows(2) {
        int_ysob.push(int_ysob.last().unwrap() + 0.5 * (w[1].t - w[0].t) * (w[0].y_sob + w[1].y_sob));
    }
    let bound = lambda_lower_bound(&times, &int_ysob, lambda0, 1.0);
    println!("{:<8}{:>14}{:>14}{:>16}", "t", "lambda RK4", "closed form", "lower bound C3=1");
    for i in (0..series.len()).step_by(100) {
        println!("{:<8.3}{:>14.8}{:>14.8}{:>16.8}", times[i], rk[i], cf[i], bound[i]);
    }
    let max_rel = rk
        .iter()
        .zip(cf.iter())
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0f64, f64::max);
    println!("max relative RK4-vs-closed-form disagreement: {max_rel:.3e}");
}
