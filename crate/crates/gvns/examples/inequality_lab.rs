//! The inequality lab: randomized verification of the bracket triangle
//! inequalities (explicit constants asserted, "up to a constant" forms
//! fitted), the discrete Young inequalities by exact triple summation, the
//! density/current moment bounds and the rho*u product bound.

use gvns::lab::{
    check_moment_bounds, check_product_commutator, check_rho_u_bound, check_triangle, check_young,
    PhaseLabParams,
};

fn main() {
    println!(
        "{:<20}{:>10}{:>12}{:>14}{:>10}{:>8}",
        "inequality", "samples", "violations", "fitted C", "ratio", "stated"
    );
    let mut show = |rep: gvns::lab::InequalityReport| {
        println!(
            "{:<20}{:>10}{:>12}{:>14.5e}{:>10.3}{:>8}",
            rep.name,
            rep.sample_count,
            rep.violations,
            rep.fitted_c,
            rep.refinement_ratio.unwrap_or(f64::NAN),
            rep.stated_constant
                .map(|c| format!("{c:.3}"))
                .unwrap_or_else(|| "-".into()),
        );
    };
    for case in 1..=7usize {
        let s = if matches!(case, 2 | 6) { 1.5 } else { 0.5 };
        show(check_triangle(case, 20_000, s, 2, 1).unwrap());
    }
    show(check_young(1, 2.0, 0.0, 0.0, 8, 200, 1).unwrap());
    show(check_young(2, 2.0, 1.0, 0.5, 8, 200, 1).unwrap());
    for rep in check_moment_bounds(100, PhaseLabParams::default(), 1).unwrap() {
        show(rep);
    }
    for case in 1..=4usize {
        show(check_product_commutator(case, 40, 2, 2.0, 1).unwrap());
    }
    let p = PhaseLabParams {
        lambda: 0.2,
        s: 0.5,
        ..Default::default()
    };
    show(check_rho_u_bound(100, p, 1).unwrap());
}
