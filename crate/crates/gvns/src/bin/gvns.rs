//! Command-line front end.
//!
//! Exit codes: 0 success, 2 verification failure, 3 configuration error,
//! 4 runtime instability (fluid blow-up sentinel or velocity-support
//! escape). Thread count follows RAYON_NUM_THREADS.

use clap::{Parser, Subcommand};
use gvns::error::GvnsError;
use gvns::lab::{
    check_moment_bounds, check_product_commutator, check_rho_u_bound, check_triangle, check_young,
    InequalityReport, PhaseLabParams,
};
use gvns::run::{run_to_disk, series_from_dir};
use gvns::verify::{fit_all, refinement_ratios};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gvns", about = "Vlasov-Navier-Stokes simulator with Gevrey diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a simulation described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit and check the a-priori bounds on a finished run.
    Verify {
        #[arg(long)]
        run: PathBuf,
        /// Refined companion run (halved dt or doubled grid) for the
        /// stability ratios.
        #[arg(long)]
        refined: Option<PathBuf>,
    },
    /// Execute an inequality-lab suite.
    Lab {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value = "lab_out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sample count for the randomized ensembles.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Print a plain-text summary of a run directory.
    Report {
        #[arg(long)]
        run: PathBuf,
    },
}

fn exit_code_for(err: &GvnsError) -> u8 {
    match err {
        GvnsError::Config { .. } | GvnsError::ConfigGeneral { .. } => 3,
        GvnsError::Instability { .. } | GvnsError::BoundaryMassEscape { .. } => 4,
        GvnsError::BoundViolated(_) => 2,
        _ => 1,
    }
}

fn cmd_run(config: PathBuf) -> gvns::Result<u8> {
    let text = std::fs::read_to_string(&config)?;
    let cfg = gvns::parse_config(&text)?;
    for w in gvns::config::theorem_warnings(&cfg) {
        eprintln!("warning: {w}");
    }
    let out = run_to_disk(&cfg)?;
    for w in &out.summary.solver_warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "run complete: {} steps to t = {:.6}, diagnostics at {}",
        out.summary.steps,
        out.summary.final_t,
        out.csv_path.display()
    );
    Ok(0)
}

fn cmd_verify(run: PathBuf, refined: Option<PathBuf>) -> gvns::Result<u8> {
    let series = series_from_dir(&run)?;
    let output = fit_all(&series);
    let ratios = if let Some(refined) = refined {
        let fine = fit_all(&series_from_dir(&refined)?);
        refinement_ratios(&output.constants, &fine.constants)
    } else {
        Vec::new()
    };
    for v in &output.verdicts {
        let consts: Vec<String> = v
            .constants
            .iter()
            .map(|(n, c)| format!("{n}={c:.6e}"))
            .collect();
        println!(
            "{:<24} {}  {}",
            v.name,
            if v.pass { "PASS" } else { "FAIL" },
            consts.join(" ")
        );
        let file = run.join(format!("verdict_{}.json", v.name));
        let mut enriched = v.clone();
        enriched.refinement_ratios = ratios
            .iter()
            .filter(|(n, _)| v.constants.iter().any(|(cn, _)| cn == n))
            .cloned()
            .collect();
        std::fs::write(
            &file,
            serde_json::to_string_pretty(&enriched).expect("serializable"),
        )?;
    }
    println!(
        "{:<24} {}  residual={:.3e} rate={:.3e}",
        "energy_decay",
        if output.energy.pass { "PASS" } else { "FAIL" },
        output.energy.identity_residual_max,
        output.energy.emod_rate
    );
    std::fs::write(
        run.join("verdict_energy.json"),
        serde_json::to_string_pretty(&output.energy).expect("serializable"),
    )?;
    println!(
        "{:<24} {}  int_gevrey={:.4e} int_analytic={:.4e}",
        "blowup_monitor",
        if output.blowup.finite { "PASS" } else { "FAIL" },
        output.blowup.int_gevrey_criterion,
        output.blowup.int_analytic_criterion
    );
    std::fs::write(
        run.join("verdict_blowup.json"),
        serde_json::to_string_pretty(&output.blowup).expect("serializable"),
    )?;
    println!(
        "{:<24} {}  C_f={:?} C_u={:?} excluded={}/{}",
        "gevrey_diff_ineq",
        if output.diff_ineq.pass { "PASS" } else { "FAIL" },
        output.diff_ineq.c_f,
        output.diff_ineq.c_u,
        output.diff_ineq.excluded_f,
        output.diff_ineq.checked
    );
    std::fs::write(
        run.join("verdict_gevrey_diff_ineq.json"),
        serde_json::to_string_pretty(&output.diff_ineq).expect("serializable"),
    )?;
    if !ratios.is_empty() {
        for (n, r) in &ratios {
            println!("refinement {n}: {r:.4}");
        }
    }
    if output.all_pass {
        Ok(0)
    } else {
        Err(GvnsError::BoundViolated(
            "one or more verdicts failed; see the verdict_*.json files".into(),
        ))
    }
}

fn write_reports(out: &PathBuf, reports: &[InequalityReport]) -> gvns::Result<bool> {
    std::fs::create_dir_all(out)?;
    let mut all_pass = true;
    for rep in reports {
        let pass = rep.passes();
        all_pass &= pass;
        let tuple: Vec<String> = rep
            .params
            .iter()
            .map(|(k, v)| format!("{k}{v}"))
            .collect();
        let file = out.join(format!("lab_{}_{}.json", rep.name, tuple.join("_")));
        std::fs::write(&file, serde_json::to_string_pretty(rep).expect("serializable"))?;
        println!(
            "{:<22} {}  fitted_C={:.6e} violations={} ratio={:?}",
            rep.name,
            if pass { "PASS" } else { "FAIL" },
            rep.fitted_c,
            rep.violations,
            rep.refinement_ratio
        );
    }
    Ok(all_pass)
}

fn cmd_lab(suite: &str, out: PathBuf, seed: u64, samples: Option<usize>) -> gvns::Result<u8> {
    let mut reports = Vec::new();
    let triangle = |reports: &mut Vec<InequalityReport>, n: usize| -> gvns::Result<()> {
        for case in 1..=7usize {
            let s = if matches!(case, 2 | 6) { 1.5 } else { 0.5 };
            reports.push(check_triangle(case, n, s, 1, seed)?);
            reports.push(check_triangle(case, n, s, 2, seed)?);
        }
        Ok(())
    };
    let young = |reports: &mut Vec<InequalityReport>, n: usize| -> gvns::Result<()> {
        reports.push(check_young(1, 2.0, 0.0, 0.0, 8, n, seed)?);
        reports.push(check_young(1, 3.0, 1.0, -1.0, 8, n, seed)?);
        reports.push(check_young(2, 2.0, 1.0, 0.5, 8, n, seed)?);
        reports.push(check_young(2, 3.0, 2.0, 1.0, 8, n, seed)?);
        Ok(())
    };
    let moments = |reports: &mut Vec<InequalityReport>, n: usize| -> gvns::Result<()> {
        reports.extend(check_moment_bounds(n, PhaseLabParams::default(), seed)?);
        Ok(())
    };
    let commutator = |reports: &mut Vec<InequalityReport>, n: usize| -> gvns::Result<()> {
        for case in 1..=4usize {
            for c_f in [1.0, 2.0, 4.0] {
                reports.push(check_product_commutator(case, n, 2, c_f, seed)?);
            }
        }
        Ok(())
    };
    let rho_u = |reports: &mut Vec<InequalityReport>, n: usize| -> gvns::Result<()> {
        let p = PhaseLabParams {
            lambda: 0.2,
            s: 0.5,
            ..Default::default()
        };
        reports.push(check_rho_u_bound(n, p, seed)?);
        Ok(())
    };
    match suite {
        "triangle" => triangle(&mut reports, samples.unwrap_or(100_000))?,
        "young" => young(&mut reports, samples.unwrap_or(500))?,
        "moments" => moments(&mut reports, samples.unwrap_or(200))?,
        "commutator" => commutator(&mut reports, samples.unwrap_or(100))?,
        "rho_u" => rho_u(&mut reports, samples.unwrap_or(200))?,
        "all" => {
            triangle(&mut reports, samples.unwrap_or(100_000))?;
            young(&mut reports, samples.unwrap_or(500))?;
            moments(&mut reports, samples.unwrap_or(200))?;
            commutator(&mut reports, samples.unwrap_or(100))?;
            rho_u(&mut reports, samples.unwrap_or(200))?;
        }
        other => {
            return Err(GvnsError::ConfigGeneral {
                message: format!(
                    "unknown suite '{other}' (expected triangle, young, moments, commutator, rho_u, all)"
                ),
            })
        }
    }
    let all_pass = write_reports(&out, &reports)?;
    if all_pass {
        Ok(0)
    } else {
        Err(GvnsError::BoundViolated("lab suite reported violations".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => cmd_run(config),
        Command::Verify { run, refined } => cmd_verify(run, refined),
        Command::Lab {
            suite,
            out,
            seed,
            samples,
        } => cmd_lab(&suite, out, seed, samples),
        Command::Report { run } => gvns::report::render_report(&run).map(|text| {
            print!("{text}");
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
