//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use quatgin_core::verify::{self, CriterionReport, DEFAULT_SEED, GINIBRE_N, GINIBRE_REPLICAS};
use quatgin_core::SpectrumSample;

/// `(criterion, row name, threshold)`; the comparison direction is given by
/// [`direction`].
const THRESHOLDS: &[(u8, &str, f64)] = &[
    (1, "disk_off_circle", 1e-8),
    (1, "disk_on_circle", 1e-5),
    (1, "nu_off_circle", 1e-8),
    (1, "nu_on_circle", 1e-5),
    (1, "sin2_off_circle", 1e-8),
    (1, "sin2_on_circle", 1e-5),
    (1, "poisson_off_circle", 1e-8),
    (2, "disk_on_support_dev", 1e-12),
    (2, "disk_level_minus_one", 1e-12),
    (2, "exterior_violation", 0.0),
    (3, "radial_vs_r2", 0.03),
    (3, "argument_vs_uniform", 0.03),
    (4, "max_energy_deviation", 0.02),
    (5, "real_part_vs_semicircle", 0.03),
    (5, "modulus_vs_r2", 0.03),
    (5, "weighted_modulus_vs_ball4", 0.05),
    (6, "real_part_preserved", 1e-12),
    (6, "imaginary_norm_preserved", 1e-12),
    (6, "direction_mean", 0.01),
    (6, "direction_covariance", 0.01),
    (7, "a_minus_half", 1e-6),
    (7, "c_minus_2b", 1e-6),
    (7, "on_circle_residual", 1e-6),
    (7, "interior_gap_at_c_1", 0.0),
    (8, "rewrite_spread", 1e-9),
    (9, "known_spectrum_recovery", 1e-8),
    (9, "trace_identity", 1e-9),
    (9, "adjoint_pairing_residual", 1e-8),
    (9, "determinant_identity", 1e-7),
    (10, "bounded_fraction", 0.99),
    (11, "single_pair_radial_ks", 0.05),
    (11, "n16_mean_energy_deviation", 0.1),
];

fn direction(name: &str) -> fn(f64, f64) -> bool {
    match name {
        "bounded_fraction" => |m, t| m >= t,
        "interior_gap_at_c_1" => |m, t| m > t,
        _ => |m, t| m <= t,
    }
}

fn spectra() -> &'static quatgin_core::Result<Vec<SpectrumSample>> {
    static SPECTRA: OnceLock<quatgin_core::Result<Vec<SpectrumSample>>> = OnceLock::new();
    SPECTRA.get_or_init(|| {
        verify::ginibre_spectra(GINIBRE_N, GINIBRE_REPLICAS, verify::spectra_seed(DEFAULT_SEED))
    })
}

fn with_spectra(c: u8, f: impl Fn(&[SpectrumSample]) -> Vec<CriterionReport>) -> Vec<CriterionReport> {
    match spectra() {
        Ok(s) => f(s),
        Err(e) => {
            println!("    spectra failed: {e}");
            vec![CriterionReport::at_most(c, "ginibre_spectra", 0, 0, f64::NAN, 0.0)]
        }
    }
}

fn judge(c: u8, rows: &[CriterionReport]) -> bool {
    let expected: Vec<&(u8, &str, f64)> = THRESHOLDS.iter().filter(|t| t.0 == c).collect();
    let mut ok = rows.len() == expected.len();
    for row in rows {
        let hit = expected.iter().find(|t| t.1 == row.test_name);
        let row_ok = match hit {
            Some(&&(_, name, threshold)) => direction(name)(row.measured, threshold),
            None => false,
        };
        println!(
            "    {:<28} measured {:>12.4e}  threshold {:>9.2e}  {}",
            row.test_name,
            row.measured,
            hit.map_or(f64::NAN, |t| t.2),
            if row_ok { "ok" } else { "FAILED" }
        );
        ok &= row_ok;
    }
    ok
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let seed = DEFAULT_SEED;
    let checks: Vec<(u8, &str, Box<dyn Fn() -> Vec<CriterionReport>>)> = vec![
        (1, "closed-form potentials vs quadrature", Box::new(move || verify::check_potentials(seed))),
        (2, "equilibrium identity for the disk", Box::new(verify::check_equilibrium)),
        (3, "circular law at n=300 x 20", Box::new(|| with_spectra(3, verify::check_circular))),
        (4, "energy concentration at n=300", Box::new(|| with_spectra(4, verify::check_energy))),
        (5, "quaternionic limit law", Box::new(move || with_spectra(5, |s| verify::check_quaternion(s, seed)))),
        (6, "conjugation orbit law", Box::new(move || verify::check_orbit(seed))),
        (7, "quadratic potential refutation", Box::new(verify::check_refutation)),
        (8, "density rewrite identity", Box::new(move || verify::check_rewrite(seed))),
        (9, "eigenvalue solver correctness", Box::new(move || verify::check_solver(seed))),
        (10, "independence product statistic", Box::new(move || verify::check_independence(seed))),
        (11, "Metropolis sampler sanity", Box::new(move || verify::check_mcmc(seed))),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (c, title, check) in &checks {
        let tag = format!("criterion_{c:02}");
        let named = |f: &String| verify::GROUPS.iter().any(|(name, id)| name == f && id == c);
        if !filter.is_empty() && !filter.iter().any(|f| tag.contains(f.as_str()) || named(f)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let rows = check();
        let ok = judge(*c, &rows);
        println!(
            "{tag} {:<40} {} ({:.1} s)",
            title,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!ok);
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
