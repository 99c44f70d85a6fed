//! The numbered end-to-end checks run by `quatgin verify` and by the
//! acceptance test target. Each check returns one [`CriterionReport`] per
//! measured quantity; a criterion passes when all of its rows pass.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cmatrix::ComplexMatrix;
use crate::eig::{eigenvalues, matching_distance, random_unitary, replica_seed, right_spectrum, SpectrumSample};
use crate::error::{Error, Result};
use crate::loggas::{empirical_energy, log_density_unnorm, mcmc_run, GasState, McmcConfig, Potential};
use crate::matrix_model::{sample_ginibre_quaternion, sample_ginibre_quaternion_with, EnsembleConfig};
use crate::potential_theory::{
    equilibrium_check, poisson_integrals, potential_nu, potential_uniform_disk, quad_potential,
    quad_potential_disk, refute_quadratic_for_nu, sin2_log_integral, CircleMeasureDensity,
};
use crate::quadrature::{integrate, integrate_with_breaks};
use crate::quaternion::{sample_unit_sphere, Quaternion};
use crate::rng::RandomStream;
use crate::spectral_stats::{
    class_weighted_measure, disk_radial_cdf, ks_statistic, ks_two_sample_weighted, product_independence_stat,
    sample_classes, sample_uniform_ball4, semicircle_cdf, uniform_angle_cdf, ClassSample,
};

pub const DEFAULT_SEED: u64 = 7;
/// Matrix size and replica count of the Ginibre checks (criteria 3 to 5).
pub const GINIBRE_N: usize = 300;
pub const GINIBRE_REPLICAS: usize = 20;

/// One measured quantity of a criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion: u8,
    pub test_name: String,
    pub n: usize,
    pub replicas: usize,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CriterionReport {
    /// Passes when `measured <= tolerance`.
    pub fn at_most(criterion: u8, test_name: &str, n: usize, replicas: usize, measured: f64, tolerance: f64) -> Self {
        let pass = measured <= tolerance;
        Self { criterion, test_name: test_name.into(), n, replicas, measured, tolerance, pass }
    }

    /// Passes when `measured >= tolerance`.
    pub fn at_least(criterion: u8, test_name: &str, n: usize, replicas: usize, measured: f64, tolerance: f64) -> Self {
        let pass = measured >= tolerance;
        Self { criterion, test_name: test_name.into(), n, replicas, measured, tolerance, pass }
    }

    /// Passes when `measured > tolerance`.
    pub fn above(criterion: u8, test_name: &str, n: usize, replicas: usize, measured: f64, tolerance: f64) -> Self {
        let pass = measured > tolerance;
        Self { criterion, test_name: test_name.into(), n, replicas, measured, tolerance, pass }
    }

    fn failed(criterion: u8, test_name: &str, err: &Error) -> Self {
        log::error!("criterion {criterion} ({test_name}): {err}");
        Self {
            criterion,
            test_name: format!("{test_name}: {err}"),
            n: 0,
            replicas: 0,
            measured: f64::NAN,
            tolerance: f64::NAN,
            pass: false,
        }
    }
}

/// Named subsets of the criteria accepted by `--only`.
pub const GROUPS: [(&str, u8); 11] = [
    ("potentials", 1),
    ("equilibrium", 2),
    ("circular", 3),
    ("energy", 4),
    ("quaternion", 5),
    ("orbit", 6),
    ("refutation", 7),
    ("rewrite", 8),
    ("solver", 9),
    ("independence", 10),
    ("mcmc", 11),
];

/// Parses a comma-separated list of group names or criterion numbers.
pub fn parse_selection(s: &str) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let id = match GROUPS.iter().find(|(name, _)| *name == tok) {
            Some(&(_, id)) => id,
            None => match tok.parse::<u8>() {
                Ok(id) if (1..=11).contains(&id) => id,
                _ => return Err(Error::InvalidArgument(format!("unknown criterion or group '{tok}'"))),
            },
        };
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn criterion_stream(seed: u64, criterion: u8) -> RandomStream {
    RandomStream::new(seed).child(criterion as u64)
}

/// Seed of the shared Ginibre spectra.
pub fn spectra_seed(seed: u64) -> u64 {
    RandomStream::child_seed(seed, 100)
}

/// Independent right spectra of `X(n)`, failing on the first solver error.
pub fn ginibre_spectra(n: usize, replicas: usize, seed: u64) -> Result<Vec<SpectrumSample>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| right_spectrum(&sample_ginibre_quaternion(EnsembleConfig { n, seed: replica_seed(seed, r) })?))
        .collect()
}

/// Points at distance at least `0.01` from the unit circle, half inside.
fn off_circle_points(rng: &mut RandomStream, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let r = if k % 2 == 0 { rng.uniform_range(0.0, 0.99) } else { rng.uniform_range(1.01, 3.0) };
            Complex64::from_polar(r, rng.uniform_range(-PI, PI))
        })
        .collect()
}

fn circle_points(count: usize) -> Vec<Complex64> {
    (0..count).map(|k| Complex64::from_polar(1.0, -PI + 2.0 * PI * (k as f64 + 0.37) / count as f64)).collect()
}

fn max_err(points: &[Complex64], f: impl Fn(Complex64) -> Result<f64> + Sync) -> Result<f64> {
    let errs: Vec<f64> = points.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

fn sin2_quadrature(r: f64, tol: f64) -> Result<f64> {
    let f = |t: f64| (Complex64::new(r, 0.0) - Complex64::from_polar(1.0, t)).norm().ln() * t.sin().powi(2) / PI;
    Ok(integrate_with_breaks(f, &[0.0, PI, 2.0 * PI], tol)?.value)
}

fn poisson_quadrature(r: f64, tol: f64) -> Result<(f64, f64)> {
    let den = |t: f64| r * r + 1.0 - 2.0 * r * t.cos();
    let a1 = integrate_with_breaks(|t| 1.0 / den(t), &[-PI, 0.0, PI], tol)?.value;
    let a2 = integrate_with_breaks(|t: f64| t.cos().powi(2) / den(t), &[-PI, 0.0, PI], tol)?.value;
    Ok((a1, a2))
}

/// Criterion 1: closed forms against quadrature, `1e-8` off the circle and
/// `1e-5` on it. The Poisson integrals diverge on the circle and are only
/// checked off it.
pub fn check_potentials(seed: u64) -> Vec<CriterionReport> {
    const OFF: f64 = 1e-8;
    const ON: f64 = 1e-5;
    let mut rng = criterion_stream(seed, 1);
    let off = off_circle_points(&mut rng, 100);
    let on = circle_points(16);
    let nu = CircleMeasureDensity::nu();
    let m = off.len();
    let rows: Vec<(&str, usize, f64, Result<f64>)> = vec![
        ("disk_off_circle", m, OFF, max_err(&off, |x| Ok((quad_potential_disk(x, 1e-10)? - potential_uniform_disk(x)).abs()))),
        ("disk_on_circle", on.len(), ON, max_err(&on, |x| Ok((quad_potential_disk(x, 1e-7)? - potential_uniform_disk(x)).abs()))),
        ("nu_off_circle", m, OFF, max_err(&off, |x| Ok((quad_potential(&nu, x, 1e-11)? - potential_nu(x)).abs()))),
        ("nu_on_circle", on.len(), ON, max_err(&on, |x| Ok((quad_potential(&nu, x, 1e-7)? - potential_nu(x)).abs()))),
        (
            "sin2_off_circle",
            m,
            OFF,
            max_err(&off, |x| Ok((sin2_quadrature(x.norm(), 1e-11)? - sin2_log_integral(x.norm())?).abs())),
        ),
        ("sin2_on_circle", 1, ON, sin2_quadrature(1.0, 1e-7).map(|q| (q - sin2_log_integral(1.0).unwrap()).abs())),
        (
            "poisson_off_circle",
            m,
            OFF,
            max_err(&off, |x| {
                let (a1, a2) = poisson_integrals(x.norm())?;
                let (q1, q2) = poisson_quadrature(x.norm(), 1e-10)?;
                Ok((a1 - q1).abs().max((a2 - q2).abs()))
            }),
        ),
    ];
    rows.into_iter()
        .map(|(name, count, tol, res)| match res {
            Ok(err) => CriterionReport::at_most(1, name, count, 1, err, tol),
            Err(e) => CriterionReport::failed(1, name, &e),
        })
        .collect()
}

/// Criterion 2: `2U^μ + |z|² = 1` on `10³` disk points and `>= 1` outside.
pub fn check_equilibrium() -> Vec<CriterionReport> {
    let golden = PI * (3.0 - 5f64.sqrt());
    let inner: Vec<Complex64> =
        (0..1000).map(|k| Complex64::from_polar((k as f64 / 999.0).sqrt(), golden * k as f64)).collect();
    let outer: Vec<Complex64> =
        (0..1000).map(|k| Complex64::from_polar(1.0 + 9.0 * (k as f64 + 1.0) / 1000.0, golden * k as f64)).collect();
    let v = Potential::Canonical;
    let in_disk = |z: Complex64| z.norm() <= 1.0;
    let mut rows = Vec::new();
    match equilibrium_check(potential_uniform_disk, &v, in_disk, &inner) {
        Ok(r) => {
            rows.push(CriterionReport::at_most(2, "disk_on_support_dev", inner.len(), 1, r.on_support_dev, 1e-12));
            rows.push(CriterionReport::at_most(2, "disk_level_minus_one", inner.len(), 1, (r.l_hat - 1.0).abs(), 1e-12));
        }
        Err(e) => rows.push(CriterionReport::failed(2, "disk_on_support", &e)),
    }
    let grid: Vec<Complex64> = inner.iter().chain(&outer).copied().collect();
    match equilibrium_check(potential_uniform_disk, &v, in_disk, &grid) {
        Ok(r) => rows.push(CriterionReport::at_most(2, "exterior_violation", outer.len(), 1, r.off_support_violation, 0.0)),
        Err(e) => rows.push(CriterionReport::failed(2, "exterior_violation", &e)),
    }
    rows
}

/// Criterion 3: pooled modulus and argument of the spectra.
pub fn check_circular(spectra: &[SpectrumSample]) -> Vec<CriterionReport> {
    let n = spectra.first().map_or(0, |s| s.n);
    let eigs: Vec<Complex64> = spectra.iter().flat_map(|s| s.all_eigs.iter().copied()).collect();
    let radii: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
    let args: Vec<f64> = eigs.iter().map(|z| z.arg()).collect();
    let r = spectra.len();
    vec![
        report_ks(3, "radial_vs_r2", n, r, ks_statistic(&radii, disk_radial_cdf), 0.03),
        report_ks(3, "argument_vs_uniform", n, r, ks_statistic(&args, uniform_angle_cdf), 0.03),
    ]
}

fn report_ks(criterion: u8, name: &str, n: usize, replicas: usize, ks: Result<f64>, tol: f64) -> CriterionReport {
    match ks {
        Ok(d) => CriterionReport::at_most(criterion, name, n, replicas, d, tol),
        Err(e) => CriterionReport::failed(criterion, name, &e),
    }
}

/// Criterion 4: worst `|K_n/(4n²) - 3/4|` over the replicas.
pub fn check_energy(spectra: &[SpectrumSample]) -> Vec<CriterionReport> {
    let n = spectra.first().map_or(0, |s| s.n);
    let energies: Result<Vec<f64>> = spectra.iter().map(|s| empirical_energy(s, &Potential::Canonical)).collect();
    match energies {
        Ok(e) => {
            let worst = e.iter().map(|x| (x - 0.75).abs()).fold(0.0, f64::max);
            vec![CriterionReport::at_most(4, "max_energy_deviation", n, spectra.len(), worst, 0.02)]
        }
        Err(e) => vec![CriterionReport::failed(4, "max_energy_deviation", &e)],
    }
}

/// Size of the uniform-ball reference sample in criterion 5.
pub const BALL_ORACLE_SAMPLES: usize = 200_000;

/// Criterion 5: class samples against the semicircle, `r²` and the uniform
/// 4-ball (class-weighted).
pub fn check_quaternion(spectra: &[SpectrumSample], seed: u64) -> Vec<CriterionReport> {
    let n = spectra.first().map_or(0, |s| s.n);
    let r = spectra.len();
    let root = criterion_stream(seed, 5);
    let classes: Vec<ClassSample> =
        spectra.iter().enumerate().map(|(i, s)| sample_classes(s, &mut root.child(i as u64))).collect();
    let all: Vec<Quaternion> = classes.iter().flat_map(|c| c.classes.iter().copied()).collect();
    let re: Vec<f64> = all.iter().map(|q| q.re()).collect();
    let modulus: Vec<f64> = all.iter().map(|q| q.norm()).collect();
    let pooled = ClassSample {
        reps: classes.iter().flat_map(|c| c.reps.iter().copied()).collect(),
        units: classes.iter().flat_map(|c| c.units.iter().copied()).collect(),
        classes: all,
        radii: classes.iter().flat_map(|c| c.radii.iter().copied()).collect(),
    };
    let weighted = class_weighted_measure(&pooled).and_then(|m| {
        let oracle: Vec<f64> = sample_uniform_ball4(&mut root.child(u64::MAX), BALL_ORACLE_SAMPLES)
            .iter()
            .map(|q| q.norm())
            .collect();
        ks_two_sample_weighted(&m.marginal(|q| q.norm()), m.weights(), &oracle)
    });
    vec![
        report_ks(5, "real_part_vs_semicircle", n, r, ks_statistic(&re, semicircle_cdf), 0.03),
        report_ks(5, "modulus_vs_r2", n, r, ks_statistic(&modulus, disk_radial_cdf), 0.03),
        report_ks(5, "weighted_modulus_vs_ball4", n, r, weighted, 0.05),
    ]
}

/// Criterion 6: `10⁵` conjugates of `1 + 2i` by Haar unit quaternions.
pub fn check_orbit(seed: u64) -> Vec<CriterionReport> {
    const DRAWS: usize = 100_000;
    let mut rng = criterion_stream(seed, 6);
    let z0 = Quaternion::new(1.0, 2.0, 0.0, 0.0);
    let mut re_dev: f64 = 0.0;
    let mut im_dev: f64 = 0.0;
    let mut mean = [0.0; 3];
    let mut second = [[0.0; 3]; 3];
    for _ in 0..DRAWS {
        let c = match Quaternion::conjugate_by(sample_unit_sphere(&mut rng), z0) {
            Ok(c) => c,
            Err(e) => return vec![CriterionReport::failed(6, "conjugation", &e)],
        };
        re_dev = re_dev.max((c.re() - 1.0).abs());
        im_dev = im_dev.max((c.im_norm() - 2.0).abs());
        let d = [c.x / c.im_norm(), c.y / c.im_norm(), c.z / c.im_norm()];
        for a in 0..3 {
            mean[a] += d[a] / DRAWS as f64;
            for b in 0..3 {
                second[a][b] += d[a] * d[b] / DRAWS as f64;
            }
        }
    }
    let mean_dev = mean.iter().map(|m| m.abs()).fold(0.0, f64::max);
    let mut cov_dev: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let target = if a == b { 1.0 / 3.0 } else { 0.0 };
            cov_dev = cov_dev.max((second[a][b] - target).abs());
        }
    }
    vec![
        CriterionReport::at_most(6, "real_part_preserved", 1, DRAWS, re_dev, 1e-12),
        CriterionReport::at_most(6, "imaginary_norm_preserved", 1, DRAWS, im_dev, 1e-12),
        CriterionReport::at_most(6, "direction_mean", 1, DRAWS, mean_dev, 0.01),
        CriterionReport::at_most(6, "direction_covariance", 1, DRAWS, cov_dev, 0.01),
    ]
}

/// Criterion 7: least-squares quadratic fit for `ν` and its interior gap.
pub fn check_refutation() -> Vec<CriterionReport> {
    const POINTS: usize = 512;
    match refute_quadratic_for_nu(POINTS) {
        Ok(fit) => {
            let gap = fit.check(1.0, POINTS).map(|r| r.off_support_violation).unwrap_or(f64::NAN);
            vec![
                CriterionReport::at_most(7, "a_minus_half", POINTS, 1, (fit.a - 0.5).abs(), 1e-6),
                CriterionReport::at_most(7, "c_minus_2b", POINTS, 1, fit.c_relation.abs(), 1e-6),
                CriterionReport::at_most(7, "on_circle_residual", POINTS, 1, fit.on_circle_residual, 1e-6),
                CriterionReport::above(7, "interior_gap_at_c_1", POINTS, 1, gap, 0.0),
            ]
        }
        Err(e) => vec![CriterionReport::failed(7, "quadratic_fit", &e)],
    }
}

/// `log Π_{i<j} |z_i - z_j|² |z_i - conj z_j|² Π_i |z_i - conj z_i|² - 2n Σ |z_i|²`.
fn ginibre_log_product(pts: &[Complex64]) -> f64 {
    let n = pts.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..i {
            total += (pts[i] - pts[j]).norm_sqr().ln() + (pts[i] - pts[j].conj()).norm_sqr().ln();
        }
        total += (2.0 * pts[i].im).powi(2).ln() - 2.0 * n as f64 * pts[i].norm_sqr();
    }
    total
}

/// Criterion 8: spread of `log P_n^V - log(Ginibre product)` over random
/// `n = 4` configurations.
pub fn check_rewrite(seed: u64) -> Vec<CriterionReport> {
    const CONFIGS: usize = 100;
    let mut rng = criterion_stream(seed, 8);
    let v = Potential::Canonical;
    let mut diffs = Vec::with_capacity(CONFIGS);
    for _ in 0..CONFIGS {
        let pts: Vec<Complex64> =
            (0..4).map(|_| Complex64::new(rng.uniform_range(-1.5, 1.5), rng.uniform_range(0.01, 1.5))).collect();
        match GasState::new(pts.clone(), &v) {
            Ok(s) => diffs.push(log_density_unnorm(&s, &v) - ginibre_log_product(&pts)),
            Err(e) => return vec![CriterionReport::failed(8, "rewrite_spread", &e)],
        }
    }
    let spread = diffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - diffs.iter().cloned().fold(f64::INFINITY, f64::min);
    vec![CriterionReport::at_most(8, "rewrite_spread", 4, CONFIGS, spread, 1e-9)]
}

/// Criterion 9: known spectra `U D U*`, adjoint pairing, trace and determinant.
pub fn check_solver(seed: u64) -> Vec<CriterionReport> {
    let root = criterion_stream(seed, 9);
    let mut rows = Vec::new();

    let mut worst_rec: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let sizes = [5, 20, 60, 120, 200];
    for (k, &n) in sizes.iter().enumerate() {
        let mut rng = root.child(k as u64);
        let d: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.normal(), rng.normal())).collect();
        let u = random_unitary(n, &mut rng);
        let m = &(&u * &ComplexMatrix::from_diagonal(&d)) * &u.adjoint();
        let norm = m.frobenius_norm();
        match eigenvalues(&m) {
            Ok(e) => {
                worst_rec = worst_rec.max(matching_distance(&e, &d) / norm);
                let tr: Complex64 = e.iter().sum();
                worst_trace = worst_trace.max((tr - m.trace()).norm() / (norm * n as f64));
            }
            Err(e) => rows.push(CriterionReport::failed(9, &format!("unitary_similarity_n{n}"), &e)),
        }
    }
    rows.push(CriterionReport::at_most(9, "known_spectrum_recovery", 200, sizes.len(), worst_rec, 1e-8));
    rows.push(CriterionReport::at_most(9, "trace_identity", 200, sizes.len(), worst_trace, 1e-9));

    let mut worst_pair: f64 = 0.0;
    let mut worst_det: f64 = 0.0;
    for (k, &n) in [2usize, 5, 10].iter().enumerate() {
        let mut rng = root.child(100 + k as u64);
        let a = match sample_ginibre_quaternion_with(n, &mut rng) {
            Ok(a) => a,
            Err(e) => return vec![CriterionReport::failed(9, "ginibre_sample", &e)],
        };
        let adj = crate::matrix_model::complex_adjoint(&a);
        match eigenvalues(adj.matrix()).and_then(|e| crate::eig::pair_spectrum(&e).map(|s| (e, s))) {
            Ok((e, s)) => {
                let scale = e.iter().map(|z| z.norm()).fold(1.0, f64::max);
                worst_pair = worst_pair.max(s.pairing_residual / scale);
                let prod: Complex64 = e.iter().product();
                let det = adj.matrix().determinant();
                worst_det = worst_det.max((prod - det).norm() / det.norm());
            }
            Err(e) => rows.push(CriterionReport::failed(9, &format!("adjoint_n{n}"), &e)),
        }
    }
    for (k, &n) in [50usize, 100].iter().enumerate() {
        let mut rng = root.child(200 + k as u64);
        match sample_ginibre_quaternion_with(n, &mut rng).and_then(|a| right_spectrum(&a)) {
            Ok(s) => {
                let scale = s.all_eigs.iter().map(|z| z.norm()).fold(1.0, f64::max);
                worst_pair = worst_pair.max(s.pairing_residual / scale);
            }
            Err(e) => rows.push(CriterionReport::failed(9, &format!("adjoint_n{n}"), &e)),
        }
    }
    rows.push(CriterionReport::at_most(9, "adjoint_pairing_residual", 100, 5, worst_pair, 1e-8));
    rows.push(CriterionReport::at_most(9, "determinant_identity", 20, 3, worst_det, 1e-7));
    rows
}

/// Criterion 10: fraction of 200 trials with `|stat| <= 5/√n` at `n = 10⁴`.
pub fn check_independence(seed: u64) -> Vec<CriterionReport> {
    const TRIALS: usize = 200;
    const N: usize = 10_000;
    let root = criterion_stream(seed, 10);
    let clamp = |x: f64| x.clamp(-1.0, 1.0);
    let hits: Result<Vec<bool>> = (0..TRIALS)
        .into_par_iter()
        .map(|t| {
            let (mut a, mut b) = (root.child(2 * t as u64), root.child(2 * t as u64 + 1));
            let xs: Vec<f64> = (0..N).map(|_| a.normal()).collect();
            let ys: Vec<f64> = (0..N).map(|_| b.normal()).collect();
            Ok(product_independence_stat(&xs, &ys, clamp, clamp)?.abs() <= 5.0 / (N as f64).sqrt())
        })
        .collect();
    match hits {
        Ok(h) => {
            let frac = h.iter().filter(|&&x| x).count() as f64 / TRIALS as f64;
            vec![CriterionReport::at_least(10, "bounded_fraction", N, TRIALS, frac, 0.99)]
        }
        Err(e) => vec![CriterionReport::failed(10, "bounded_fraction", &e)],
    }
}

/// CDF of `|z|` under the `n = 1` target, radial density `∝ r³ e^{-2r²}`,
/// by quadrature.
pub fn single_pair_radial_cdf(r: f64) -> f64 {
    let f = |s: f64| s.powi(3) * (-2.0 * s * s).exp();
    let upper = 12.0;
    if r <= 0.0 {
        return 0.0;
    }
    let total = integrate(f, 0.0, upper, 1e-14).map(|q| q.value).unwrap_or(f64::NAN);
    let part = integrate(f, 0.0, r.min(upper), 1e-14).map(|q| q.value).unwrap_or(f64::NAN);
    part / total
}

/// Criterion 11: Metropolis chains for `n = 1` (radial law) and `n = 16`
/// (mean energy).
pub fn check_mcmc(seed: u64) -> Vec<CriterionReport> {
    let root = criterion_stream(seed, 11);
    let v = Potential::Canonical;
    let mut rows = Vec::new();

    let mut cfg = McmcConfig::new(1, 400_000);
    cfg.thin = 10;
    match mcmc_run(&cfg, &v, &mut root.child(0)) {
        Ok(run) => {
            let radii: Vec<f64> = run.states.iter().map(|s| s.points()[0].norm()).collect();
            rows.push(report_ks(11, "single_pair_radial_ks", 1, 1, ks_statistic(&radii, single_pair_radial_cdf), 0.05));
        }
        Err(e) => rows.push(CriterionReport::failed(11, "single_pair_radial_ks", &e)),
    }

    let mut cfg = McmcConfig::new(16, 1_000_000);
    cfg.thin = 100;
    match mcmc_run(&cfg, &v, &mut root.child(1)) {
        Ok(run) => {
            rows.push(CriterionReport::at_most(11, "n16_mean_energy_deviation", 16, 1, (run.mean_energy() - 0.75).abs(), 0.1))
        }
        Err(e) => rows.push(CriterionReport::failed(11, "n16_mean_energy_deviation", &e)),
    }
    rows
}

/// Runs the selected criteria (all when `only` is empty) in increasing
/// order. The Ginibre spectra are sampled once when any of 3, 4, 5 is selected.
pub fn run_criteria(only: &[u8], seed: u64) -> Vec<CriterionReport> {
    let selected = |c: u8| only.is_empty() || only.contains(&c);
    let spectra = if [3, 4, 5].iter().any(|&c| selected(c)) {
        Some(ginibre_spectra(GINIBRE_N, GINIBRE_REPLICAS, spectra_seed(seed)))
    } else {
        None
    };
    let mut rows = Vec::new();
    for c in 1..=11u8 {
        if !selected(c) {
            continue;
        }
        let part = match c {
            1 => check_potentials(seed),
            2 => check_equilibrium(),
            6 => check_orbit(seed),
            7 => check_refutation(),
            8 => check_rewrite(seed),
            9 => check_solver(seed),
            10 => check_independence(seed),
            11 => check_mcmc(seed),
            _ => match spectra.as_ref().expect("spectra sampled") {
                Ok(s) => match c {
                    3 => check_circular(s),
                    4 => check_energy(s),
                    _ => check_quaternion(s, seed),
                },
                Err(e) => vec![CriterionReport::failed(c, "ginibre_spectra", e)],
            },
        };
        rows.extend(part);
    }
    rows
}

/// `(criterion, all rows passed)` in increasing criterion order.
pub fn summarize(rows: &[CriterionReport]) -> Vec<(u8, bool)> {
    let mut out: Vec<(u8, bool)> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|(c, _)| *c == r.criterion) {
            Some(entry) => entry.1 &= r.pass,
            None => out.push((r.criterion, r.pass)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parsing() {
        assert_eq!(parse_selection("potentials").unwrap(), vec![1]);
        assert_eq!(parse_selection("mcmc, 3,circular").unwrap(), vec![3, 11]);
        assert!(parse_selection("nonsense").is_err());
        assert!(parse_selection("12").is_err());
    }

    #[test]
    fn report_comparisons() {
        assert!(CriterionReport::at_most(1, "x", 1, 1, 0.1, 0.1).pass);
        assert!(!CriterionReport::at_least(1, "x", 1, 1, 0.98, 0.99).pass);
        assert!(!CriterionReport::above(1, "x", 1, 1, 0.0, 0.0).pass);
        assert!(!CriterionReport::at_most(1, "x", 1, 1, f64::NAN, 1.0).pass);
    }

    #[test]
    fn summary_groups_rows() {
        let rows = vec![
            CriterionReport::at_most(3, "a", 1, 1, 0.0, 1.0),
            CriterionReport::at_most(3, "b", 1, 1, 2.0, 1.0),
            CriterionReport::at_most(7, "c", 1, 1, 0.0, 1.0),
        ];
        assert_eq!(summarize(&rows), vec![(3, false), (7, true)]);
    }

    #[test]
    fn single_pair_cdf_is_a_cdf() {
        assert_eq!(single_pair_radial_cdf(0.0), 0.0);
        assert!((single_pair_radial_cdf(20.0) - 1.0).abs() < 1e-12);
        // closed form: 1 - (1 + 2r²) e^{-2r²}
        for r in [0.2, 0.5, 1.0, 1.7] {
            let exact = 1.0 - (1.0 + 2.0 * r * r) * (-2.0 * r * r as f64).exp();
            assert!((single_pair_radial_cdf(r) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn small_spectra_pool() {
        let s = ginibre_spectra(8, 3, 1).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|x| x.all_eigs.len() == 16));
        assert!(check_circular(&s).iter().all(|r| r.measured.is_finite()));
    }
}
