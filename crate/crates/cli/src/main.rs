use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::{error, info};
use rayon::prelude::*;
use serde::Serialize;

use quatgin_core::loggas::{empirical_energy, mcmc_run, McmcConfig, McmcSummary, Potential};
use quatgin_core::potential_theory::{
    circle_log_integral, potential_nu, potential_uniform_disk, quad_potential, quad_potential_disk,
    CircleMeasureDensity,
};
use quatgin_core::spectral_stats::{
    class_weighted_measure, disk_radial_cdf, ks_statistic, ks_two_sample_weighted, sample_classes,
    sample_uniform_ball4, semicircle_cdf, uniform_angle_cdf, Atoms, EmpiricalMeasure, KsReport,
};
use quatgin_core::verify::{self, CriterionReport};
use quatgin_core::{sample_spectra, Complex64, RandomStream, SpectrumSample};

#[derive(Parser, Debug)]
#[command(name = "quatgin", version, about = "Quaternionic Ginibre spectra, log-gas sampling and potentials")]
struct Cli {
    /// Master seed; every replica and chain uses a child stream of it.
    #[arg(long, global = true, env = "QG_SEED", default_value_t = verify::DEFAULT_SEED)]
    seed: u64,

    /// Output directory.
    #[arg(long, global = true, default_value = "quatgin-out")]
    out: PathBuf,

    /// Worker threads for replica-level parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample right spectra of X(n); writes spectrum.csv and summary.json.
    Spectrum {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        replicas: usize,
        /// `canonical` or `a,b,c`.
        #[arg(long, default_value = "canonical")]
        potential: String,
    },
    /// Metropolis chains for the log-gas; writes trace.csv and summary.json.
    Mcmc {
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Independent chains.
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        #[arg(long, default_value = "canonical")]
        potential: String,
        /// Steps after burn-in.
        #[arg(long, default_value_t = 200_000)]
        steps: usize,
        #[arg(long, default_value_t = 100_000)]
        burnin: usize,
        /// Proposal standard deviation (default 1/sqrt(n)).
        #[arg(long)]
        scale: Option<f64>,
        /// Record every `thin`-th state for the energy average.
        #[arg(long, default_value_t = 1)]
        thin: usize,
    },
    /// Closed-form potential against quadrature on a square grid; writes potential.csv.
    PotentialTable {
        #[arg(long, value_enum, default_value = "nu")]
        measure: Measure,
        /// Points per side.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Half-width of the square.
        #[arg(long, default_value_t = 2.0)]
        extent: f64,
    },
    /// Sample one element of each similarity class; writes classes.csv and report.json.
    Classes {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        /// Weight classes by 4πr² instead of uniformly.
        #[arg(long)]
        weighted: bool,
    },
    /// Run the acceptance criteria; writes verify.json and exits 1 on failure.
    Verify {
        /// Comma-separated groups or criterion numbers (default: all).
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Measure {
    /// Uniform measure on the unit disk.
    Disk,
    /// Haar measure on the unit circle.
    Circle,
    /// 2 sin²θ dθ/2π on the unit circle.
    Nu,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SpectrumSummary {
    n: usize,
    replicas: usize,
    seed: u64,
    #[serde(rename = "V")]
    v: String,
    failed_replicas: Vec<usize>,
    empirical_energy: Vec<f64>,
    mean_energy: f64,
    max_pairing_residual: f64,
    ks: Vec<KsReport>,
}

fn cmd_spectrum(cli: &Cli, n: usize, replicas: usize, potential: &str) -> Result<()> {
    let v = Potential::parse(potential)?;
    if n == 0 || replicas == 0 {
        bail!("--n and --replicas must be at least 1");
    }
    let results = sample_spectra(n, replicas, cli.seed);
    let mut failed = Vec::new();
    let mut spectra: Vec<SpectrumSample> = Vec::new();
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(s) => spectra.push(s),
            Err(e) => {
                error!("replica {r} failed: {e}");
                failed.push(r);
            }
        }
    }
    if spectra.is_empty() {
        bail!("all {replicas} replicas failed");
    }
    let total = spectra.len() * 2 * n;
    let mut w = create(&cli.out, "spectrum.csv")?;
    writeln!(w, "re,im,weight")?;
    let weight = 1.0 / total as f64;
    for s in &spectra {
        for z in &s.all_eigs {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", z.re, z.im, weight)?;
        }
    }
    w.flush()?;

    let energies: Vec<f64> = spectra.iter().map(|s| empirical_energy(s, &v)).collect::<Result<_, _>>()?;
    let eigs: Vec<Complex64> = spectra.iter().flat_map(|s| s.all_eigs.iter().copied()).collect();
    let radii: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
    let args: Vec<f64> = eigs.iter().map(|z| z.arg()).collect();
    let reps = spectra.len();
    let summary = SpectrumSummary {
        n,
        replicas,
        seed: cli.seed,
        v: v.to_string(),
        failed_replicas: failed,
        mean_energy: energies.iter().sum::<f64>() / energies.len() as f64,
        empirical_energy: energies,
        max_pairing_residual: spectra.iter().map(|s| s.pairing_residual).fold(0.0, f64::max),
        ks: vec![
            KsReport::new("radial_vs_r2", n, reps, ks_statistic(&radii, disk_radial_cdf)?, 0.03),
            KsReport::new("argument_vs_uniform", n, reps, ks_statistic(&args, uniform_angle_cdf)?, 0.03),
        ],
    };
    write_json(&cli.out, "summary.json", &summary)?;
    info!("wrote {total} eigenvalues, mean energy {:.6}", summary.mean_energy);
    Ok(())
}

#[derive(Serialize)]
struct McmcOutput {
    #[serde(flatten)]
    summary: McmcSummary,
    chains: usize,
    burnin: usize,
    proposal_scale: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_mcmc(
    cli: &Cli,
    n: usize,
    replicas: usize,
    potential: &str,
    steps: usize,
    burnin: usize,
    scale: Option<f64>,
    thin: usize,
) -> Result<()> {
    let v = Potential::parse(potential)?;
    if replicas == 0 {
        bail!("--replicas must be at least 1");
    }
    let cfg = McmcConfig { n, steps, burnin, proposal_scale: scale, thin, record_trace: true };
    let root = RandomStream::new(cli.seed);
    let runs = (0..replicas)
        .into_par_iter()
        .map(|k| mcmc_run(&cfg, &v, &mut root.child(k as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    for (k, run) in runs.iter().enumerate() {
        let name = if replicas == 1 { "trace.csv".to_string() } else { format!("trace_{k}.csv") };
        let mut w = create(&cli.out, &name)?;
        run.write_trace_csv(&mut w)?;
        w.flush()?;
    }
    let mut summary = McmcSummary::new(&cfg, &v, &runs[0]);
    summary.acceptance_rate = runs.iter().map(|r| r.acceptance_rate()).sum::<f64>() / replicas as f64;
    summary.mean_energy = runs.iter().map(|r| r.mean_energy()).sum::<f64>() / replicas as f64;
    let out = McmcOutput { summary, chains: replicas, burnin, proposal_scale: cfg.scale() };
    write_json(&cli.out, "summary.json", &out)?;
    info!("acceptance {:.3}, mean energy {:.6}", out.summary.acceptance_rate, out.summary.mean_energy);
    Ok(())
}

const NEAR_CIRCLE: f64 = 1e-3;

fn cmd_potential_table(cli: &Cli, measure: Measure, grid: usize, extent: f64) -> Result<()> {
    if grid < 2 || !(extent > 0.0) {
        bail!("--grid must be at least 2 and --extent positive");
    }
    let step = 2.0 * extent / (grid - 1) as f64;
    let points: Vec<Complex64> = (0..grid)
        .flat_map(|i| (0..grid).map(move |j| Complex64::new(-extent + j as f64 * step, -extent + i as f64 * step)))
        .collect();
    let sigma = CircleMeasureDensity::uniform();
    let nu = CircleMeasureDensity::nu();
    let rows = points
        .par_iter()
        .map(|&x| {
            let tol = if (x.norm() - 1.0).abs() < NEAR_CIRCLE { 1e-7 } else { 1e-10 };
            let (closed, quad) = match measure {
                Measure::Disk => (potential_uniform_disk(x), quad_potential_disk(x, tol)?),
                Measure::Circle => (-circle_log_integral(x, 1.0)? / (2.0 * std::f64::consts::PI), quad_potential(&sigma, x, tol)?),
                Measure::Nu => (potential_nu(x), quad_potential(&nu, x, tol)?),
            };
            Ok((x, closed, quad))
        })
        .collect::<Result<Vec<_>, quatgin_core::Error>>()?;
    let mut w = create(&cli.out, "potential.csv")?;
    writeln!(w, "re,im,U_closed,U_quad,abs_err")?;
    let mut worst: f64 = 0.0;
    for (x, closed, quad) in rows {
        let err = (closed - quad).abs();
        worst = worst.max(err);
        writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", x.re, x.im, closed, quad, err)?;
    }
    w.flush()?;
    info!("{} rows, max abs_err {worst:e}", grid * grid);
    Ok(())
}

#[derive(Serialize)]
struct ClassesReport {
    n: usize,
    replicas: usize,
    seed: u64,
    weighted: bool,
    max_canonical_defect: f64,
    ks: Vec<KsReport>,
}

fn cmd_classes(cli: &Cli, n: usize, replicas: usize, weighted: bool) -> Result<()> {
    if n == 0 || replicas == 0 {
        bail!("--n and --replicas must be at least 1");
    }
    let spectra = verify::ginibre_spectra(n, replicas, cli.seed)?;
    let root = RandomStream::new(cli.seed).child(u64::MAX);
    let samples: Vec<_> = spectra.iter().enumerate().map(|(i, s)| sample_classes(s, &mut root.child(i as u64))).collect();
    let pooled = quatgin_core::ClassSample {
        reps: samples.iter().flat_map(|c| c.reps.iter().copied()).collect(),
        units: samples.iter().flat_map(|c| c.units.iter().copied()).collect(),
        classes: samples.iter().flat_map(|c| c.classes.iter().copied()).collect(),
        radii: samples.iter().flat_map(|c| c.radii.iter().copied()).collect(),
    };
    let measure = if weighted {
        class_weighted_measure(&pooled)?
    } else {
        EmpiricalMeasure::uniform(Atoms::Quaternion(pooled.classes.clone()))?
    };
    let mut w = create(&cli.out, "classes.csv")?;
    measure.write_csv(&mut w)?;
    w.flush()?;

    let ks = if weighted {
        let oracle: Vec<f64> = sample_uniform_ball4(&mut root.child(u64::MAX - 1), verify::BALL_ORACLE_SAMPLES)
            .iter()
            .map(|q| q.norm())
            .collect();
        let d = ks_two_sample_weighted(&measure.marginal(|q| q.norm()), measure.weights(), &oracle)?;
        vec![KsReport::new("weighted_modulus_vs_ball4", n, replicas, d, 0.05)]
    } else {
        vec![
            KsReport::new("real_part_vs_semicircle", n, replicas, measure.ks_marginal(|q| q.re(), semicircle_cdf)?, 0.03),
            KsReport::new("modulus_vs_r2", n, replicas, measure.ks_marginal(|q| q.norm(), disk_radial_cdf)?, 0.03),
        ]
    };
    let report = ClassesReport {
        n,
        replicas,
        seed: cli.seed,
        weighted,
        max_canonical_defect: samples.iter().map(|c| c.canonical_defect()).fold(0.0, f64::max),
        ks,
    };
    write_json(&cli.out, "report.json", &report)?;
    Ok(())
}

fn cmd_verify(cli: &Cli, only: Option<&str>) -> Result<bool> {
    let selection = match only {
        Some(s) => verify::parse_selection(s)?,
        None => Vec::new(),
    };
    let rows: Vec<CriterionReport> = verify::run_criteria(&selection, cli.seed);
    write_json(&cli.out, "verify.json", &rows)?;
    let mut all = true;
    for (c, pass) in verify::summarize(&rows) {
        println!("criterion {c:>2}: {}", if pass { "PASS" } else { "FAIL" });
        all &= pass;
    }
    Ok(all)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global()?;
    }
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    match &cli.command {
        Command::Spectrum { n, replicas, potential } => cmd_spectrum(cli, *n, *replicas, potential)?,
        Command::Mcmc { n, replicas, potential, steps, burnin, scale, thin } => {
            cmd_mcmc(cli, *n, *replicas, potential, *steps, *burnin, *scale, *thin)?
        }
        Command::PotentialTable { measure, grid, extent } => cmd_potential_table(cli, *measure, *grid, *extent)?,
        Command::Classes { n, replicas, weighted } => cmd_classes(cli, *n, *replicas, *weighted)?,
        Command::Verify { only } => return cmd_verify(cli, only.as_deref()),
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            error!("{e:#}");
            ExitCode::from(2)
        }
    }
}
