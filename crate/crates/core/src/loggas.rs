//! The conjugate-symmetric log-gas `P_n^V` on `2n` points of ℂ.
//!
//! A configuration is stored as `n` points `z_1..z_n` in the open upper
//! half-plane; the remaining `n` points are their conjugates. Writing
//!
//! ```text
//! P(i, j) = log|z_i - z_j|^-1 + log|z_i - conj z_j|^-1,   S(i) = log|z_i - conj z_i|^-1
//! ```
//!
//! the energy over all ordered pairs of the `2n` points is
//! `K_n = 4 Σ_{i<j} P(i, j) + 2 Σ_i S(i) + 2(2n - 1) Σ_i V(z_i)` and the
//! unnormalized log-density is `-2 Σ_{i<j} P(i, j) - 2 Σ_i S(i) - 2n Σ_i V(z_i)`.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use log::warn;
use num_complex::Complex64;
use serde::Serialize;

use crate::eig::SpectrumSample;
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Points closer than this (or closer to the real axis) are treated as
/// coincident when building a gas from eigenvalues.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-14;
/// Size of the shift applied to coincident eigenvalues.
pub const COINCIDENCE_PERTURBATION: f64 = 1e-12;
/// Steps between full recomputations of the cached energy in [`mcmc_run`].
pub const REVALIDATE_EVERY: usize = 10_000;
/// Allowed drift of the cached energy at a revalidation.
pub const REVALIDATE_TOLERANCE: f64 = 1e-6;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

type PotentialFn = dyn Fn(Complex64) -> f64 + Send + Sync;

/// External potential `V: ℂ → ℝ`, invariant under conjugation.
#[derive(Clone)]
pub enum Potential {
    /// `V(z) = |z|²`.
    Canonical,
    /// `V(x + iy) = x²(a + c) + y²(c - a) + xy(c - 2b)`.
    Quadratic { a: f64, b: f64, c: f64 },
    Custom { name: String, f: Arc<PotentialFn> },
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential({self})")
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Canonical => write!(f, "canonical"),
            Potential::Quadratic { a, b, c } => write!(f, "quadratic({a},{b},{c})"),
            Potential::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

impl Serialize for Potential {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn symmetry_grid() -> impl Iterator<Item = Complex64> {
    (1..=12).flat_map(|k| {
        let r = 0.25 * k as f64;
        (0..16).map(move |m| Complex64::from_polar(r, (m as f64 + 0.3) * std::f64::consts::PI / 16.0))
    })
}

/// Outcome of the grid admissibility check of [`Potential::check_admissible`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Admissibility {
    /// Smallest value of `V` seen on the grid.
    pub min_value: f64,
    /// Smallest grid radius from which `V >= (δ+1) log(|z|²+1)` holds at every
    /// larger grid radius.
    pub r0: Option<f64>,
    pub admissible: bool,
}

impl Potential {
    /// Quadratic potential; only `c = 2b` gives a conjugate-invariant `V`.
    pub fn quadratic(a: f64, b: f64, c: f64) -> Result<Self> {
        if ![a, b, c].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = c - 2.0 * b;
        if defect.abs() > SYMMETRY_TOLERANCE * (1.0 + c.abs().max(b.abs())) {
            return Err(Error::NotConjugateInvariant(defect));
        }
        Ok(Potential::Quadratic { a, b, c })
    }

    /// Wraps an arbitrary function after checking `V(z) = V(conj z)` on a grid.
    pub fn custom(name: &str, f: impl Fn(Complex64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        for z in symmetry_grid() {
            let (u, v) = (f(z), f(z.conj()));
            if (u - v).abs() > SYMMETRY_TOLERANCE * (1.0 + u.abs()) {
                return Err(Error::NotConjugateInvariant(u - v));
            }
        }
        Ok(Potential::Custom { name: name.to_string(), f: Arc::new(f) })
    }

    /// Parses `canonical` or `a,b,c`.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim() == "canonical" {
            return Ok(Potential::Canonical);
        }
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("potential '{s}': {e}")))?;
        match parts.as_slice() {
            [a, b, c] => Potential::quadratic(*a, *b, *c),
            _ => Err(Error::InvalidArgument(format!("potential '{s}': expected 'canonical' or a,b,c"))),
        }
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        match self {
            Potential::Canonical => z.norm_sqr(),
            Potential::Quadratic { a, b, c } => {
                let (x, y) = (z.re, z.im);
                x * x * (a + c) + y * y * (c - a) + x * y * (c - 2.0 * b)
            }
            Potential::Custom { f, .. } => f(z),
        }
    }

    /// `H(z) = V(z) - log(|z|² + 1)`.
    pub fn h(&self, z: Complex64) -> f64 {
        self.eval(z) - (z.norm_sqr() + 1.0).ln()
    }

    /// Grid check of `V >= 0` and of the growth bound
    /// `V(z) >= (δ+1) log(|z|²+1)` on radii `10^0..10^6` (100 log-spaced
    /// values, 16 angles each, plus the unit disk). The bound must hold from
    /// some `R₀ <= 10^5` on.
    pub fn check_admissible(&self, delta: f64) -> Admissibility {
        const RADII: usize = 100;
        const ANGLES: usize = 16;
        let angle = |m: usize| 2.0 * std::f64::consts::PI * (m as f64 + 0.5) / ANGLES as f64;
        let mut min_value = f64::INFINITY;
        for k in 0..=20 {
            for m in 0..ANGLES {
                min_value = min_value.min(self.eval(Complex64::from_polar(k as f64 / 20.0, angle(m))));
            }
        }
        let mut r0 = None;
        for k in 0..RADII {
            let r = 10f64.powf(6.0 * k as f64 / (RADII - 1) as f64);
            let bound = (delta + 1.0) * (r * r + 1.0).ln();
            let mut ok = true;
            for m in 0..ANGLES {
                let v = self.eval(Complex64::from_polar(r, angle(m)));
                min_value = min_value.min(v);
                ok &= v >= bound;
            }
            match (ok, r0) {
                (true, None) => r0 = Some(r),
                (false, _) => r0 = None,
                _ => {}
            }
        }
        let admissible = delta > 0.0 && min_value >= 0.0 && r0.is_some_and(|r| r <= 1e5);
        Admissibility { min_value, r0, admissible }
    }
}

/// `k(x, y) = log|x - y|^-1 + (V(x) + V(y)) / 2`; `+∞` when `x = y`.
pub fn kernel_k(x: Complex64, y: Complex64, v: &Potential) -> f64 {
    if x == y {
        return f64::INFINITY;
    }
    -(x - y).norm().ln() + 0.5 * (v.eval(x) + v.eval(y))
}

/// `min(k(x, y), l)`.
pub fn kernel_k_trunc(x: Complex64, y: Complex64, v: &Potential, l: f64) -> f64 {
    kernel_k(x, y, v).min(l)
}

fn pair_term(a: Complex64, b: Complex64) -> f64 {
    -0.5 * ((a - b).norm_sqr().ln() + (a - b.conj()).norm_sqr().ln())
}

fn self_term(a: Complex64) -> f64 {
    -(2.0 * a.im).ln()
}

/// `n` upper-half-plane points with cached energy sums.
#[derive(Clone, Debug, PartialEq)]
pub struct GasState {
    points: Vec<Complex64>,
    pair_sum: f64,
    self_sum: f64,
    v_sum: f64,
}

impl GasState {
    /// Validates the points (finite, `Im > 0`, pairwise distinct).
    pub fn new(points: Vec<Complex64>, v: &Potential) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyDimension);
        }
        for (i, z) in points.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            if !(z.im > 0.0) {
                return Err(Error::NotUpperHalfPlane(i));
            }
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(Error::CoincidentPoints(j, i));
                }
            }
        }
        let mut s = Self { points, pair_sum: 0.0, self_sum: 0.0, v_sum: 0.0 };
        s.refresh(v);
        Ok(s)
    }

    /// Gas from the upper representatives of a paired spectrum. Points within
    /// `1e-14` of the real axis or of an earlier point are moved by `1e-12`,
    /// with a warning.
    pub fn from_spectrum(sample: &SpectrumSample, v: &Potential) -> Result<Self> {
        let mut pts: Vec<Complex64> = Vec::with_capacity(sample.upper.len());
        let mut moved = 0usize;
        for &z in &sample.upper {
            let mut z = z;
            if z.im < COINCIDENCE_TOLERANCE {
                z.im += COINCIDENCE_PERTURBATION;
                moved += 1;
            }
            while pts.iter().any(|p| (p - z).norm() < COINCIDENCE_TOLERANCE) {
                z.im += COINCIDENCE_PERTURBATION;
                moved += 1;
            }
            pts.push(z);
        }
        if moved > 0 {
            warn!("perturbed {moved} coincident or real eigenvalues by {COINCIDENCE_PERTURBATION:e}");
        }
        Self::new(pts, v)
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// The full `2n`-point configuration, `points` followed by their conjugates.
    pub fn full_points(&self) -> Vec<Complex64> {
        self.points.iter().copied().chain(self.points.iter().map(|z| z.conj())).collect()
    }

    /// Recomputes the cached sums from scratch.
    pub fn refresh(&mut self, v: &Potential) {
        let (pair, selfs, vs) = full_sums(&self.points, v);
        self.pair_sum = pair;
        self.self_sum = selfs;
        self.v_sum = vs;
    }

    /// Energy `K_n` from the cached sums.
    pub fn energy(&self) -> f64 {
        let n = self.n() as f64;
        4.0 * self.pair_sum + 2.0 * self.self_sum + 2.0 * (2.0 * n - 1.0) * self.v_sum
    }

    /// Unnormalized log-density from the cached sums.
    pub fn log_density(&self) -> f64 {
        -2.0 * self.pair_sum - 2.0 * self.self_sum - 2.0 * self.n() as f64 * self.v_sum
    }

    /// Change in log-density if point `k` moved to `z`; `-∞` if `Im z <= 0`.
    pub fn log_ratio(&self, k: usize, z: Complex64, v: &Potential) -> f64 {
        match self.move_delta(k, z, v) {
            Some((dp, ds, dv)) => -2.0 * dp - 2.0 * ds - 2.0 * self.n() as f64 * dv,
            None => f64::NEG_INFINITY,
        }
    }

    fn move_delta(&self, k: usize, z: Complex64, v: &Potential) -> Option<(f64, f64, f64)> {
        if !(z.im > 0.0) {
            return None;
        }
        let old = self.points[k];
        let mut dp = 0.0;
        for (j, &p) in self.points.iter().enumerate() {
            if j != k {
                dp += pair_term(z, p) - pair_term(old, p);
            }
        }
        Some((dp, self_term(z) - self_term(old), v.eval(z) - v.eval(old)))
    }

    /// Moves point `k` to `z`, updating the cached sums in `O(n)`.
    pub fn apply_move(&mut self, k: usize, z: Complex64, v: &Potential) -> Result<()> {
        let (dp, ds, dv) = self.move_delta(k, z, v).ok_or(Error::NotUpperHalfPlane(k))?;
        self.points[k] = z;
        self.pair_sum += dp;
        self.self_sum += ds;
        self.v_sum += dv;
        Ok(())
    }
}

fn full_sums(points: &[Complex64], v: &Potential) -> (f64, f64, f64) {
    let mut pair = 0.0;
    for i in 0..points.len() {
        for j in 0..i {
            pair += pair_term(points[i], points[j]);
        }
    }
    let selfs = points.iter().map(|&z| self_term(z)).sum();
    let vs = points.iter().map(|&z| v.eval(z)).sum();
    (pair, selfs, vs)
}

/// `K_n` recomputed from scratch.
pub fn energy_kn(state: &GasState, v: &Potential) -> f64 {
    let mut s = state.clone();
    s.refresh(v);
    s.energy()
}

/// `Σ_{i≠j} min(k(z_i, z_j), l)` over ordered pairs of the `2n` points.
pub fn energy_kn_trunc(state: &GasState, v: &Potential, l: f64) -> f64 {
    let pts = state.full_points();
    let mut total = 0.0;
    for i in 0..pts.len() {
        for j in 0..i {
            total += 2.0 * kernel_k_trunc(pts[i], pts[j], v, l);
        }
    }
    total
}

/// Unnormalized log-density
/// `-(K_n + Σ V(z_i) + Σ log|z_i - conj z_i|^-1) / 2` over all `2n` points.
pub fn log_density_unnorm(state: &GasState, v: &Potential) -> f64 {
    let mut s = state.clone();
    s.refresh(v);
    s.log_density()
}

/// `K_n / (4n²)` of the paired spectrum.
pub fn empirical_energy(sample: &SpectrumSample, v: &Potential) -> Result<f64> {
    let state = GasState::from_spectrum(sample, v)?;
    let n = state.n() as f64;
    Ok(state.energy() / (4.0 * n * n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct McmcConfig {
    pub n: usize,
    /// Recorded steps after burn-in.
    pub steps: usize,
    pub burnin: usize,
    /// Gaussian proposal standard deviation per coordinate; `None` means `1/√n`.
    pub proposal_scale: Option<f64>,
    /// Keep every `thin`-th post-burn-in state.
    pub thin: usize,
    pub record_trace: bool,
}

impl McmcConfig {
    pub fn new(n: usize, steps: usize) -> Self {
        Self { n, steps, burnin: 100_000, proposal_scale: None, thin: 1, record_trace: false }
    }

    pub fn scale(&self) -> f64 {
        self.proposal_scale.unwrap_or(1.0 / (self.n as f64).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub point_index: usize,
    pub re: f64,
    pub im: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct McmcRun {
    /// States after burn-in, every `thin` steps.
    pub states: Vec<GasState>,
    /// `K_n / (4n²)` of each recorded state.
    pub energies: Vec<f64>,
    /// One row per post-burn-in proposal (when requested).
    pub trace: Vec<TraceRow>,
    pub accepted: usize,
    pub proposed: usize,
    /// Largest cache drift seen at a revalidation.
    pub max_drift: f64,
}

impl McmcRun {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn mean_energy(&self) -> f64 {
        self.energies.iter().sum::<f64>() / self.energies.len().max(1) as f64
    }

    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "step,point_index,re,im,accepted")?;
        for r in &self.trace {
            writeln!(out, "{},{},{:.16e},{:.16e},{}", r.step, r.point_index, r.re, r.im, u8::from(r.accepted))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McmcSummary {
    pub n: usize,
    #[serde(rename = "V")]
    pub v: String,
    pub steps: usize,
    pub acceptance_rate: f64,
    pub mean_energy: f64,
}

impl McmcSummary {
    pub fn new(cfg: &McmcConfig, v: &Potential, run: &McmcRun) -> Self {
        Self {
            n: cfg.n,
            v: v.to_string(),
            steps: cfg.steps,
            acceptance_rate: run.acceptance_rate(),
            mean_energy: run.mean_energy(),
        }
    }
}

/// Random start: `n` points uniform in the upper half of the unit disk.
pub fn initial_state(n: usize, v: &Potential, rng: &mut RandomStream) -> Result<GasState> {
    let pts = (0..n)
        .map(|_| {
            let r = rng.uniform().sqrt();
            let t = std::f64::consts::PI * (0.01 + 0.98 * rng.uniform());
            Complex64::from_polar(r.max(1e-3), t)
        })
        .collect();
    GasState::new(pts, v)
}

/// Single-point random-walk Metropolis chain targeting `P_n^V`.
pub fn mcmc_run(cfg: &McmcConfig, v: &Potential, rng: &mut RandomStream) -> Result<McmcRun> {
    if cfg.n == 0 {
        return Err(Error::EmptyDimension);
    }
    if cfg.steps == 0 || cfg.thin == 0 {
        return Err(Error::InvalidArgument("steps and thin must be at least 1".into()));
    }
    let scale = cfg.scale();
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("proposal scale {scale}")));
    }
    let mut state = initial_state(cfg.n, v, rng)?;
    let norm = 4.0 * (cfg.n * cfg.n) as f64;
    let mut run = McmcRun {
        states: Vec::new(),
        energies: Vec::new(),
        trace: Vec::new(),
        accepted: 0,
        proposed: 0,
        max_drift: 0.0,
    };
    for step in 0..cfg.burnin + cfg.steps {
        let k = (rng.next_u64() % cfg.n as u64) as usize;
        let old = state.points[k];
        let z = old + Complex64::new(scale * rng.normal(), scale * rng.normal());
        let lr = state.log_ratio(k, z, v);
        let u = rng.uniform();
        let accepted = lr >= 0.0 || u < lr.exp();
        if accepted && z != old {
            state.apply_move(k, z, v)?;
        }
        if (step + 1) % REVALIDATE_EVERY == 0 {
            let cached = state.energy();
            state.refresh(v);
            let drift = (cached - state.energy()).abs();
            run.max_drift = run.max_drift.max(drift);
            if drift > REVALIDATE_TOLERANCE {
                warn!("cached energy drifted by {drift:e} at step {step}");
            }
        }
        if step >= cfg.burnin {
            let post = step - cfg.burnin;
            run.proposed += 1;
            run.accepted += usize::from(accepted);
            if cfg.record_trace {
                let p = state.points[k];
                run.trace.push(TraceRow { step: post, point_index: k, re: p.re, im: p.im, accepted });
            }
            if (post + 1) % cfg.thin == 0 {
                run.energies.push(state.energy() / norm);
                run.states.push(state.clone());
            }
        }
    }
    Ok(run)
}
