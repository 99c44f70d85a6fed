//! Empirical measures of right spectra, similarity-class sampling, limit laws
//! and one-dimensional goodness-of-fit statistics.
//!
//! Two-dimensional comparisons are reduced to one-dimensional KS tests on the
//! modulus, the argument and the real part.

use std::f64::consts::PI;
use std::io::{self, Write};

use log::info;
use num_complex::Complex64;
use serde::Serialize;

use crate::eig::SpectrumSample;
use crate::error::{Error, Result};
use crate::quaternion::{sample_unit_sphere, Quaternion};
use crate::rng::RandomStream;

/// Radii below this carry no class mass and are dropped from
/// [`class_weighted_measure`].
pub const MIN_CLASS_RADIUS: f64 = 1e-12;

const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Atoms {
    Complex(Vec<Complex64>),
    Quaternion(Vec<Quaternion>),
}

impl Atoms {
    pub fn len(&self) -> usize {
        match self {
            Atoms::Complex(v) => v.len(),
            Atoms::Quaternion(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &x in xs {
        let t = sum + x;
        carry += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + carry
}

/// Weighted point cloud in ℂ or ℍ.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Atoms,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Atoms, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: atoms.len(), actual: weights.len() });
        }
        if atoms.is_empty() {
            return Err(Error::InvalidArgument("empirical measure needs at least one atom".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        let total = compensated_sum(&weights);
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { atoms, weights })
    }

    pub fn uniform(atoms: Atoms) -> Result<Self> {
        let n = atoms.len();
        Self::new(atoms, vec![1.0 / n as f64; n])
    }

    pub fn atoms(&self) -> &Atoms {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(&self.weights)
    }

    pub fn complex_points(&self) -> Option<&[Complex64]> {
        match &self.atoms {
            Atoms::Complex(v) => Some(v),
            Atoms::Quaternion(_) => None,
        }
    }

    pub fn quaternion_points(&self) -> Option<&[Quaternion]> {
        match &self.atoms {
            Atoms::Quaternion(v) => Some(v),
            Atoms::Complex(_) => None,
        }
    }

    /// Real statistic `f` of each atom, viewing complex atoms as quaternions.
    pub fn marginal(&self, f: impl Fn(Quaternion) -> f64) -> Vec<f64> {
        match &self.atoms {
            Atoms::Complex(v) => v.iter().map(|&z| f(Quaternion::from_complex(z))).collect(),
            Atoms::Quaternion(v) => v.iter().map(|&q| f(q)).collect(),
        }
    }

    /// Weighted KS distance between the marginal `f` and a reference CDF.
    pub fn ks_marginal(&self, f: impl Fn(Quaternion) -> f64, cdf: impl Fn(f64) -> f64) -> Result<f64> {
        ks_statistic_weighted(&self.marginal(f), &self.weights, cdf)
    }

    /// Sample dump, header `re,im,weight` (complex) or `re,im,w,x,y,z,weight`
    /// (quaternion; `re,im` is the canonical form of the atom).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        match &self.atoms {
            Atoms::Complex(v) => {
                writeln!(out, "re,im,weight")?;
                for (z, w) in v.iter().zip(&self.weights) {
                    writeln!(out, "{:.16e},{:.16e},{:.16e}", z.re, z.im, w)?;
                }
            }
            Atoms::Quaternion(v) => {
                writeln!(out, "re,im,w,x,y,z,weight")?;
                for (q, w) in v.iter().zip(&self.weights) {
                    let c = q.canonical_form();
                    writeln!(
                        out,
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        c.re, c.im, q.w, q.x, q.y, q.z, w
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Uniform measure on the `2n` complex eigenvalues.
pub fn esd(sample: &SpectrumSample) -> EmpiricalMeasure {
    EmpiricalMeasure::uniform(Atoms::Complex(sample.all_eigs.clone())).expect("spectrum is nonempty")
}

/// Image under `z ↦ Re(z) + i|Im(z)|`.
pub fn pushforward_half_plane(m: &EmpiricalMeasure) -> Result<EmpiricalMeasure> {
    let pts = m
        .complex_points()
        .ok_or_else(|| Error::InvalidArgument("half-plane pushforward needs complex atoms".into()))?;
    let mapped = pts.iter().map(|z| Complex64::new(z.re, z.im.abs())).collect();
    EmpiricalMeasure::new(Atoms::Complex(mapped), m.weights.clone())
}

/// One uniformly chosen element from each similarity class of a right spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSample {
    pub reps: Vec<Complex64>,
    pub units: Vec<Quaternion>,
    pub classes: Vec<Quaternion>,
    pub radii: Vec<f64>,
}

impl ClassSample {
    /// `Σ 4π r_i²`, the total mass of the right spectrum.
    pub fn total_class_mass(&self) -> f64 {
        self.radii.iter().map(|r| 4.0 * PI * r * r).sum()
    }

    /// Largest `|canonical_form(c_i) − z_i|`.
    pub fn canonical_defect(&self) -> f64 {
        self.classes
            .iter()
            .zip(&self.reps)
            .map(|(c, z)| (c.canonical_form() - z).norm())
            .fold(0.0, f64::max)
    }
}

/// Draws `c_i = u_i z_i u_i*` with independent Haar unit quaternions `u_i`.
pub fn sample_classes(sample: &SpectrumSample, rng: &mut RandomStream) -> ClassSample {
    let n = sample.upper.len();
    let mut units = Vec::with_capacity(n);
    let mut classes = Vec::with_capacity(n);
    for &z in &sample.upper {
        let u = sample_unit_sphere(rng);
        let c = Quaternion::conjugate_by(u, Quaternion::from_complex(z)).expect("sampled quaternion is unit");
        units.push(u);
        classes.push(c);
    }
    let radii = sample.upper.iter().map(|z| z.im.abs()).collect();
    ClassSample { reps: sample.upper.clone(), units, classes, radii }
}

/// Class elements weighted by the area `4π r_i²` of their class.
pub fn class_weighted_measure(cs: &ClassSample) -> Result<EmpiricalMeasure> {
    let keep: Vec<usize> = (0..cs.radii.len()).filter(|&i| cs.radii[i] >= MIN_CLASS_RADIUS).collect();
    let dropped = cs.radii.len() - keep.len();
    if dropped > 0 {
        info!("class-weighted measure: dropped {dropped} zero-radius classes");
    }
    if keep.is_empty() {
        return Err(Error::ZeroMass);
    }
    let mass: f64 = keep.iter().map(|&i| 4.0 * PI * cs.radii[i].powi(2)).sum();
    let weights = keep.iter().map(|&i| 4.0 * PI * cs.radii[i].powi(2) / mass).collect();
    let atoms = keep.iter().map(|&i| cs.classes[i]).collect();
    EmpiricalMeasure::new(Atoms::Quaternion(atoms), weights)
}

/// Limit density `1 / (2π² |Im q|²)` on the unit ball of ℍ.
pub fn rho_density(q: Quaternion) -> f64 {
    if q.norm() > 1.0 {
        return 0.0;
    }
    let im2 = q.im_norm().powi(2);
    if im2 == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (2.0 * PI * PI * im2)
    }
}

/// CDF of the semicircle law on `[-1, 1]`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / PI
    }
}

/// CDF of `|z|` for `z` uniform on the unit disk: `r²`.
pub fn disk_radial_cdf(r: f64) -> f64 {
    r.clamp(0.0, 1.0).powi(2)
}

/// CDF of the argument of a rotation-invariant law on `[-π, π]`.
pub fn uniform_angle_cdf(theta: f64) -> f64 {
    ((theta + PI) / (2.0 * PI)).clamp(0.0, 1.0)
}

/// Real-part and modulus CDFs shared by the circular law and by `ρ`.
#[derive(Clone, Copy)]
pub struct LimitMarginals {
    pub real_cdf: fn(f64) -> f64,
    pub radial_cdf: fn(f64) -> f64,
}

pub fn limit_marginals() -> LimitMarginals {
    LimitMarginals { real_cdf: semicircle_cdf, radial_cdf: disk_radial_cdf }
}

fn sorted_pairs(values: &[f64], weights: &[f64]) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = values.iter().copied().zip(weights.iter().copied()).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// One-sample Kolmogorov-Smirnov statistic `sup |F_n − F|`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument("KS statistic of an empty sample".into()));
    }
    let n = sample.len() as f64;
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(xs.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    }))
}

/// KS statistic of a weighted sample (weights summing to 1).
pub fn ks_statistic_weighted(values: &[f64], weights: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(Error::InvalidArgument("weighted KS needs equal, nonempty inputs".into()));
    }
    let mut below = 0.0;
    let mut d: f64 = 0.0;
    for (x, w) in sorted_pairs(values, weights) {
        let f = cdf(x);
        let above = below + w;
        d = d.max(above - f).max(f - below);
        below = above;
    }
    Ok(d)
}

/// `sup_t |F_a(t) − F_b(t)|` for a weighted sample `a` and an unweighted sample `b`.
pub fn ks_two_sample_weighted(a: &[f64], a_weights: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() || a.len() != a_weights.len() {
        return Err(Error::InvalidArgument("two-sample KS needs nonempty inputs".into()));
    }
    let pa = sorted_pairs(a, a_weights);
    let mut pb = b.to_vec();
    pb.sort_by(f64::total_cmp);
    let wb = 1.0 / pb.len() as f64;
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0, 0.0);
    let mut d: f64 = 0.0;
    while i < pa.len() || j < pb.len() {
        let t = match (pa.get(i), pb.get(j)) {
            (Some(x), Some(&y)) => x.0.min(y),
            (Some(x), None) => x.0,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < pa.len() && pa[i].0 <= t {
            fa += pa[i].1;
            i += 1;
        }
        while j < pb.len() && pb[j] <= t {
            fb += wb;
            j += 1;
        }
        d = d.max((fa - fb).abs());
    }
    Ok(d)
}

/// Centered product statistic `(1/n) Σ a_i b_i` with `a_i = g(x_i) − mean g`,
/// `b_i = h(y_i) − mean h`; tends to zero for independent samples.
pub fn product_independence_stat(
    xs: &[f64],
    ys: &[f64],
    g: impl Fn(f64) -> f64,
    h: impl Fn(f64) -> f64,
) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), actual: ys.len() });
    }
    if xs.is_empty() {
        return Err(Error::InvalidArgument("product statistic of empty samples".into()));
    }
    let n = xs.len() as f64;
    let gx: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let hy: Vec<f64> = ys.iter().map(|&y| h(y)).collect();
    let mg = gx.iter().sum::<f64>() / n;
    let mh = hy.iter().sum::<f64>() / n;
    Ok(gx.iter().zip(&hy).map(|(a, b)| (a - mg) * (b - mh)).sum::<f64>() / n)
}

/// Uniform points in the unit ball of ℍ ≅ ℝ⁴ by rejection from the cube.
pub fn sample_uniform_ball4(rng: &mut RandomStream, count: usize) -> Vec<Quaternion> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q = Quaternion::new(
            rng.uniform_range(-1.0, 1.0),
            rng.uniform_range(-1.0, 1.0),
            rng.uniform_range(-1.0, 1.0),
            rng.uniform_range(-1.0, 1.0),
        );
        if q.norm_sqr() <= 1.0 {
            out.push(q);
        }
    }
    out
}

/// One line of a goodness-of-fit report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsReport {
    pub test_name: String,
    pub n: usize,
    pub replicas: usize,
    pub ks: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl KsReport {
    pub fn new(test_name: &str, n: usize, replicas: usize, ks: f64, tolerance: f64) -> Self {
        Self { test_name: test_name.to_string(), n, replicas, ks, tolerance, pass: ks <= tolerance }
    }
}
