//! Logarithmic potentials `U^σ(x) = ∫ log|x - y|^-1 dσ(y)`: closed forms for
//! the uniform disk, the circle and the measure `ν = 2 sin²θ dθ/(2π)` on the
//! unit circle, quadrature oracles for the same quantities, weighted energies
//! of discrete measures and the equilibrium-condition check.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::loggas::Potential;
use crate::quadrature::{integrate, integrate_with_breaks};
use crate::spectral_stats::compensated_sum;

/// `∫_{-π}^{π} log|x - r e^{iθ}| dθ = 2π log max(r, |x|)`.
pub fn circle_log_integral(x: Complex64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("circle radius {r} must be positive")));
    }
    Ok(2.0 * PI * r.max(x.norm()).ln())
}

/// Potential of the uniform probability measure on the unit disk.
pub fn potential_uniform_disk(x: Complex64) -> f64 {
    let r2 = x.norm_sqr();
    if r2 <= 1.0 {
        0.5 * (1.0 - r2)
    } else {
        -0.5 * r2.ln()
    }
}

/// `∫_{-π}^{π} log|r - e^{iθ}| sin²θ dθ / π`.
pub fn sin2_log_integral(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius {r} must be nonnegative")));
    }
    Ok(if r <= 1.0 { 0.25 * r * r } else { 0.25 / (r * r) + r.ln() })
}

/// `A1 = ∫ dθ / (r² + 1 - 2r cos θ)` and `A2 = ∫ cos²θ dθ / (r² + 1 - 2r cos θ)`
/// over `[-π, π]`.
pub fn poisson_integrals(r: f64) -> Result<(f64, f64)> {
    if !(r >= 0.0) || r == 1.0 {
        return Err(Error::InvalidArgument(format!("Poisson integrals need r >= 0, r != 1 (got {r})")));
    }
    let r2 = r * r;
    Ok(if r < 1.0 {
        (2.0 * PI / (1.0 - r2), PI * (r2 + 1.0) / (1.0 - r2))
    } else {
        (2.0 * PI / (r2 - 1.0), PI * (1.0 / r2 + 1.0) / (r2 - 1.0))
    })
}

/// [`sin2_log_integral`] rebuilt from [`poisson_integrals`] by two integrations
/// by parts:
/// `2I = -(r²+1)/(4r) · A + B/2 - π/2` with `A = 2r (A2 - A1)` and
/// `B = ∫ log(r² + 1 - 2r cos θ) dθ`.
pub fn sin2_from_poisson(r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    let (a1, a2) = poisson_integrals(r)?;
    let a = 2.0 * r * (a2 - a1);
    let b = 2.0 * circle_log_integral(Complex64::new(r, 0.0), 1.0)?;
    let i = 0.5 * (-(r * r + 1.0) / (4.0 * r) * a + 0.5 * b - 0.5 * PI);
    Ok(i / PI)
}

/// Potential of `ν`.
pub fn potential_nu(x: Complex64) -> f64 {
    let d = x.re * x.re - x.im * x.im;
    let r2 = x.norm_sqr();
    if r2 <= 1.0 {
        -0.25 * d
    } else {
        -d / (4.0 * r2 * r2) - 0.5 * r2.ln()
    }
}

type AngleDensity = dyn Fn(f64) -> f64 + Send + Sync;

/// Probability density on the unit circle with respect to `dθ / (2π)`.
#[derive(Clone)]
pub struct CircleMeasureDensity {
    name: String,
    weight: Arc<AngleDensity>,
}

impl std::fmt::Debug for CircleMeasureDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CircleMeasureDensity({})", self.name)
    }
}

impl CircleMeasureDensity {
    /// Checks nonnegativity on a grid and unit mass by quadrature (`1e-10`).
    pub fn new(name: &str, weight: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if (0..1024).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / 1024.0).any(|t| !(weight(t) >= 0.0)) {
            return Err(Error::InvalidArgument(format!("density '{name}' is negative somewhere")));
        }
        let mass = integrate(&weight, -PI, PI, 1e-13)?.value / (2.0 * PI);
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("density '{name}' has mass {mass}")));
        }
        Ok(Self { name: name.to_string(), weight: Arc::new(weight) })
    }

    /// Haar measure `σ`.
    pub fn uniform() -> Self {
        Self::new("sigma", |_| 1.0).expect("constant density")
    }

    /// `ν`, weight `2 sin²θ`.
    pub fn nu() -> Self {
        Self::new("nu", |t: f64| 2.0 * t.sin().powi(2)).expect("sin² density")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weight(&self, theta: f64) -> f64 {
        (self.weight)(theta)
    }
}

/// `∫ log|x - e^{iθ}|^-1 w(θ) dθ/(2π)` by adaptive quadrature over one period
/// starting at `arg x`, so a near-singularity sits at the panel ends.
pub fn quad_potential(dens: &CircleMeasureDensity, x: Complex64, tol: f64) -> Result<f64> {
    let t0 = x.arg();
    let f = |t: f64| -0.5 * (x - Complex64::from_polar(1.0, t)).norm_sqr().ln() * dens.weight(t);
    Ok(integrate_with_breaks(f, &[t0, t0 + PI, t0 + 2.0 * PI], tol * 2.0 * PI)?.value / (2.0 * PI))
}

/// `U^μ(x)` for the uniform disk measure by nested quadrature in polar
/// coordinates, the radial panels split at `|x|`.
pub fn quad_potential_disk(x: Complex64, tol: f64) -> Result<f64> {
    let t0 = x.arg();
    let ax = x.norm();
    let inner_tol = tol * 0.1;
    let radial = |s: f64| -> f64 {
        let g = |t: f64| -0.5 * (x - Complex64::from_polar(s, t)).norm_sqr().ln();
        match integrate_with_breaks(g, &[t0, t0 + PI, t0 + 2.0 * PI], inner_tol) {
            Ok(r) => r.value * s,
            Err(_) => f64::NAN,
        }
    };
    let mut breaks = vec![0.0];
    if ax > 0.0 && ax < 1.0 {
        breaks.push(ax);
    }
    breaks.push(1.0);
    let outer = integrate_with_breaks(radial, &breaks, tol * PI)?;
    Ok(outer.value / PI)
}

/// Probability measure with finitely many atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<Complex64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), actual: weights.len() });
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument("discrete measure needs an atom".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        let total = compensated_sum(&weights);
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        Ok(Self { points, weights })
    }

    pub fn uniform(points: Vec<Complex64>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0 / n as f64; n])
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `Σ_{i≠j} w_i w_j log|x_i - x_j|^-1 + Σ_i w_i V(x_i)`.
pub fn weighted_energy(mu: &DiscreteMeasure, v: &Potential) -> Result<f64> {
    let (p, w) = (&mu.points, &mu.weights);
    let mut log_part = 0.0;
    for i in 0..p.len() {
        let mut row = 0.0;
        for j in 0..i {
            let d = (p[i] - p[j]).norm_sqr();
            if d == 0.0 {
                return Err(Error::CoincidentPoints(j, i));
            }
            row += w[j] * d.ln();
        }
        log_part -= w[i] * row;
    }
    let v_part: f64 = p.iter().zip(w).map(|(&z, wi)| wi * v.eval(z)).sum();
    Ok(log_part + v_part)
}

/// Result of [`equilibrium_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquilibriumReport {
    /// Mean of `2U + V` over grid points in the support.
    pub l_hat: f64,
    /// Largest deviation of `2U + V` from `l_hat` on the support.
    pub on_support_dev: f64,
    /// `max(0, l_hat - min(2U + V))` over grid points outside the support.
    pub off_support_violation: f64,
}

/// Tests the characterization `2U + V = l` on the support, `2U + V >= l` off it.
pub fn equilibrium_check(
    u: impl Fn(Complex64) -> f64,
    v: &Potential,
    support: impl Fn(Complex64) -> bool,
    grid: &[Complex64],
) -> Result<EquilibriumReport> {
    let g = |z: Complex64| 2.0 * u(z) + v.eval(z);
    let (inside, outside): (Vec<Complex64>, Vec<Complex64>) = grid.iter().partition(|&&z| support(z));
    if inside.is_empty() {
        return Err(Error::InvalidArgument("grid does not meet the support".into()));
    }
    let vals: Vec<f64> = inside.iter().map(|&z| g(z)).collect();
    let l_hat = vals.iter().sum::<f64>() / vals.len() as f64;
    let on_support_dev = vals.iter().map(|x| (x - l_hat).abs()).fold(0.0, f64::max);
    let min_out = outside.iter().map(|&z| g(z)).fold(f64::INFINITY, f64::min);
    Ok(EquilibriumReport { l_hat, on_support_dev, off_support_violation: (l_hat - min_out).max(0.0) })
}

/// Least-squares search for a quadratic `V` making `ν` its equilibrium measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticRefutation {
    pub a: f64,
    /// `c - 2b` of the fit.
    pub c_relation: f64,
    /// The circle data leave `c` (equivalently `b`) undetermined.
    pub b_free: bool,
    /// Largest `|2U^ν + V - c|` on the circle for the fit with `c = 1`.
    pub on_circle_residual: f64,
    /// `l_hat - (2U^ν(0) + V(0))` for the fit with `c = 1`.
    pub violation: f64,
}

impl QuadraticRefutation {
    /// Fitted potential with the free coefficient set to `c`.
    pub fn potential(&self, c: f64) -> Result<Potential> {
        Potential::quadratic(self.a, (c - self.c_relation) / 2.0, c)
    }

    /// Equilibrium check of the fit with coefficient `c` on the circle grid
    /// used for the fit plus the origin.
    pub fn check(&self, c: f64, circle_points: usize) -> Result<EquilibriumReport> {
        let v = self.potential(c)?;
        let mut grid = circle_grid(circle_points);
        grid.push(Complex64::new(0.0, 0.0));
        equilibrium_check(potential_nu, &v, |z| (z.norm() - 1.0).abs() < 1e-12, &grid)
    }
}

fn circle_grid(m: usize) -> Vec<Complex64> {
    (0..m).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect()
}

/// Solves the 3×3 least-squares problem through its normal equations with
/// pivoted elimination; returns `RankDeficient` on a vanishing pivot.
fn least_squares3(rows: &[[f64; 3]], rhs: &[f64]) -> Result<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for (r, &y) in rows.iter().zip(rhs) {
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += r[i] * r[j];
            }
            m[i][3] += r[i] * y;
        }
    }
    let scale = (0..3).map(|i| m[i][i]).fold(0.0, f64::max);
    for k in 0..3 {
        let p = (k..3).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap_or(k);
        if m[p][k].abs() <= 1e-12 * scale {
            return Err(Error::RankDeficient { rank: k, columns: 3 });
        }
        m.swap(k, p);
        for r in 0..3 {
            if r != k {
                let f = m[r][k] / m[k][k];
                for j in k..4 {
                    m[r][j] -= f * m[k][j];
                }
            }
        }
    }
    Ok([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// On `|z| = 1` a real quadratic potential reads
/// `V(e^{iθ}) = c + a cos 2θ + ((c - 2b)/2) sin 2θ`, so `2U^ν + V` is constant
/// on the circle iff `-2U^ν(e^{iθ}) = a cos 2θ + s sin 2θ + k` for a constant
/// `k`. The fit recovers `a` and `s = (c - 2b)/2`; `c` stays free.
pub fn refute_quadratic_for_nu(circle_points: usize) -> Result<QuadraticRefutation> {
    if circle_points < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 circle points, got {circle_points}")));
    }
    let grid = circle_grid(circle_points);
    let rows: Vec<[f64; 3]> = grid.iter().map(|z| [(2.0 * z.arg()).cos(), (2.0 * z.arg()).sin(), 1.0]).collect();
    let rhs: Vec<f64> = grid.iter().map(|&z| -2.0 * potential_nu(z)).collect();
    let [a, s, _k] = least_squares3(&rows, &rhs)?;
    let mut fit = QuadraticRefutation {
        a,
        c_relation: 2.0 * s,
        b_free: true,
        on_circle_residual: 0.0,
        violation: 0.0,
    };
    let c = 1.0;
    let report = fit.check(c, circle_points)?;
    let v = fit.potential(c)?;
    fit.on_circle_residual = grid.iter().map(|&z| (2.0 * potential_nu(z) + v.eval(z) - c).abs()).fold(0.0, f64::max);
    let zero = Complex64::new(0.0, 0.0);
    fit.violation = report.l_hat - (2.0 * potential_nu(zero) + v.eval(zero));
    Ok(fit)
}
