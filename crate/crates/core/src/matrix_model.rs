//! Gaussian quaternionic matrices and their complex adjoint.
//!
//! Writing `A = A₁ + A₂𝐣` with complex `A₁, A₂`, the adjoint is the `2n × 2n`
//! complex matrix
//!
//! ```text
//!     [  A₁        A₂      ]
//!     [ -conj(A₂)  conj(A₁) ]
//! ```
//!
//! whose eigenvalues are the complex right eigenvalues of `A`, occurring in
//! conjugate pairs.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::rng::RandomStream;

/// Tolerance used by [`verify_right_eigen_equivalence`].
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionMatrix {
    n: usize,
    entries: Vec<Quaternion>,
}

impl QuaternionMatrix {
    pub fn new(n: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: entries.len() });
        }
        if !entries.iter().all(|q| q.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Result<Self> {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    /// `A X` with quaternion entries multiplied on the left.
    pub fn mul_vec(&self, v: &[Quaternion]) -> Vec<Quaternion> {
        (0..self.n)
            .map(|i| (0..self.n).fold(Quaternion::ZERO, |acc, j| acc + self.get(i, j) * v[j]))
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    /// CSV dump with header `row,col,w,x,y,z`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "row,col,w,x,y,z")?;
        for i in 0..self.n {
            for j in 0..self.n {
                let q = self.get(i, j);
                writeln!(out, "{i},{j},{:.16e},{:.16e},{:.16e},{:.16e}", q.w, q.x, q.y, q.z)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleConfig {
    pub n: usize,
    pub seed: u64,
}

/// Samples `X(n)`: i.i.d. entries whose four real components are centered
/// Gaussians of variance `1/(4n)`, so `E|X_ij|² = 1/n`.
///
/// Entries are filled row-major, components in `(w, x, y, z)` order, from the
/// stream seeded with `cfg.seed`.
pub fn sample_ginibre_quaternion(cfg: EnsembleConfig) -> Result<QuaternionMatrix> {
    let mut rng = RandomStream::new(cfg.seed);
    sample_ginibre_quaternion_with(cfg.n, &mut rng)
}

pub fn sample_ginibre_quaternion_with(n: usize, rng: &mut RandomStream) -> Result<QuaternionMatrix> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let sd = 0.5 / (n as f64).sqrt();
    let entries = (0..n * n)
        .map(|_| {
            let w = rng.normal() * sd;
            let x = rng.normal() * sd;
            let y = rng.normal() * sd;
            let z = rng.normal() * sd;
            Quaternion::new(w, x, y, z)
        })
        .collect();
    QuaternionMatrix::new(n, entries)
}

/// The `2n × 2n` complex adjoint of a quaternionic matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexAdjoint {
    n: usize,
    matrix: ComplexMatrix,
}

impl ComplexAdjoint {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Max elementwise deviation of `J M J⁻¹` from `conj(M)`, with `J = [[0, I], [-I, 0]]`.
    pub fn symplectic_defect(&self) -> f64 {
        symplectic_defect(&self.matrix)
    }

    /// CSV dump with header `row,col,re,im`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "row,col,re,im")?;
        let m = &self.matrix;
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let z = m[(i, j)];
                writeln!(out, "{i},{j},{:.16e},{:.16e}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// The block matrix `J = [[0, I], [-I, 0]]` of size `2n`.
pub fn symplectic_j(n: usize) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        j[(i, n + i)] = Complex64::new(1.0, 0.0);
        j[(n + i, i)] = Complex64::new(-1.0, 0.0);
    }
    j
}

/// `max |J M J⁻¹ − conj(M)|` for an even-dimensional `M`.
pub fn symplectic_defect(m: &ComplexMatrix) -> f64 {
    let n = m.dim() / 2;
    let j = symplectic_j(n);
    // J⁻¹ = −J
    let jinv = j.scale(Complex64::new(-1.0, 0.0));
    let conj_form = &(&j * m) * &jinv;
    conj_form.max_abs_diff(&m.conj())
}

pub fn complex_adjoint(a: &QuaternionMatrix) -> ComplexAdjoint {
    let n = a.n();
    let mut m = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let (a1, a2) = a.get(i, j).symplectic_parts();
            m[(i, j)] = a1;
            m[(i, n + j)] = a2;
            m[(n + i, j)] = -a2.conj();
            m[(n + i, n + j)] = a1.conj();
        }
    }
    ComplexAdjoint { n, matrix: m }
}

/// Residual norms of the two equivalent eigen-conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RightEigenResiduals {
    /// `‖A X − X λ‖` over ℍⁿ.
    pub quaternionic: f64,
    /// `‖A′ v − λ v‖` over ℂ²ⁿ with `v = (Y, −conj Z)`.
    pub adjoint: f64,
    /// `‖A‖·‖X‖ + |λ|·‖X‖`, the scale the residuals are measured against.
    pub scale: f64,
}

impl RightEigenResiduals {
    pub fn condition_i(&self, tol: f64) -> bool {
        self.quaternionic <= tol * self.scale.max(1.0)
    }

    pub fn condition_ii(&self, tol: f64) -> bool {
        self.adjoint <= tol * self.scale.max(1.0)
    }
}

/// Stacks `X = Y + Z𝐣` into the complex vector `(Y, −conj Z)`.
pub fn lift_to_adjoint_vector(x: &[Quaternion]) -> Vec<Complex64> {
    let n = x.len();
    let mut v = vec![Complex64::new(0.0, 0.0); 2 * n];
    for (i, q) in x.iter().enumerate() {
        let (y, z) = q.symplectic_parts();
        v[i] = y;
        v[n + i] = -z.conj();
    }
    v
}

/// Inverse of [`lift_to_adjoint_vector`].
pub fn vector_from_adjoint(v: &[Complex64]) -> Vec<Quaternion> {
    let n = v.len() / 2;
    (0..n).map(|i| Quaternion::from_symplectic(v[i], -v[n + i].conj())).collect()
}

pub fn right_eigen_residuals(
    a: &QuaternionMatrix,
    lambda: Complex64,
    x: &[Quaternion],
) -> Result<RightEigenResiduals> {
    let n = a.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: x.len() });
    }
    if x.iter().all(|q| q.norm_sqr() == 0.0) {
        return Err(Error::ZeroVector);
    }
    let lam = Quaternion::from_complex(lambda);
    let ax = a.mul_vec(x);
    let quaternionic = ax
        .iter()
        .zip(x)
        .map(|(&l, &xi)| (l - xi * lam).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let adj = complex_adjoint(a);
    let v = lift_to_adjoint_vector(x);
    let av = adj.matrix().mul_vec(&v);
    let adjoint = av
        .iter()
        .zip(&v)
        .map(|(l, r)| (l - lambda * r).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let xnorm = x.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
    let scale = (a.frobenius_norm() + lambda.norm()) * xnorm;
    Ok(RightEigenResiduals { quaternionic, adjoint, scale })
}

/// Checks that `A X = X λ` (quaternionic) and `A′ (Y, −conj Z) = λ (Y, −conj Z)`
/// agree for this instance.
///
/// The two residual vectors correspond under an isometry, so the conditions
/// agree exactly when their residual norms coincide; `true` means the norms
/// match within `1e-8` relative to the problem scale (and hence (i) holds iff
/// (ii) holds).
pub fn verify_right_eigen_equivalence(
    a: &QuaternionMatrix,
    lambda: Complex64,
    x: &[Quaternion],
) -> Result<bool> {
    let r = right_eigen_residuals(a, lambda, x)?;
    let agree_norms = (r.quaternionic - r.adjoint).abs() <= EQUIVALENCE_TOLERANCE * r.scale.max(1.0);
    let agree_truth = r.condition_i(EQUIVALENCE_TOLERANCE) == r.condition_ii(EQUIVALENCE_TOLERANCE);
    Ok(agree_norms && agree_truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = EnsembleConfig { n: 6, seed: 17 };
        assert_eq!(sample_ginibre_quaternion(cfg).unwrap(), sample_ginibre_quaternion(cfg).unwrap());
        let other = sample_ginibre_quaternion(EnsembleConfig { n: 6, seed: 18 }).unwrap();
        assert_ne!(sample_ginibre_quaternion(cfg).unwrap(), other);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(sample_ginibre_quaternion(EnsembleConfig { n: 0, seed: 1 }), Err(Error::EmptyDimension));
    }

    #[test]
    fn entry_moments() {
        let n = 100;
        let a = sample_ginibre_quaternion(EnsembleConfig { n, seed: 99 }).unwrap();
        let count = (n * n) as f64;
        let sq: Vec<f64> = a.entries().iter().map(|q| q.norm_sqr()).collect();
        let mean_sq = sq.iter().sum::<f64>() / count;
        let sd_sq = (sq.iter().map(|s| (s - mean_sq).powi(2)).sum::<f64>() / (count - 1.0)).sqrt();
        assert!((mean_sq - 1.0 / n as f64).abs() <= 3.0 * sd_sq / count.sqrt(), "E|X|^2 = {mean_sq}");

        for comp in 0..4 {
            let vals: Vec<f64> = a.entries().iter().map(|q| q.to_array()[comp]).collect();
            let m = vals.iter().sum::<f64>() / count;
            let sd = (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (count - 1.0)).sqrt();
            assert!(m.abs() <= 3.0 * sd / count.sqrt(), "component {comp} mean {m}");
        }
    }

    #[test]
    fn adjoint_of_j() {
        let a = QuaternionMatrix::new(1, vec![Quaternion::J]).unwrap();
        let m = complex_adjoint(&a);
        let expected = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(-1.0, 0.0), c(0.0, 0.0)]]);
        assert_eq!(m.matrix(), &expected);
    }

    #[test]
    fn adjoint_of_real_diagonal() {
        let d = [1.5, -2.0, 0.25];
        let a = QuaternionMatrix::from_fn(3, |i, j| if i == j { Quaternion::from_real(d[i]) } else { Quaternion::ZERO })
            .unwrap();
        let m = complex_adjoint(&a);
        let diag: Vec<Complex64> = d.iter().chain(d.iter()).map(|&x| c(x, 0.0)).collect();
        assert_eq!(m.matrix(), &ComplexMatrix::from_diagonal(&diag));
    }

    #[test]
    fn adjoint_block_structure_and_symmetry() {
        let a = sample_ginibre_quaternion(EnsembleConfig { n: 5, seed: 3 }).unwrap();
        let adj = complex_adjoint(&a);
        let m = adj.matrix();
        let n = 5;
        for i in 0..n {
            for j in 0..n {
                let q = a.get(i, j);
                assert_eq!(m[(i, j)], c(q.w, q.x));
                assert_eq!(m[(i, n + j)], c(q.y, q.z));
                assert_eq!(m[(n + i, j)], -c(q.y, q.z).conj());
                assert_eq!(m[(n + i, n + j)], c(q.w, q.x).conj());
            }
        }
        // brute-force J M J⁻¹ check, entry by entry: (J M J⁻¹)_{ab} = s M_{a', b'}
        let dim = 2 * n;
        let partner = |k: usize| if k < n { (k + n, 1.0) } else { (k - n, -1.0) };
        for r in 0..dim {
            for s in 0..dim {
                let (pr, sr) = partner(r);
                let (ps, ss) = partner(s);
                let lhs = m[(pr, ps)] * (sr * ss);
                assert_abs_diff_eq!((lhs - m[(r, s)].conj()).norm(), 0.0, epsilon = 1e-15);
            }
        }
        assert!(adj.symplectic_defect() < 1e-15);
    }

    #[test]
    fn adjoint_is_real_linear() {
        let a = sample_ginibre_quaternion(EnsembleConfig { n: 4, seed: 5 }).unwrap();
        let b = sample_ginibre_quaternion(EnsembleConfig { n: 4, seed: 6 }).unwrap();
        let (s, t) = (1.7, -0.3);
        let comb = QuaternionMatrix::from_fn(4, |i, j| a.get(i, j) * s + b.get(i, j) * t).unwrap();
        let lhs = complex_adjoint(&comb).into_matrix();
        let ma = complex_adjoint(&a).into_matrix();
        let mb = complex_adjoint(&b).into_matrix();
        let rhs = ComplexMatrix::from_fn(8, |i, j| ma[(i, j)] * s + mb[(i, j)] * t);
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn equivalence_for_j() {
        // A′ = [[0,1],[-1,0]] has eigenvector (1, i) for λ = i, i.e. Y = 1, Z = i: X = 1 + 𝐤.
        let a = QuaternionMatrix::new(1, vec![Quaternion::J]).unwrap();
        let x = [Quaternion::new(1.0, 0.0, 0.0, 1.0)];
        let r = right_eigen_residuals(&a, c(0.0, 1.0), &x).unwrap();
        assert!(r.quaternionic < 1e-15 && r.adjoint < 1e-15);
        assert!(verify_right_eigen_equivalence(&a, c(0.0, 1.0), &x).unwrap());

        // 1 − 𝐣 is not an eigenvector for i; both conditions fail with equal residuals.
        let bad = [Quaternion::new(1.0, 0.0, -1.0, 0.0)];
        let r = right_eigen_residuals(&a, c(0.0, 1.0), &bad).unwrap();
        assert!(r.quaternionic > 0.1);
        assert_abs_diff_eq!(r.quaternionic, r.adjoint, epsilon = 1e-14);
        assert!(verify_right_eigen_equivalence(&a, c(0.0, 1.0), &bad).unwrap());
    }

    #[test]
    fn equivalence_for_real_scalar() {
        let a = QuaternionMatrix::new(1, vec![Quaternion::from_real(2.5)]).unwrap();
        let r = right_eigen_residuals(&a, c(2.5, 0.0), &[Quaternion::ONE]).unwrap();
        assert!(r.condition_i(1e-8) && r.condition_ii(1e-8));
        assert!(verify_right_eigen_equivalence(&a, c(2.5, 0.0), &[Quaternion::ONE]).unwrap());
    }

    #[test]
    fn equivalence_rejects_zero_vector() {
        let a = QuaternionMatrix::new(1, vec![Quaternion::J]).unwrap();
        assert_eq!(verify_right_eigen_equivalence(&a, c(0.0, 1.0), &[Quaternion::ZERO]), Err(Error::ZeroVector));
    }

    #[test]
    fn lift_round_trip() {
        let x = vec![Quaternion::new(1.0, 2.0, 3.0, 4.0), Quaternion::new(-0.5, 0.0, 0.25, -1.0)];
        assert_eq!(vector_from_adjoint(&lift_to_adjoint_vector(&x)), x);
    }

    #[test]
    fn csv_headers() {
        let a = QuaternionMatrix::new(1, vec![Quaternion::J]).unwrap();
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("row,col,w,x,y,z\n0,0,"));
        let mut buf = Vec::new();
        complex_adjoint(&a).write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 5);
        assert!(s.starts_with("row,col,re,im\n"));
    }
}
