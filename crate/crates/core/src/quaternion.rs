//! Real quaternions `w + x𝐢 + y𝐣 + z𝐤`.
//!
//! The complex numbers embed as `a + bi ↦ (a, b, 0, 0)`, so ℝ ⊂ ℂ ⊂ ℍ and the
//! product restricted to that copy of ℂ is ordinary complex multiplication.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Tolerance on `| |u| - 1 |` accepted for unit quaternions.
pub const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn from_real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    pub fn from_complex(c: Complex64) -> Self {
        Self::new(c.re, c.im, 0.0, 0.0)
    }

    /// Builds `a + b𝐣` from two complex numbers; `(w + x i) + (y + z i)𝐣`.
    pub fn from_symplectic(a: Complex64, b: Complex64) -> Self {
        Self::new(a.re, a.im, b.re, b.im)
    }

    /// Inverse of [`Quaternion::from_symplectic`]: the pair `(a, b)` with `q = a + b𝐣`.
    pub fn symplectic_parts(self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, self.z))
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn re(self) -> f64 {
        self.w
    }

    /// Imaginary part `x𝐢 + y𝐣 + z𝐤` (real part zero).
    pub fn im(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// `q* / |q|²`; `None` for the zero quaternion.
    pub fn inverse(self) -> Option<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            None
        } else {
            Some(self.conj().scale(1.0 / n2))
        }
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Representative `Re(q) + |Im(q)| i` of the similarity class of `q`.
    pub fn canonical_form(self) -> Complex64 {
        Complex64::new(self.w, self.im_norm())
    }

    /// `u q u*` for a unit quaternion `u`.
    ///
    /// `u` must satisfy `| |u| - 1 | <= 1e-12`; it is renormalized before use.
    pub fn conjugate_by(u: Quaternion, q: Quaternion) -> Result<Quaternion> {
        let u = normalize_unit(u)?;
        Ok(u * q * u.conj())
    }

    pub fn max_abs_diff(self, other: Quaternion) -> f64 {
        let d = self - other;
        d.w.abs().max(d.x.abs()).max(d.y.abs()).max(d.z.abs())
    }
}

fn normalize_unit(u: Quaternion) -> Result<Quaternion> {
    let norm = u.norm();
    if !((norm - 1.0).abs() <= UNIT_TOLERANCE) {
        return Err(Error::NotUnit { norm });
    }
    Ok(u.scale(1.0 / norm))
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product: 𝐢² = 𝐣² = 𝐤² = −1, 𝐢𝐣 = −𝐣𝐢 = 𝐤, 𝐣𝐤 = −𝐤𝐣 = 𝐢, 𝐤𝐢 = −𝐢𝐤 = 𝐣.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        self.scale(1.0 / s)
    }
}

impl From<Complex64> for Quaternion {
    fn from(c: Complex64) -> Self {
        Quaternion::from_complex(c)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

/// Uniform point on the unit sphere 𝕊³ ⊂ ℍ (Haar measure on unit quaternions).
///
/// Four standard normals are drawn in `(w, x, y, z)` order and normalized; an
/// all-zero draw is resampled.
pub fn sample_unit_sphere(rng: &mut RandomStream) -> Quaternion {
    loop {
        let q = Quaternion::new(rng.normal(), rng.normal(), rng.normal(), rng.normal());
        let n = q.norm();
        if n > 0.0 {
            return q.scale(1.0 / n);
        }
    }
}

/// Uniform point on the unit sphere of the pure-imaginary quaternions.
pub fn sample_unit_sphere_im(rng: &mut RandomStream) -> Quaternion {
    loop {
        let q = Quaternion::new(0.0, rng.normal(), rng.normal(), rng.normal());
        let n = q.norm();
        if n > 0.0 {
            return q.scale(1.0 / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_stats::{ks_statistic, semicircle_cdf};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Left-multiplication matrix of `a` acting on coefficient vectors; an
    /// independent route to the Hamilton product.
    fn left_matrix(a: Quaternion) -> [[f64; 4]; 4] {
        let (w, x, y, z) = (a.w, a.x, a.y, a.z);
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    }

    fn matrix_product(a: Quaternion, b: Quaternion) -> Quaternion {
        let m = left_matrix(a);
        let v = b.to_array();
        let r: Vec<f64> = (0..4).map(|i| (0..4).map(|k| m[i][k] * v[k]).sum()).collect();
        Quaternion::new(r[0], r[1], r[2], r[3])
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
            .prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z))
    }

    fn unit_quat() -> impl Strategy<Value = Quaternion> {
        any::<u64>().prop_map(|s| sample_unit_sphere(&mut RandomStream::new(s)))
    }

    #[test]
    fn basis_table() {
        use Quaternion as Q;
        assert_eq!(Q::I * Q::J, Q::K);
        assert_eq!(Q::J * Q::I, -Q::K);
        assert_eq!(Q::J * Q::K, Q::I);
        assert_eq!(Q::K * Q::J, -Q::I);
        assert_eq!(Q::K * Q::I, Q::J);
        assert_eq!(Q::I * Q::K, -Q::J);
        for u in [Q::I, Q::J, Q::K] {
            assert_eq!(u * u, -Q::ONE);
        }
    }

    #[test]
    fn product_examples() {
        let q = Quaternion::new(0.3, -1.2, 2.0, 0.7);
        assert_eq!(Quaternion::ONE * q, q);
        let a = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let b = Quaternion::new(1.0, -1.0, 0.0, 0.0);
        assert_eq!(a * b, Quaternion::from_real(2.0));
        assert_eq!(matrix_product(a, b), Quaternion::from_real(2.0));
    }

    #[test]
    fn norms_and_parts() {
        assert_eq!(Quaternion::ONE.norm(), 1.0);
        assert_eq!(Quaternion::new(1.0, 1.0, 1.0, 1.0).norm(), 2.0);
        let q = Quaternion::new(1.5, -2.0, 0.5, 3.0);
        assert_eq!(q.re() + 0.0, 1.5);
        assert_eq!(q.im().re(), 0.0);
        assert_eq!(Quaternion::from_real(q.re()) + q.im(), q);
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(Quaternion::J.canonical_form(), Complex64::new(0.0, 1.0));
        assert_eq!(Quaternion::from_real(5.0).canonical_form(), Complex64::new(5.0, 0.0));
        let q = Quaternion::new(1.0, 2.0, -2.0, 1.0);
        assert_eq!(q.canonical_form(), Complex64::new(1.0, 3.0));
    }

    #[test]
    fn conjugate_by_examples() {
        let q = Quaternion::new(0.2, 1.0, -0.5, 2.0);
        assert_eq!(Quaternion::conjugate_by(Quaternion::ONE, q).unwrap(), q);
        let mut rng = RandomStream::new(5);
        let t = Quaternion::new(1.0, 2.0, 0.0, 0.0);
        for _ in 0..100 {
            let u = sample_unit_sphere(&mut rng);
            let c = Quaternion::conjugate_by(u, t).unwrap();
            assert_abs_diff_eq!(c.re(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(c.norm(), t.norm(), epsilon = 1e-13);
        }
    }

    #[test]
    fn conjugate_by_rejects_non_unit() {
        let err = Quaternion::conjugate_by(Quaternion::new(1.0, 1.0, 0.0, 0.0), Quaternion::I);
        assert!(matches!(err, Err(Error::NotUnit { .. })));
        let almost = Quaternion::new(1.0 + 5e-13, 0.0, 0.0, 0.0);
        assert!(Quaternion::conjugate_by(almost, Quaternion::I).is_ok());
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert!(Quaternion::ZERO.inverse().is_none());
    }

    #[test]
    fn sphere_samples_are_unit() {
        let mut rng = RandomStream::new(3);
        for _ in 0..1000 {
            assert_abs_diff_eq!(sample_unit_sphere(&mut rng).norm(), 1.0, epsilon = 1e-15);
            let s = sample_unit_sphere_im(&mut rng);
            assert_eq!(s.re(), 0.0);
            assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn sphere_sample_statistics() {
        let mut rng = RandomStream::new(2718);
        let n = 100_000;
        let draws: Vec<Quaternion> = (0..n).map(|_| sample_unit_sphere(&mut rng)).collect();
        let mut means = [0.0; 4];
        let mut w2 = 0.0;
        for q in &draws {
            for (m, c) in means.iter_mut().zip(q.to_array()) {
                *m += c / n as f64;
            }
            w2 += q.w * q.w / n as f64;
        }
        for m in means {
            assert!(m.abs() < 0.01, "coordinate mean {m}");
        }
        assert_abs_diff_eq!(w2, 0.25, epsilon = 0.01);
        let first: Vec<f64> = draws.iter().map(|q| q.w).collect();
        let ks = ks_statistic(&first, semicircle_cdf).unwrap();
        assert!(ks <= 0.01, "KS {ks}");
    }

    proptest! {
        #[test]
        fn product_matches_matrix_representation(a in quat(), b in quat()) {
            prop_assert!((a * b).max_abs_diff(matrix_product(a, b)) < 1e-12);
        }

        #[test]
        fn associative(a in quat(), b in quat(), c in quat()) {
            prop_assert!(((a * b) * c).max_abs_diff(a * (b * c)) < 1e-12);
        }

        #[test]
        fn norm_is_multiplicative(a in quat(), b in quat()) {
            let lhs = (a * b).norm();
            let rhs = a.norm() * b.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }

        #[test]
        fn norm_squared_is_q_qstar(q in quat()) {
            let p = q * q.conj();
            prop_assert!((p.w - q.norm_sqr()).abs() < 1e-12);
            prop_assert!(p.im_norm() < 1e-12);
        }

        #[test]
        fn conjugation_involutive_and_antimultiplicative(a in quat(), b in quat()) {
            prop_assert_eq!(a.conj().conj(), a);
            prop_assert!((a * b).conj().max_abs_diff(b.conj() * a.conj()) < 1e-12);
        }

        #[test]
        fn inverse_is_two_sided(q in quat()) {
            prop_assume!(q.norm() > 1e-3);
            let inv = q.inverse().unwrap();
            prop_assert!((q * inv).max_abs_diff(Quaternion::ONE) < 1e-12);
            prop_assert!((inv * q).max_abs_diff(Quaternion::ONE) < 1e-12);
        }

        #[test]
        fn canonical_form_is_class_invariant(q in quat(), u in unit_quat()) {
            let c = Quaternion::conjugate_by(u, q).unwrap();
            prop_assert!((c.canonical_form() - q.canonical_form()).norm() < 1e-10);
        }
    }
}
