//! Dense eigenvalues of general complex matrices, and the conjugate-paired
//! spectrum of a quaternionic matrix.
//!
//! The solver balances the matrix with power-of-two diagonal scalings, reduces
//! it to upper Hessenberg form with Householder reflectors and runs an
//! implicit single-shift QR iteration (Wilkinson shift from the trailing 2×2
//! block, an ad-hoc shift after every 10 stalled iterations). A subdiagonal
//! entry is set to zero once `|h[k][k-1]| <= eps * (|h[k-1][k-1]| + |h[k][k]|)`
//! with `eps = 2^-52`. Only eigenvalues are computed.

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::matrix_model::{complex_adjoint, sample_ginibre_quaternion, EnsembleConfig, QuaternionMatrix};
use crate::rng::RandomStream;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative residual above which [`pair_spectrum`] refuses to pair.
pub const PAIRING_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigOptions {
    pub balance: bool,
    /// QR sweeps allowed between two deflations.
    pub max_iter_per_eigenvalue: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { balance: true, max_iter_per_eigenvalue: 40 }
    }
}

/// Eigenvalues of a square complex matrix with default options.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    eigenvalues_with(m, EigOptions::default())
}

pub fn eigenvalues_with(m: &ComplexMatrix, opts: EigOptions) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut h = m.as_slice().to_vec();
    if opts.balance {
        balance(&mut h, n);
    }
    hessenberg(&mut h, n);
    hessenberg_qr(&mut h, n, opts.max_iter_per_eigenvalue)
}

/// Diagonal similarity scaling by powers of two so that row and column
/// off-diagonal norms are comparable.
fn balance(a: &mut [Complex64], n: usize) {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].norm();
                    r += a[i * n + j].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= inv;
                    a[j * n + i] *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut [Complex64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut s = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let xnorm = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        for (t, i) in (k + 1..n).enumerate() {
            v[t] = a[i * n + k];
        }
        v[0] -= alpha;
        let vnorm_sq: f64 = v[..len].iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm_sq;

        // A <- (I - tau v v^H) A on rows k+1.., columns k..
        s[k..n].fill(ZERO);
        for (t, i) in (k + 1..n).enumerate() {
            let vc = v[t].conj();
            let row = &a[i * n..(i + 1) * n];
            for j in k..n {
                s[j] += vc * row[j];
            }
        }
        for (t, i) in (k + 1..n).enumerate() {
            let f = v[t] * tau;
            let row = &mut a[i * n..(i + 1) * n];
            for j in k..n {
                row[j] -= f * s[j];
            }
        }
        // A <- A (I - tau v v^H) on all rows, columns k+1..
        for r in 0..n {
            let row = &mut a[r * n..(r + 1) * n];
            let mut acc = ZERO;
            for t in 0..len {
                acc += row[k + 1 + t] * v[t];
            }
            let f = acc * tau;
            for t in 0..len {
                row[k + 1 + t] -= f * v[t].conj();
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            a[i * n + k] = ZERO;
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
#[inline]
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    let ny = y.norm();
    if ny == 0.0 {
        return (1.0, ZERO, x);
    }
    let nx = x.norm();
    if nx == 0.0 {
        return (0.0, y.conj() / ny, Complex64::new(ny, 0.0));
    }
    let norm = nx.hypot(ny);
    let phase = x / nx;
    (nx / norm, phase * y.conj() / norm, phase * norm)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_qr(h: &mut [Complex64], n: usize, max_iter: usize) -> Result<Vec<Complex64>> {
    let eps = f64::EPSILON;
    let hnorm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let idx = |i: usize, j: usize| i * n + j;
    let mut eigs = vec![ZERO; n];
    let mut hi = n - 1;
    let mut its = 0usize;
    loop {
        // locate the active unreduced block [lo, hi]
        let mut lo = 0;
        let mut k = hi;
        while k > 0 {
            let sub = h[idx(k, k - 1)].norm();
            let diag = h[idx(k - 1, k - 1)].norm() + h[idx(k, k)].norm();
            let negligible = if diag > 0.0 { sub <= eps * diag } else { sub <= eps * hnorm };
            if negligible {
                h[idx(k, k - 1)] = ZERO;
                lo = k;
                break;
            }
            k -= 1;
        }
        if lo == hi {
            eigs[hi] = h[idx(hi, hi)];
            its = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        if its >= max_iter {
            return Err(Error::NoConvergence { deflated: n - 1 - hi, dimension: n });
        }
        its += 1;

        let mu = if its % 10 == 0 {
            h[idx(hi, hi)] + 0.75 * h[idx(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h[idx(hi - 1, hi - 1)], h[idx(hi - 1, hi)], h[idx(hi, hi - 1)], h[idx(hi, hi)])
        };

        let mut x = h[idx(lo, lo)] - mu;
        let mut y = h[idx(lo + 1, lo)];
        for k in lo..hi {
            if k > lo {
                x = h[idx(k, k - 1)];
                y = h[idx(k + 1, k - 1)];
            }
            let (c, s, r) = givens(x, y);
            if k > lo {
                h[idx(k, k - 1)] = r;
                h[idx(k + 1, k - 1)] = ZERO;
            }
            let sc = s.conj();
            {
                let (top, bottom) = h.split_at_mut((k + 1) * n);
                let rk = &mut top[k * n..];
                let rk1 = &mut bottom[..n];
                for j in k..=hi {
                    let a = rk[j];
                    let b = rk1[j];
                    rk[j] = a * c + s * b;
                    rk1[j] = b * c - sc * a;
                }
            }
            let last = (k + 2).min(hi);
            for row in lo..=last {
                let a = h[idx(row, k)];
                let b = h[idx(row, k + 1)];
                h[idx(row, k)] = a * c + b * sc;
                h[idx(row, k + 1)] = b * c - a * s;
            }
        }
    }
    Ok(eigs)
}

/// Conjugate-paired spectrum of a `2n × 2n` adjoint matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSample {
    pub n: usize,
    /// `upper` followed by its conjugates, so `all_eigs[n + i] = conj(all_eigs[i])`.
    pub all_eigs: Vec<Complex64>,
    /// One representative per conjugate pair, `Im >= 0`.
    pub upper: Vec<Complex64>,
    /// Largest distance between an eigenvalue and the conjugate of its partner.
    pub pairing_residual: f64,
}

/// Pairs `2n` eigenvalues into `n` conjugate pairs by greedy nearest-neighbour
/// matching, processed in order of decreasing `|Im|`.
///
/// Each pair yields the representative `(e_i + conj(e_j)) / 2` reflected into
/// the upper half-plane; a pair whose representative is within the pairing
/// distance of the real axis is treated as a real double eigenvalue and gets
/// `Im = 0` exactly.
pub fn pair_spectrum(eigs: &[Complex64]) -> Result<SpectrumSample> {
    let len = eigs.len();
    if len % 2 != 0 {
        return Err(Error::OddSpectrum(len));
    }
    if len == 0 {
        return Err(Error::EmptyDimension);
    }
    let scale = eigs.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| eigs[b].im.abs().total_cmp(&eigs[a].im.abs()));

    let mut used = vec![false; len];
    let mut upper = Vec::with_capacity(len / 2);
    let mut residual: f64 = 0.0;
    for &i in &order {
        if used[i] {
            continue;
        }
        used[i] = true;
        let target = eigs[i].conj();
        let (j, dist) = (0..len)
            .filter(|&j| !used[j])
            .map(|j| (j, (eigs[j] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("even count leaves a partner");
        used[j] = true;
        residual = residual.max(dist);
        let mut rep = (eigs[i] + eigs[j].conj()) * 0.5;
        if rep.im < 0.0 {
            rep = rep.conj();
        }
        if rep.im <= dist {
            rep.im = 0.0;
        }
        upper.push(rep);
    }
    let tolerance = PAIRING_TOLERANCE * scale;
    if residual > tolerance {
        return Err(Error::Unpaired { residual, tolerance });
    }
    let all_eigs = upper.iter().copied().chain(upper.iter().map(|z| z.conj())).collect();
    Ok(SpectrumSample { n: len / 2, all_eigs, upper, pairing_residual: residual })
}

/// Complex right spectrum of a quaternionic matrix.
pub fn right_spectrum(a: &QuaternionMatrix) -> Result<SpectrumSample> {
    let adj = complex_adjoint(a);
    pair_spectrum(&eigenvalues(adj.matrix())?)
}

/// Seed of replica `index` in a run seeded with `seed`.
pub fn replica_seed(seed: u64, index: usize) -> u64 {
    RandomStream::child_seed(seed, index as u64)
}

/// Samples `replicas` independent `X(n)` and returns their paired spectra,
/// ordered by replica index. Replicas are solved in parallel.
pub fn sample_spectra(n: usize, replicas: usize, seed: u64) -> Vec<Result<SpectrumSample>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let cfg = EnsembleConfig { n, seed: replica_seed(seed, r) };
            let res = sample_ginibre_quaternion(cfg).and_then(|a| right_spectrum(&a));
            if let Err(e) = &res {
                warn!("replica {r}: {e}");
            }
            res
        })
        .collect()
}

/// Haar-random unitary matrix: Gram-Schmidt (applied twice) on complex
/// Gaussian columns.
pub fn random_unitary(n: usize, rng: &mut RandomStream) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| (0..n).map(|_| Complex64::new(rng.normal(), rng.normal())).collect())
        .collect();
    for j in 0..n {
        for _ in 0..2 {
            for p in 0..j {
                let proj: Complex64 = cols[p].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (x, q) in rest[0].iter_mut().zip(&done[p]) {
                    *x -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// Largest distance in a greedy nearest-neighbour matching of two multisets
/// (an upper bound on the optimal bottleneck matching distance).
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    // match the most isolated points first
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[j].norm().total_cmp(&a[i].norm()));
    for i in order {
        let (j, d) = (0..b.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (a[i] - b[j]).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("equal lengths");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
