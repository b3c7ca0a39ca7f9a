//! Dense eigensolver for projected matrices and desk-scale reference spectra.
//!
//! Hermitian-flagged input goes through cyclic complex Jacobi rotations, so
//! the returned spectrum is exactly real. Everything else is reduced to upper
//! Hessenberg form and driven to Schur form by single-shift (Wilkinson) QR
//! sweeps with deflation; eigenvectors come from inverse iteration on the
//! triangular factor.

use super::{re, DenseMatrix, Scalar, ONE, ZERO};
use crate::error::{Error, Result};
use crate::rng;

const MAX_DIM: usize = 2000;
const MAX_JACOBI_SWEEPS: usize = 100;
const EPS: f64 = f64::EPSILON;

#[derive(Clone, Debug)]
pub struct EigDecomposition {
    pub values: Vec<Scalar>,
    /// Column `k` is the unit eigenvector paired with `values[k]`.
    pub vectors: DenseMatrix,
    pub converged: bool,
}

impl EigDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Full eigendecomposition of a square matrix with at most 2000 rows.
pub fn small_eig(h: &DenseMatrix) -> Result<EigDecomposition> {
    if !h.is_square() {
        return Err(Error::dims(
            "small_eig",
            format!("{}x{} is not square", h.rows(), h.cols()),
        ));
    }
    let n = h.rows();
    if n > MAX_DIM {
        return Err(Error::dims(
            "small_eig",
            format!("dimension {n} exceeds {MAX_DIM}"),
        ));
    }
    if n == 0 {
        return Ok(EigDecomposition {
            values: Vec::new(),
            vectors: DenseMatrix::zeros(0, 0),
            converged: true,
        });
    }
    if h.is_hermitian() {
        jacobi(h)
    } else {
        schur(h)
    }
}

fn jacobi(h: &DenseMatrix) -> Result<EigDecomposition> {
    let n = h.rows();
    let mut a = h.as_col_major().to_vec();
    let mut v = DenseMatrix::identity(n).as_col_major().to_vec();
    let fro = h.norm_fro();
    let floor = 1e-2 * EPS * fro / n as f64;

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < MAX_JACOBI_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let g = a[q * n + p];
                let gabs = g.norm();
                if gabs == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                if gabs <= floor || gabs <= 0.5 * EPS * (app.abs() * aqq.abs()).sqrt() {
                    a[q * n + p] = ZERO;
                    a[p * n + q] = ZERO;
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * gabs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = [[c, s], [-s e, c e]] with e = conj(g)/|g|
                let e = g.conj() / gabs;
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[p * n + i];
                    let aiq = a[q * n + i];
                    let nip = aip * c - e * aiq * s;
                    let niq = aip * s + e * aiq * c;
                    a[p * n + i] = nip;
                    a[q * n + i] = niq;
                    a[i * n + p] = nip.conj();
                    a[i * n + q] = niq.conj();
                }
                a[p * n + p] = re(app - t * gabs);
                a[q * n + q] = re(aqq + t * gabs);
                a[q * n + p] = ZERO;
                a[p * n + q] = ZERO;
                for i in 0..n {
                    let vip = v[p * n + i];
                    let viq = v[q * n + i];
                    v[p * n + i] = vip * c - e * viq * s;
                    v[q * n + i] = vip * s + e * viq * c;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    let decomposition = EigDecomposition {
        values: (0..n).map(|i| re(a[i * n + i].re)).collect(),
        vectors: DenseMatrix::from_col_major(n, n, v),
        converged,
    };
    if converged {
        Ok(decomposition)
    } else {
        Err(Error::NonConvergence {
            iterations: sweeps,
            partial: Box::new(decomposition),
        })
    }
}

/// `M[:, off..] <- M[:, off..] (I - 2 u u*)` for an `m`-row column-major buffer.
fn reflect_right(data: &mut [Scalar], m: usize, off: usize, u: &[Scalar]) {
    let mut s = vec![ZERO; m];
    for (jj, &uj) in u.iter().enumerate() {
        let col = &data[(off + jj) * m..(off + jj + 1) * m];
        for (si, &x) in s.iter_mut().zip(col) {
            *si += x * uj;
        }
    }
    for (jj, &uj) in u.iter().enumerate() {
        let f = uj.conj() * 2.0;
        let col = &mut data[(off + jj) * m..(off + jj + 1) * m];
        for (x, &si) in col.iter_mut().zip(&s) {
            *x -= si * f;
        }
    }
}

fn hessenberg(h: &mut [Scalar], q: &mut [Scalar], n: usize) {
    for k in 0..n.saturating_sub(2) {
        let x = &h[k * n + k + 1..(k + 1) * n];
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if norm == 0.0 || tail == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { ONE } else { x[0] / x[0].norm() };
        let alpha = -phase * norm;
        let mut u = x.to_vec();
        u[0] -= alpha;
        let unorm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        u.iter_mut().for_each(|z| *z /= unorm);

        // left: rows k+1.., columns k..
        for j in k..n {
            let col = &mut h[j * n + k + 1..(j + 1) * n];
            let s: Scalar = u.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum::<Scalar>() * 2.0;
            for (c, &ui) in col.iter_mut().zip(&u) {
                *c -= ui * s;
            }
        }
        reflect_right(h, n, k + 1, &u);
        reflect_right(q, n, k + 1, &u);
        h[k * n + k + 1] = alpha;
        for i in k + 2..n {
            h[k * n + i] = ZERO;
        }
    }
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
fn givens(a: Scalar, b: Scalar) -> (f64, Scalar) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    if a == ZERO {
        return (0.0, ONE);
    }
    let na = a.norm();
    let r = (na * na + b.norm_sqr()).sqrt();
    (na / r, (a / na) * b.conj() / r)
}

fn wilkinson(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Scalar {
    let mid = (a + d) * 0.5;
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Drives an upper Hessenberg matrix to upper triangular (Schur) form.
/// Returns whether every eigenvalue deflated, and the number of QR steps.
fn shifted_qr(h: &mut [Scalar], q: &mut [Scalar], n: usize) -> (bool, usize) {
    let at = |i: usize, j: usize| j * n + i;
    let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let max_steps = 30 * n;
    let mut steps = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;
    let mut rots: Vec<(f64, Scalar)> = Vec::with_capacity(n);

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[at(l - 1, l - 1)].norm() + h[at(l, l)].norm();
            if s == 0.0 {
                s = norm;
            }
            if h[at(l, l - 1)].norm() <= EPS * s {
                h[at(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if steps >= max_steps {
            return (false, steps);
        }
        steps += 1;
        since_deflation += 1;

        let mu = if since_deflation % 10 == 0 {
            let mut s = h[at(hi, hi - 1)].re.abs();
            if hi >= 2 {
                s += h[at(hi - 1, hi - 2)].re.abs();
            }
            h[at(hi, hi)] + re(s)
        } else {
            wilkinson(
                h[at(hi - 1, hi - 1)],
                h[at(hi - 1, hi)],
                h[at(hi, hi - 1)],
                h[at(hi, hi)],
            )
        };

        for i in l..=hi {
            h[at(i, i)] -= mu;
        }
        rots.clear();
        for k in l..hi {
            let (c, s) = givens(h[at(k, k)], h[at(k + 1, k)]);
            for j in k..n {
                let a = h[at(k, j)];
                let b = h[at(k + 1, j)];
                h[at(k, j)] = a * c + s * b;
                h[at(k + 1, j)] = b * c - s.conj() * a;
            }
            h[at(k + 1, k)] = ZERO;
            rots.push((c, s));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (c, s) = rots[idx];
            for i in 0..=(k + 1).min(hi) {
                let a = h[at(i, k)];
                let b = h[at(i, k + 1)];
                h[at(i, k)] = a * c + s.conj() * b;
                h[at(i, k + 1)] = b * c - s * a;
            }
            for i in 0..n {
                let a = q[at(i, k)];
                let b = q[at(i, k + 1)];
                q[at(i, k)] = a * c + s.conj() * b;
                q[at(i, k + 1)] = b * c - s * a;
            }
        }
        for i in l..=hi {
            h[at(i, i)] += mu;
        }
    }
    (true, steps)
}

/// Solves `(T[0..=k, 0..=k] - sigma I) z = b` by back substitution, rescaling
/// to keep the iterate finite.
fn shifted_back_substitute(t: &[Scalar], n: usize, k: usize, sigma: Scalar, delta: f64, b: &mut [Scalar]) -> Vec<Scalar> {
    const BIG: f64 = 1e150;
    let mut z = vec![ZERO; k + 1];
    for i in (0..=k).rev() {
        let mut acc = b[i];
        for j in i + 1..=k {
            acc -= t[j * n + i] * z[j];
        }
        let mut d = t[i * n + i] - sigma;
        if d == ZERO {
            d = re(delta);
        }
        z[i] = acc / d;
        let mag = z[i].norm();
        if mag > BIG {
            let f = 1.0 / mag;
            z.iter_mut().for_each(|v| *v *= f);
            b.iter_mut().for_each(|v| *v *= f);
        }
    }
    z
}

fn triangular_residual(t: &[Scalar], n: usize, k: usize, lambda: Scalar, z: &[Scalar]) -> f64 {
    (0..=k)
        .map(|i| {
            let mut acc = -lambda * z[i];
            for j in i..=k {
                acc += t[j * n + i] * z[j];
            }
            acc.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// Inverse iteration for the k-th eigenvector of an upper triangular matrix.
fn triangular_eigvec(t: &[Scalar], n: usize, k: usize, tnorm: f64) -> Vec<Scalar> {
    let lambda = t[k * n + k];
    let scale = if tnorm > 0.0 { tnorm } else { 1.0 };
    let mut delta = EPS * scale;
    let mut stream = rng::seeded(0x5eed_0000 + k as u64);
    let mut b: Vec<Scalar> = (0..=k)
        .map(|_| re(0.5 + rng::uniform01(&mut stream)))
        .collect();
    let mut best: Option<(f64, Vec<Scalar>)> = None;
    for _attempt in 0..4 {
        let mut rhs = b.clone();
        let z = shifted_back_substitute(t, n, k, lambda + re(delta), delta, &mut rhs);
        let nz = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !nz.is_finite() || nz == 0.0 {
            // breakdown: perturb the shift and retry
            delta *= 1.0 + 8.0 * rng::uniform01(&mut stream);
            continue;
        }
        let z: Vec<Scalar> = z.into_iter().map(|v| v / nz).collect();
        let res = triangular_residual(t, n, k, lambda, &z);
        let done = res <= 1e-13 * scale;
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, z.clone()));
        }
        if done {
            break;
        }
        b = z;
    }
    let mut out = vec![ZERO; n];
    match best {
        Some((_, z)) => out[..=k].copy_from_slice(&z),
        None => out[k] = ONE,
    }
    out
}

fn schur(h0: &DenseMatrix) -> Result<EigDecomposition> {
    let n = h0.rows();
    let mut h = h0.as_col_major().to_vec();
    let mut q = DenseMatrix::identity(n).as_col_major().to_vec();
    hessenberg(&mut h, &mut q, n);
    let (converged, steps) = shifted_qr(&mut h, &mut q, n);

    let values: Vec<Scalar> = (0..n).map(|i| h[i * n + i]).collect();
    let tnorm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut vectors = vec![ZERO; n * n];
    for k in 0..n {
        let z = triangular_eigvec(&h, n, k, tnorm);
        let dst = &mut vectors[k * n..(k + 1) * n];
        for (j, &zj) in z.iter().enumerate().take(k + 1) {
            if zj == ZERO {
                continue;
            }
            let qcol = &q[j * n..(j + 1) * n];
            for (d, &qij) in dst.iter_mut().zip(qcol) {
                *d += qij * zj;
            }
        }
        let nrm = dst.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 {
            dst.iter_mut().for_each(|v| *v /= nrm);
        }
    }
    let decomposition = EigDecomposition {
        values,
        vectors: DenseMatrix::from_col_major(n, n, vectors),
        converged,
    };
    if converged {
        Ok(decomposition)
    } else {
        Err(Error::NonConvergence {
            iterations: steps,
            partial: Box::new(decomposition),
        })
    }
}
