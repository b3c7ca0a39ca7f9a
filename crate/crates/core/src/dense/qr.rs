use super::{dot, DenseMatrix, DenseVector, Scalar, ZERO};
use crate::error::{Error, Result};

/// Hermitian Householder reflector `I - 2 u u*` acting on rows `offset..`.
#[derive(Clone, Debug)]
struct Reflector {
    offset: usize,
    u: Vec<Scalar>,
}

impl Reflector {
    /// Reflector mapping `x` onto `alpha e1`; returns `None` for `x = 0`.
    fn annihilate(offset: usize, x: &[Scalar]) -> Option<(Self, Scalar)> {
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let phase = if x[0].norm() == 0.0 {
            Scalar::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * norm;
        let mut u = x.to_vec();
        u[0] -= alpha;
        let unorm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        u.iter_mut().for_each(|z| *z /= unorm);
        Some((Self { offset, u }, alpha))
    }

    fn apply(&self, y: &mut [Scalar]) {
        let tail = &mut y[self.offset..self.offset + self.u.len()];
        let s = dot(&self.u, tail) * 2.0;
        for (t, &ui) in tail.iter_mut().zip(&self.u) {
            *t -= ui * s;
        }
    }
}

/// Householder QR of an `m x n` column-major buffer, optionally with column
/// pivoting. On return the buffer holds `R` in its upper triangle.
fn householder(
    data: &mut [Scalar],
    m: usize,
    n: usize,
    pivot: bool,
) -> (Vec<Reflector>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors = Vec::new();
    for k in 0..m.min(n) {
        if pivot {
            let best = (k..n)
                .map(|j| {
                    let c = &data[j * m + k..(j + 1) * m];
                    (j, c.iter().map(|z| z.norm_sqr()).sum::<f64>())
                })
                .fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            if best.0 != k {
                for i in 0..m {
                    data.swap(k * m + i, best.0 * m + i);
                }
                perm.swap(k, best.0);
            }
        }
        let Some((h, alpha)) = Reflector::annihilate(k, &data[k * m + k..(k + 1) * m]) else {
            if pivot {
                // every remaining column is zero
                break;
            }
            continue;
        };
        for j in k + 1..n {
            h.apply(&mut data[j * m..(j + 1) * m]);
        }
        data[k * m + k] = alpha;
        for i in k + 1..m {
            data[k * m + i] = ZERO;
        }
        reflectors.push(h);
    }
    (reflectors, perm)
}

/// Column-pivoted Householder QR, `A P = Q R`, with numerical rank decided by
/// the cutoff `max(m, n) * eps * |R_00|` on the diagonal of `R`.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    m: usize,
    n: usize,
    r: Vec<Scalar>,
    reflectors: Vec<Reflector>,
    perm: Vec<usize>,
    rank: usize,
}

impl PivotedQr {
    pub fn new(a: &DenseMatrix) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut r = a.as_col_major().to_vec();
        let (reflectors, perm) = householder(&mut r, m, n, true);
        let diag: Vec<f64> = (0..m.min(n)).map(|k| r[k * m + k].norm()).collect();
        let rmax = diag.iter().copied().fold(0.0, f64::max);
        let cutoff = m.max(n) as f64 * f64::EPSILON * rmax;
        let rank = diag.iter().take_while(|&&d| d > cutoff && d > 0.0).count();
        Self {
            m,
            n,
            r,
            reflectors,
            perm,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn r_diag(&self) -> Vec<Scalar> {
        (0..self.m.min(self.n))
            .map(|k| self.r[k * self.m + k])
            .collect()
    }

    /// Column permutation: column `k` of `A P` is column `perm()[k]` of `A`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Minimum-norm least-squares solution of `A x = b`.
    pub fn solve_minnorm(&self, b: &DenseVector) -> Result<DenseVector> {
        let (m, n, rank) = (self.m, self.n, self.rank);
        if b.len() != m {
            return Err(Error::dims(
                "lstsq_minnorm",
                format!("{m}x{n} system with right-hand side of length {}", b.len()),
            ));
        }
        let mut c = b.as_slice().to_vec();
        for h in &self.reflectors {
            h.apply(&mut c);
        }
        let mut y = vec![ZERO; n];
        if rank == n {
            for k in (0..n).rev() {
                let acc = (k + 1..n).fold(c[k], |acc, j| acc - self.r[j * m + k] * y[j]);
                y[k] = acc / self.r[k * m + k];
            }
        } else if rank > 0 {
            // R1 = R[0..rank, 0..n]; factor R1* = Z T so that R1 = T* Z*.
            let mut r1h = vec![ZERO; n * rank];
            for i in 0..rank {
                for j in i..n {
                    r1h[i * n + j] = self.r[j * m + i].conj();
                }
            }
            let (z, _) = householder(&mut r1h, n, rank, false);
            // T* w = c[0..rank], T* lower triangular with T*[i][j] = conj(T[j][i])
            let mut w = vec![ZERO; n];
            for i in 0..rank {
                let mut acc = c[i];
                for (j, &wj) in w.iter().enumerate().take(i) {
                    acc -= r1h[i * n + j].conj() * wj;
                }
                w[i] = acc / r1h[i * n + i].conj();
            }
            for h in z.iter().rev() {
                h.apply(&mut w);
            }
            y = w;
        }
        let mut x = DenseVector::zeros(n);
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        Ok(x)
    }
}

/// Minimum-norm least-squares solution via rank-revealing QR.
pub fn lstsq_minnorm(a: &DenseMatrix, b: &DenseVector) -> Result<DenseVector> {
    if b.len() != a.rows() {
        return Err(Error::dims(
            "lstsq_minnorm",
            format!(
                "{}x{} system with right-hand side of length {}",
                a.rows(),
                a.cols(),
                b.len()
            ),
        ));
    }
    PivotedQr::new(a).solve_minnorm(b)
}
