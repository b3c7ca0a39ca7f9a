use super::{DenseMatrix, DenseVector, Scalar, ZERO};
use crate::error::{Error, Result};

/// Pivots with magnitude at or below this multiple of `eps * ||A||_max` are
/// treated as exact zeros. The threshold is deliberately tiny: near-singular
/// shifted systems still yield a usable direction.
const PIVOT_TOL: f64 = 1e-3;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct LuFactorization {
    n: usize,
    // unit-lower L below the diagonal, U on and above, column-major
    lu: Vec<Scalar>,
    // row i of P A is row perm[i] of A
    perm: Vec<usize>,
    swaps: usize,
}

impl LuFactorization {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dims(
                "lu",
                format!("{}x{} is not square", a.rows(), a.cols()),
            ));
        }
        let n = a.rows();
        let mut lu = a.as_col_major().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let tol = PIVOT_TOL * f64::EPSILON * a.norm_max();

        for k in 0..n {
            let col = &lu[k * n..(k + 1) * n];
            let (p, pmax) = (k..n)
                .map(|i| (i, col[i].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= tol || !pmax.is_finite() {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(j * n + k, j * n + p);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                lu[k * n + i] /= pivot;
            }
            for j in k + 1..n {
                let akj = lu[j * n + k];
                if akj == ZERO {
                    continue;
                }
                let (left, right) = lu.split_at_mut(j * n);
                let lcol = &left[k * n..(k + 1) * n];
                let dst = &mut right[..n];
                for i in k + 1..n {
                    dst[i] -= lcol[i] * akj;
                }
            }
        }
        Ok(Self { n, lu, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &DenseVector) -> Result<DenseVector> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::dims(
                "lu_solve",
                format!("{n}x{n} system with right-hand side of length {}", b.len()),
            ));
        }
        let mut x: Vec<Scalar> = self.perm.iter().map(|&p| b[p]).collect();
        // forward: L y = P b, column oriented
        for k in 0..n {
            let xk = x[k];
            if xk == ZERO {
                continue;
            }
            let col = &self.lu[k * n..(k + 1) * n];
            for i in k + 1..n {
                x[i] -= col[i] * xk;
            }
        }
        // backward: U x = y
        for k in (0..n).rev() {
            let col = &self.lu[k * n..(k + 1) * n];
            x[k] /= col[k];
            let xk = x[k];
            for i in 0..k {
                x[i] -= col[i] * xk;
            }
        }
        Ok(DenseVector::from_vec(x))
    }

    /// Natural log of the determinant (principal branch of the phase).
    pub fn log_det(&self) -> Scalar {
        let n = self.n;
        let mut acc: Scalar = (0..n).map(|k| self.lu[k * n + k].ln()).sum();
        if self.swaps % 2 == 1 {
            acc += Scalar::new(0.0, std::f64::consts::PI);
        }
        acc
    }

    pub fn det(&self) -> Scalar {
        self.log_det().exp()
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, b: &DenseVector) -> Result<DenseVector> {
    LuFactorization::new(a)?.solve(b)
}
