//! Complex dense linear algebra.
//!
//! Everything is computed in complex double precision, including real
//! inputs. Matrices are stored column-major.

mod eig;
mod lu;
mod qr;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eig::{small_eig, EigDecomposition};
pub use lu::{lu_solve, LuFactorization};
pub use qr::{lstsq_minnorm, PivotedQr};

pub type Scalar = Complex64;

pub(crate) const ZERO: Scalar = Scalar::new(0.0, 0.0);
pub(crate) const ONE: Scalar = Scalar::new(1.0, 0.0);

/// Relative tolerance used when a matrix is flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-13;

#[inline]
pub fn re(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

#[derive(Clone, PartialEq)]
pub struct DenseVector {
    data: Vec<Scalar>,
}

impl DenseVector {
    pub fn zeros(n: usize) -> Self {
        Self {
            data: vec![ZERO; n],
        }
    }

    pub fn from_vec(data: Vec<Scalar>) -> Self {
        Self { data }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            data: values.iter().map(|&v| re(v)).collect(),
        }
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> Scalar) -> Self {
        Self {
            data: (0..n).map(f).collect(),
        }
    }

    /// The k-th canonical basis vector of length n.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.data[k] = ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Scalar] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Scalar] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Scalar> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.data.iter()
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: Scalar) {
        self.data.iter_mut().for_each(|z| *z *= s);
    }

    pub fn scaled(&self, s: Scalar) -> Self {
        Self {
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: Scalar, x: &DenseVector) {
        assert_eq!(self.len(), x.len(), "axpy length mismatch");
        for (y, &xi) in self.data.iter_mut().zip(&x.data) {
            *y += alpha * xi;
        }
    }

    pub fn sub(&self, other: &DenseVector) -> DenseVector {
        assert_eq!(self.len(), other.len(), "sub length mismatch");
        Self {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &DenseVector) -> DenseVector {
        assert_eq!(self.len(), other.len(), "add length mismatch");
        Self {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn normalized(&self) -> Result<DenseVector> {
        let nrm = self.norm2();
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::ZeroVector { op: "normalize" });
        }
        Ok(self.scaled(re(1.0 / nrm)))
    }

    /// Removes the component along the unit vector `x`.
    pub fn project_out(&mut self, x: &DenseVector) {
        let c = dot(x.as_slice(), self.as_slice());
        self.axpy(-c, x);
    }
}

impl fmt::Debug for DenseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.iter()).finish()
    }
}

impl Index<usize> for DenseVector {
    type Output = Scalar;
    fn index(&self, i: usize) -> &Scalar {
        &self.data[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut Scalar {
        &mut self.data[i]
    }
}

/// `x* y` over raw slices.
#[inline]
pub(crate) fn dot(x: &[Scalar], y: &[Scalar]) -> Scalar {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Conjugate-linear in `x`: `inner(x, y) = x* y`.
pub fn inner(x: &DenseVector, y: &DenseVector) -> Result<Scalar> {
    if x.len() != y.len() {
        return Err(Error::dims(
            "inner",
            format!("lengths {} and {}", x.len(), y.len()),
        ));
    }
    Ok(dot(x.as_slice(), y.as_slice()))
}

/// Sine of the angle between two nonzero vectors, computed from the
/// orthogonal remainder rather than from the cosine.
pub fn sin_angle(a: &DenseVector, b: &DenseVector) -> f64 {
    let aa = a.norm2();
    let bb = b.norm2();
    if aa == 0.0 || bb == 0.0 {
        return if aa == bb { 0.0 } else { 1.0 };
    }
    let ua = a.scaled(re(1.0 / aa));
    let mut rem = b.scaled(re(1.0 / bb));
    rem.project_out(&ua);
    rem.norm2().min(1.0)
}

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
    hermitian: bool,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
            hermitian: false,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m.hermitian = true;
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            data,
            hermitian: false,
        }
    }

    pub fn from_rows(rows: &[Vec<Scalar>]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n), "ragged rows");
        Self::from_fn(m, n, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n), "ragged rows");
        Self::from_fn(m, n, |i, j| re(rows[i][j]))
    }

    pub fn from_diag(diag: &[Scalar]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let m = Self::from_diag(&diag.iter().map(|&d| re(d)).collect::<Vec<_>>());
        m.with_hermitian().expect("real diagonal is Hermitian")
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[DenseVector]) -> Self {
        let n = cols.first().map_or(0, DenseVector::len);
        let mut m = Self::zeros(n, 0);
        for c in cols {
            m.push_column(c);
        }
        m
    }

    /// Column-major raw constructor.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<Scalar>) -> Self {
        assert_eq!(data.len(), rows * cols, "column-major data length");
        Self {
            rows,
            cols,
            data,
            hermitian: false,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Sets the Hermitian flag after checking `||A - A*||_max <= 1e-13 ||A||_max`.
    pub fn with_hermitian(mut self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::dims(
                "with_hermitian",
                format!("{}x{} is not square", self.rows, self.cols),
            ));
        }
        let defect = self.hermitian_defect();
        if defect > HERMITIAN_TOL * self.norm_max() {
            return Err(Error::HermitianCheck { defect });
        }
        self.hermitian = true;
        Ok(self)
    }

    /// Flags the matrix Hermitian when it passes the check, otherwise leaves
    /// the flag cleared.
    pub fn detect_hermitian(self) -> Self {
        if self.is_square() && self.hermitian_defect() <= HERMITIAN_TOL * self.norm_max() {
            Self {
                hermitian: true,
                ..self
            }
        } else {
            Self {
                hermitian: false,
                ..self
            }
        }
    }

    pub fn clear_hermitian(&mut self) {
        self.hermitian = false;
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.rows;
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in j..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn as_col_major(&self) -> &[Scalar] {
        &self.data
    }

    pub fn col(&self, j: usize) -> &[Scalar] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [Scalar] {
        self.hermitian = false;
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column(&self, j: usize) -> DenseVector {
        DenseVector::from_vec(self.col(j).to_vec())
    }

    pub fn push_column(&mut self, v: &DenseVector) {
        if self.cols == 0 && self.rows == 0 {
            self.rows = v.len();
        }
        assert_eq!(v.len(), self.rows, "push_column length mismatch");
        self.data.extend_from_slice(v.as_slice());
        self.cols += 1;
        self.hermitian = false;
    }

    pub fn diagonal(&self) -> Vec<Scalar> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Scalar {
        self.diagonal().into_iter().sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let mut m = Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj());
        m.hermitian = self.hermitian;
        m
    }

    /// `A - shift * I` (square only).
    pub fn shifted(&self, shift: Scalar) -> DenseMatrix {
        assert!(self.is_square(), "shifted requires a square matrix");
        let mut m = self.clone();
        for i in 0..self.rows {
            m.data[i * self.rows + i] -= shift;
        }
        m.hermitian = self.hermitian && shift.im == 0.0;
        m
    }

    pub fn scaled(&self, s: Scalar) -> DenseMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
            hermitian: self.hermitian && s.im == 0.0,
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.same_shape(other, "add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
            hermitian: false,
        })
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.same_shape(other, "sub")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
            hermitian: false,
        })
    }

    fn same_shape(&self, other: &DenseMatrix, op: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(
                op,
                format!(
                    "{}x{} vs {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        Ok(())
    }

    /// `A += alpha * u v*`
    pub fn add_outer(&mut self, alpha: Scalar, u: &DenseVector, v: &DenseVector) {
        assert_eq!(u.len(), self.rows, "add_outer row length");
        assert_eq!(v.len(), self.cols, "add_outer col length");
        self.hermitian = false;
        for j in 0..self.cols {
            let s = alpha * v[j].conj();
            let col = &mut self.data[j * self.rows..(j + 1) * self.rows];
            for (c, &ui) in col.iter_mut().zip(u.iter()) {
                *c += s * ui;
            }
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::dims(
                "matmul",
                format!(
                    "{}x{} times {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for k in 0..self.cols {
                let b = other.data[j * other.rows + k];
                if b == ZERO {
                    continue;
                }
                let src = &self.data[k * self.rows..(k + 1) * self.rows];
                for (d, &a) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `A* x`
    pub fn adjoint_matvec(&self, x: &DenseVector) -> Result<DenseVector> {
        if self.rows != x.len() {
            return Err(Error::dims(
                "adjoint_matvec",
                format!("{}x{} adjoint with length {}", self.rows, self.cols, x.len()),
            ));
        }
        Ok(DenseVector::from_fn(self.cols, |j| {
            dot(self.col(j), x.as_slice())
        }))
    }

    /// Copies the leading `r x c` block.
    pub fn leading_block(&self, r: usize, c: usize) -> DenseMatrix {
        Self::from_fn(r, c, |i, j| self[(i, j)])
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} (hermitian: {})", self.rows, self.cols, self.hermitian)?;
        for i in 0..self.rows {
            let row: Vec<_> = (0..self.cols).map(|j| self[(i, j)]).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Scalar;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

/// Mutable element access clears the Hermitian flag.
impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        self.hermitian = false;
        &mut self.data[j * self.rows + i]
    }
}

/// `y[i] = sum_j A[i,j] x[j]`, accumulated left to right along each row.
pub fn matvec(a: &DenseMatrix, x: &DenseVector) -> Result<DenseVector> {
    if a.cols != x.len() {
        return Err(Error::dims(
            "matvec",
            format!("{}x{} times length {}", a.rows, a.cols, x.len()),
        ));
    }
    let mut y = DenseVector::zeros(a.rows);
    for i in 0..a.rows {
        let mut acc = ZERO;
        for j in 0..a.cols {
            acc += a.data[j * a.rows + i] * x[j];
        }
        y[i] = acc;
    }
    Ok(y)
}

impl DenseMatrix {
    pub fn matvec(&self, x: &DenseVector) -> Result<DenseVector> {
        matvec(self, x)
    }
}
