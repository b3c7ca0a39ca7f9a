//! Reference constructions shared by the integration tests. Everything here
//! is built from explicit dense products, independent of the solver paths.
#![allow(dead_code)]

use subeig::dense::re;
use subeig::rng::{seeded, uniform_pm1};
use subeig::{matvec, DenseMatrix, DenseVector, Scalar};

pub fn random_complex(n: usize, seed: u64) -> DenseMatrix {
    let mut s = seeded(seed);
    DenseMatrix::from_fn(n, n, |_, _| Scalar::new(uniform_pm1(&mut s), uniform_pm1(&mut s)))
}

/// `(B + B*)/2` for a random complex `B`, flagged Hermitian.
pub fn random_hermitian(n: usize, seed: u64) -> DenseMatrix {
    subeig::symmetrize(&random_complex(n, seed)).unwrap()
}

pub fn random_real_symmetric(n: usize, seed: u64) -> DenseMatrix {
    let mut s = seeded(seed);
    let b = DenseMatrix::from_fn(n, n, |_, _| re(uniform_pm1(&mut s)));
    subeig::symmetrize(&b).unwrap()
}

pub fn random_unit(n: usize, seed: u64) -> DenseVector {
    let mut s = seeded(seed);
    DenseVector::from_fn(n, |_| Scalar::new(uniform_pm1(&mut s), uniform_pm1(&mut s)))
        .normalized()
        .unwrap()
}

pub fn random_real_unit(n: usize, seed: u64) -> DenseVector {
    let mut s = seeded(seed);
    DenseVector::from_fn(n, |_| re(uniform_pm1(&mut s)))
        .normalized()
        .unwrap()
}

/// `u v*` as an explicit matrix.
pub fn outer(u: &DenseVector, v: &DenseVector) -> DenseMatrix {
    DenseMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

pub fn eye(n: usize) -> DenseMatrix {
    DenseMatrix::identity(n)
}

pub fn scaled(a: &DenseMatrix, s: f64) -> DenseMatrix {
    a.scaled(re(s))
}

pub fn mul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.matmul(b).unwrap()
}

pub fn sub(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.sub(b).unwrap()
}

pub fn add(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.add(b).unwrap()
}

pub fn fro_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    sub(a, b).norm_fro()
}

/// `x* A x` for unit `x`.
pub fn quad(a: &DenseMatrix, x: &DenseVector) -> Scalar {
    subeig::inner(x, &matvec(a, x).unwrap()).unwrap()
}

/// Sine of the angle between `v` and `span(basis)`, via a twice-applied
/// modified Gram-Schmidt basis.
pub fn span_sin(v: &DenseVector, basis: &[&DenseVector]) -> f64 {
    let mut q: Vec<DenseVector> = Vec::new();
    for b in basis {
        let mut w = (*b).clone();
        for _ in 0..2 {
            for qi in &q {
                let c = subeig::inner(qi, &w).unwrap();
                w.axpy(-c, qi);
            }
        }
        let nw = w.norm2();
        if nw > 1e-14 * b.norm2() {
            q.push(w.scaled(re(1.0 / nw)));
        }
    }
    let mut rem = v.scaled(re(1.0 / v.norm2()));
    for _ in 0..2 {
        for qi in &q {
            let c = subeig::inner(qi, &rem).unwrap();
            rem.axpy(-c, qi);
        }
    }
    rem.norm2()
}

/// Shortest distance from `lambda` to the spectrum of `a`.
pub fn spectral_distance(a: &DenseMatrix, lambda: Scalar) -> f64 {
    subeig::small_eig(a)
        .unwrap()
        .values
        .iter()
        .map(|&z| (z - lambda).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `max |(V* V - I)_ij|`.
pub fn orth_defect(v: &DenseMatrix) -> f64 {
    let g = mul(&v.adjoint(), v);
    sub(&g, &eye(v.cols())).norm_max()
}
