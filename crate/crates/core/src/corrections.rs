//! Rayleigh-quotient calculus and the correction equations that produce the
//! subspace expansion vector `t`.
//!
//! Every operator is materialized as a dense matrix. Singular projected
//! systems are solved in the minimum-norm least-squares sense.

use std::fmt;
use std::str::FromStr;

use crate::dense::{
    dot, inner, lstsq_minnorm, lu_solve, matvec, re, DenseMatrix, DenseVector, LuFactorization,
    Scalar, ZERO,
};
use crate::error::{Error, Result};

/// Accepted deviation of `||x||` from one.
pub const UNIT_TOL: f64 = 1e-10;

/// Accepted `||r - (A x - lambda x)||` relative to `||A||_F`.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Largest imaginary part of a shift treated as real by the Newton variants.
pub const REAL_SHIFT_TOL: f64 = 1e-12;

/// `(A, x, lambda, r)` at one outer iteration: `x` is unit, `r = A x - lambda x`.
#[derive(Clone, Debug)]
pub struct CorrectionInput<'a> {
    a: &'a DenseMatrix,
    x: DenseVector,
    lambda: Scalar,
    r: DenseVector,
}

impl<'a> CorrectionInput<'a> {
    pub fn new(a: &'a DenseMatrix, x: DenseVector, lambda: Scalar, r: DenseVector) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || x.len() != n || r.len() != n {
            return Err(Error::dims(
                "CorrectionInput",
                format!("A {}x{}, x {}, r {}", a.rows(), a.cols(), x.len(), r.len()),
            ));
        }
        let norm = x.norm2();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotNormalized {
                op: "CorrectionInput",
                norm,
            });
        }
        let mut direct = matvec(a, &x)?;
        direct.axpy(-lambda, &x);
        let defect = direct.sub(&r).norm2();
        if defect > RESIDUAL_TOL * a.norm_fro().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidConfig(format!(
                "residual inconsistent with (A, x, lambda): defect {defect:e}"
            )));
        }
        Ok(Self { a, x, lambda, r })
    }

    /// Skips validation; the driver keeps `(x, lambda, r)` consistent.
    pub(crate) fn trusted(a: &'a DenseMatrix, x: DenseVector, lambda: Scalar, r: DenseVector) -> Self {
        Self { a, x, lambda, r }
    }

    /// Normalizes `x` and takes its Rayleigh quotient as the shift.
    pub fn from_vector(a: &'a DenseMatrix, x: &DenseVector) -> Result<Self> {
        let x = x.normalized()?;
        let lambda = rayleigh_quotient(a, &x)?;
        let mut r = matvec(a, &x)?;
        r.axpy(-lambda, &x);
        Ok(Self { a, x, lambda, r })
    }

    pub fn a(&self) -> &DenseMatrix {
        self.a
    }

    pub fn x(&self) -> &DenseVector {
        &self.x
    }

    pub fn lambda(&self) -> Scalar {
        self.lambda
    }

    pub fn r(&self) -> &DenseVector {
        &self.r
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Davidson,
    Jd,
    Jdm,
    Iigd,
    Iigdm,
    N1,
    N2,
    Generalized,
    Bordered,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 9] = [
        StrategyKind::Davidson,
        StrategyKind::Jd,
        StrategyKind::Jdm,
        StrategyKind::Iigd,
        StrategyKind::Iigdm,
        StrategyKind::N1,
        StrategyKind::N2,
        StrategyKind::Generalized,
        StrategyKind::Bordered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Davidson => "davidson",
            StrategyKind::Jd => "jd",
            StrategyKind::Jdm => "jdm",
            StrategyKind::Iigd => "iigd",
            StrategyKind::Iigdm => "iigdm",
            StrategyKind::N1 => "n1",
            StrategyKind::N2 => "n2",
            StrategyKind::Generalized => "general",
            StrategyKind::Bordered => "bordered",
        }
    }

    fn newton(self) -> bool {
        matches!(self, StrategyKind::N1 | StrategyKind::N2)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which correction equation to solve and how.
///
/// `diag_precond` replaces `A` by `diag(A)` inside the operator; Davidson
/// always does so. `enforce_orth` asks for `t` orthogonal to `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub alpha: Scalar,
    pub beta: Scalar,
    pub diag_precond: bool,
    pub enforce_orth: bool,
    /// Runs n1/n2 on non-Hermitian matrices with the formulas unchanged.
    pub allow_nonhermitian: bool,
}

impl StrategyConfig {
    /// Defaults: orthogonality enforced for the projected methods, not for
    /// n1, n2 and the generalized family.
    pub fn new(kind: StrategyKind) -> Self {
        let (alpha, beta) = match kind {
            StrategyKind::Generalized => (re(1.0), re(1.0)),
            _ => (ZERO, ZERO),
        };
        Self {
            kind,
            alpha,
            beta,
            diag_precond: kind == StrategyKind::Davidson,
            enforce_orth: matches!(
                kind,
                StrategyKind::Jd
                    | StrategyKind::Jdm
                    | StrategyKind::Iigd
                    | StrategyKind::Iigdm
                    | StrategyKind::Bordered
            ),
            allow_nonhermitian: false,
        }
    }

    pub fn generalized(alpha: Scalar, beta: Scalar) -> Self {
        Self {
            alpha,
            beta,
            ..Self::new(StrategyKind::Generalized)
        }
    }

    pub fn with_diag_precond(mut self, on: bool) -> Self {
        self.diag_precond = on;
        self
    }

    pub fn with_enforce_orth(mut self, on: bool) -> Self {
        self.enforce_orth = on;
        self
    }

    pub fn with_allow_nonhermitian(mut self, on: bool) -> Self {
        self.allow_nonhermitian = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == StrategyKind::Generalized && self.alpha == ZERO {
            return Err(Error::InvalidConfig(
                "generalized correction requires alpha != 0".into(),
            ));
        }
        if self.diag_precond && !matches!(self.kind, StrategyKind::Davidson) && !self.kind.newton() {
            return Err(Error::InvalidConfig(format!(
                "diag_precond is not available for {}",
                self.kind
            )));
        }
        Ok(())
    }

    /// Stable identifier used in reports; contains no commas.
    pub fn label(&self) -> String {
        match self.kind {
            StrategyKind::Generalized => {
                format!("general:{}:{}", fmt_scalar(self.alpha), fmt_scalar(self.beta))
            }
            k if k.newton() && self.diag_precond => format!("{k}:diag"),
            k => k.name().to_string(),
        }
    }
}

fn fmt_scalar(z: Scalar) -> String {
    if z.im == 0.0 {
        z.re.to_string()
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

impl fmt::Display for StrategyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `davidson`, `jd`, `jdm`, `iigd`, `iigdm`, `n1`, `n2`, `n1:diag`,
/// `n2:diag`, `general:a:b` (also `general:a,b`) and `bordered`.
impl FromStr for StrategyConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let parts: Vec<&str> = lower.split([':', ',']).collect();
        let bad = || Error::InvalidConfig(format!("unknown method '{s}'"));
        let kind = StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == parts[0])
            .ok_or_else(bad)?;
        let cfg = match (kind, &parts[1..]) {
            (StrategyKind::Generalized, [a, b]) => {
                let num = |t: &str| {
                    t.parse::<f64>()
                        .map_err(|_| Error::InvalidConfig(format!("invalid coefficient '{t}' in '{s}'")))
                };
                StrategyConfig::generalized(re(num(a)?), re(num(b)?))
            }
            (StrategyKind::Generalized, _) => {
                return Err(Error::InvalidConfig(format!(
                    "'{s}' needs two coefficients, e.g. general:2,2"
                )))
            }
            (k, ["diag"]) if k.newton() => StrategyConfig::new(k).with_diag_precond(true),
            (k, []) => StrategyConfig::new(k),
            _ => return Err(bad()),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `x* A x / x* x`; exactly real for Hermitian-flagged `A`.
pub fn rayleigh_quotient(a: &DenseMatrix, x: &DenseVector) -> Result<Scalar> {
    let xx = x.norm2();
    if xx == 0.0 {
        return Err(Error::ZeroVector {
            op: "rayleigh_quotient",
        });
    }
    let ax = matvec(a, x)?;
    let q = dot(x.as_slice(), ax.as_slice()) / (xx * xx);
    Ok(if a.is_hermitian() { re(q.re) } else { q })
}

/// `2 (A x - Q(x) x) / x* x`.
pub fn grad_rq(a: &DenseMatrix, x: &DenseVector) -> Result<DenseVector> {
    if !a.is_hermitian() {
        return Err(Error::NotHermitian { op: "grad_rq" });
    }
    let q = rayleigh_quotient(a, x)?;
    let xx = x.norm2().powi(2);
    let mut g = matvec(a, x)?;
    g.axpy(-q, x);
    g.scale(re(2.0 / xx));
    Ok(g)
}

/// Unit-norm Hessian `2(A - lambda I) - 4(A x x* + x x* A* - 2 lambda x x*)`.
pub fn hess_rq(a: &DenseMatrix, x: &DenseVector) -> Result<DenseMatrix> {
    if !a.is_hermitian() {
        return Err(Error::NotHermitian { op: "hess_rq" });
    }
    check_unit("hess_rq", x)?;
    let lambda = rayleigh_quotient(a, x)?;
    let ax = matvec(a, x)?;
    let n = x.len();
    DenseMatrix::from_fn(n, n, |i, j| {
        let shift = if i == j { lambda } else { ZERO };
        let xx = x[i] * x[j].conj();
        let sym = ax[i] * x[j].conj() + x[i] * ax[j].conj();
        (a[(i, j)] - shift) * 2.0 - (sym - xx * lambda * 2.0) * 4.0
    })
    .with_hermitian()
}

fn check_unit(op: &'static str, x: &DenseVector) -> Result<()> {
    let norm = x.norm2();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotNormalized { op, norm });
    }
    Ok(())
}

/// `A - lambda I`, or `diag(A) - lambda I` when `diag` is set.
fn shifted_base(a: &DenseMatrix, lambda: Scalar, diag: bool) -> DenseMatrix {
    if diag {
        let d: Vec<Scalar> = a.diagonal().iter().map(|&v| v - lambda).collect();
        DenseMatrix::from_diag(&d)
    } else {
        a.shifted(lambda)
    }
}

/// `(I - alpha x x*) B (I - beta x x*)` for unit `x`.
pub fn projected_operator(b: &DenseMatrix, x: &DenseVector, alpha: Scalar, beta: Scalar) -> DenseMatrix {
    let u = matvec(b, x).expect("square operator");
    let w = b.adjoint_matvec(x).expect("square operator");
    let xbx = dot(x.as_slice(), u.as_slice());
    let mut op = b.clone();
    op.add_outer(-beta, &u, x);
    op.add_outer(-alpha, x, &w);
    op.add_outer(alpha * beta * xbx, x, x);
    op
}

fn minus(r: &DenseVector) -> DenseVector {
    r.scaled(re(-1.0))
}

fn orthogonalize(mut t: DenseVector, x: &DenseVector, on: bool) -> DenseVector {
    if on {
        t.project_out(x);
    }
    t
}

/// Restricted solve on the orthogonal complement of `x`:
/// `(I - x x*) op (I - x x*) t = -r` in the minimum-norm sense, then projected.
fn solve_on_complement(op: &DenseMatrix, input: &CorrectionInput) -> Result<DenseVector> {
    let restricted = projected_operator(op, input.x(), re(1.0), re(1.0));
    let t = lstsq_minnorm(&restricted, &minus(input.r()))?;
    Ok(orthogonalize(t, input.x(), true))
}

/// Solves with LU, falling back to minimum-norm least squares when the
/// factorization reports a zero pivot.
fn solve_or_lstsq(b: &DenseMatrix, rhs: &DenseVector) -> Result<DenseVector> {
    match lu_solve(b, rhs) {
        Err(Error::SingularMatrix { .. }) => lstsq_minnorm(b, rhs),
        other => other,
    }
}

/// Davidson with `M = diag(A)`: `t_i = -r_i / (a_ii - lambda)`.
pub fn solve_davidson(input: &CorrectionInput, cfg: &StrategyConfig) -> Result<DenseVector> {
    let a = input.a();
    let floor = 1e-14 * a.norm_max();
    let mut t = DenseVector::zeros(input.dim());
    for (i, d) in a.diagonal().into_iter().enumerate() {
        let shift = d - input.lambda();
        if shift.norm() < floor || shift == ZERO {
            return Err(Error::SingularDiagonal { index: i });
        }
        t[i] = -input.r()[i] / shift;
    }
    Ok(orthogonalize(t, input.x(), cfg.enforce_orth))
}

/// `(I - x x*)(A - lambda I)(I - x x*) t = -r`, minimum norm.
pub fn solve_jd(input: &CorrectionInput, cfg: &StrategyConfig) -> Result<DenseVector> {
    let b = input.a().shifted(input.lambda());
    let op = projected_operator(&b, input.x(), re(1.0), re(1.0));
    let t = lstsq_minnorm(&op, &minus(input.r()))?;
    Ok(orthogonalize(t, input.x(), cfg.enforce_orth))
}

/// `(I - x x*)(A - lambda I) t = -r`, minimum norm, then projected against `x`.
pub fn solve_jdm(input: &CorrectionInput) -> Result<DenseVector> {
    let b = input.a().shifted(input.lambda());
    let op = projected_operator(&b, input.x(), re(1.0), ZERO);
    let t = lstsq_minnorm(&op, &minus(input.r()))?;
    Ok(orthogonalize(t, input.x(), true))
}

/// `t = -u + tau v` with `u = (A - lambda I)^-1 r`, `v = (A - lambda I)^-1 x`
/// and `tau = x* u / x* v`. One factorization serves both solves.
pub fn solve_iigd(input: &CorrectionInput, cfg: &StrategyConfig) -> Result<DenseVector> {
    let b = input.a().shifted(input.lambda());
    let (u, v) = match LuFactorization::new(&b) {
        Ok(lu) => (lu.solve(input.r())?, lu.solve(input.x())?),
        Err(Error::SingularMatrix { .. }) => {
            let qr = crate::dense::PivotedQr::new(&b);
            (qr.solve_minnorm(input.r())?, qr.solve_minnorm(input.x())?)
        }
        Err(e) => return Err(e),
    };
    let xv = inner(input.x(), &v)?;
    if xv.norm() <= f64::EPSILON * v.norm2() {
        return Err(Error::Breakdown {
            op: "iigd",
            reason: "x* (A - lambda I)^-1 x vanishes",
        });
    }
    let tau = inner(input.x(), &u)? / xv;
    let mut t = minus(&u);
    t.axpy(tau, &v);
    Ok(orthogonalize(t, input.x(), cfg.enforce_orth))
}

/// One solve `s = (A - lambda I)^-1 x`, then `t = s / (x* s) - x`.
pub fn solve_iigdm(input: &CorrectionInput, cfg: &StrategyConfig) -> Result<DenseVector> {
    let b = input.a().shifted(input.lambda());
    let s = solve_or_lstsq(&b, input.x())?;
    let xs = inner(input.x(), &s)?;
    if xs.norm() <= f64::EPSILON * s.norm2() {
        return Err(Error::Breakdown {
            op: "iigdm",
            reason: "x* (A - lambda I)^-1 x vanishes",
        });
    }
    let mut t = s.scaled(xs.inv());
    t.axpy(re(-1.0), input.x());
    let drift = inner(input.x(), &t)?.norm() > 1e-12;
    Ok(orthogonalize(t, input.x(), cfg.enforce_orth || drift))
}

fn newton_checks(op: &'static str, input: &CorrectionInput, cfg: &StrategyConfig) -> Result<()> {
    if !input.a().is_hermitian() && !cfg.allow_nonhermitian {
        return Err(Error::NotHermitian { op });
    }
    Ok(())
}

/// `A - lambda I - 2(r x* + x r*)` with real `lambda`; the leading term
/// becomes `diag(A) - lambda I` under `diag_precond`.
pub fn n1_operator(input: &CorrectionInput, diag_precond: bool) -> Result<DenseMatrix> {
    let lambda = input.lambda();
    if lambda.im.abs() > REAL_SHIFT_TOL * lambda.norm().max(1.0) {
        return Err(Error::ComplexShift { op: "n1", lambda });
    }
    let mut op = shifted_base(input.a(), re(lambda.re), diag_precond);
    op.add_outer(re(-2.0), input.r(), input.x());
    op.add_outer(re(-2.0), input.x(), input.r());
    Ok(op)
}

/// `(I - 2 x x*) M (I - 2 x x*)` with `M = A - lambda I` or `diag(A) - lambda I`.
pub fn n2_operator(input: &CorrectionInput, diag_precond: bool) -> DenseMatrix {
    let base = shifted_base(input.a(), input.lambda(), diag_precond);
    projected_operator(&base, input.x(), re(2.0), re(2.0))
}

/// Newton equation in rank-2 form. With `enforce_orth` the solve is
/// restricted to the orthogonal complement of `x`.
pub fn solve_n1(input: &CorrectionInput, cfg: &StrategyConfig) -> Result<DenseVector> {
    newton_checks("n1", input, cfg)?;
    let op = n1_operator(input, cfg.diag_precond)?;
    if cfg.enforce_orth {
        return solve_on_complement(&op, input);
    }
    lstsq_minnorm(&op, &minus(input.r()))
}

/// Reflector-conjugated Newton equation; LU with least-squares fallback.
pub fn solve_n2(input: &CorrectionInput, cfg: &StrategyConfig) -> Result<DenseVector> {
    newton_checks("n2", input, cfg)?;
    let op = n2_operator(input, cfg.diag_precond);
    if cfg.enforce_orth {
        return solve_on_complement(&op, input);
    }
    solve_or_lstsq(&op, &minus(input.r()))
}

/// `(I - alpha x x*)(A - lambda I)(I - beta x x*) t = -r`, minimum norm.
pub fn solve_generalized(
    input: &CorrectionInput,
    alpha: Scalar,
    beta: Scalar,
    enforce_orth: bool,
) -> Result<DenseVector> {
    if alpha == ZERO {
        return Err(Error::InvalidConfig(
            "generalized correction requires alpha != 0".into(),
        ));
    }
    let b = input.a().shifted(input.lambda());
    let op = projected_operator(&b, input.x(), alpha, beta);
    if enforce_orth {
        return solve_on_complement(&op, input);
    }
    lstsq_minnorm(&op, &minus(input.r()))
}

/// `[[A - lambda I, -x], [-x*, 0]] [t; eta] = [-r; 0]` by one LU solve.
pub fn solve_bordered(input: &CorrectionInput) -> Result<(DenseVector, Scalar)> {
    let n = input.dim();
    let a = input.a();
    let x = input.x();
    let lambda = input.lambda();
    let m = DenseMatrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
        (true, true) if i == j => a[(i, j)] - lambda,
        (true, true) => a[(i, j)],
        (true, false) => -x[i],
        (false, true) => -x[j].conj(),
        (false, false) => ZERO,
    });
    let mut rhs = DenseVector::zeros(n + 1);
    for i in 0..n {
        rhs[i] = -input.r()[i];
    }
    let sol = lu_solve(&m, &rhs)?;
    let mut v = sol.into_vec();
    let eta = v.pop().unwrap_or(ZERO);
    Ok((DenseVector::from_vec(v), eta))
}

/// Expansion vector for the configured strategy.
pub fn correction(input: &CorrectionInput, cfg: &StrategyConfig) -> Result<DenseVector> {
    cfg.validate()?;
    match cfg.kind {
        StrategyKind::Davidson => solve_davidson(input, cfg),
        StrategyKind::Jd => solve_jd(input, cfg),
        StrategyKind::Jdm => solve_jdm(input),
        StrategyKind::Iigd => solve_iigd(input, cfg),
        StrategyKind::Iigdm => solve_iigdm(input, cfg),
        StrategyKind::N1 => solve_n1(input, cfg),
        StrategyKind::N2 => solve_n2(input, cfg),
        StrategyKind::Generalized => solve_generalized(input, cfg.alpha, cfg.beta, cfg.enforce_orth),
        StrategyKind::Bordered => {
            let (t, _) = solve_bordered(input)?;
            Ok(orthogonalize(t, input.x(), cfg.enforce_orth))
        }
    }
}
