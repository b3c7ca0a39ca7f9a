//! The subspace iteration: orthonormal basis `V`, `W = A V`, the projected
//! matrix `H = V* A V`, Ritz selection, restart and convergence history.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::corrections::{correction, CorrectionInput, StrategyConfig};
use crate::dense::{
    dot, lstsq_minnorm, matvec, re, small_eig, DenseMatrix, DenseVector, Scalar, ZERO,
};
use crate::error::{Error, Result};

/// Selection keys within this relative distance of the best key count as ties.
pub const RITZ_TIE_TOL: f64 = 1e-12;

/// Remainder below this fraction of `||t||` after two passes means `t`
/// lies in the span of the basis.
pub const DEPENDENCE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMode {
    /// Largest real part.
    LR,
    /// Largest magnitude.
    LM,
    /// Smallest real part.
    SR,
    /// Smallest magnitude.
    SM,
}

impl SelectionMode {
    /// Primary key, larger is preferred.
    fn key(self, z: Scalar) -> f64 {
        match self {
            SelectionMode::LR => z.re,
            SelectionMode::LM => z.norm(),
            SelectionMode::SR => -z.re,
            SelectionMode::SM => -z.norm(),
        }
    }

    /// Index of the preferred value. Keys within [`RITZ_TIE_TOL`] of the
    /// best key tie; ties go to the smaller imaginary part, then the
    /// smaller index.
    pub fn pick(self, values: &[Scalar]) -> Option<usize> {
        let best = values.iter().map(|&z| self.key(z)).fold(f64::NEG_INFINITY, f64::max);
        let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let slack = RITZ_TIE_TOL * scale;
        values
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, z)| self.key(z) >= best - slack)
            .min_by(|a, b| a.1.im.total_cmp(&b.1.im).then(a.0.cmp(&b.0)))
            .map(|(k, _)| k)
    }

    /// Exact total order: `Less` means `a` is preferred. Equal keys fall back to
    /// the smaller imaginary part, then to the smaller index.
    pub fn compare(self, a: (usize, Scalar), b: (usize, Scalar)) -> Ordering {
        self.key(b.1)
            .total_cmp(&self.key(a.1))
            .then(a.1.im.total_cmp(&b.1.im))
            .then(a.0.cmp(&b.0))
    }
}

impl fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "LR" => SelectionMode::LR,
            "LM" => SelectionMode::LM,
            "SR" => SelectionMode::SR,
            "SM" => SelectionMode::SM,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown selection mode '{s}' (expected LR, LM, SR or SM)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub mode: SelectionMode,
    /// Relative residual threshold.
    pub tol: f64,
    /// Largest subspace dimension before a restart; capped at `n`.
    pub max_outer: usize,
    pub max_restarts: usize,
    pub strategy: StrategyConfig,
    /// DGKS reorthogonalization threshold.
    pub reorth_eta: f64,
}

impl SolverConfig {
    pub const DEFAULT_TOL: f64 = 1e-10;
    pub const DEFAULT_MAX_OUTER: usize = 30;
    pub const DEFAULT_MAX_RESTARTS: usize = 20;

    pub fn new(mode: SelectionMode, strategy: StrategyConfig) -> Self {
        Self {
            mode,
            tol: Self::DEFAULT_TOL,
            max_outer: Self::DEFAULT_MAX_OUTER,
            max_restarts: Self::DEFAULT_MAX_RESTARTS,
            strategy,
            reorth_eta: std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_outer < 2 {
            return Err(Error::InvalidConfig(format!(
                "max_outer must be at least 2, got {}",
                self.max_outer
            )));
        }
        if !(self.reorth_eta > 0.0 && self.reorth_eta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "reorth_eta must lie in (0, 1), got {}",
                self.reorth_eta
            )));
        }
        self.strategy.validate()
    }
}

/// `max(|lambda|, ||A||_F / sqrt(n))`, the scale of the relative residual test.
pub fn residual_scale(a: &DenseMatrix, lambda: Scalar) -> f64 {
    let n = a.rows().max(1) as f64;
    lambda.norm().max(a.norm_fro() / n.sqrt())
}

/// Orthonormalizes `t` against the columns of `v` (one Gram-Schmidt pass,
/// repeated once when the remainder shrinks below `eta` times its input).
pub fn dgks(v: &DenseMatrix, t: &DenseVector, eta: f64) -> Result<DenseVector> {
    if t.len() != v.rows() {
        return Err(Error::dims(
            "dgks",
            format!("basis with {} rows, vector of length {}", v.rows(), t.len()),
        ));
    }
    let tn = t.norm2();
    if tn == 0.0 || !tn.is_finite() {
        return Err(Error::LinearlyDependent);
    }
    let mut w = t.clone();
    let mut before = tn;
    for _pass in 0..2 {
        let h = v.adjoint_matvec(&w)?;
        for (j, &hj) in h.iter().enumerate() {
            if hj != ZERO {
                for (wi, &vij) in w.as_mut_slice().iter_mut().zip(v.col(j)) {
                    *wi -= vij * hj;
                }
            }
        }
        let after = w.norm2();
        if after > eta * before {
            break;
        }
        before = after;
    }
    let wn = w.norm2();
    if wn < DEPENDENCE_TOL * tn {
        return Err(Error::LinearlyDependent);
    }
    Ok(w.scaled(re(1.0 / wn)))
}

/// Eigenpair of `h` extremal under `mode`, with unit eigenvector.
pub fn select_ritz(h: &DenseMatrix, mode: SelectionMode) -> Result<(Scalar, DenseVector)> {
    if !h.is_square() || h.rows() == 0 {
        return Err(Error::dims(
            "select_ritz",
            format!("{}x{} projected matrix", h.rows(), h.cols()),
        ));
    }
    let eig = small_eig(h)?;
    let best = mode.pick(&eig.values).expect("nonempty spectrum");
    let y = eig.vectors.column(best).normalized()?;
    Ok((eig.values[best], y))
}

/// Unit direction of `(A - lambda I)^-1 x` by minimum-norm least squares.
pub fn rqi_direction(a: &DenseMatrix, lambda: Scalar, x: &DenseVector) -> Result<DenseVector> {
    lstsq_minnorm(&a.shifted(lambda), x)?.normalized()
}

/// `V`, `W = A V`, `H = V* W` and the selected Ritz pair.
#[derive(Clone, Debug)]
pub struct SubspaceState {
    v: DenseMatrix,
    w: DenseMatrix,
    h: DenseMatrix,
    lambda: Scalar,
    y: DenseVector,
    x: DenseVector,
    r: DenseVector,
    hermitian: bool,
}

/// What happened during one call to [`SubspaceState::expand`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExpandOutcome {
    /// The strategy failed numerically and `t = -r` was used instead.
    pub fallback: bool,
    /// `t` was numerically in the span of `V`; nothing was added.
    pub skipped: bool,
}

impl SubspaceState {
    pub fn init(a: &DenseMatrix, x0: &DenseVector) -> Result<Self> {
        if !a.is_square() || a.rows() != x0.len() {
            return Err(Error::dims(
                "init",
                format!("{}x{} matrix with start vector of length {}", a.rows(), a.cols(), x0.len()),
            ));
        }
        let x = x0.normalized().map_err(|_| Error::ZeroVector { op: "init" })?;
        let w = matvec(a, &x)?;
        let hermitian = a.is_hermitian();
        let mut h00 = dot(x.as_slice(), w.as_slice());
        if hermitian {
            h00 = re(h00.re);
        }
        let mut r = w.clone();
        r.axpy(-h00, &x);
        Ok(Self {
            v: DenseMatrix::from_columns(std::slice::from_ref(&x)),
            w: DenseMatrix::from_columns(std::slice::from_ref(&w)),
            h: DenseMatrix::from_diag(&[h00]),
            lambda: h00,
            y: DenseVector::from_vec(vec![re(1.0)]),
            x,
            r,
            hermitian,
        })
    }

    pub fn dim(&self) -> usize {
        self.v.cols()
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn w(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn h(&self) -> &DenseMatrix {
        &self.h
    }

    pub fn ritz_value(&self) -> Scalar {
        self.lambda
    }

    pub fn ritz_coeff(&self) -> &DenseVector {
        &self.y
    }

    pub fn ritz_vector(&self) -> &DenseVector {
        &self.x
    }

    pub fn residual(&self) -> &DenseVector {
        &self.r
    }

    pub fn resid_norm(&self) -> f64 {
        self.r.norm2()
    }

    pub fn is_converged(&self, a: &DenseMatrix, tol: f64) -> bool {
        self.resid_norm() <= tol * residual_scale(a, self.lambda)
    }

    /// Strategy step followed by [`expand_with`](Self::expand_with). Numerical
    /// failures of the strategy fall back to `t = -r`; a dependent `t`
    /// leaves the state untouched and reports `skipped`.
    pub fn expand(&mut self, a: &DenseMatrix, cfg: &SolverConfig) -> Result<ExpandOutcome> {
        let input = CorrectionInput::trusted(a, self.x.clone(), self.lambda, self.r.clone());
        let mut outcome = ExpandOutcome::default();
        let t = match correction(&input, &cfg.strategy) {
            Ok(t) if t.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => t,
            Ok(_)
            | Err(
                Error::Breakdown { .. }
                | Error::SingularDiagonal { .. }
                | Error::SingularMatrix { .. }
                | Error::ComplexShift { .. },
            ) => {
                outcome.fallback = true;
                self.r.scaled(re(-1.0))
            }
            Err(e) => return Err(e),
        };
        match self.expand_with(a, &t, cfg.reorth_eta, cfg.mode) {
            Ok(()) => {}
            Err(Error::LinearlyDependent) => outcome.skipped = true,
            Err(e) => return Err(e),
        }
        Ok(outcome)
    }

    /// Appends `dgks(V, t)` to the basis, updates `W` and `H`, and
    /// re-selects the Ritz pair.
    pub fn expand_with(
        &mut self,
        a: &DenseMatrix,
        t: &DenseVector,
        eta: f64,
        mode: SelectionMode,
    ) -> Result<()> {
        let v = dgks(&self.v, t, eta)?;
        let wv = matvec(a, &v)?;
        let j = self.dim();
        // last column of the new H: V_{j+1}* w_{j+1}
        let mut col: Vec<Scalar> = (0..j).map(|i| dot(self.v.col(i), wv.as_slice())).collect();
        col.push(dot(v.as_slice(), wv.as_slice()));
        // last row of the new H
        let row: Vec<Scalar> = if self.hermitian {
            col[..j].iter().map(|z| z.conj()).collect()
        } else {
            (0..j).map(|k| dot(v.as_slice(), self.w.col(k))).collect()
        };
        if self.hermitian {
            col[j] = re(col[j].re);
        }
        let old = &self.h;
        let h = DenseMatrix::from_fn(j + 1, j + 1, |r, c| match (r < j, c < j) {
            (true, true) => old[(r, c)],
            (_, false) => col[r],
            (false, true) => row[c],
        });
        let h = if self.hermitian { h.with_hermitian()? } else { h };
        let (lambda, y) = select_ritz(&h, mode)?;

        self.v.push_column(&v);
        self.w.push_column(&wv);
        self.h = h;
        self.set_ritz(lambda, y);
        Ok(())
    }

    /// `x = V y`, `r = W y - lambda x`.
    fn set_ritz(&mut self, lambda: Scalar, y: DenseVector) {
        let x = matvec(&self.v, &y).expect("basis and coefficients agree");
        let mut r = matvec(&self.w, &y).expect("basis and coefficients agree");
        r.axpy(-lambda, &x);
        self.lambda = lambda;
        self.y = y;
        self.x = x;
        self.r = r;
    }

    /// Collapses to `V = [x]`, `W = [W y]`, `H = [lambda]`; no new matvec.
    pub fn restart(&mut self) {
        let mut wy = matvec(&self.w, &self.y).expect("basis and coefficients agree");
        let mut x = self.x.clone();
        let s = 1.0 / x.norm2();
        x.scale(re(s));
        wy.scale(re(s));
        let mut r = wy.clone();
        r.axpy(-self.lambda, &x);
        self.v = DenseMatrix::from_columns(std::slice::from_ref(&x));
        self.w = DenseMatrix::from_columns(std::slice::from_ref(&wy));
        self.h = DenseMatrix::from_diag(&[self.lambda]);
        if self.hermitian {
            self.h = self.h.clone().detect_hermitian();
        }
        self.y = DenseVector::from_vec(vec![re(1.0)]);
        self.x = x;
        self.r = r;
    }
}

/// One row of the convergence history.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 0 for the initial state, then 1, 2, ... per expansion.
    pub outer: usize,
    pub subspace_dim: usize,
    pub lambda: Scalar,
    pub resid_norm: f64,
    pub strategy: String,
    /// Milliseconds since the start of the run.
    pub wall_ms: f64,
    pub fallback: bool,
    pub skipped: bool,
    /// A restart preceded this expansion.
    pub restarted: bool,
}

/// Initial state plus one record per expansion attempt, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceHistory {
    pub initial: IterationRecord,
    pub records: Vec<IterationRecord>,
}

impl ConvergenceHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Residual norms including the initial one.
    pub fn residuals(&self) -> Vec<f64> {
        std::iter::once(self.initial.resid_norm)
            .chain(self.records.iter().map(|r| r.resid_norm))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct EigResult {
    pub converged: bool,
    pub eigenvalue: Scalar,
    pub eigenvector: DenseVector,
    /// Expansion attempts, equal to `history.len()`.
    pub iterations: usize,
    pub restarts: usize,
    pub history: ConvergenceHistory,
}

/// Stage reported to a [`run_observed`] callback.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEvent {
    Init,
    Restarted,
    Expanded(ExpandOutcome),
}

pub fn run(a: &DenseMatrix, x0: &DenseVector, cfg: &SolverConfig) -> Result<EigResult> {
    run_observed(a, x0, cfg, |_, _| {})
}

/// [`run`] with a callback invoked after initialization, after every
/// restart and after every expansion.
pub fn run_observed(
    a: &DenseMatrix,
    x0: &DenseVector,
    cfg: &SolverConfig,
    mut observe: impl FnMut(&SubspaceState, StepEvent),
) -> Result<EigResult> {
    cfg.validate()?;
    let s = &cfg.strategy;
    let newton = matches!(
        s.kind,
        crate::corrections::StrategyKind::N1 | crate::corrections::StrategyKind::N2
    );
    if newton && !a.is_hermitian() && !s.allow_nonhermitian {
        return Err(Error::NotHermitian { op: "run" });
    }
    let start = Instant::now();
    let label = s.label();
    let m = cfg.max_outer.min(a.rows()).max(1);

    let mut state = SubspaceState::init(a, x0)?;
    observe(&state, StepEvent::Init);
    let record = |state: &SubspaceState, outer: usize| IterationRecord {
        outer,
        subspace_dim: state.dim(),
        lambda: state.ritz_value(),
        resid_norm: state.resid_norm(),
        strategy: label.clone(),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        fallback: false,
        skipped: false,
        restarted: false,
    };
    let initial = record(&state, 0);
    let mut records = Vec::new();
    let mut converged = state.is_converged(a, cfg.tol);
    let mut restarts = 0;
    let mut force_restart = false;

    while !converged {
        let mut restarted = false;
        if state.dim() >= m || force_restart {
            if restarts == cfg.max_restarts {
                break;
            }
            restarts += 1;
            state.restart();
            restarted = true;
            observe(&state, StepEvent::Restarted);
        }
        let outcome = match state.expand(a, cfg) {
            Ok(o) => o,
            // the projected eigenproblem failed; report what we have
            Err(Error::NonConvergence { .. }) => break,
            Err(e) => return Err(e),
        };
        observe(&state, StepEvent::Expanded(outcome));
        let mut rec = record(&state, records.len() + 1);
        rec.fallback = outcome.fallback;
        rec.skipped = outcome.skipped;
        rec.restarted = restarted;
        records.push(rec);
        force_restart = outcome.skipped;
        converged = state.is_converged(a, cfg.tol);
    }

    Ok(EigResult {
        converged,
        eigenvalue: state.ritz_value(),
        eigenvector: state.ritz_vector().clone(),
        iterations: records.len(),
        restarts,
        history: ConvergenceHistory { initial, records },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrections::StrategyKind;
    use crate::dense::sin_angle;

    fn jd() -> StrategyConfig {
        StrategyConfig::new(StrategyKind::Jd)
    }

    #[test]
    fn init_examples() {
        let x0 = DenseVector::from_real(&[0.3, 0.4]);
        let s = SubspaceState::init(&DenseMatrix::identity(2), &x0).unwrap();
        assert!((s.ritz_value() - re(1.0)).norm() < 1e-15);
        assert!(s.resid_norm() < 1e-15);

        let s = SubspaceState::init(&DenseMatrix::from_real_diag(&[2.0, 1.0]), &DenseVector::unit(2, 0))
            .unwrap();
        assert_eq!((s.ritz_value(), s.resid_norm()), (re(2.0), 0.0));

        let a = DenseMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]).detect_hermitian();
        let s = SubspaceState::init(&a, &DenseVector::unit(2, 0)).unwrap();
        assert_eq!(s.ritz_value(), re(2.0));
        assert_eq!(s.residual(), &DenseVector::from_real(&[0.0, 1.0]));

        assert!(matches!(
            SubspaceState::init(&a, &DenseVector::zeros(2)),
            Err(Error::ZeroVector { .. })
        ));
    }

    #[test]
    fn dgks_examples() {
        let v = DenseMatrix::from_columns(&[DenseVector::unit(2, 0)]);
        let eta = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(dgks(&v, &DenseVector::unit(2, 1), eta).unwrap(), DenseVector::unit(2, 1));
        let t = DenseVector::from_real(&[1.0, 1e-9]);
        let out = dgks(&v, &t, eta).unwrap();
        assert!(out.sub(&DenseVector::unit(2, 1)).norm2() < 1e-15, "{out:?}");
        assert!(matches!(
            dgks(&v, &DenseVector::unit(2, 0), eta),
            Err(Error::LinearlyDependent)
        ));
    }

    #[test]
    fn select_ritz_examples() {
        let h = DenseMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let (l, y) = select_ritz(&h, SelectionMode::LR).unwrap();
        assert_eq!(l, re(3.0));
        assert!(sin_angle(&y, &DenseVector::unit(3, 0)) < 1e-15);
        let (l, y) = select_ritz(&h, SelectionMode::SM).unwrap();
        assert_eq!(l, re(1.0));
        assert!(sin_angle(&y, &DenseVector::unit(3, 1)) < 1e-15);

        let rot = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let (l, _) = select_ritz(&rot, SelectionMode::LM).unwrap();
        assert!((l - Scalar::new(0.0, -1.0)).norm() < 1e-14, "{l}");
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("sr".parse::<SelectionMode>().unwrap(), SelectionMode::SR);
        assert!("LI".parse::<SelectionMode>().is_err());
    }

    #[test]
    fn expand_matches_explicit_rayleigh_ritz() {
        let a = DenseMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let cfg = SolverConfig::new(SelectionMode::LR, jd());
        // x0 = (1,1,1): lambda = 2 is itself an eigenvalue and the exact JD
        // step spans {(1,1,0), (0,0,1)}, whose Ritz values are both 2
        for (x0, strictly_up) in [([1.0, 1.0, 1.0], false), ([1.0, 2.0, 1.0], true)] {
            let mut s = SubspaceState::init(&a, &DenseVector::from_real(&x0)).unwrap();
            let l0 = s.ritz_value().re;
            s.expand(&a, &cfg).unwrap();
            let h = s.v().adjoint().matmul(&a.matmul(s.v()).unwrap()).unwrap();
            let (l, _) = select_ritz(&h.detect_hermitian(), SelectionMode::LR).unwrap();
            assert!((l - s.ritz_value()).norm() < 1e-13);
            assert!(s.ritz_value().re >= l0 - 1e-14);
            if strictly_up {
                assert!(s.ritz_value().re > l0 + 1e-6, "{} vs {l0}", s.ritz_value());
            }
        }
    }

    #[test]
    fn expanding_with_an_eigenvector_converges() {
        let a = DenseMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let mut s = SubspaceState::init(&a, &DenseVector::from_real(&[0.0, 1.0, 1.0])).unwrap();
        s.expand_with(&a, &DenseVector::unit(3, 0), 0.7, SelectionMode::LR).unwrap();
        assert!(s.resid_norm() <= 1e-12);
        assert!((s.ritz_value() - re(3.0)).norm() < 1e-14);
    }

    #[test]
    fn restart_preserves_pair() {
        let a = DenseMatrix::from_real_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]])
            .detect_hermitian();
        let cfg = SolverConfig::new(SelectionMode::LR, jd());
        let mut s = SubspaceState::init(&a, &DenseVector::from_real(&[1.0, 0.0, 0.0])).unwrap();
        s.expand(&a, &cfg).unwrap();
        let (l, rn) = (s.ritz_value(), s.resid_norm());
        s.restart();
        assert_eq!(s.dim(), 1);
        assert!((s.ritz_value() - l).norm() < 1e-12);
        assert!((s.resid_norm() - rn).abs() < 1e-12);
        let ax = matvec(&a, s.ritz_vector()).unwrap();
        assert!(ax.sub(&s.w().column(0)).norm2() < 1e-12 * a.norm_fro());
        let q = crate::corrections::rayleigh_quotient(&a, s.ritz_vector()).unwrap();
        assert!((q - l).norm() < 1e-12);
    }

    #[test]
    fn identity_converges_at_init() {
        let res = run(
            &DenseMatrix::identity(4),
            &DenseVector::from_real(&[1.0, 2.0, 3.0, 4.0]),
            &SolverConfig::new(SelectionMode::LR, jd()),
        )
        .unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 0);
        assert!(res.history.is_empty());
    }

    #[test]
    fn diagonal_run_converges_quickly() {
        let a = DenseMatrix::from_real_diag(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let mut rng = crate::rng::seeded(3);
        let x0 = DenseVector::from_fn(5, |i| {
            re(if i == 4 { 1.0 } else { 0.0 } + 1e-3 * crate::rng::uniform01(&mut rng))
        });
        let res = run(&a, &x0, &SolverConfig::new(SelectionMode::LR, jd())).unwrap();
        assert!(res.converged);
        assert!(res.iterations <= 4, "{}", res.iterations);
        assert!((res.eigenvalue - re(5.0)).norm() < 1e-10);
        assert_eq!(res.history.len(), res.iterations);
    }

    #[test]
    fn rqi_direction_examples() {
        let a = DenseMatrix::from_real_diag(&[3.0, 1.0]);
        let s = 0.5f64.sqrt();
        let d = rqi_direction(&a, ZERO, &DenseVector::from_real(&[s, s])).unwrap();
        assert!(sin_angle(&d, &DenseVector::from_real(&[1.0 / 3.0, 1.0])) < 1e-15);
        let d = rqi_direction(&a, re(10.0), &DenseVector::unit(2, 0)).unwrap();
        assert!(sin_angle(&d, &DenseVector::unit(2, 0)) < 1e-15);
    }

    #[test]
    fn newton_on_nonhermitian_needs_opt_in() {
        let a = DenseMatrix::from_real_rows(&[&[2.0, 1.0], &[0.0, 1.0]]);
        let cfg = SolverConfig::new(SelectionMode::LR, StrategyConfig::new(StrategyKind::N2));
        assert!(matches!(
            run(&a, &DenseVector::from_real(&[1.0, 1.0]), &cfg),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::new(SelectionMode::SR, jd());
        cfg.tol = 0.0;
        assert!(cfg.validate().is_err());
        cfg.tol = 1e-8;
        cfg.max_outer = 1;
        assert!(cfg.validate().is_err());
        cfg.max_outer = 10;
        cfg.reorth_eta = 1.0;
        assert!(cfg.validate().is_err());
    }
}
