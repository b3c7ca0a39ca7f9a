//! Experiment protocol: perturbed reference eigenvector as the common start,
//! one run per strategy, CSV history and a gnuplot script.

use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::corrections::{StrategyConfig, StrategyKind};
use crate::dense::{re, small_eig, DenseMatrix, DenseVector, Scalar};
use crate::driver::{run, EigResult, SelectionMode, SolverConfig};
use crate::error::{Error, Result};
use crate::matio::{gen_model, read_matrix_market, symmetrize, ModelSpec};
use crate::rng;

/// Perturbation size for Hermitian problems.
pub const PERTURB_SYMMETRIC: f64 = 5e-2;
/// Perturbation size for non-Hermitian problems.
pub const PERTURB_NONSYMMETRIC: f64 = 1e-2;

pub const CSV_HEADER: &str = "strategy,outer_iter,subspace_dim,lambda_re,lambda_im,resid_norm,wall_ms";

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    Mtx(PathBuf),
    Model(ModelSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub source: MatrixSource,
    pub symmetrize: bool,
    pub mode: SelectionMode,
    pub tol: f64,
    /// `None` picks the protocol default from the matrix symmetry.
    pub perturb_eps: Option<f64>,
    pub seed: u64,
    pub strategies: Vec<StrategyConfig>,
    pub max_outer: usize,
    pub max_restarts: usize,
    pub allow_nonhermitian_newton: bool,
}

impl ExperimentSpec {
    pub fn new(source: MatrixSource, mode: SelectionMode, strategies: Vec<StrategyConfig>) -> Self {
        Self {
            source,
            symmetrize: false,
            mode,
            tol: SolverConfig::DEFAULT_TOL,
            perturb_eps: None,
            seed: 0,
            strategies,
            max_outer: SolverConfig::DEFAULT_MAX_OUTER,
            max_restarts: SolverConfig::DEFAULT_MAX_RESTARTS,
            allow_nonhermitian_newton: false,
        }
    }

    pub fn source_name(&self) -> String {
        match &self.source {
            MatrixSource::Mtx(p) => p.display().to_string(),
            MatrixSource::Model(m) => m.to_string(),
        }
    }

    /// The matrix under study: loaded or generated, then symmetrized on request.
    pub fn load_matrix(&self) -> Result<DenseMatrix> {
        let a = match &self.source {
            MatrixSource::Mtx(path) => read_matrix_market(path)?.0,
            MatrixSource::Model(m) => gen_model(m, self.seed)?,
        };
        if self.symmetrize {
            symmetrize(&a)
        } else {
            Ok(a)
        }
    }

    pub fn solver_config(&self, strategy: StrategyConfig) -> SolverConfig {
        let mut strategy = strategy;
        if matches!(strategy.kind, StrategyKind::N1 | StrategyKind::N2) {
            strategy.allow_nonhermitian |= self.allow_nonhermitian_newton;
        }
        SolverConfig {
            tol: self.tol,
            max_outer: self.max_outer,
            max_restarts: self.max_restarts,
            ..SolverConfig::new(self.mode, strategy)
        }
    }
}

/// `x0 = normalize(v_ref + eps u)` with `u` uniform on `[0, 1)`, where
/// `(lambda_ref, v_ref)` is the eigenpair selected by `mode` from the full
/// dense spectrum. `eps = 0` returns `v_ref` unchanged.
pub fn make_initial(
    a: &DenseMatrix,
    mode: SelectionMode,
    eps: f64,
    seed: u64,
) -> Result<(DenseVector, Scalar)> {
    let eig = small_eig(a)?;
    let k = mode
        .pick(&eig.values)
        .ok_or(Error::ZeroVector { op: "make_initial" })?;
    let v = eig.vectors.column(k);
    if eps == 0.0 {
        return Ok((v, eig.values[k]));
    }
    let mut s = rng::seeded(seed);
    let mut x = v;
    for z in x.as_mut_slice() {
        *z += re(eps * rng::uniform01(&mut s));
    }
    Ok((x.normalized()?, eig.values[k]))
}

/// Bitwise hash of a vector, used to check that every strategy started
/// from the same point.
pub fn vector_hash(x: &DenseVector) -> u64 {
    let mut h = std::hash::DefaultHasher::new();
    for z in x.iter() {
        z.re.to_bits().hash(&mut h);
        z.im.to_bits().hash(&mut h);
    }
    h.finish()
}

#[derive(Debug, Clone)]
pub struct StrategyRun {
    pub strategy: StrategyConfig,
    pub result: EigResult,
    pub x0_hash: u64,
    /// `|lambda - lambda_ref|`.
    pub eigenvalue_error: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub source: String,
    pub n: usize,
    pub hermitian: bool,
    pub perturb_eps: f64,
    pub reference_value: Scalar,
    pub x0: DenseVector,
    pub runs: Vec<StrategyRun>,
}

impl RunReport {
    pub fn all_converged(&self) -> bool {
        self.runs.iter().all(|r| r.result.converged)
    }

    /// True when every run hashed the same start vector as the report.
    pub fn fair_start(&self) -> bool {
        let h = vector_hash(&self.x0);
        self.runs.iter().all(|r| r.x0_hash == h)
    }
}

/// Runs every strategy of `spec` from the same perturbed start vector.
/// Strategies run concurrently; the report keeps the requested order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunReport> {
    let a = spec.load_matrix()?;
    run_experiment_on(spec, &a)
}

/// [`run_experiment`] on a matrix already in memory.
pub fn run_experiment_on(spec: &ExperimentSpec, a: &DenseMatrix) -> Result<RunReport> {
    if spec.strategies.is_empty() {
        return Err(Error::InvalidConfig("no strategy requested".into()));
    }
    let configs: Vec<SolverConfig> = spec
        .strategies
        .iter()
        .map(|&s| spec.solver_config(s))
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let hermitian = a.is_hermitian();
    let eps = spec.perturb_eps.unwrap_or(if hermitian {
        PERTURB_SYMMETRIC
    } else {
        PERTURB_NONSYMMETRIC
    });
    // the model stream uses `seed`; the perturbation uses the next seed
    let (x0, reference_value) = make_initial(a, spec.mode, eps, spec.seed.wrapping_add(1))?;

    let results: Vec<Result<StrategyRun>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|cfg| {
                let x0 = &x0;
                scope.spawn(move || {
                    let x0_hash = vector_hash(x0);
                    let result = run(a, x0, cfg)?;
                    Ok(StrategyRun {
                        strategy: cfg.strategy,
                        eigenvalue_error: (result.eigenvalue - reference_value).norm(),
                        result,
                        x0_hash,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("strategy thread panicked"))
            .collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;

    Ok(RunReport {
        source: spec.source_name(),
        n: a.rows(),
        hermitian,
        perturb_eps: eps,
        reference_value,
        x0,
        runs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    /// Write measured wall time; when off the column is zero so that
    /// identical runs give identical bytes.
    pub timing: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { timing: true }
    }
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text: one initial row per strategy followed by its history.
pub fn csv_string(report: &RunReport, opts: CsvOptions) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for run in &report.runs {
        let label = run.strategy.label();
        let h = &run.result.history;
        for rec in std::iter::once(&h.initial).chain(&h.records) {
            let wall = if opts.timing { rec.wall_ms } else { 0.0 };
            let _ = writeln!(
                out,
                "{label},{},{},{},{},{},{}",
                rec.outer,
                rec.subspace_dim,
                sci(rec.lambda.re),
                sci(rec.lambda.im),
                sci(rec.resid_norm),
                sci(wall)
            );
        }
    }
    out
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        context: format!("writing {}", path.display()),
        source,
    }
}

pub fn emit_csv(report: &RunReport, path: &Path) -> Result<()> {
    emit_csv_with(report, path, CsvOptions::default())
}

pub fn emit_csv_with(report: &RunReport, path: &Path, opts: CsvOptions) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(csv_string(report, opts).as_bytes())
        .map_err(|e| io_err(path, e))
}

/// Gnuplot script plotting residual norm against outer iteration on a
/// logarithmic axis, one series per strategy.
pub fn plot_script(report: &RunReport, csv_path: &Path) -> String {
    let csv = csv_path.display().to_string().replace('\'', "''");
    let mut s = String::new();
    let _ = writeln!(s, "# residual history for {}", report.source);
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(s, "set format y '10^{{%L}}'");
    let _ = writeln!(s, "set xlabel 'outer iteration'");
    let _ = writeln!(s, "set ylabel 'residual norm'");
    let _ = writeln!(s, "set key outside right");
    let series: Vec<String> = report
        .runs
        .iter()
        .map(|r| {
            let label = r.strategy.label();
            format!(
                "'{csv}' skip 1 using (strcol(1) eq '{label}' ? $2 : 1/0):6 with linespoints title '{label}'"
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    s
}

pub fn emit_plot_script(report: &RunReport, csv_path: &Path, script_path: &Path) -> Result<()> {
    std::fs::write(script_path, plot_script(report, csv_path)).map_err(|e| io_err(script_path, e))
}
