//! Argument handling and the experiment entry point behind the `subeig` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use subeig::corrections::{StrategyConfig, StrategyKind};
use subeig::experiment::{emit_csv_with, emit_plot_script, run_experiment_on, CsvOptions};
use subeig::{Error, ExperimentSpec, MatrixSource, ModelSpec, Result, RunReport, SelectionMode};

pub const NEWTON_CAVEAT: &str = "note: n1/n2 are derived for Hermitian matrices; \
on non-Hermitian input they run with the formulas unchanged and carry no convergence guarantee";

#[derive(Debug, Parser)]
#[command(name = "subeig", version, about = "Compare correction equations for subspace eigensolvers")]
pub struct Args {
    /// Matrix Market file to load.
    #[arg(long, value_name = "PATH", conflicts_with = "gen", required_unless_present = "gen")]
    pub matrix: Option<PathBuf>,

    /// Synthetic model `name:n[:p1,p2,...]`, e.g. `laplace2d:225` or `convdiff2d:225:0.5`.
    #[arg(long, value_name = "SPEC")]
    pub gen: Option<String>,

    /// Replace A by (A + A*)/2.
    #[arg(long)]
    pub symmetrize: bool,

    /// Which eigenvalue to track: LR, LM, SR or SM.
    #[arg(long, default_value = "SR")]
    pub mode: SelectionMode,

    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    /// Size of the start-vector perturbation [default: 5e-2 Hermitian, 1e-2 otherwise].
    #[arg(long)]
    pub perturb: Option<f64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Comma-separated methods: davidson, jd, jdm, iigd, iigdm, n1, n2,
    /// n1:diag, n2:diag, general:a,b, bordered, or `all`.
    #[arg(long, default_value = "all")]
    pub method: String,

    /// Subspace dimension that triggers a restart.
    #[arg(long, default_value_t = 30)]
    pub max_outer: usize,

    #[arg(long, default_value_t = 20)]
    pub max_restarts: usize,

    /// Write the convergence history as CSV.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Write a gnuplot script for the CSV.
    #[arg(long, value_name = "PATH", requires = "out")]
    pub plot: Option<PathBuf>,

    /// Run n1/n2 on non-Hermitian matrices.
    #[arg(long)]
    pub allow_nonhermitian_newton: bool,

    /// Write zero in the wall_ms column so that reruns are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

/// Splits a method list on commas. A `general:a` token absorbs the
/// numeric token that follows it, so `general:2,0` names one method.
pub fn parse_method_list(list: &str) -> Result<Vec<StrategyConfig>> {
    let tokens: Vec<&str> = list.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let tok = tokens[i];
        if tok.eq_ignore_ascii_case("all") {
            out.extend(all_methods());
            i += 1;
            continue;
        }
        let is_general = tok.to_ascii_lowercase().starts_with("general");
        let one_coeff = tok.split(':').count() == 2;
        if is_general && one_coeff && i + 1 < tokens.len() && tokens[i + 1].parse::<f64>().is_ok() {
            out.push(format!("{tok}:{}", tokens[i + 1]).parse()?);
            i += 2;
        } else {
            out.push(tok.parse()?);
            i += 1;
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidConfig("no method given".into()));
    }
    Ok(out)
}

fn all_methods() -> Vec<StrategyConfig> {
    [
        StrategyKind::Davidson,
        StrategyKind::Jd,
        StrategyKind::Jdm,
        StrategyKind::Iigd,
        StrategyKind::Iigdm,
        StrategyKind::N1,
        StrategyKind::N2,
        StrategyKind::Bordered,
    ]
    .into_iter()
    .map(StrategyConfig::new)
    .collect()
}

fn is_newton(s: &StrategyConfig) -> bool {
    matches!(s.kind, StrategyKind::N1 | StrategyKind::N2)
}

impl Args {
    pub fn to_spec(&self) -> Result<ExperimentSpec> {
        let source = match (&self.matrix, &self.gen) {
            (Some(p), _) => MatrixSource::Mtx(p.clone()),
            (None, Some(g)) => MatrixSource::Model(g.parse::<ModelSpec>()?),
            (None, None) => return Err(Error::InvalidConfig("need --matrix or --gen".into())),
        };
        let mut spec = ExperimentSpec::new(source, self.mode, parse_method_list(&self.method)?);
        spec.symmetrize = self.symmetrize;
        spec.tol = self.tol;
        spec.perturb_eps = self.perturb;
        spec.seed = self.seed;
        spec.max_outer = self.max_outer;
        spec.max_restarts = self.max_restarts;
        spec.allow_nonhermitian_newton = self.allow_nonhermitian_newton;
        Ok(spec)
    }
}

/// Loads the matrix, runs the experiment and writes the requested files.
/// Diagnostics go to `err`, the summary table to `out`.
pub fn execute(args: &Args, out: &mut impl Write, err: &mut impl Write) -> Result<RunReport> {
    let mut spec = args.to_spec()?;
    let a = spec.load_matrix()?;
    let explicit_all = args.method.split(',').any(|t| t.trim().eq_ignore_ascii_case("all"));
    if !a.is_hermitian() && !spec.allow_nonhermitian_newton && explicit_all {
        // `all` on a non-Hermitian matrix keeps only the methods defined for it
        spec.strategies.retain(|s| !is_newton(s));
        let _ = writeln!(
            err,
            "note: skipping n1/n2 on a non-Hermitian matrix (use --allow-nonhermitian-newton)"
        );
    }
    if spec.allow_nonhermitian_newton && !a.is_hermitian() && spec.strategies.iter().any(is_newton) {
        let _ = writeln!(err, "{NEWTON_CAVEAT}");
    }
    let report = run_experiment_on(&spec, &a)?;
    if let Some(path) = &args.out {
        emit_csv_with(&report, path, CsvOptions { timing: !args.no_timing })?;
        if let Some(script) = &args.plot {
            emit_plot_script(&report, path, script)?;
        }
    }
    write_summary(&report, out).map_err(|source| Error::Io {
        context: "writing summary".into(),
        source,
    })?;
    Ok(report)
}

pub fn write_summary(report: &RunReport, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "{} (n = {}, {}), reference eigenvalue {:.12e}{:+.3e}i, perturbation {:e}",
        report.source,
        report.n,
        if report.hermitian { "Hermitian" } else { "non-Hermitian" },
        report.reference_value.re,
        report.reference_value.im,
        report.perturb_eps
    )?;
    writeln!(
        out,
        "{:<16} {:>9} {:>6} {:>9} {:>22} {:>10} {:>10}",
        "method", "converged", "iters", "restarts", "eigenvalue", "|err|", "resid"
    )?;
    for r in &report.runs {
        let res = &r.result;
        let resid = res.history.residuals().last().copied().unwrap_or(f64::NAN);
        writeln!(
            out,
            "{:<16} {:>9} {:>6} {:>9} {:>22.14e} {:>10.2e} {:>10.2e}",
            r.strategy.label(),
            if res.converged { "yes" } else { "no" },
            res.iterations,
            res.restarts,
            res.eigenvalue.re,
            r.eigenvalue_error,
            resid
        )?;
    }
    Ok(())
}
