//! Acceptance harness: one PASS/FAIL line per criterion, non-zero exit on
//! any failure. Every tolerance used below is pinned in `tol`.

mod common;

use std::time::Instant;

use common::*;
use subeig::corrections::*;
use subeig::dense::re;
use subeig::driver::{rqi_direction, run_observed, StepEvent};
use subeig::experiment::{csv_string, make_initial, run_experiment, CsvOptions};
use subeig::matio::read_matrix_market;
use subeig::{
    gen_model, inner, matvec, run, small_eig, sin_angle, DenseMatrix, DenseVector, ExperimentSpec,
    LuFactorization, MatrixSource, RunReport, Scalar, SelectionMode, SolverConfig,
};

mod tol {
    pub const GRAD_FD: f64 = 1e-6;
    pub const HESS_FD: f64 = 1e-5;
    pub const FD_STEP_GRAD: f64 = 1e-6;
    pub const FD_STEP_HESS: f64 = 1e-5;
    pub const CALCULUS_SECS: f64 = 5.0;
    pub const IDENTITY: f64 = 1e-12;
    pub const RQI_SPAN_SIN: f64 = 1e-8;
    pub const SPECTRAL_GAP: f64 = 1e-3;
    pub const PARALLEL_SIN: f64 = 1e-8;
    pub const IIGDM_ORTH: f64 = 1e-12;
    pub const SOLVER_TOL: f64 = 1e-10;
    pub const SYM_MAX_ITERS: usize = 10;
    pub const SYM_SECS: f64 = 30.0;
    pub const SUPERQUAD_FROM: f64 = 1e-3;
    pub const NONSYM_MAX_ITERS: usize = 12;
    pub const NONSYM_EIG: f64 = 1e-8;
    pub const ORTH: f64 = 1e-12;
    pub const RESID_REL: f64 = 1e-11;
    pub const RESTART: f64 = 1e-12;
    pub const ORACLE_REL: f64 = 1e-8;
    pub const ORACLE_EIG: f64 = 1e-8;
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("calculus correctness", c1_calculus),
        ("matrix identities", c2_identities),
        ("RQI direction in the augmented span", c3_rqi_span),
        ("cross-method equivalence", c4_equivalence),
        ("symmetric convergence", c5_symmetric),
        ("nonsymmetric convergence", c6_nonsymmetric),
        ("Newton-type ordering", c7_ordering),
        ("framework hygiene", c8_hygiene),
        ("I/O", c9_io),
        ("oracle agreement", c10_oracle),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = std::panic::catch_unwind(check).unwrap_or_else(|_| verdict(false, "panicked"));
        let secs = start.elapsed().as_secs_f64();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {} [{secs:.2} s]", k + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn c1_calculus() -> Verdict {
    let start = Instant::now();
    let n = 20;
    let (mut grad_err, mut hess_err) = (0.0f64, 0.0f64);
    for seed in 0..20 {
        // gradient: complex Hermitian data, real and imaginary directions
        let a = random_hermitian(n, 1000 + seed);
        let x = random_unit(n, 2000 + seed);
        let g = grad_rq(&a, &x).unwrap();
        let q = |v: &DenseVector| rayleigh_quotient(&a, v).unwrap().re;
        let h = tol::FD_STEP_GRAD;
        let mut worst = 0.0f64;
        for k in 0..n {
            for (dir, imag) in [(re(1.0), false), (Scalar::new(0.0, 1.0), true)] {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[k] += dir * h;
                xm[k] -= dir * h;
                let fd = (q(&xp) - q(&xm)) / (2.0 * h);
                let exact = if imag { g[k].im } else { g[k].re };
                worst = worst.max((fd - exact).abs());
            }
        }
        grad_err = grad_err.max(worst / g.norm_inf());

        // Hessian: real symmetric data, where it is the Jacobian of the gradient
        let a = random_real_symmetric(n, 3000 + seed);
        let x = random_real_unit(n, 4000 + seed);
        let hess = hess_rq(&a, &x).unwrap();
        let h = tol::FD_STEP_HESS;
        let mut worst = 0.0f64;
        for k in 0..n {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[k] += re(h);
            xm[k] -= re(h);
            let col = grad_rq(&a, &xp)
                .unwrap()
                .sub(&grad_rq(&a, &xm).unwrap())
                .scaled(re(0.5 / h));
            for i in 0..n {
                worst = worst.max((col[i] - hess[(i, k)]).norm());
            }
        }
        hess_err = hess_err.max(worst / hess.norm_max());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        grad_err <= tol::GRAD_FD && hess_err <= tol::HESS_FD && secs < tol::CALCULUS_SECS,
        format!("gradient rel err {grad_err:.1e}, Hessian rel err {hess_err:.1e}"),
    )
}

fn c2_identities() -> Verdict {
    let n = 50;
    let a = random_hermitian(n, 51);
    let x = random_unit(n, 52);
    let lambda = quad(&a, &x);
    let an = a.norm_fro();
    let p = outer(&x, &x);
    let q = sub(&eye(n), &p);
    let b = a.shifted(lambda);
    let three = sub(&add(&mul(&a, &p), &mul(&p, &a)), &scaled(&p, 2.0 * lambda.re));
    let mut r = matvec(&a, &x).unwrap();
    r.axpy(-lambda, &x);
    let refl = sub(&eye(n), &scaled(&p, 2.0));

    let errs = [
        ("expansion", fro_diff(&mul(&mul(&q, &b), &q), &sub(&b, &three))),
        ("rank-2", fro_diff(&three, &add(&outer(&r, &x), &outer(&x, &r)))),
        ("involution", fro_diff(&mul(&refl, &refl), &eye(n))),
        (
            "reflected operator",
            fro_diff(&sub(&b, &scaled(&three, 2.0)), &mul(&mul(&refl, &b), &refl)),
        ),
    ];
    let worst = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    let detail = errs
        .iter()
        .map(|(k, e)| format!("{k} {:.1e}", e / an))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(worst <= tol::IDENTITY * an, format!("relative to ‖A‖_F: {detail}"))
}

fn span_strategies() -> Vec<StrategyConfig> {
    let mut v: Vec<StrategyConfig> = [
        StrategyKind::Jd,
        StrategyKind::Jdm,
        StrategyKind::Iigd,
        StrategyKind::Iigdm,
        StrategyKind::Bordered,
    ]
    .into_iter()
    .map(StrategyConfig::new)
    .collect();
    v.push(StrategyConfig::new(StrategyKind::N2).with_enforce_orth(true));
    for alpha in [1.0, 2.0, 5.0] {
        for beta in [0.0, 1.0, 3.0] {
            v.push(StrategyConfig::generalized(re(alpha), re(beta)).with_enforce_orth(true));
        }
    }
    v
}

fn c3_rqi_span() -> Verdict {
    let a = gen_model(&"laplace2d:100".parse().unwrap(), 0).unwrap();
    let inp = CorrectionInput::from_vector(&a, &random_real_unit(100, 77)).unwrap();
    let gap = spectral_distance(&a, inp.lambda());
    let xr = rqi_direction(&a, inp.lambda(), inp.x()).unwrap();
    let mut worst = (0.0f64, String::new());
    for cfg in span_strategies() {
        let s = match correction(&inp, &cfg) {
            Ok(t) => span_sin(&xr, &[inp.x(), &t]),
            Err(_) => f64::INFINITY,
        };
        if s >= worst.0 {
            worst = (s, cfg.label());
        }
    }
    verdict(
        gap >= tol::SPECTRAL_GAP && worst.0 <= tol::RQI_SPAN_SIN,
        format!(
            "{} strategies, gap {gap:.1e}, worst sin {:.1e} ({})",
            span_strategies().len(),
            worst.0,
            worst.1
        ),
    )
}

fn c4_equivalence() -> Verdict {
    let (mut worst_sin, mut worst_orth) = (0.0f64, 0.0f64);
    for seed in 0..10 {
        let a = random_hermitian(20, 5000 + seed);
        let inp = CorrectionInput::from_vector(&a, &random_unit(20, 6000 + seed)).unwrap();
        let t = |k| correction(&inp, &StrategyConfig::new(k)).unwrap();
        let all = [
            t(StrategyKind::Jd),
            t(StrategyKind::Iigd),
            t(StrategyKind::Iigdm),
            t(StrategyKind::Bordered),
        ];
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                worst_sin = worst_sin.max(sin_angle(&all[i], &all[j]));
            }
        }
        // the IIGDm solve without the optional projection
        let raw = solve_iigdm(&inp, &StrategyConfig::new(StrategyKind::Iigdm).with_enforce_orth(false)).unwrap();
        worst_orth = worst_orth.max(inner(inp.x(), &raw).unwrap().norm());
    }
    verdict(
        worst_sin <= tol::PARALLEL_SIN && worst_orth <= tol::IIGDM_ORTH,
        format!("worst pairwise sin {worst_sin:.1e}, worst |x*t| for iigdm {worst_orth:.1e}"),
    )
}

fn protocol(model: &str, eps: f64, kinds: &[StrategyKind]) -> RunReport {
    let mut spec = ExperimentSpec::new(
        MatrixSource::Model(model.parse().unwrap()),
        SelectionMode::SR,
        kinds.iter().map(|&k| StrategyConfig::new(k)).collect(),
    );
    spec.perturb_eps = Some(eps);
    spec.tol = tol::SOLVER_TOL;
    run_experiment(&spec).unwrap()
}

const MAIN: [StrategyKind; 4] = [
    StrategyKind::Jd,
    StrategyKind::Jdm,
    StrategyKind::Iigd,
    StrategyKind::Iigdm,
];

/// First `k` with `r_k <= from` and `r_{k+1} <= r_k^2`.
fn superquadratic_step(res: &[f64], from: f64) -> Option<usize> {
    res.windows(2).position(|w| w[0] <= from && w[1] <= w[0] * w[0])
}

fn c5_symmetric() -> Verdict {
    let start = Instant::now();
    let rep = protocol("laplace2d:225", 5e-2, &MAIN);
    let mut ok = rep.fair_start();
    let mut parts = Vec::new();
    for run in &rep.runs {
        let res = run.result.history.residuals();
        let sq = superquadratic_step(&res, tol::SUPERQUAD_FROM);
        ok &= run.result.converged && run.result.iterations <= tol::SYM_MAX_ITERS && sq.is_some();
        parts.push(format!(
            "{} {} it{}",
            run.strategy.label(),
            run.result.iterations,
            if sq.is_some() { "" } else { " (no superquadratic step)" }
        ));
    }
    ok &= start.elapsed().as_secs_f64() < tol::SYM_SECS;
    verdict(ok, parts.join(", "))
}

fn c6_nonsymmetric() -> Verdict {
    let rep = protocol("convdiff2d:225:0.5", 1e-2, &MAIN);
    let mut ok = rep.fair_start() && !rep.hermitian;
    let mut parts = Vec::new();
    for run in &rep.runs {
        ok &= run.result.converged
            && run.result.iterations <= tol::NONSYM_MAX_ITERS
            && run.eigenvalue_error <= tol::NONSYM_EIG;
        parts.push(format!(
            "{} {} it err {:.1e}",
            run.strategy.label(),
            run.result.iterations,
            run.eigenvalue_error
        ));
    }
    verdict(ok, parts.join(", "))
}

fn c7_ordering() -> Verdict {
    let rep = protocol(
        "laplace2d:225",
        5e-2,
        &[StrategyKind::Jd, StrategyKind::N1, StrategyKind::N2],
    );
    let it = |k: usize| rep.runs[k].result.iterations;
    let conv = |k: usize| if rep.runs[k].result.converged { "" } else { " not converged" };
    verdict(
        it(1) >= it(0) && it(2) >= it(0),
        format!(
            "jd {} it, n1 {} it{}, n2 {} it{}",
            it(0),
            it(1),
            conv(1),
            it(2),
            conv(2)
        ),
    )
}

#[derive(Default)]
struct Hygiene {
    orth: f64,
    resid: f64,
    restart: f64,
    restarts: usize,
    steps: usize,
}

fn audit(a: &DenseMatrix, x0: &DenseVector, cfg: &SolverConfig, hy: &mut Hygiene) {
    let mut before: Option<(Scalar, f64)> = None;
    run_observed(a, x0, cfg, |s, ev| {
        hy.orth = hy.orth.max(orth_defect(s.v()));
        let x = s.ritz_vector();
        let mut r = matvec(a, x).unwrap();
        r.axpy(-s.ritz_value(), x);
        hy.resid = hy.resid.max(r.sub(s.residual()).norm2() / a.norm_fro());
        if ev == StepEvent::Restarted {
            let (l, rn) = before.unwrap();
            let d = (s.ritz_value() - l).norm().max((s.resid_norm() - rn).abs());
            hy.restart = hy.restart.max(d);
            hy.restarts += 1;
        }
        hy.steps += 1;
        before = Some((s.ritz_value(), s.resid_norm()));
    })
    .unwrap();
}

fn every_strategy() -> Vec<StrategyConfig> {
    let mut v: Vec<StrategyConfig> = StrategyKind::ALL
        .iter()
        .filter(|&&k| k != StrategyKind::Generalized)
        .map(|&k| StrategyConfig::new(k))
        .collect();
    v.push(StrategyConfig::generalized(re(2.0), re(0.0)));
    v
}

fn c8_hygiene() -> Verdict {
    let mut hy = Hygiene::default();
    // the symmetric protocol start, with the default subspace limit and
    // with a small limit that forces restarts
    let a = gen_model(&"laplace2d:225".parse().unwrap(), 0).unwrap();
    let (x0, _) = make_initial(&a, SelectionMode::SR, 5e-2, 1).unwrap();
    let b = random_complex(60, 8);
    let bx = random_unit(60, 9);
    for s in every_strategy() {
        let mut cfg = SolverConfig::new(SelectionMode::SR, s);
        audit(&a, &x0, &cfg, &mut hy);
        cfg.max_outer = 3;
        cfg.max_restarts = 6;
        audit(&a, &x0, &cfg, &mut hy);
        if !matches!(s.kind, StrategyKind::N1 | StrategyKind::N2) {
            audit(&b, &bx, &cfg, &mut hy);
        }
    }
    verdict(
        hy.orth <= tol::ORTH && hy.resid <= tol::RESID_REL && hy.restart <= tol::RESTART && hy.restarts > 0,
        format!(
            "{} states, {} restarts: orth {:.1e}, residual {:.1e}·‖A‖_F, restart drift {:.1e}",
            hy.steps, hy.restarts, hy.orth, hy.resid, hy.restart
        ),
    )
}

fn c9_io() -> Verdict {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let load = |f: &str| read_matrix_market(&dir.join(f)).unwrap().0;
    let c = Scalar::new;
    let z = c(0.0, 0.0);
    let fixtures = [
        (
            "sym_coord.mtx",
            DenseMatrix::from_real_rows(&[&[4.0, -1.5, 0.0], &[-1.5, 0.0, 2.0], &[0.0, 2.0, -7.25]]),
        ),
        (
            "gen_coord.mtx",
            DenseMatrix::from_rows(&[vec![c(1.0, -2.0), z, c(0.0, 3.0)], vec![z, z, c(0.5, 0.0)]]),
        ),
        (
            "array_real.mtx",
            DenseMatrix::from_real_rows(&[&[1.0, 4.0], &[2.0, 5.0], &[3.0, 6.0]]),
        ),
    ];
    let parse_ok = fixtures
        .iter()
        .all(|(f, want)| load(f).as_col_major() == want.as_col_major() && load(f).rows() == want.rows());

    let mut spec = ExperimentSpec::new(
        MatrixSource::Model("random:80".parse().unwrap()),
        SelectionMode::LR,
        MAIN.iter().map(|&k| StrategyConfig::new(k)).collect(),
    );
    spec.seed = 3;
    let rep = run_experiment(&spec).unwrap();
    let csv = csv_string(&rep, CsvOptions::default());
    let parsed: Vec<u64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse::<f64>().unwrap().to_bits())
        .collect();
    let want: Vec<u64> = rep
        .runs
        .iter()
        .flat_map(|r| r.result.history.residuals())
        .map(f64::to_bits)
        .collect();
    let round_trip = parsed == want;

    let off = CsvOptions { timing: false };
    let same = csv_string(&rep, off) == csv_string(&run_experiment(&spec).unwrap(), off);
    verdict(
        parse_ok && round_trip && same,
        format!(
            "fixtures exact {parse_ok}, {} residuals bit-exact {round_trip}, reruns byte-identical {same}",
            parsed.len()
        ),
    )
}

fn c10_oracle() -> Verdict {
    let models = [
        ("laplace1d:400", SelectionMode::SR),
        ("laplace2d:400", SelectionMode::SR),
        ("convdiff2d:400:0.5", SelectionMode::SR),
        ("random:400", SelectionMode::LR),
        // a sub/super ratio far from 1 makes the order-400 eigenproblem
        // ill-posed (similarity condition ratio^(n/2)), so keep it mild
        ("tridiag:400:-1,3,-1.01", SelectionMode::LR),
    ];
    let (mut dense_err, mut eig_err) = (0.0f64, 0.0f64);
    let mut ok = true;
    for (model, mode) in models {
        let a = gen_model(&model.parse().unwrap(), 0).unwrap();
        let eig = small_eig(&a).unwrap();
        let tr: Scalar = eig.values.iter().sum();
        let trace_err = (tr - a.trace()).norm() / a.trace().norm().max(a.norm_fro());
        // determinants compared through their logarithms
        let log_prod: Scalar = eig.values.iter().map(|z| z.ln()).sum();
        let log_det = LuFactorization::new(&a).unwrap().log_det();
        let dphase = (log_prod.im - log_det.im).rem_euclid(std::f64::consts::TAU);
        let det_err = (log_prod.re - log_det.re)
            .abs()
            .max(dphase.min(std::f64::consts::TAU - dphase));
        dense_err = dense_err.max(trace_err).max(det_err);

        let k = mode.pick(&eig.values).unwrap();
        let mut s = subeig::rng::seeded(11);
        let x0 = DenseVector::from_fn(a.rows(), |i| {
            eig.vectors[(i, k)] + re(5e-2 * subeig::rng::uniform01(&mut s))
        });
        let res = run(&a, &x0, &SolverConfig::new(mode, StrategyConfig::new(StrategyKind::Jd))).unwrap();
        let closest = eig
            .values
            .iter()
            .map(|&z| (z - res.eigenvalue).norm())
            .fold(f64::INFINITY, f64::min);
        ok &= res.converged;
        eig_err = eig_err.max(closest);
    }
    ok &= dense_err <= tol::ORACLE_REL && eig_err <= tol::ORACLE_EIG;
    verdict(
        ok,
        format!(
            "{} models: trace/log-det rel err {dense_err:.1e}, eigenvalue err {eig_err:.1e}",
            models.len()
        ),
    )
}
