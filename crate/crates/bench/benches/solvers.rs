use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use subeig::corrections::{correction, CorrectionInput};
use subeig::dense::re;
use subeig::experiment::make_initial;
use subeig::rng::{seeded, uniform_pm1};
use subeig::{
    gen_model, lstsq_minnorm, lu_solve, run, small_eig, symmetrize, DenseMatrix, DenseVector,
    Scalar, SelectionMode, SolverConfig, StrategyConfig, StrategyKind,
};

fn random_complex(n: usize, seed: u64) -> DenseMatrix {
    let mut s = seeded(seed);
    DenseMatrix::from_fn(n, n, |_, _| Scalar::new(uniform_pm1(&mut s), uniform_pm1(&mut s)))
}

fn random_vector(n: usize, seed: u64) -> DenseVector {
    let mut s = seeded(seed);
    DenseVector::from_fn(n, |_| re(uniform_pm1(&mut s)))
}

fn dense_kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("dense");
    for n in [50, 100, 200] {
        let a = random_complex(n, 1);
        let h = symmetrize(&a).unwrap();
        let b = random_vector(n, 2);
        g.bench_with_input(BenchmarkId::new("small_eig_hermitian", n), &h, |bch, h| {
            bch.iter(|| small_eig(black_box(h)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("small_eig_general", n), &a, |bch, a| {
            bch.iter(|| small_eig(black_box(a)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("lu_solve", n), &a, |bch, a| {
            bch.iter(|| lu_solve(black_box(a), black_box(&b)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("lstsq_minnorm", n), &a, |bch, a| {
            bch.iter(|| lstsq_minnorm(black_box(a), black_box(&b)).unwrap())
        });
    }
    g.finish();
}

fn strategies() -> Vec<StrategyConfig> {
    let mut v: Vec<StrategyConfig> = [
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
    .collect();
    v.push(StrategyConfig::generalized(re(2.0), re(0.0)));
    v
}

fn single_corrections(c: &mut Criterion) {
    let a = gen_model(&"laplace2d:100".parse().unwrap(), 0).unwrap();
    let input = CorrectionInput::from_vector(&a, &random_vector(100, 3)).unwrap();
    let mut g = c.benchmark_group("correction");
    for cfg in strategies() {
        g.bench_function(cfg.label(), |bch| {
            bch.iter(|| correction(black_box(&input), &cfg).unwrap())
        });
    }
    g.finish();
}

/// Full solves from the perturbed start used by the experiment protocol.
fn full_runs(c: &mut Criterion) {
    let mut g = c.benchmark_group("run");
    g.sample_size(10);
    for (model, eps) in [("laplace2d:225", 5e-2), ("convdiff2d:225:0.5", 1e-2)] {
        let a = gen_model(&model.parse().unwrap(), 0).unwrap();
        let (x0, _) = make_initial(&a, SelectionMode::SR, eps, 1).unwrap();
        for kind in [StrategyKind::Davidson, StrategyKind::Jd, StrategyKind::Iigd, StrategyKind::Iigdm] {
            let cfg = SolverConfig::new(SelectionMode::SR, StrategyConfig::new(kind));
            g.bench_function(BenchmarkId::new(kind.name(), model), |bch| {
                bch.iter(|| run(black_box(&a), black_box(&x0), &cfg).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, dense_kernels, single_corrections, full_runs);
criterion_main!(benches);
