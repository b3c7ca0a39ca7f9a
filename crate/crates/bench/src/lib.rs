//! Criterion benchmarks for the `subeig` solvers live in `benches/`.
