//! Subspace eigensolvers built on Rayleigh-quotient corrections.
//!
//! One eigenpair of a dense complex matrix is computed by growing a search
//! space with correction vectors: Davidson, Jacobi-Davidson and its variants,
//! inverse-iteration generalized Davidson, Newton-derived equations and the
//! bordered form. All linear algebra runs in complex double precision.

pub mod corrections;
pub mod dense;
pub mod driver;
pub mod error;
pub mod experiment;
pub mod matio;
pub mod rng;

pub use corrections::{CorrectionInput, StrategyConfig, StrategyKind};
pub use dense::{
    inner, lstsq_minnorm, lu_solve, matvec, sin_angle, small_eig, DenseMatrix, DenseVector,
    EigDecomposition, LuFactorization, PivotedQr, Scalar,
};
pub use driver::{
    run, ConvergenceHistory, EigResult, IterationRecord, SelectionMode, SolverConfig,
    SubspaceState,
};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentSpec, MatrixSource, RunReport};
pub use matio::{gen_model, parse_matrix_market, symmetrize, ModelSpec};
