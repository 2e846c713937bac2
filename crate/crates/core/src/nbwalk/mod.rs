//! Non-backtracking paths in biregular bipartite graphs.
//!
//! Operators are built in exact integer arithmetic and cross-checked against a
//! direct enumeration. The polynomial side (`p_n`, its characteristic roots and
//! closed form) lives in floating point with exact rational coefficients.

mod bounds;
mod matrix;
mod operators;
mod paths;
mod poly;
mod recurrence;
mod roots;

use thiserror::Error;

use crate::bigraph::GraphError;
use crate::spectral::SpectralError;

pub use bounds::{
    ell_min, lemma6_bound_check, lemma6_bound_check_with, lemma8_upper_check,
    lemma8_upper_check_ops, lemma9_lower_check, lemma9_lower_check_upto, theorem2_chain,
    ChainReport, Lemma6Report, Lemma6Sample, Lemma8Report, Lemma9Entry, Lemma9Report,
};
pub use matrix::DenseMatrix;
pub use operators::{
    biadjacency_int, build_nb_operators, count_nb_paths_operator, IntMatrix, NbOperatorSet,
    MAX_OPERATOR_LEN,
};
pub use paths::{
    count_all_left_paths, count_nb_paths_bruteforce, nb_path_matrix, PathMode,
    MAX_ENUMERATION_EDGES, MAX_ENUMERATION_LEN,
};
pub use poly::{
    p_polynomial, p_polynomials, verify_operator_polynomial_identity, IdentityMismatch,
    RationalPolynomial, MAX_IDENTITY_DEGREE,
};
pub use recurrence::{solve_linear_recurrence, ClosedForm};
pub use roots::{char_roots, delta, CharRoots, REPEATED_ROOT_THRESHOLD};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NbError {
    #[error(transparent)]
    Graph(GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("length {len} out of range (max {max})")]
    LengthOutOfRange { len: usize, max: usize },
    #[error("length {0} is odd; left-to-left counts need an even length")]
    OddLength(usize),
    #[error("enumeration budget exceeded: length {len}, {edges} edges")]
    BudgetExceeded { len: usize, edges: usize },
    #[error("degrees c={c}, d={d} must both be at least 2")]
    InvalidDegrees { c: usize, d: usize },
    #[error("operator identity fails at ({}, {}): {} vs {}", .0.row, .0.col, .0.operator, .0.polynomial)]
    IdentityMismatch(IdentityMismatch),
    #[error("set too large for the path bound: {lhs} > {rhs}")]
    SetTooLarge { lhs: f64, rhs: usize },
    #[error("graph is not bipartite Ramanujan")]
    NotRamanujan,
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
}
