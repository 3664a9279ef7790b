//! Additive subgroups of finite rings: `J(k, R)` spanned by `k`-th powers,
//! `K(k, R)` spanned by `g^k` and `g^k (h + h^2)`, and the invariant `m(k, R)`.

mod hnf;
mod span;

pub use hnf::{hnf, AmbientGroup, HnfBasis, HnfBuilder};
pub use span::{audit, m_k_r, span_j, span_k, OracleLimits, SubgroupKind, SubgroupReport, DEFAULT_PAIR_CAP};

use thiserror::Error;

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubgroupError {
    #[error("vector has length {got}, ambient rank is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("builder was sized for {0} tracked generators")]
    TooManyGenerators(usize),
    #[error("element orders are only defined in (Z/q)^d")]
    FreeAmbient,
    #[error("K(k, R) is defined here only for q = 2, got q = {0}")]
    NotCharacteristicTwo(u64),
    #[error("{pairs} generator pairs exceed the pair cap {cap}")]
    PairCapExceeded { pairs: String, cap: u64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
