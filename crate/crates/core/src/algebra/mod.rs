//! Exact symbolic layer: operators, Newton diagrams, homogeneity patterns,
//! linear dependence and generalized rank-one vectors.

mod linalg;
mod multi_index;
mod operator;
mod parse;
mod pattern;
mod space;

pub use linalg::{nullspace, rank, solve};
pub use multi_index::MultiIndex;
pub use operator::DifferentialOperator;
pub use parse::{parse_operator, MAX_EXPONENT};
pub use pattern::{check_homogeneous, find_pattern, HomogeneityPattern, PatternSearch};
pub use space::{
    build_gradient_space, dependence_coefficients, rank_one_span_dim, rank_one_vector,
    same_parity, GradientSpace, Parity, RankOneVector,
};
