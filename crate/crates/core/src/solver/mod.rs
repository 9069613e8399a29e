//! Assembly and solution of the discrete fractional problem.

mod config;
mod operator;
pub mod ring;
mod study;

pub use config::{parse_key_values, RhsMode, SolveConfig};
pub use operator::FracOperator;
pub use study::{convergence_study, k_study, load_vector, m_study, solve, solve_with, SolveOutcome};
