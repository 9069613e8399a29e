//! Linear solvers.

mod cg;
pub mod cholesky;
pub mod dst;
pub mod ordering;
mod tridiag;

pub use cg::{cg, SolveStats};
pub use cholesky::{sparse_cholesky, CholeskyFactor, SymbolicCholesky};
pub use dst::{dst_apply, DstPreconditioner};
pub use tridiag::{tridiag_solve, TridiagFactor};
