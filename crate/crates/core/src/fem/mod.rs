//! Galerkin matrices and load vectors for P1 segments and Q1 quadrilaterals.

mod assembly;
mod sparse;

pub use assembly::{
    all_vertices, assemble_load, assemble_load_with, assemble_mass, assemble_pair, assemble_pair_with, assemble_stiffness, l2_error,
    quad_matrices, segment_matrices, MATRIX_GAUSS,
};
pub use sparse::SparseMatrix;
