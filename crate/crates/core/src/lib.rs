pub mod error;
pub mod parallel;
pub mod sinc;
pub mod truncation;
pub mod specfun;
pub mod quadrature;
pub mod mesh;
pub mod fem;
pub mod linalg;
pub mod reference;
pub mod report;
pub mod solver;
