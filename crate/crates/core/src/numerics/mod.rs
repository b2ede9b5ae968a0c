//! Dense complex linear algebra for small operators (dimension ≲ 64).

mod eig;
mod matrix;
mod ops;
mod simplex;
mod svd;

pub use eig::{hermitian_eig, min_eig_hermitian, HermitianSpectrum, JACOBI_TOL};
pub use matrix::{basis_vector, dot, norm, orthonormalize, CMatrix};
pub use ops::{kron, partial_trace, Side};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};
pub use svd::{default_rank_tol, nullspace, numerical_rank, right_singular, RightSingular};
