//! Self-contained numerical kernels: quadrature with endpoint
//! square-root singularities, polynomial root finding, small Hermitian
//! eigenproblems, dense linear solves, and bivariate resultants.
//!
//! Everything here is a pure function of its inputs.

pub mod linalg;
pub mod poly;
pub mod quad;
pub mod resultant;

pub use linalg::{
    check_hermitian, check_hermitian_with_floor, determinant, hermitian_eigenvalues,
    hermitian_eigenvector, solve, solve_real, CMatrix,
};
pub use poly::{poly_roots, Polynomial};
pub use quad::{integrate_cheb, integrate_complex_leg, integrate_smooth, QuadratureConfig};
pub use resultant::{resultant_in_w, BivariatePoly, ResultantOutput};
