//! Shared numeric kernels: Jacobi-weighted quadrature, finite-difference
//! complex Hessians, and Gamma ratios.

pub mod fd;
pub mod gamma;
pub mod quadrature;

pub use fd::{default_step, fd_complex_hessian, fd_del_delbar};
pub use gamma::{log_beta, log_gamma, log_gamma_ratio};
pub use quadrature::{gauss_jacobi, integrate_radial, QuadratureRule};
