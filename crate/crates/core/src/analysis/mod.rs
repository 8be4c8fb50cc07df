//! Numerical workhorses: quadrature, the convolution oracle, grid and `L_p`
//! norms, Young's inequality checks and convergence sweeps.

mod convolution;
mod norms;
pub mod quadrature;
mod sweep;
mod young;

pub use convolution::{convolve_at, Convolution, CONVOLUTION_TOL};
pub(crate) use norms::tail_integral;
pub use norms::{lp_norm, lp_norm_diff, lp_norm_diff_with, mixture_mass, sup_norm_diff_on_grid, LpQuadrature};
pub use sweep::{approximate_identity_curve, convergence_sweep, format_g17, SweepRow, SweepTable, SweepTarget};
pub use young::{young_inequality_check, YoungCheck};

#[cfg(test)]
mod tests;
