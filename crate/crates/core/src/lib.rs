//! Constructive approximation of probability densities by location-scale
//! finite mixtures.
//!
//! Given a target density `f` and a kernel density `g`, the [`constructor`]
//! builds an m-component mixture `sum_i c_i sigma_i^{-n} g((x - mu_i) / sigma_i)`
//! that approximates `f` either uniformly on a compact box or in an `L_p`
//! norm. Each run carries an [`ApproxReport`] with the discretization
//! certificate and the measured errors.
//!
//! The crate is organised as
//!
//! * [`density`]: target and kernel densities, grids and boxes,
//! * [`mixture`]: mixture representation, evaluation and JSON I/O,
//! * [`constructor`]: truncation, bandwidth selection, cell partition,
//!   weight quadrature, certificates and the two end-to-end pipelines,
//! * [`analysis`]: quadrature, convolution oracle, norms, Young's inequality
//!   and convergence sweeps.
//!
//! Data-parallel inner loops use rayon when the `parallel` feature is
//! enabled (the default) and fall back to sequential iteration otherwise.
//! Results are identical either way.

pub mod analysis;
pub mod constructor;
pub mod density;
mod error;
mod eval;
pub mod mixture;
mod par;

pub use analysis::{SweepRow, SweepTable};
pub use constructor::{ApproxOptions, ApproxReport, CellPartition, TruncationResult};
pub use density::{BoxRegion, ContinuityClass, DensitySpec, GridSpec};
pub use error::{Error, Result};
pub use eval::{Evaluable, FnEval, Zero};
pub use mixture::{Mixture, MixtureComponent};
