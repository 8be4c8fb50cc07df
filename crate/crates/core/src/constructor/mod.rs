//! The constructive pipeline: truncate `f` to a compactly supported `h`,
//! mollify with a dilated kernel `g_k`, discretize `g_k * h` over a cell
//! partition of the dilated ball, and close the simplex with one wide
//! remainder component.
//!
//! In dilate form a cell `A_i` with representative `z_i` yields the component
//! `c_i k^n g(k x - z_i)` with `c_i = int_{A_i / k} h`, which is the
//! location-scale component `(c_i, z_i / k, 1 / k)`. The substitution
//! `y = z / k` uses `h(z / k)` throughout.

mod bandwidth;
mod discretize;
mod modulus;
mod partition;
mod pipeline;
mod truncate;

use serde::{Deserialize, Serialize};

use crate::density::GridSpec;

pub use bandwidth::{select_bandwidth, BandwidthChoice, BandwidthNorm, BandwidthSchedule};
pub use discretize::{discretize, kernel_peak, Discretization};
pub use modulus::{certified_bound, modulus_of_continuity};
pub use partition::{build_partition, count_cells, Cell, CellPartition};
pub use pipeline::{approximate_lp, approximate_uniform};
pub use truncate::{smoothstep, truncate, truncate_lp, TruncationResult};

pub(crate) use bandwidth::mollification_error;
pub(crate) use pipeline::SweepSetup;


/// Tuning knobs shared by both pipelines and by sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxOptions {
    /// Distance from `K` to the edge of the support ball, `r = rad(K) + margin`.
    pub margin: f64,
    /// Width of the smoothstep shell of the truncating bump; below `margin`.
    pub tau: f64,
    /// First bandwidth tried; the schedule doubles from here.
    pub k0: f64,
    /// Largest bandwidth tried before giving up.
    pub k_cap: f64,
    /// Gauss-Legendre order per cell.
    pub quad_order: usize,
    /// Cells lighter than this are folded into the remainder.
    pub weight_floor: f64,
    pub max_components: usize,
    /// Grid points per axis for sup-norm measurements; `None` picks 2049 in
    /// one dimension and 65 in two.
    pub grid_points: Option<usize>,
    /// Construct in coordinates relative to this point and shift back.
    pub anchor: Option<Vec<f64>>,
    /// `L_p` mode keeps the cube that holds all but this much of `f`.
    pub mass_tail: f64,
    /// Remainder tail budget for sweeps, which have no overall `eps`.
    pub sweep_tail: f64,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self {
            margin: 1.0,
            tau: 0.5,
            k0: 1.0,
            k_cap: 1024.0,
            quad_order: 8,
            weight_floor: 1e-14,
            max_components: 1_000_000,
            grid_points: None,
            anchor: None,
            mass_tail: 1e-4,
            sweep_tail: 1e-6,
        }
    }
}

impl ApproxOptions {
    pub(crate) fn grid_points_for(&self, dim: usize) -> usize {
        self.grid_points.unwrap_or(if dim <= 1 { 2049 } else { 65 })
    }
}

/// Construction parameters recorded in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub r: f64,
    pub k: f64,
    pub delta: f64,
    pub m: usize,
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
}

/// Outcome of a pipeline run.
///
/// In uniform mode the errors are sup norms on a grid over `K`; in `L_p`
/// mode they are `L_p` norms. `certified_bound` bounds the discretization
/// error `||g_k * h - h_m||` on the support ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub mode: String,
    pub params: ReportParams,
    /// Remainder weight `c_m`, zero when the remainder was omitted.
    pub c_m: f64,
    /// Remainder bandwidth `k_m`; `None` when the remainder was omitted.
    pub k_m: Option<f64>,
    pub certified_bound: f64,
    /// `||h - g_k * h||`.
    pub measured_mollification: f64,
    /// `||f - h_m||`.
    pub measured_total: f64,
    pub elapsed_s: f64,
    /// Uniform mode: bound on how much `|f - h_m|` can exceed its grid
    /// maximum between lattice points. Zero in `L_p` mode.
    pub grid_slack: f64,
    /// `||g_k * h - h_m||`, measured like the other errors.
    pub measured_discretization: Option<f64>,
    /// `int h`.
    pub mass: f64,
    /// `sup g` over the ball of radius `s` used for the remainder.
    pub c_s: f64,
    pub s: f64,
    pub grid: Option<GridSpec>,
}
