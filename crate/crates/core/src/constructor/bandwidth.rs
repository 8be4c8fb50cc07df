use crate::analysis::{lp_norm_diff_with, sup_norm_diff_on_grid, Convolution, LpQuadrature};
use crate::density::{DensitySpec, GridSpec};
use crate::error::{check_dim, invalid, Error, Result};
use crate::eval::Evaluable;

/// Norm in which `||h - g_k * h||` is measured.
#[derive(Debug, Clone, PartialEq)]
pub enum BandwidthNorm {
    /// Maximum over the grid points.
    Sup(GridSpec),
    /// `L_p` over a box covering the supports of `h` and `g_k * h`.
    Lp { p: f64 },
}

/// Doubling schedule `k0, 2 k0, 4 k0, ...` up to `cap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSchedule {
    pub k0: f64,
    pub cap: f64,
}

impl Default for BandwidthSchedule {
    fn default() -> Self {
        Self { k0: 1.0, cap: 1024.0 }
    }
}

impl BandwidthSchedule {
    pub fn candidates(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = self.k0;
        while k <= self.cap * (1.0 + 1e-12) {
            out.push(k);
            k *= 2.0;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthChoice {
    pub k: f64,
    /// `||h - g_k * h||` at the accepted `k`.
    pub measured: f64,
    /// Every `(k, error)` tried, in order.
    pub trials: Vec<(f64, f64)>,
}

/// First `k` of the schedule with `||h - g_k * h|| <= eps_half`.
pub fn select_bandwidth<H: Evaluable>(
    h: &H,
    g: &DensitySpec,
    eps_half: f64,
    norm: &BandwidthNorm,
    schedule: &BandwidthSchedule,
) -> Result<BandwidthChoice> {
    if !(eps_half > 0.0) {
        return Err(invalid(format!("error budget must be positive, got {eps_half}")));
    }
    if !(schedule.k0 > 0.0) || !(schedule.cap >= schedule.k0) || !schedule.cap.is_finite() {
        return Err(invalid("bandwidth schedule needs 0 < k0 <= cap < inf"));
    }
    check_dim(g.dim(), h.dim())?;
    let mut trials = Vec::new();
    for k in schedule.candidates() {
        let err = mollification_error(h, g, k, norm, eps_half)?;
        trials.push((k, err));
        if err <= eps_half {
            return Ok(BandwidthChoice { k, measured: err, trials });
        }
    }
    let &(last_k, last_error) = trials.last().expect("schedule has at least k0");
    Err(Error::BandwidthNotFound { last_k, last_error })
}

/// `||h - g_k * h||` in `norm`. In `L_p` the quadrature only resolves the
/// integral to a thousandth of `target` when `target > 0`.
pub(crate) fn mollification_error<H: Evaluable>(
    h: &H,
    g: &DensitySpec,
    k: f64,
    norm: &BandwidthNorm,
    target: f64,
) -> Result<f64> {
    match norm {
        BandwidthNorm::Sup(grid) => {
            let conv = Convolution::new(g, k, h)?;
            Ok(sup_norm_diff_on_grid(h, &conv, grid)?.0)
        }
        BandwidthNorm::Lp { p } => {
            let conv = Convolution::with_tol(g, k, h, 1e-10)?;
            let reach = g.effective_radius();
            let radius = h.radius() + reach / k;
            // g_k * h leaves the box only through the part of g beyond its
            // effective radius.
            let tail = crate::analysis::tail_integral(h.sup_bound(), *p, g.mass_outside_ball(reach));
            let quad = lp_quadrature(radius, feature_scale(&h.kinks()).min(1.0 / k), *p, target);
            lp_norm_diff_with(h, &conv, *p, radius, tail, &quad)
        }
    }
}

/// Quadrature resolving features of size `feature`, and integrals to
/// `(1e-3 target)^p` when a target is given.
pub(crate) fn lp_quadrature(radius: f64, feature: f64, p: f64, target: f64) -> LpQuadrature {
    let mut quad = LpQuadrature::resolving(radius, feature);
    if target > 0.0 {
        quad.abs_tol = (1e-3 * target).powf(p).max(1e-14);
    }
    quad
}

/// Smallest gap between distinct kinks, or infinity.
pub(crate) fn feature_scale(kinks: &[f64]) -> f64 {
    let mut k = kinks.to_vec();
    k.sort_by(f64::total_cmp);
    k.dedup();
    k.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}
