use super::quadrature::{breakpoints, piecewise_box, refine_composite, GaussLegendre};
use crate::density::GridSpec;
use crate::error::{check_dim, invalid, Result};
use crate::eval::Evaluable;
use crate::mixture::Mixture;
use crate::par;

/// Panel schedule and stopping rule for [`lp_norm_diff_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpQuadrature {
    /// Initial panels over `[-R, R]` (per axis in two dimensions).
    pub start_panels: usize,
    pub max_panels: usize,
    /// Refinement stops once successive estimates of `int |a - b|^p`
    /// differ by at most `max(rel_tol * I, abs_tol)`.
    pub rel_tol: f64,
    /// Absolute floor so that a vanishing integrand, or one carrying
    /// quadrature noise from nested integrals, still terminates.
    pub abs_tol: f64,
}

impl Default for LpQuadrature {
    fn default() -> Self {
        Self {
            start_panels: 64,
            max_panels: 1 << 16,
            rel_tol: 1e-6,
            abs_tol: 1e-12,
        }
    }
}

impl LpQuadrature {
    /// Starts with panels no wider than `feature / 2`.
    pub fn resolving(radius: f64, feature: f64) -> Self {
        let d = Self::default();
        let want = (4.0 * radius / feature).ceil();
        let start = if want.is_finite() { (want as usize).clamp(d.start_panels, 1 << 18) } else { d.start_panels };
        Self {
            start_panels: start,
            max_panels: d.max_panels.max(start * 8),
            ..d
        }
    }
}

/// Maximum of `|a - b|` over the grid and the first lattice point (in
/// lexicographic order) attaining it.
pub fn sup_norm_diff_on_grid<A: Evaluable, B: Evaluable>(a: &A, b: &B, grid: &GridSpec) -> Result<(f64, Vec<f64>)> {
    check_dim(grid.dim(), a.dim())?;
    check_dim(grid.dim(), b.dim())?;
    let diffs = par::map_range(grid.len(), |i| {
        let x = grid.point(i);
        (a.value(&x) - b.value(&x)).abs()
    });
    let mut best = 0;
    for (i, d) in diffs.iter().enumerate() {
        if *d > diffs[best] || (d.is_nan() && !diffs[best].is_nan()) {
            best = i;
        }
    }
    Ok((diffs[best], grid.point(best)))
}

/// `(int_{[-R, R]^n} |a - b|^p + tail_bound)^{1/p}`, with `tail_bound` the
/// caller's bound on the integral of `|a - b|^p` outside the box.
pub fn lp_norm_diff<A: Evaluable, B: Evaluable>(a: &A, b: &B, p: f64, radius: f64, tail_bound: f64) -> Result<f64> {
    lp_norm_diff_with(a, b, p, radius, tail_bound, &LpQuadrature::default())
}

pub fn lp_norm_diff_with<A: Evaluable, B: Evaluable>(
    a: &A,
    b: &B,
    p: f64,
    radius: f64,
    tail_bound: f64,
    quad: &LpQuadrature,
) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must lie in [1, inf), got {p}")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(invalid(format!("integration radius must be positive, got {radius}")));
    }
    if !(tail_bound >= 0.0) {
        return Err(invalid(format!("tail bound must be nonnegative, got {tail_bound}")));
    }
    check_dim(a.dim(), b.dim())?;
    let n = a.dim();
    let kinks: Vec<f64> = a.kinks().into_iter().chain(b.kinks()).collect();
    let breaks = breakpoints(-radius, radius, kinks);
    let gl = GaussLegendre::new(8);
    let power = |d: f64| if p == 1.0 { d } else { d.powf(p) };
    let out = if n == 1 {
        refine_composite(
            |x: f64| power((a.value(&[x]) - b.value(&[x])).abs()),
            &breaks,
            quad.start_panels,
            quad.rel_tol,
            quad.abs_tol,
            quad.max_panels,
            &gl,
        )
    } else {
        let per_segment = (quad.start_panels / (breaks.len() - 1).max(1)).max(1);
        let axes = vec![breaks; n];
        piecewise_box(
            &|x: &[f64]| power((a.value(x) - b.value(x)).abs()),
            &axes,
            quad.abs_tol,
            quad.rel_tol,
            per_segment,
            quad.max_panels,
            &gl,
        )
    };
    let integral = out.into_result(quad.abs_tol.max(quad.rel_tol * out.value.abs()))?;
    Ok((integral.max(0.0) + tail_bound).powf(1.0 / p))
}

/// `L_p` norm of `a` itself.
pub fn lp_norm<A: Evaluable>(a: &A, p: f64, radius: f64, tail_bound: f64) -> Result<f64> {
    lp_norm_diff(a, &crate::eval::Zero { dim: a.dim() }, p, radius, tail_bound)
}

/// Numeric integral of a mixture over `[-R, R]^n` with `R` its effective
/// radius, on panels that resolve the narrowest component. In one dimension
/// panel edges sit on every component's kinks.
pub fn mixture_mass(mix: &Mixture) -> Result<f64> {
    let radius = mix.radius();
    let min_scale = mix.components().iter().map(|c| c.scale).fold(f64::INFINITY, f64::min);
    let index = mix.index();
    let gl = GaussLegendre::new(8);
    let out = if mix.dim() == 1 {
        let kernel_kinks = mix.kernel().kinks();
        let kinks = mix
            .components()
            .iter()
            .flat_map(|c| kernel_kinks.iter().map(move |t| c.location[0] + c.scale * t));
        let breaks = breakpoints(-radius, radius, kinks);
        let start = ((2.0 * radius / min_scale).ceil() as usize).clamp(16, 1 << 20);
        refine_composite(|x: f64| index.value(&[x]), &breaks, start, 1e-8, 1e-10, start * 64, &gl)
    } else {
        let start = ((2.0 * radius / min_scale).ceil() as usize).clamp(4, 1 << 10);
        let axes = vec![vec![-radius, radius]; mix.dim()];
        piecewise_box(&|x: &[f64]| index.value(x), &axes, 1e-10, 1e-8, start, start * 8, &gl)
    };
    out.into_result(1e-8)
}

/// `int_out u^p <= (sup u)^{p-1} int_out u` for a nonnegative `u` with
/// `int_out u = mass`.
pub(crate) fn tail_integral(sup: f64, p: f64, mass: f64) -> f64 {
    if mass <= 0.0 {
        0.0
    } else if p == 1.0 {
        mass
    } else {
        sup.powf(p - 1.0) * mass
    }
}
