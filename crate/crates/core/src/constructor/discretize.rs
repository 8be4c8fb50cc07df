use super::modulus::certified_bound;
use super::partition::{Cell, CellPartition};
use super::truncate::TruncationResult;
use crate::analysis::quadrature::{breakpoints, GaussLegendre};
use crate::density::{default_ball_samples, lattice_max_on_ball, DensitySpec};
use crate::error::{check_dim, invalid, Error, Result};
use crate::eval::Evaluable;
use crate::mixture::{Mixture, MixtureComponent};
use crate::par;

/// Remainders below this are quadrature overshoot rather than mass.
const OVERSHOOT_TOL: f64 = 1e-9;

/// Bookkeeping from [`discretize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub k: f64,
    pub delta: f64,
    pub r: f64,
    /// `int h`.
    pub mass: f64,
    /// Sum of the kept cell weights.
    pub cell_mass: f64,
    /// Total weight of cells below the floor.
    pub dropped_mass: f64,
    /// Remainder weight; zero when the remainder was omitted.
    pub c_m: f64,
    pub k_m: Option<f64>,
    pub s: f64,
    pub c_s: f64,
    pub m: usize,
    /// [`certified_bound`] plus the effect of floored cells and
    /// renormalization, `(dropped + |omitted c_m|) k^n sup g`.
    pub certified_bound: f64,
}

/// Smallest `s` in `1, 2, 4, ...` (at most ten doublings) with `g` positive
/// somewhere on the lattice over the ball of radius `s`, and an upper bound
/// `C_s` on `g` over that ball.
///
/// `C_s` is the lattice maximum plus `L h sqrt(n) / 2` when a Lipschitz
/// constant is declared (`h` the lattice spacing), capped by the essential
/// bound; with no Lipschitz constant it is the essential bound when one is
/// declared and the lattice maximum otherwise.
pub fn kernel_peak(g: &DensitySpec) -> Result<(f64, f64)> {
    let samples = default_ball_samples(g.dim());
    let mut s = 1.0;
    for _ in 0..=10 {
        let peak = lattice_max_on_ball(g, s, samples);
        if peak > 0.0 {
            let spacing = 2.0 * s / (samples - 1) as f64;
            let ess = g.ess_bound().unwrap_or(f64::INFINITY);
            let c_s = match g.lipschitz() {
                Some(l) => (peak + 0.5 * l * spacing * (g.dim() as f64).sqrt()).min(ess),
                None if ess.is_finite() => ess,
                None => peak,
            };
            return Ok((s, c_s.max(peak)));
        }
        s *= 2.0;
    }
    Err(Error::ZeroKernel { radius: s / 2.0 })
}

/// Turns `g_k * h` into a mixture: one component per cell with weight
/// `int_{cell / k} h`, location `rep / k` and scale `1 / k`, then a
/// remainder `(c_m, anchor, 1 / k_m)` with
/// `k_m = min(s / r, (eps_tail / (c_m C_s))^{1/n})`.
///
/// Components come out in cell order, remainder last, in the coordinates of
/// `f` (the anchor is added back).
pub fn discretize(
    h: &TruncationResult,
    g: &DensitySpec,
    k: f64,
    part: &CellPartition,
    eps_tail: f64,
    quad_order: usize,
    weight_floor: f64,
) -> Result<(Mixture, Discretization)> {
    check_dim(g.dim(), h.dim())?;
    check_dim(part.dim, h.dim())?;
    if !(k > 0.0) || ((part.ball_radius - h.r * k).abs() > 1e-12 * part.ball_radius) {
        return Err(invalid(format!(
            "partition radius {} does not match r k = {}",
            part.ball_radius,
            h.r * k
        )));
    }
    if !(eps_tail > 0.0) {
        return Err(invalid(format!("eps_tail must be positive, got {eps_tail}")));
    }
    if quad_order < 1 {
        return Err(invalid("quadrature order must be at least 1"));
    }
    if !(weight_floor >= 0.0) {
        return Err(invalid("weight floor must be nonnegative"));
    }
    let n = h.dim();
    let gl = GaussLegendre::new(quad_order);
    let mut kinks = h.kinks();
    kinks.sort_by(f64::total_cmp);
    let weights = par::map_slice(&part.cells, |cell| cell_weight(h, cell, k, &gl, &kinks));

    let anchor = h.anchor();
    let scale = 1.0 / k;
    let mut components = Vec::with_capacity(part.cells.len() + 1);
    let mut dropped = Vec::new();
    for (cell, &w) in part.cells.iter().zip(&weights) {
        if w >= weight_floor && w > 0.0 {
            let location = cell.rep.iter().zip(anchor).map(|(z, a)| z / k + a).collect();
            components.push(MixtureComponent::new(w, location, scale));
        } else {
            dropped.push(w);
        }
    }
    let cell_mass = par::compensated_sum(components.iter().map(|c| c.weight));
    let dropped_mass = par::compensated_sum(dropped);
    let c_m = 1.0 - cell_mass;
    if c_m < -OVERSHOOT_TOL {
        return Err(Error::QuadratureInconsistency { remainder: c_m });
    }
    let (s, c_s) = kernel_peak(g)?;
    let sup_g = g.ess_bound().unwrap_or(c_s);
    let kn = k.powi(n as i32);

    let (mixture, c_m_kept, k_m, floor_term) = if c_m <= weight_floor {
        let mix = Mixture::normalized(g.clone(), components)?;
        (mix, 0.0, None, (dropped_mass + c_m.abs()) * kn * sup_g)
    } else {
        let k_m = (s / h.r).min((eps_tail / (c_m * c_s)).powf(1.0 / n as f64));
        components.push(MixtureComponent::new(c_m, anchor.to_vec(), 1.0 / k_m));
        let mix = Mixture::new(g.clone(), components)?;
        (mix, c_m, Some(k_m), dropped_mass * kn * sup_g)
    };
    let bound = certified_bound(g, h.r, k, part.delta, h.mass.max(0.0), c_m_kept, k_m.unwrap_or(1.0), c_s)? + floor_term;
    let info = Discretization {
        k,
        delta: part.delta,
        r: h.r,
        mass: h.mass,
        cell_mass,
        dropped_mass,
        c_m: c_m_kept,
        k_m,
        s,
        c_s,
        m: mixture.len(),
        certified_bound: bound,
    };
    Ok((mixture, info))
}

/// `int_{cell / k} h` by Gauss-Legendre on the pieces cut out by the kinks.
fn cell_weight(h: &TruncationResult, cell: &Cell, k: f64, gl: &GaussLegendre, kinks: &[f64]) -> f64 {
    let axes: Vec<Vec<f64>> = cell
        .lo
        .iter()
        .zip(&cell.hi)
        .map(|(a, b)| {
            let (a, b) = (a / k, b / k);
            let from = kinks.partition_point(|&t| t <= a);
            let to = kinks.partition_point(|&t| t < b);
            breakpoints(a, b, kinks[from..to].iter().copied())
        })
        .collect();
    if axes.len() == 1 {
        return axes[0].windows(2).map(|w| gl.integrate(|y| h.value(&[y]), w[0], w[1])).sum();
    }
    let mut total = 0.0;
    for wx in axes[0].windows(2) {
        for wy in axes[1].windows(2) {
            total += gl.integrate_box(&|y: &[f64]| h.value(y), &[wx[0], wy[0]], &[wx[1], wy[1]]);
        }
    }
    total
}
