use std::collections::VecDeque;

use crate::density::{default_ball_samples, ess_sup_on_ball, DensitySpec};
use crate::error::{invalid, Error, Result};
use crate::eval::Evaluable;
use crate::par;

/// Safety factor applied to lattice estimates of the modulus.
const LATTICE_INFLATION: f64 = 1.05;

/// Upper estimate of `w(g, radius, delta) = sup { |g(x) - g(y)| : x, y in B_radius, |x - y| <= delta }`.
///
/// With a declared Lipschitz constant `L` this is `min(L delta, 2 sup g)`.
/// Otherwise it is a lattice estimate (4096 points per axis in one
/// dimension, 1024 in two), inflated by `1.05 sqrt(n)`. Either way it is
/// nondecreasing in `delta`.
pub fn modulus_of_continuity(g: &DensitySpec, radius: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    Ok(ModulusEstimator::new(g, radius)?.at(delta))
}

/// The modulus of one kernel on one ball, evaluated at many `delta`.
pub(crate) enum ModulusEstimator {
    Lipschitz { l: f64, cap: f64 },
    Lattice(LatticeModulus),
}

impl ModulusEstimator {
    pub(crate) fn new(g: &DensitySpec, radius: f64) -> Result<Self> {
        if !g.is_continuous() {
            return Err(Error::ContinuityRequired(format!(
                "the modulus of continuity of `{g}` is not finite-valued"
            )));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid(format!("radius must be positive, got {radius}")));
        }
        match g.lipschitz() {
            Some(l) => {
                let cap = match ess_sup_on_ball(g, radius, default_ball_samples(g.dim())) {
                    Ok(v) => 2.0 * v,
                    Err(Error::ZeroOnBall { .. }) => f64::INFINITY,
                    Err(e) => return Err(e),
                };
                Ok(Self::Lipschitz { l, cap })
            }
            None => Ok(Self::Lattice(LatticeModulus::new(g, radius)?)),
        }
    }

    pub(crate) fn at(&self, delta: f64) -> f64 {
        match self {
            Self::Lipschitz { l, cap } => (l * delta).min(*cap),
            Self::Lattice(lat) => lat.at(delta),
        }
    }

    /// Lipschitz constant when the estimate is `L delta` for small `delta`.
    pub(crate) fn lipschitz(&self) -> Option<f64> {
        match self {
            Self::Lipschitz { l, .. } => Some(*l),
            Self::Lattice(_) => None,
        }
    }
}

/// Values of `g` along the axis-parallel lattice lines inside the ball.
pub(crate) struct LatticeModulus {
    spacing: f64,
    lines: Vec<Vec<f64>>,
    max_step: f64,
    factor: f64,
}

impl LatticeModulus {
    fn new(g: &DensitySpec, radius: f64) -> Result<Self> {
        let n = g.dim();
        let points = match n {
            1 => 4096,
            2 => 1024,
            _ => return Err(invalid(format!("lattice modulus supports n = 1 or 2, got {n}"))),
        };
        let spacing = 2.0 * radius / (points - 1) as f64;
        let coord = |i: usize| -radius + i as f64 * spacing;
        let lines: Vec<Vec<f64>> = if n == 1 {
            vec![(0..points).map(|i| g.value(&[coord(i)])).collect()]
        } else {
            // Rows then columns; each keeps its contiguous run inside the disk.
            let r2 = radius * radius * (1.0 + 1e-12);
            let rows = par::map_range(points, |i| {
                let x = coord(i);
                (0..points)
                    .filter(|&j| x * x + coord(j) * coord(j) <= r2)
                    .map(|j| g.value(&[x, coord(j)]))
                    .collect::<Vec<f64>>()
            });
            let cols = par::map_range(points, |j| {
                let y = coord(j);
                (0..points)
                    .filter(|&i| coord(i) * coord(i) + y * y <= r2)
                    .map(|i| g.value(&[coord(i), y]))
                    .collect::<Vec<f64>>()
            });
            rows.into_iter().chain(cols).filter(|l| !l.is_empty()).collect()
        };
        let max_step = lines
            .iter()
            .flat_map(|l| l.windows(2).map(|w| (w[1] - w[0]).abs()))
            .fold(0.0, f64::max);
        Ok(Self {
            spacing,
            lines,
            max_step,
            factor: LATTICE_INFLATION * (n as f64).sqrt(),
        })
    }

    fn at(&self, delta: f64) -> f64 {
        if delta < self.spacing {
            return self.factor * self.max_step * delta / self.spacing;
        }
        let window = (delta / self.spacing).ceil() as usize;
        let best = par::map_slice(&self.lines, |l| window_range(l, window))
            .into_iter()
            .fold(0.0, f64::max);
        self.factor * best
    }
}

/// Largest `max - min` over runs of `window + 1` consecutive values.
fn window_range(v: &[f64], window: usize) -> f64 {
    let mut hi: VecDeque<usize> = VecDeque::new();
    let mut lo: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0_f64;
    for (i, &x) in v.iter().enumerate() {
        while hi.back().is_some_and(|&j| v[j] <= x) {
            hi.pop_back();
        }
        hi.push_back(i);
        while lo.back().is_some_and(|&j| v[j] >= x) {
            lo.pop_back();
        }
        lo.push_back(i);
        while hi.front().is_some_and(|&j| j + window < i) {
            hi.pop_front();
        }
        while lo.front().is_some_and(|&j| j + window < i) {
            lo.pop_front();
        }
        best = best.max(v[hi[0]] - v[lo[0]]);
    }
    best
}

/// `w(g, 2rk, delta) k^n mass + c_m k_m^n C_s`: the discretization
/// certificate. The tail term is dropped when `c_m = 0`.
#[allow(clippy::too_many_arguments)]
pub fn certified_bound(
    g: &DensitySpec,
    r: f64,
    k: f64,
    delta: f64,
    mass: f64,
    c_m: f64,
    k_m: f64,
    c_s: f64,
) -> Result<f64> {
    for (name, v) in [("r", r), ("k", k), ("delta", delta)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(format!("{name} must be positive, got {v}")));
        }
    }
    if !(mass >= 0.0) || !(c_m >= 0.0) || !(c_s >= 0.0) {
        return Err(invalid("mass, c_m and C_s must be nonnegative"));
    }
    let n = g.dim() as i32;
    let w = modulus_of_continuity(g, 2.0 * r * k, delta)?;
    let tail = if c_m > 0.0 {
        if !(k_m > 0.0) {
            return Err(invalid(format!("k_m must be positive, got {k_m}")));
        }
        c_m * k_m.powi(n) * c_s
    } else {
        0.0
    };
    Ok(w * k.powi(n) * mass + tail)
}
