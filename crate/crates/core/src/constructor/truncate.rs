use crate::analysis::quadrature::{adaptive_gk, breakpoints, piecewise_box, GaussLegendre};
use crate::density::{BoxRegion, DensitySpec};
use crate::error::{check_dim, invalid, Error, Result};
use crate::eval::Evaluable;

/// Cubic smoothstep `3t^2 - 2t^3`, clamped to `[0, 1]`.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * (3.0 - 2.0 * t)
    }
}

/// `h = u f` with `u = 1` on `K`, `u = 0` at distance `>= tau` from `K`, and a
/// smoothstep ramp in between.
///
/// Construction may run in local coordinates `y = x - anchor`; then `inner`
/// is `K - anchor`, `h(y) = u(y) f(y + anchor)`, and `r` is measured from
/// the anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationResult {
    f: DensitySpec,
    inner: BoxRegion,
    anchor: Vec<f64>,
    /// Radius of the origin-centred (local) ball outside which `h = 0`.
    pub r: f64,
    /// `int h`.
    pub mass: f64,
    pub margin: f64,
    pub tau: f64,
}

impl TruncationResult {
    /// `K` in local coordinates.
    pub fn inner(&self) -> &BoxRegion {
        &self.inner
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn target(&self) -> &DensitySpec {
        &self.f
    }

    /// `h = f` for a compactly supported `f`: `K` is the cube of half-width
    /// `rho`, the support radius, so `u = 1` wherever `f > 0` and `r = rho`.
    pub fn exact(f: &DensitySpec) -> Result<Self> {
        let rho = f.support_radius().ok_or_else(|| {
            invalid(format!("`{f}` has no declared support radius"))
        })?;
        let mut out = Self {
            f: f.clone(),
            inner: BoxRegion::centered_cube(rho, f.dim())?,
            anchor: vec![0.0; f.dim()],
            r: rho,
            mass: 0.0,
            margin: 0.0,
            tau: 0.0,
        };
        out.mass = truncated_mass(&out)?;
        Ok(out)
    }

    /// The bump `u` at local point `y`.
    pub fn bump(&self, y: &[f64]) -> f64 {
        let d = self.inner.distance(y);
        if d == 0.0 {
            1.0
        } else if d >= self.tau {
            0.0
        } else {
            1.0 - smoothstep(d / self.tau)
        }
    }
}

impl Evaluable for TruncationResult {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn value(&self, y: &[f64]) -> f64 {
        let u = self.bump(y);
        if u == 0.0 {
            return 0.0;
        }
        let mut x = [0.0; 4];
        let n = y.len();
        if n <= x.len() {
            for ((xi, yi), ai) in x.iter_mut().zip(y).zip(&self.anchor) {
                *xi = yi + ai;
            }
            u * self.f.value(&x[..n])
        } else {
            let x: Vec<f64> = y.iter().zip(&self.anchor).map(|(a, b)| a + b).collect();
            u * self.f.value(&x)
        }
    }

    fn radius(&self) -> f64 {
        self.r
    }

    fn sup_bound(&self) -> f64 {
        self.f.sup_bound()
    }

    fn kinks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (axis, a) in self.anchor.iter().enumerate() {
            out.extend(self.f.kinks().into_iter().map(|k| k - a));
            for edge in [self.inner.lo[axis], self.inner.hi[axis]] {
                out.extend([edge - self.tau, edge, edge + self.tau]);
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Truncates a continuous `f` to a compactly supported `h` that agrees with
/// `f` on `K`.
pub fn truncate(f: &DensitySpec, k: &BoxRegion, margin: f64, tau: f64) -> Result<TruncationResult> {
    truncate_with(f, k, margin, tau, None, true)
}

/// As [`truncate`], without requiring continuity; used by the `L_p` pipeline.
pub fn truncate_lp(f: &DensitySpec, k: &BoxRegion, margin: f64, tau: f64) -> Result<TruncationResult> {
    truncate_with(f, k, margin, tau, None, false)
}

pub(crate) fn truncate_with(
    f: &DensitySpec,
    k: &BoxRegion,
    margin: f64,
    tau: f64,
    anchor: Option<&[f64]>,
    require_continuous: bool,
) -> Result<TruncationResult> {
    if require_continuous && !f.is_continuous() {
        return Err(Error::ContinuityRequired(format!(
            "uniform approximation needs a continuous target, `{f}` is not"
        )));
    }
    check_dim(f.dim(), k.dim())?;
    if !(margin > 0.0) || !margin.is_finite() {
        return Err(invalid(format!("margin must be positive, got {margin}")));
    }
    if !(tau > 0.0) || !(tau < margin) {
        return Err(invalid(format!("need 0 < tau < margin, got tau = {tau}, margin = {margin}")));
    }
    let n = f.dim();
    let anchor = match anchor {
        Some(a) => {
            check_dim(n, a.len())?;
            a.to_vec()
        }
        None => vec![0.0; n],
    };
    let neg: Vec<f64> = anchor.iter().map(|a| -a).collect();
    let inner = k.translated(&neg);
    let mut out = TruncationResult {
        f: f.clone(),
        r: inner.origin_radius() + margin,
        inner,
        anchor,
        mass: 0.0,
        margin,
        tau,
    };
    out.mass = truncated_mass(&out)?;
    Ok(out)
}

/// `int h` over its support box `inner + tau`.
fn truncated_mass(h: &TruncationResult) -> Result<f64> {
    let lo: Vec<f64> = h.inner.lo.iter().map(|v| v - h.tau).collect();
    let hi: Vec<f64> = h.inner.hi.iter().map(|v| v + h.tau).collect();
    let kinks = h.kinks();
    if h.dim() == 1 {
        let breaks = breakpoints(lo[0], hi[0], kinks);
        adaptive_gk(|y| h.value(&[y]), &breaks, 1e-10, 20_000).into_result(1e-10)
    } else {
        let axes: Vec<Vec<f64>> = (0..h.dim())
            .map(|d| breakpoints(lo[d], hi[d], kinks.iter().copied()))
            .collect();
        let gl = GaussLegendre::new(8);
        piecewise_box(&|y: &[f64]| h.value(y), &axes, 1e-8, 0.0, 1, 512, &gl).into_result(1e-8)
    }
}
