use super::quadrature::{adaptive_gk, breakpoints, piecewise_box, GaussLegendre, QuadOutcome};
use crate::density::DensitySpec;
use crate::error::{check_dim, invalid, Result};
use crate::eval::Evaluable;

/// Default absolute tolerance of a single convolution integral.
pub const CONVOLUTION_TOL: f64 = 1e-8;

const MAX_SEGMENTS: usize = 4000;
const MAX_PANELS_2D: usize = 256;

const ZERO: QuadOutcome = QuadOutcome {
    value: 0.0,
    error: 0.0,
    converged: true,
};

/// `g_k * h`, with `g_k = k^n g(k .)`, evaluated by quadrature over the
/// support of `h` intersected with the kernel window around `x`.
pub struct Convolution<'a, H> {
    g: &'a DensitySpec,
    k: f64,
    h: H,
    tol: f64,
    h_kinks: Vec<f64>,
    g_kinks: Vec<f64>,
    h_radius: f64,
    reach: f64,
}

impl<'a, H: Evaluable> Convolution<'a, H> {
    pub fn new(g: &'a DensitySpec, k: f64, h: H) -> Result<Self> {
        Self::with_tol(g, k, h, CONVOLUTION_TOL)
    }

    pub fn with_tol(g: &'a DensitySpec, k: f64, h: H, tol: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(invalid(format!("bandwidth k must be positive, got {k}")));
        }
        if !(tol > 0.0) {
            return Err(invalid("convolution tolerance must be positive"));
        }
        check_dim(g.dim(), h.dim())?;
        Ok(Self {
            h_kinks: h.kinks(),
            g_kinks: g.kinks(),
            h_radius: h.radius(),
            reach: g.effective_radius() / k,
            g,
            k,
            h,
            tol,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.k
    }

    /// Value at `x`; fails with `QuadratureBudget` when the tolerance is
    /// out of reach.
    pub fn try_value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.g.dim(), x.len())?;
        self.outcome(x).into_result(self.tol)
    }

    fn outcome(&self, x: &[f64]) -> QuadOutcome {
        match x.len() {
            1 => self.value_1d(x[0]),
            _ => self.value_box(x),
        }
    }

    fn axis_breaks(&self, xi: f64) -> Vec<f64> {
        let lo = (xi - self.reach).max(-self.h_radius);
        let hi = (xi + self.reach).min(self.h_radius);
        if !(hi > lo) {
            return vec![];
        }
        let mapped = self.g_kinks.iter().map(|t| xi - t / self.k);
        breakpoints(lo, hi, self.h_kinks.iter().copied().chain(mapped))
    }

    fn value_1d(&self, x: f64) -> QuadOutcome {
        let breaks = self.axis_breaks(x);
        if breaks.is_empty() {
            return ZERO;
        }
        let k = self.k;
        let integrand = |y: f64| {
            let hv = self.h.value(&[y]);
            if hv == 0.0 {
                0.0
            } else {
                k * self.g.value(&[k * (x - y)]) * hv
            }
        };
        adaptive_gk(integrand, &breaks, self.tol, MAX_SEGMENTS)
    }

    fn value_box(&self, x: &[f64]) -> QuadOutcome {
        let breaks: Vec<Vec<f64>> = x.iter().map(|&xi| self.axis_breaks(xi)).collect();
        if breaks.iter().any(Vec::is_empty) {
            return ZERO;
        }
        let n = x.len();
        let scale = self.k.powi(n as i32);
        let integrand = |y: &[f64]| {
            let hv = self.h.value(y);
            if hv == 0.0 {
                return 0.0;
            }
            let mut z = [0.0; 4];
            if n <= z.len() {
                for (zi, (a, b)) in z.iter_mut().zip(x.iter().zip(y)) {
                    *zi = self.k * (a - b);
                }
                scale * self.g.value(&z[..n]) * hv
            } else {
                let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| self.k * (a - b)).collect();
                scale * self.g.value(&z) * hv
            }
        };
        let gl = GaussLegendre::new(8);
        piecewise_box(&integrand, &breaks, self.tol, 0.0, 2, MAX_PANELS_2D, &gl)
    }
}

impl<H: Evaluable> Evaluable for Convolution<'_, H> {
    fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Best estimate, even when the tolerance was not met.
    fn value(&self, x: &[f64]) -> f64 {
        self.outcome(x).value
    }

    fn radius(&self) -> f64 {
        self.h_radius + self.reach
    }

    /// `|g_k * h| <= sup |h|` because `g_k` integrates to one.
    fn sup_bound(&self) -> f64 {
        self.h.sup_bound()
    }

    fn kinks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for s in &self.h_kinks {
            for t in &self.g_kinks {
                out.push(s + t / self.k);
            }
        }
        out
    }
}

/// `(g_k * h)(x)` by adaptive quadrature with absolute tolerance `1e-8`.
pub fn convolve_at<H: Evaluable>(g: &DensitySpec, k: f64, h: &H, x: &[f64]) -> Result<f64> {
    Convolution::new(g, k, h)?.try_value(x)
}
