//! Densities on `R^n`, their analytic metadata, and the builtin zoo.
//!
//! A [`DensitySpec`] is a pure evaluation record. It never samples. Optional
//! metadata (global Lipschitz constant, support radius, essential bound)
//! lets downstream code use closed forms instead of lattice estimates.

mod builtin;
mod grid;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::eval::Evaluable;

pub use grid::{BoxRegion, GridSpec};

use builtin::Family;

/// Regularity class of a density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuityClass {
    Continuous,
    EssentiallyBounded,
    General,
}

/// A named probability density on `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySpec {
    name: String,
    params: Vec<f64>,
    family: Family,
    dim: usize,
    lipschitz: Option<f64>,
    support_radius: Option<f64>,
    continuity: ContinuityClass,
    ess_bound: Option<f64>,
}

/// JSON form of a density: `{"family": "...", "params": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub family: String,
    pub params: Vec<f64>,
}

impl DensitySpec {
    /// Builds a builtin density from its family name and parameter list.
    ///
    /// One-dimensional families: `gaussian(mu, sigma)`, `laplace(mu, b)`,
    /// `triangular(a, c, b)`, `epanechnikov(mu, h)`, `uniform(a, b)` and
    /// `gmix(w1, mu1, sigma1, w2, mu2, sigma2, ...)`. Two-dimensional:
    /// `gaussian2(mu_x, mu_y, sigma)` and `triangular2(a, c, b)` or
    /// `triangular2(a1, c1, b1, a2, c2, b2)`.
    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        if params.iter().any(|p| !p.is_finite()) {
            return Err(invalid(format!("{name}: parameters must be finite")));
        }
        let family = Family::new(name, params)?;
        let meta = family.metadata();
        Ok(Self {
            name: name.to_string(),
            params: params.to_vec(),
            dim: family.dim(),
            family,
            lipschitz: meta.lipschitz,
            support_radius: meta.support_radius,
            continuity: meta.continuity,
            ess_bound: meta.ess_bound,
        })
    }

    /// Parses the command-line syntax `family:p1,p2,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::ParseError(format!("expected `family:p1,p2,...`, got `{spec}`")))?;
        let params = parse_list(rest)?;
        Self::builtin(name.trim(), &params)
    }

    pub fn from_json(json: &DensityJson) -> Result<Self> {
        Self::builtin(&json.family, &json.params)
    }

    pub fn to_json(&self) -> DensityJson {
        DensityJson {
            family: self.name.clone(),
            params: self.params.clone(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn continuity(&self) -> ContinuityClass {
        self.continuity
    }

    pub fn ess_bound(&self) -> Option<f64> {
        self.ess_bound
    }

    pub fn is_continuous(&self) -> bool {
        self.continuity == ContinuityClass::Continuous
    }

    /// Replaces the declared Lipschitz constant. Passing `None` forces
    /// consumers onto their lattice estimates.
    pub fn with_lipschitz(mut self, lipschitz: Option<f64>) -> Self {
        self.lipschitz = lipschitz;
        self
    }

    /// Density value at `x`, checking the dimension.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.family.eval(x))
    }

    /// The same family translated by `a`, i.e. the density of `X + a`.
    pub fn translated(&self, a: &[f64]) -> Result<Self> {
        check_dim(self.dim, a.len())?;
        let params = self.family.translated_params(a);
        Self::builtin(&self.name, &params).map(|d| Self {
            lipschitz: self.lipschitz,
            ..d
        })
    }

    /// Radius of an origin-centred ball carrying all but a negligible part
    /// (below `1e-17`) of the mass. Equals the support radius for compactly
    /// supported families.
    pub fn effective_radius(&self) -> f64 {
        self.family.effective_radius()
    }

    /// Factors `f_1, ..., f_n` with `f(x) = prod_j f_j(x_j)`, for the
    /// two-dimensional product families.
    pub fn product_factors(&self) -> Option<Vec<DensitySpec>> {
        self.family
            .factors()
            .map(|fs| fs.into_iter().map(|(name, p)| Self::builtin(name, &p).expect("factor of a valid density")).collect())
    }

    /// Smallest radius (to bisection accuracy) whose outside mass is at
    /// most `eta`.
    pub fn mass_radius(&self, eta: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.effective_radius());
        if self.mass_outside_ball(lo) <= eta {
            return 0.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.mass_outside_ball(mid) <= eta {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        hi
    }

    /// Mass outside the closed origin-centred ball of radius `radius`: exact
    /// in one dimension, an upper bound in two.
    pub fn mass_outside_ball(&self, radius: f64) -> f64 {
        self.family.mass_outside_ball(radius.max(0.0)).clamp(0.0, 1.0)
    }
}

impl fmt::Display for DensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.name)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl Evaluable for DensitySpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.family.eval(x)
    }

    fn radius(&self) -> f64 {
        self.effective_radius()
    }

    fn sup_bound(&self) -> f64 {
        self.ess_bound.unwrap_or(f64::INFINITY)
    }

    fn kinks(&self) -> Vec<f64> {
        self.family.kinks()
    }
}

/// Builds a builtin density (free-function form of [`DensitySpec::builtin`]).
pub fn builtin_density(name: &str, params: &[f64]) -> Result<DensitySpec> {
    DensitySpec::builtin(name, params)
}

/// Evaluates `d` at `x`.
pub fn eval_density(d: &DensitySpec, x: &[f64]) -> Result<f64> {
    d.eval(x)
}

/// Default lattice resolution for [`ess_sup_on_ball`] in dimension `dim`.
pub fn default_ball_samples(dim: usize) -> usize {
    if dim <= 1 {
        4097
    } else {
        257
    }
}

/// Maximum of `d` over a lattice of `samples` points per axis covering the
/// closed origin-centred ball of radius `s`.
pub fn ess_sup_on_ball(d: &DensitySpec, s: f64, samples: usize) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(invalid("ball radius must be positive"));
    }
    if samples == 0 {
        return Err(invalid("samples must be positive"));
    }
    let best = lattice_max_on_ball(d, s, samples);
    if best > 0.0 {
        Ok(best)
    } else {
        Err(Error::ZeroOnBall { radius: s })
    }
}

pub(crate) fn lattice_max_on_ball<E: Evaluable>(d: &E, s: f64, samples: usize) -> f64 {
    let n = d.dim();
    let coord = |i: usize| {
        if samples == 1 {
            0.0
        } else {
            -s + 2.0 * s * i as f64 / (samples - 1) as f64
        }
    };
    match n {
        1 => crate::par::map_range(samples, |i| d.value(&[coord(i)]))
            .into_iter()
            .fold(0.0, f64::max),
        2 => crate::par::map_range(samples, |i| {
            let x = coord(i);
            let mut best = 0.0_f64;
            for j in 0..samples {
                let y = coord(j);
                if x * x + y * y <= s * s {
                    best = best.max(d.value(&[x, y]));
                }
            }
            best
        })
        .into_iter()
        .fold(0.0, f64::max),
        _ => {
            // General n: walk the lattice with an odometer.
            let total = samples.pow(n as u32);
            let mut best = 0.0_f64;
            let mut x = vec![0.0; n];
            for flat in 0..total {
                let mut rem = flat;
                for xi in x.iter_mut().rev() {
                    *xi = coord(rem % samples);
                    rem /= samples;
                }
                if x.iter().map(|v| v * v).sum::<f64>() <= s * s {
                    best = best.max(d.value(&x));
                }
            }
            best
        }
    }
}

pub(crate) fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::ParseError(format!("`{t}` is not a number")))
        })
        .collect()
}

pub(crate) fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `P(Z > z)` for a standard normal `Z`.
pub(crate) fn std_normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}
