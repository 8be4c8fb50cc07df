//! Location-scale finite mixtures `sum_i c_i sigma_i^{-n} g((x - mu_i) / sigma_i)`.

mod index;
mod io;

use crate::density::DensitySpec;
use crate::error::{check_dim, Error, Result};
use crate::eval::Evaluable;
use crate::par::compensated_sum;

pub use index::MixtureIndex;
pub use io::{parse_mixture, serialize_mixture};

/// Tolerance on `|sum_i c_i - 1|` for every constructed mixture.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Tolerance accepted when parsing documents; weights within it are
/// renormalized onto the simplex.
pub const PARSE_SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub location: Vec<f64>,
    pub scale: f64,
}

impl MixtureComponent {
    pub fn new(weight: f64, location: Vec<f64>, scale: f64) -> Self {
        Self {
            weight,
            location,
            scale,
        }
    }
}

/// A finite mixture of one kernel density. Weights lie on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    kernel: DensitySpec,
    components: Vec<MixtureComponent>,
}

impl Mixture {
    /// Validates and builds a mixture: nonempty, matching dimensions,
    /// `c_i >= 0`, `sigma_i > 0` and `|sum c_i - 1| <= SIMPLEX_TOL`.
    pub fn new(kernel: DensitySpec, components: Vec<MixtureComponent>) -> Result<Self> {
        validate_components(&kernel, &components)?;
        let total = weight_sum(&components);
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidMixture(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { kernel, components })
    }

    /// Divides every weight by their sum before validating.
    pub(crate) fn normalized(kernel: DensitySpec, mut components: Vec<MixtureComponent>) -> Result<Self> {
        validate_components(&kernel, &components)?;
        let total = weight_sum(&components);
        if !(total > 0.0) {
            return Err(Error::InvalidMixture("weights sum to zero".into()));
        }
        for c in &mut components {
            c.weight /= total;
        }
        Self::new(kernel, components)
    }

    /// Single component `(1, location, scale)`.
    pub fn single(kernel: DensitySpec, location: Vec<f64>, scale: f64) -> Result<Self> {
        Self::new(kernel, vec![MixtureComponent::new(1.0, location, scale)])
    }

    pub fn kernel(&self) -> &DensitySpec {
        &self.kernel
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        weight_sum(&self.components)
    }

    /// Mixture density at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value(x))
    }

    /// Translates every location by `a`.
    pub fn shift(&self, a: &[f64]) -> Result<Mixture> {
        check_dim(self.dim(), a.len())?;
        let components = self
            .components
            .iter()
            .map(|c| MixtureComponent {
                weight: c.weight,
                location: c.location.iter().zip(a).map(|(m, d)| m + d).collect(),
                scale: c.scale,
            })
            .collect();
        Ok(Mixture {
            kernel: self.kernel.clone(),
            components,
        })
    }

    /// Windowed evaluator that skips components whose kernel is negligible
    /// at the query point. Agrees with [`Mixture::eval`] to within the
    /// kernel's effective-radius truncation.
    pub fn index(&self) -> MixtureIndex<'_> {
        MixtureIndex::new(self)
    }

    /// Upper bound on `int_{outside [-R, R]^n} h_m^p`.
    ///
    /// By convexity `h_m^p <= sum_i c_i phi_i^p` for the normalized
    /// components `phi_i`, and `int_out phi_i^p <= (sup phi_i)^{p-1} int_out phi_i`.
    pub fn lp_tail_bound(&self, radius: f64, p: f64) -> f64 {
        let n = self.dim() as i32;
        let sup_g = self.kernel.ess_bound().unwrap_or(f64::INFINITY);
        let terms = self.components.iter().map(|c| {
            let norm = c.location.iter().map(|v| v * v).sum::<f64>().sqrt();
            let t = (radius - norm) / c.scale;
            let out = self.kernel.mass_outside_ball(t.max(0.0));
            if out == 0.0 || c.weight == 0.0 {
                0.0
            } else {
                c.weight * (sup_g / c.scale.powi(n)).powf(p - 1.0) * out
            }
        });
        compensated_sum(terms)
    }

    pub(crate) fn component_value(&self, c: &MixtureComponent, x: &[f64], buf: &mut [f64]) -> f64 {
        for ((b, xi), mi) in buf.iter_mut().zip(x).zip(&c.location) {
            *b = (xi - mi) / c.scale;
        }
        c.weight * self.kernel.value(buf) / c.scale.powi(self.dim() as i32)
    }
}

fn validate_components(kernel: &DensitySpec, components: &[MixtureComponent]) -> Result<()> {
    if components.is_empty() {
        return Err(Error::InvalidMixture("mixture has no components".into()));
    }
    for (i, c) in components.iter().enumerate() {
        if c.location.len() != kernel.dim() {
            return Err(Error::InvalidMixture(format!(
                "component {i}: location has dimension {}, kernel has {}",
                c.location.len(),
                kernel.dim()
            )));
        }
        if !(c.weight >= 0.0) || !c.weight.is_finite() {
            return Err(Error::InvalidMixture(format!("component {i}: weight {} is not >= 0", c.weight)));
        }
        if !(c.scale > 0.0) || !c.scale.is_finite() {
            return Err(Error::InvalidMixture(format!("component {i}: scale {} is not > 0", c.scale)));
        }
        if c.location.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMixture(format!("component {i}: location is not finite")));
        }
    }
    Ok(())
}

fn weight_sum(components: &[MixtureComponent]) -> f64 {
    compensated_sum(components.iter().map(|c| c.weight))
}

impl Evaluable for Mixture {
    fn dim(&self) -> usize {
        self.kernel.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut buf = vec![0.0; self.dim()];
        self.components
            .iter()
            .map(|c| self.component_value(c, x, &mut buf))
            .sum()
    }

    fn radius(&self) -> f64 {
        let reach = self.kernel.effective_radius();
        self.components
            .iter()
            .map(|c| c.location.iter().map(|v| v * v).sum::<f64>().sqrt() + reach * c.scale)
            .fold(0.0, f64::max)
    }

    fn sup_bound(&self) -> f64 {
        let sup_g = self.kernel.ess_bound().unwrap_or(f64::INFINITY);
        let n = self.dim() as i32;
        self.components
            .iter()
            .map(|c| c.weight * sup_g / c.scale.powi(n))
            .sum()
    }
}

/// Evaluates `mix` at `x`.
pub fn eval_mixture(mix: &Mixture, x: &[f64]) -> Result<f64> {
    mix.eval(x)
}

/// Translates every component of `mix` by `a`.
pub fn shift_mixture(mix: &Mixture, a: &[f64]) -> Result<Mixture> {
    mix.shift(a)
}
