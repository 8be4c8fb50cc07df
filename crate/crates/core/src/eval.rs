/// A real-valued function on `R^n` that can be sampled pointwise.
///
/// Implementors must be cheap to share across threads; evaluation is pure.
pub trait Evaluable: Sync {
    fn dim(&self) -> usize;

    /// Value at `x`. Callers guarantee `x.len() == self.dim()`.
    fn value(&self, x: &[f64]) -> f64;

    /// Radius of an origin-centred ball outside which the function is zero
    /// or numerically negligible.
    fn radius(&self) -> f64;

    /// Upper bound on `|value|`, or infinity when unknown.
    fn sup_bound(&self) -> f64 {
        f64::INFINITY
    }

    /// Coordinates where the function is not smooth. In one dimension these
    /// are points; in higher dimensions every listed value marks a
    /// non-smooth hyperplane orthogonal to each axis (a superset is fine).
    /// Quadrature routines pin panel edges there.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<T: Evaluable + ?Sized> Evaluable for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn radius(&self) -> f64 {
        (**self).radius()
    }
    fn sup_bound(&self) -> f64 {
        (**self).sup_bound()
    }
    fn kinks(&self) -> Vec<f64> {
        (**self).kinks()
    }
}

/// The zero function.
#[derive(Debug, Clone, Copy)]
pub struct Zero {
    pub dim: usize,
}

impl Evaluable for Zero {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn radius(&self) -> f64 {
        0.0
    }
    fn sup_bound(&self) -> f64 {
        0.0
    }
}

/// Adapts a closure into an [`Evaluable`].
pub struct FnEval<F> {
    dim: usize,
    radius: f64,
    kinks: Vec<f64>,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnEval<F> {
    pub fn new(dim: usize, radius: f64, f: F) -> Self {
        Self {
            dim,
            radius,
            kinks: Vec::new(),
            f,
        }
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Evaluable for FnEval<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn radius(&self) -> f64 {
        self.radius
    }
    fn kinks(&self) -> Vec<f64> {
        self.kinks.clone()
    }
}
