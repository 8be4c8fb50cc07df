use std::f64::consts::PI;

use super::{std_normal_pdf, std_normal_sf, ContinuityClass};
use crate::error::{invalid, Error, Result};

// Gaussian mass beyond 12 standard deviations is about 3.6e-33.
const GAUSS_RADIUS: f64 = 12.0;
// e^{-40} / 2 is about 2e-18.
const LAPLACE_RADIUS: f64 = 40.0;

#[derive(Debug, Clone, PartialEq)]
pub(super) enum Family {
    Gaussian { mu: f64, sigma: f64 },
    Laplace { mu: f64, b: f64 },
    Triangular(Tri),
    Epanechnikov { mu: f64, h: f64 },
    Uniform { a: f64, b: f64 },
    GaussianMixture(Vec<(f64, f64, f64)>),
    Gaussian2 { mu: [f64; 2], sigma: f64 },
    Triangular2(Tri, Tri),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) struct Tri {
    a: f64,
    c: f64,
    b: f64,
}

pub(super) struct Metadata {
    pub lipschitz: Option<f64>,
    pub support_radius: Option<f64>,
    pub continuity: ContinuityClass,
    pub ess_bound: Option<f64>,
}

fn arity(name: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() == n {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} takes {n} parameters, got {}",
            params.len()
        )))
    }
}

fn positive(name: &str, what: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("{name}: {what} must be positive, got {v}")))
    }
}

impl Tri {
    fn new(a: f64, c: f64, b: f64) -> Result<Self> {
        if !(a < b) || c < a || c > b {
            return Err(invalid(format!(
                "triangular: need a <= c <= b and a < b, got ({a}, {c}, {b})"
            )));
        }
        Ok(Self { a, c, b })
    }

    fn peak(&self) -> f64 {
        2.0 / (self.b - self.a)
    }

    fn is_continuous(&self) -> bool {
        self.a < self.c && self.c < self.b
    }

    fn lipschitz(&self) -> Option<f64> {
        self.is_continuous().then(|| {
            let w = self.b - self.a;
            (2.0 / (w * (self.c - self.a))).max(2.0 / (w * (self.b - self.c)))
        })
    }

    fn eval(&self, x: f64) -> f64 {
        let Tri { a, c, b } = *self;
        let w = b - a;
        if x < a || x > b {
            0.0
        } else if x < c {
            2.0 * (x - a) / (w * (c - a))
        } else if x == c {
            2.0 / w
        } else {
            2.0 * (b - x) / (w * (b - c))
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let Tri { a, c, b } = *self;
        let w = b - a;
        if x <= a {
            0.0
        } else if x <= c {
            (x - a) * (x - a) / (w * (c - a))
        } else if x < b {
            1.0 - (b - x) * (b - x) / (w * (b - c))
        } else {
            1.0
        }
    }

    fn extent(&self) -> f64 {
        self.a.abs().max(self.b.abs())
    }

    fn shifted(&self, d: f64) -> [f64; 3] {
        [self.a + d, self.c + d, self.b + d]
    }
}

fn laplace_cdf(mu: f64, b: f64, x: f64) -> f64 {
    if x <= mu {
        0.5 * ((x - mu) / b).exp()
    } else {
        1.0 - 0.5 * (-(x - mu) / b).exp()
    }
}

fn laplace_sf(mu: f64, b: f64, x: f64) -> f64 {
    if x >= mu {
        0.5 * (-(x - mu) / b).exp()
    } else {
        1.0 - 0.5 * ((x - mu) / b).exp()
    }
}

fn epan_cdf(mu: f64, h: f64, x: f64) -> f64 {
    let t = ((x - mu) / h).clamp(-1.0, 1.0);
    0.5 + (3.0 * t - t * t * t) / 4.0
}

impl Family {
    pub(super) fn new(name: &str, p: &[f64]) -> Result<Self> {
        Ok(match name {
            "gaussian" => {
                arity(name, p, 2)?;
                Family::Gaussian {
                    mu: p[0],
                    sigma: positive(name, "sigma", p[1])?,
                }
            }
            "laplace" => {
                arity(name, p, 2)?;
                Family::Laplace {
                    mu: p[0],
                    b: positive(name, "b", p[1])?,
                }
            }
            "triangular" => {
                arity(name, p, 3)?;
                Family::Triangular(Tri::new(p[0], p[1], p[2])?)
            }
            "epanechnikov" => {
                arity(name, p, 2)?;
                Family::Epanechnikov {
                    mu: p[0],
                    h: positive(name, "h", p[1])?,
                }
            }
            "uniform" => {
                arity(name, p, 2)?;
                if !(p[0] < p[1]) {
                    return Err(invalid(format!("uniform: need a < b, got ({}, {})", p[0], p[1])));
                }
                Family::Uniform { a: p[0], b: p[1] }
            }
            "gmix" => {
                if p.is_empty() || !p.len().is_multiple_of(3) {
                    return Err(invalid("gmix takes (weight, mu, sigma) triples"));
                }
                let comps: Vec<(f64, f64, f64)> =
                    p.chunks(3).map(|t| (t[0], t[1], t[2])).collect();
                if comps.iter().any(|&(w, _, s)| w < 0.0 || s <= 0.0) {
                    return Err(invalid("gmix: weights must be >= 0 and sigmas > 0"));
                }
                let total: f64 = comps.iter().map(|c| c.0).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(invalid(format!("gmix: weights sum to {total}, not 1")));
                }
                Family::GaussianMixture(comps)
            }
            "gaussian2" => {
                arity(name, p, 3)?;
                Family::Gaussian2 {
                    mu: [p[0], p[1]],
                    sigma: positive(name, "sigma", p[2])?,
                }
            }
            "triangular2" => match p.len() {
                3 => {
                    let t = Tri::new(p[0], p[1], p[2])?;
                    Family::Triangular2(t, t)
                }
                6 => Family::Triangular2(Tri::new(p[0], p[1], p[2])?, Tri::new(p[3], p[4], p[5])?),
                n => return Err(invalid(format!("triangular2 takes 3 or 6 parameters, got {n}"))),
            },
            other => return Err(Error::UnknownDensity(other.to_string())),
        })
    }

    pub(super) fn dim(&self) -> usize {
        match self {
            Family::Gaussian2 { .. } | Family::Triangular2(..) => 2,
            _ => 1,
        }
    }

    pub(super) fn metadata(&self) -> Metadata {
        use ContinuityClass::*;
        match self {
            Family::Gaussian { sigma, .. } => Metadata {
                lipschitz: Some(std_normal_pdf(1.0) / (sigma * sigma)),
                support_radius: None,
                continuity: Continuous,
                ess_bound: Some(1.0 / (sigma * (2.0 * PI).sqrt())),
            },
            Family::Laplace { b, .. } => Metadata {
                lipschitz: Some(1.0 / (2.0 * b * b)),
                support_radius: None,
                continuity: Continuous,
                ess_bound: Some(1.0 / (2.0 * b)),
            },
            Family::Triangular(t) => Metadata {
                lipschitz: t.lipschitz(),
                support_radius: Some(t.extent()),
                continuity: if t.is_continuous() {
                    Continuous
                } else {
                    EssentiallyBounded
                },
                ess_bound: Some(t.peak()),
            },
            Family::Epanechnikov { mu, h } => Metadata {
                lipschitz: Some(1.5 / (h * h)),
                support_radius: Some(mu.abs() + h),
                continuity: Continuous,
                ess_bound: Some(0.75 / h),
            },
            Family::Uniform { a, b } => Metadata {
                lipschitz: None,
                support_radius: Some(a.abs().max(b.abs())),
                continuity: EssentiallyBounded,
                ess_bound: Some(1.0 / (b - a)),
            },
            Family::GaussianMixture(comps) => Metadata {
                lipschitz: Some(comps.iter().map(|(w, _, s)| w * std_normal_pdf(1.0) / (s * s)).sum()),
                support_radius: None,
                continuity: Continuous,
                ess_bound: Some(comps.iter().map(|(w, _, s)| w / (s * (2.0 * PI).sqrt())).sum()),
            },
            Family::Gaussian2 { sigma, .. } => Metadata {
                // |grad| = (r / sigma^2) * pdf, maximal at r = sigma.
                lipschitz: Some((-0.5_f64).exp() / (2.0 * PI * sigma.powi(3))),
                support_radius: None,
                continuity: Continuous,
                ess_bound: Some(1.0 / (2.0 * PI * sigma * sigma)),
            },
            Family::Triangular2(tx, ty) => Metadata {
                lipschitz: match (tx.lipschitz(), ty.lipschitz()) {
                    (Some(lx), Some(ly)) => Some((lx * ty.peak()).hypot(tx.peak() * ly)),
                    _ => None,
                },
                support_radius: Some(tx.extent().hypot(ty.extent())),
                continuity: if tx.is_continuous() && ty.is_continuous() {
                    Continuous
                } else {
                    EssentiallyBounded
                },
                ess_bound: Some(tx.peak() * ty.peak()),
            },
        }
    }

    pub(super) fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Family::Gaussian { mu, sigma } => std_normal_pdf((x[0] - mu) / sigma) / sigma,
            Family::Laplace { mu, b } => (-(x[0] - mu).abs() / b).exp() / (2.0 * b),
            Family::Triangular(t) => t.eval(x[0]),
            Family::Epanechnikov { mu, h } => {
                let t = (x[0] - mu) / h;
                if t.abs() <= 1.0 {
                    0.75 * (1.0 - t * t) / h
                } else {
                    0.0
                }
            }
            Family::Uniform { a, b } => {
                if x[0] >= *a && x[0] <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Family::GaussianMixture(comps) => comps
                .iter()
                .map(|(w, mu, s)| w * std_normal_pdf((x[0] - mu) / s) / s)
                .sum(),
            Family::Gaussian2 { mu, sigma } => {
                let dx = x[0] - mu[0];
                let dy = x[1] - mu[1];
                (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
            }
            Family::Triangular2(tx, ty) => tx.eval(x[0]) * ty.eval(x[1]),
        }
    }

    /// One-dimensional factors `(family, params)` of a product density.
    pub(super) fn factors(&self) -> Option<Vec<(&'static str, Vec<f64>)>> {
        match self {
            Family::Gaussian2 { mu, sigma } => Some(vec![
                ("gaussian", vec![mu[0], *sigma]),
                ("gaussian", vec![mu[1], *sigma]),
            ]),
            Family::Triangular2(tx, ty) => Some(vec![
                ("triangular", vec![tx.a, tx.c, tx.b]),
                ("triangular", vec![ty.a, ty.c, ty.b]),
            ]),
            _ => None,
        }
    }

    pub(super) fn kinks(&self) -> Vec<f64> {
        match self {
            Family::Laplace { mu, .. } => vec![*mu],
            Family::Triangular(t) => vec![t.a, t.c, t.b],
            Family::Epanechnikov { mu, h } => vec![mu - h, mu + h],
            Family::Uniform { a, b } => vec![*a, *b],
            Family::Triangular2(t1, t2) => vec![t1.a, t1.c, t1.b, t2.a, t2.c, t2.b],
            _ => Vec::new(),
        }
    }

    pub(super) fn effective_radius(&self) -> f64 {
        match self {
            Family::Gaussian { mu, sigma } => mu.abs() + GAUSS_RADIUS * sigma,
            Family::Laplace { mu, b } => mu.abs() + LAPLACE_RADIUS * b,
            Family::GaussianMixture(comps) => comps
                .iter()
                .map(|(_, mu, s)| mu.abs() + GAUSS_RADIUS * s)
                .fold(0.0, f64::max),
            Family::Gaussian2 { mu, sigma } => mu[0].hypot(mu[1]) + GAUSS_RADIUS * sigma,
            other => other
                .metadata()
                .support_radius
                .expect("compact family has a support radius"),
        }
    }

    pub(super) fn mass_outside_ball(&self, r: f64) -> f64 {
        match self {
            Family::Gaussian { mu, sigma } => {
                std_normal_sf((r - mu) / sigma) + std_normal_sf((r + mu) / sigma)
            }
            Family::Laplace { mu, b } => laplace_cdf(*mu, *b, -r) + laplace_sf(*mu, *b, r),
            Family::Triangular(t) => t.cdf(-r) + (1.0 - t.cdf(r)),
            Family::Epanechnikov { mu, h } => epan_cdf(*mu, *h, -r) + (1.0 - epan_cdf(*mu, *h, r)),
            Family::Uniform { a, b } => {
                let inside = (r.min(*b) - (-r).max(*a)).max(0.0);
                1.0 - inside / (b - a)
            }
            Family::GaussianMixture(comps) => comps
                .iter()
                .map(|(w, mu, s)| w * (std_normal_sf((r - mu) / s) + std_normal_sf((r + mu) / s)))
                .sum(),
            Family::Gaussian2 { mu, sigma } => {
                // ||X|| > r implies ||X - mu|| > r - ||mu||, a Rayleigh tail.
                let t = r - mu[0].hypot(mu[1]);
                if t <= 0.0 {
                    1.0
                } else {
                    (-t * t / (2.0 * sigma * sigma)).exp()
                }
            }
            Family::Triangular2(tx, ty) => {
                let s = r / std::f64::consts::SQRT_2;
                let tail = |t: &Tri| t.cdf(-s) + (1.0 - t.cdf(s));
                tail(tx) + tail(ty)
            }
        }
    }

    pub(super) fn translated_params(&self, a: &[f64]) -> Vec<f64> {
        match self {
            Family::Gaussian { sigma, mu } => vec![mu + a[0], *sigma],
            Family::Laplace { mu, b } => vec![mu + a[0], *b],
            Family::Triangular(t) => t.shifted(a[0]).to_vec(),
            Family::Epanechnikov { mu, h } => vec![mu + a[0], *h],
            Family::Uniform { a: lo, b: hi } => vec![lo + a[0], hi + a[0]],
            Family::GaussianMixture(comps) => comps
                .iter()
                .flat_map(|&(w, mu, s)| [w, mu + a[0], s])
                .collect(),
            Family::Gaussian2 { mu, sigma } => vec![mu[0] + a[0], mu[1] + a[1], *sigma],
            Family::Triangular2(tx, ty) => {
                let mut v = tx.shifted(a[0]).to_vec();
                v.extend(ty.shifted(a[1]));
                v
            }
        }
    }
}
