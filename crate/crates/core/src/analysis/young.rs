use serde::{Deserialize, Serialize};

use super::convolution::Convolution;
use super::norms::{lp_norm_diff_with, tail_integral, LpQuadrature};
use crate::density::DensitySpec;
use crate::error::{check_dim, invalid, Result};
use crate::eval::{Evaluable, Zero};

/// Both sides of `||f * g||_p <= ||f||_p ||g||_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Negligible mass cut from each density before integrating; it re-enters
/// every norm through a tail bound.
const CUT_MASS: f64 = 1e-13;

/// Evaluates both sides of Young's inequality numerically: `lhs` is an upper
/// estimate of `||f * g||_p`, `rhs` a lower estimate of `||f||_p ||g||_1`, and
/// `holds` allows a slack of `1e-6`.
///
/// Product densities in two dimensions factor as `f * g = (f_1 * g_1)(f_2 * g_2)`
/// and every `L_p` norm factors the same way, so those pairs reduce to
/// one-dimensional checks.
pub fn young_inequality_check(f: &DensitySpec, g: &DensitySpec, p: f64) -> Result<YoungCheck> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must lie in [1, inf), got {p}")));
    }
    check_dim(f.dim(), g.dim())?;
    if f.dim() > 1 {
        if let (Some(fs), Some(gs)) = (f.product_factors(), g.product_factors()) {
            let (mut lhs, mut rhs) = (1.0, 1.0);
            for (fj, gj) in fs.iter().zip(&gs) {
                let (l, r) = young_sides(fj, gj, p)?;
                lhs *= l;
                rhs *= r;
            }
            return Ok(YoungCheck {
                lhs,
                rhs,
                holds: lhs <= rhs + 1e-6,
            });
        }
    }
    let (lhs, rhs) = young_sides(f, g, p)?;
    Ok(YoungCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-6,
    })
}

fn young_sides(f: &DensitySpec, g: &DensitySpec, p: f64) -> Result<(f64, f64)> {
    let (rf, rg) = (f.mass_radius(CUT_MASS), g.mass_radius(CUT_MASS));
    let (mf, mg) = (f.mass_outside_ball(rf), g.mass_outside_ball(rg));
    let zero = Zero { dim: f.dim() };
    let feature = narrowest_feature(f).min(narrowest_feature(g));
    let f_cut = Cut { d: f, radius: rf };

    let conv = Convolution::with_tol(g, 1.0, &f_cut, 1e-11)?;
    let r = rf + rg;
    // f_cut lives in the ball of radius rf, so f_cut * g leaves the ball of
    // radius rf + rg only through the part of g outside its own ball.
    let conv_sup = f.sup_bound().min(g.sup_bound());
    let lhs_cut = lp_norm_diff_with(&conv, &zero, p, r, tail_integral(conv_sup, p, mg), &quadrature(r, feature))?;
    // Minkowski and Young: ||(f - f_cut) * g||_p <= ||f - f_cut||_p.
    let lhs = lhs_cut + tail_integral(f.sup_bound(), p, mf).powf(1.0 / p);

    // The right side drops the cut tails, so both sides err against the
    // inequality.
    let f_norm = lp_norm_diff_with(f, &zero, p, rf, 0.0, &quadrature(rf, feature))?;
    let g_norm = lp_norm_diff_with(g, &zero, 1.0, rg, 0.0, &quadrature(rg, feature))?;
    Ok((lhs, f_norm * g_norm))
}

/// `d` restricted to the closed ball of radius `radius`.
struct Cut<'a> {
    d: &'a DensitySpec,
    radius: f64,
}

impl Evaluable for Cut<'_> {
    fn dim(&self) -> usize {
        self.d.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        if x.iter().map(|v| v * v).sum::<f64>() <= self.radius * self.radius {
            self.d.value(x)
        } else {
            0.0
        }
    }
    fn radius(&self) -> f64 {
        self.radius
    }
    fn sup_bound(&self) -> f64 {
        self.d.sup_bound()
    }
    fn kinks(&self) -> Vec<f64> {
        let mut k = self.d.kinks();
        k.extend([-self.radius, self.radius]);
        k
    }
}

/// Length scale below which a builtin has no structure: the smallest gap
/// between kinks, or a tenth of the effective radius.
fn narrowest_feature(d: &DensitySpec) -> f64 {
    let mut k = d.kinks();
    k.sort_by(f64::total_cmp);
    k.dedup();
    let gap = k.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    gap.min(0.1 * d.effective_radius())
}

fn quadrature(radius: f64, feature: f64) -> LpQuadrature {
    let mut q = LpQuadrature::resolving(radius, feature);
    q.rel_tol = 1e-8;
    q.abs_tol = 1e-14;
    if radius > 0.0 && q.start_panels > 4096 {
        q.start_panels = 4096;
    }
    q
}
