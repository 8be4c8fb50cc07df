use std::time::Instant;

use super::bandwidth::{feature_scale, lp_quadrature, select_bandwidth};
use super::bandwidth::{BandwidthNorm, BandwidthSchedule};
use super::discretize::{discretize, Discretization};
use super::modulus::ModulusEstimator;
use super::partition::{build_partition, count_cells};
use super::truncate::{truncate_with, TruncationResult};
use super::{ApproxOptions, ApproxReport, ReportParams};
use crate::analysis::{lp_norm_diff_with, sup_norm_diff_on_grid, tail_integral, Convolution, SweepTarget};
use crate::density::{BoxRegion, DensitySpec, GridSpec};
use crate::error::{check_dim, invalid, Error, Result};
use crate::eval::{Evaluable, FnEval};
use crate::mixture::Mixture;
use crate::par;

/// Uniform approximation of a continuous `f` on the box `K`.
///
/// The budget `eps` splits into `eps / 2` for mollification (measured on a
/// grid over `K`), `eps / 4` for the modulus term of the certificate (which
/// fixes `delta`) and `eps / 4` for the remainder tail. Fails with
/// `ToleranceNotMet` when the grid-measured `||f - h_m||` exceeds `eps`.
pub fn approximate_uniform(
    f: &DensitySpec,
    g: &DensitySpec,
    k_box: &BoxRegion,
    eps: f64,
    opts: &ApproxOptions,
) -> Result<(Mixture, ApproxReport)> {
    let start = Instant::now();
    check_eps(eps)?;
    check_problem(f, g)?;
    check_dim(f.dim(), k_box.dim())?;
    if !g.is_continuous() {
        return Err(Error::ContinuityRequired(format!("uniform approximation needs a continuous kernel, `{g}` is not")));
    }
    let n = f.dim();
    let h = truncate_with(f, k_box, opts.margin, opts.tau, opts.anchor.as_deref(), true)?;
    let points = opts.grid_points_for(n);
    let local_grid = h.inner().grid(points)?;
    let choice = select_bandwidth(&h, g, eps / 2.0, &BandwidthNorm::Sup(local_grid.clone()), &schedule(opts))?;
    let k = choice.k;

    let modulus = ModulusEstimator::new(g, 2.0 * h.r * k)?;
    let delta = uniform_delta(&modulus, &h, k, eps / 4.0, opts)?;
    let (mix, disc) = build(&h, g, k, delta, eps / 4.0, opts)?;

    let grid = k_box.grid(points)?;
    let index = mix.index();
    let (measured_total, grid_slack) = grid_error(f, &index, &grid);
    let conv = Convolution::new(g, k, &h)?;
    let anchor = h.anchor().to_vec();
    let local_mix = FnEval::new(n, h.r, |y: &[f64]| {
        let x: Vec<f64> = y.iter().zip(&anchor).map(|(a, b)| a + b).collect();
        index.value(&x)
    });
    let measured_disc = sup_norm_diff_on_grid(&conv, &local_mix, &local_grid)?.0;

    let report = ApproxReport {
        mode: "uniform".into(),
        params: params(&disc, eps, None),
        c_m: disc.c_m,
        k_m: disc.k_m,
        certified_bound: disc.certified_bound,
        measured_mollification: choice.measured,
        measured_total,
        elapsed_s: start.elapsed().as_secs_f64(),
        grid_slack,
        measured_discretization: Some(measured_disc),
        mass: disc.mass,
        c_s: disc.c_s,
        s: disc.s,
        grid: Some(grid),
    };
    finish(mix, report, eps)
}

/// `L_p` approximation of `f` for a bounded kernel `g`.
///
/// Truncates to the cube `[-R, R]^n` holding all but `opts.mass_tail` of
/// `f`, picks `k` with `||h - g_k * h||_p <= eps / 2`, then halves `delta`
/// (from 1) until the measured `||g_k * h - h_m||_p <= eps / 4`. Fails with
/// `ToleranceNotMet` when the measured `||f - h_m||_p`, tails included,
/// exceeds `eps`.
pub fn approximate_lp(
    f: &DensitySpec,
    g: &DensitySpec,
    p: f64,
    eps: f64,
    opts: &ApproxOptions,
) -> Result<(Mixture, ApproxReport)> {
    let start = Instant::now();
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must lie in [1, inf), got {p}")));
    }
    check_eps(eps)?;
    if g.ess_bound().is_none() {
        return Err(Error::EssBoundRequired(format!("`{g}` declares no essential bound")));
    }
    check_problem(f, g)?;
    let n = f.dim();
    let k_box = lp_box(f, opts)?;
    let h = truncate_with(f, &k_box, opts.margin, opts.tau, opts.anchor.as_deref(), false)?;
    let choice = select_bandwidth(&h, g, eps / 2.0, &BandwidthNorm::Lp { p }, &schedule(opts))?;
    let k = choice.k;

    let conv = Convolution::with_tol(g, k, &h, 1e-10)?;
    let reach = g.effective_radius();
    let radius = h.r + reach / k;
    let conv_tail = tail_integral(h.sup_bound(), p, g.mass_outside_ball(reach));
    let feature = feature_scale(&h.kinks()).min(1.0 / k);
    let quad = lp_quadrature(radius, feature, p, eps / 4.0);
    let neg: Vec<f64> = h.anchor().iter().map(|a| -a).collect();

    let mut delta = 1.0_f64.min(2.0 * h.r * k * (n as f64).sqrt());
    let (mix, disc, measured_disc) = loop {
        let (mix, disc) = build(&h, g, k, delta, eps / 4.0, opts)?;
        let local = mix.shift(&neg)?;
        let tail = 2f64.powf(p - 1.0) * (conv_tail + local.lp_tail_bound(radius, p));
        let err = lp_norm_diff_with(&conv, &local.index(), p, radius, tail, &quad)?;
        if err <= eps / 4.0 {
            break (mix, disc, err);
        }
        delta /= 2.0;
    };

    let measured_total = lp_error(f, &mix, p, radius + norm(h.anchor()), feature, eps)?;
    let report = ApproxReport {
        mode: "lp".into(),
        params: params(&disc, eps, Some(p)),
        c_m: disc.c_m,
        k_m: disc.k_m,
        certified_bound: disc.certified_bound,
        measured_mollification: choice.measured,
        measured_total,
        elapsed_s: start.elapsed().as_secs_f64(),
        grid_slack: 0.0,
        measured_discretization: Some(measured_disc),
        mass: disc.mass,
        c_s: disc.c_s,
        s: disc.s,
        grid: None,
    };
    finish(mix, report, eps)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

fn check_problem(f: &DensitySpec, g: &DensitySpec) -> Result<()> {
    check_dim(f.dim(), g.dim())?;
    if f.dim() > 2 {
        return Err(invalid(format!(
            "certified construction supports n = 1 or 2, got {}",
            f.dim()
        )));
    }
    Ok(())
}

fn schedule(opts: &ApproxOptions) -> BandwidthSchedule {
    BandwidthSchedule {
        k0: opts.k0,
        cap: opts.k_cap,
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// The cube `[-R, R]^n` holding all but `mass_tail` of `f`.
fn lp_box(f: &DensitySpec, opts: &ApproxOptions) -> Result<BoxRegion> {
    if !(opts.mass_tail > 0.0 && opts.mass_tail < 1.0) {
        return Err(invalid(format!("mass_tail must lie in (0, 1), got {}", opts.mass_tail)));
    }
    let radius = f.mass_radius(opts.mass_tail).max(1e-6);
    BoxRegion::centered_cube(radius, f.dim())
}

/// Largest `delta` with `w(g, 2rk, delta) k^n mass <= budget`.
fn uniform_delta(modulus: &ModulusEstimator, h: &TruncationResult, k: f64, budget: f64, opts: &ApproxOptions) -> Result<f64> {
    let n = h.dim();
    let scale = k.powi(n as i32) * h.mass.max(0.0);
    let widest = 2.0 * h.r * k * (n as f64).sqrt();
    if scale == 0.0 {
        return Ok(widest);
    }
    let mut delta = match modulus.lipschitz() {
        Some(l) if l > 0.0 => (budget / (l * scale)).min(widest),
        _ => widest,
    };
    for _ in 0..200 {
        if modulus.at(delta) * scale <= budget {
            return Ok(delta);
        }
        delta /= 2.0;
    }
    Err(Error::BudgetExceeded {
        budget: opts.max_components,
        needed: usize::MAX,
        delta,
    })
}

/// Partition and discretize, refusing partitions beyond the budget.
fn build(
    h: &TruncationResult,
    g: &DensitySpec,
    k: f64,
    delta: f64,
    eps_tail: f64,
    opts: &ApproxOptions,
) -> Result<(Mixture, Discretization)> {
    let needed = count_cells(h.r, k, delta, h.dim())?;
    if needed > opts.max_components {
        return Err(Error::BudgetExceeded {
            budget: opts.max_components,
            needed,
            delta,
        });
    }
    let part = build_partition(h.r, k, delta, h.dim())?;
    discretize(h, g, k, &part, eps_tail, opts.quad_order, opts.weight_floor)
}

fn params(disc: &Discretization, eps: f64, p: Option<f64>) -> ReportParams {
    ReportParams {
        r: disc.r,
        k: disc.k,
        delta: disc.delta,
        m: disc.m,
        eps,
        p,
    }
}

fn finish(mix: Mixture, report: ApproxReport, eps: f64) -> Result<(Mixture, ApproxReport)> {
    if report.measured_total > eps || report.measured_total.is_nan() {
        return Err(Error::ToleranceNotMet {
            measured: report.measured_total,
            eps,
            report: Box::new(report),
        });
    }
    Ok((mix, report))
}

/// `max |f - h_m|` over the grid, and `1.05` times the largest jump of
/// `f - h_m` between neighbouring grid points.
fn grid_error<A: Evaluable, B: Evaluable>(f: &A, mix: &B, grid: &GridSpec) -> (f64, f64) {
    let errs = par::map_range(grid.len(), |i| {
        let x = grid.point(i);
        f.value(&x) - mix.value(&x)
    });
    let sup = errs.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let n = grid.dim();
    let ppa = grid.points_per_axis;
    let mut jump = 0.0_f64;
    let mut stride = 1;
    for _ in 0..n {
        for i in 0..errs.len() {
            if (i / stride) % ppa + 1 < ppa {
                jump = jump.max((errs[i + stride] - errs[i]).abs());
            }
        }
        stride *= ppa;
    }
    (sup, 1.05 * jump)
}

/// `||f - h_m||_p` over `[-R, R]^n` plus tail bounds outside.
fn lp_error(f: &DensitySpec, mix: &Mixture, p: f64, radius: f64, feature: f64, eps: f64) -> Result<f64> {
    let f_tail = tail_integral(f.sup_bound(), p, f.mass_outside_ball(radius));
    let tail = 2f64.powf(p - 1.0) * (f_tail + mix.lp_tail_bound(radius, p));
    let quad = lp_quadrature(radius, feature, p, eps);
    lp_norm_diff_with(f, &mix.index(), p, radius, tail, &quad)
}

/// What one sweep row measured.
pub(crate) struct SweepOutcome {
    pub certified_bound: f64,
    pub measured_sup: f64,
    pub measured_lp: Option<f64>,
    pub m: usize,
}

/// Truncation and measurement grid shared by the rows of a sweep.
pub(crate) struct SweepSetup<'a> {
    f: &'a DensitySpec,
    g: &'a DensitySpec,
    h: TruncationResult,
    grid: GridSpec,
    p: Option<f64>,
    opts: &'a ApproxOptions,
}

impl<'a> SweepSetup<'a> {
    pub(crate) fn new(f: &'a DensitySpec, g: &'a DensitySpec, target: &SweepTarget, opts: &'a ApproxOptions) -> Result<Self> {
        check_problem(f, g)?;
        let (k_box, p, continuous) = match target {
            SweepTarget::Uniform(k_box) => (k_box.clone(), None, true),
            SweepTarget::Lp { p } => {
                if !(*p >= 1.0) || !p.is_finite() {
                    return Err(invalid(format!("p must lie in [1, inf), got {p}")));
                }
                (lp_box(f, opts)?, Some(*p), false)
            }
        };
        check_dim(f.dim(), k_box.dim())?;
        let h = truncate_with(f, &k_box, opts.margin, opts.tau, opts.anchor.as_deref(), continuous)?;
        let grid = k_box.grid(opts.grid_points_for(f.dim()))?;
        Ok(Self { f, g, h, grid, p, opts })
    }

    pub(crate) fn run(&self, k: f64, delta: f64) -> Result<SweepOutcome> {
        let (mix, disc) = build(&self.h, self.g, k, delta, self.opts.sweep_tail, self.opts)?;
        let (measured_sup, _) = grid_error(self.f, &mix.index(), &self.grid);
        let measured_lp = match self.p {
            Some(p) => {
                let radius = self.h.r + self.g.effective_radius() / k + norm(self.h.anchor());
                let feature = feature_scale(&self.h.kinks()).min(1.0 / k);
                Some(lp_error(self.f, &mix, p, radius, feature, 0.0)?)
            }
            None => None,
        };
        Ok(SweepOutcome {
            certified_bound: disc.certified_bound,
            measured_sup,
            measured_lp,
            m: disc.m,
        })
    }
}

