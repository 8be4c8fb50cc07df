//! Deterministic quadrature rules.
//!
//! * [`GaussLegendre`]: fixed-order rules, used per cell and per panel.
//! * [`adaptive_gk`]: globally adaptive 7/15-point Gauss-Kronrod on an
//!   interval split at caller-supplied breakpoints.
//! * [`refine_composite`]: composite Gauss-Legendre with panel doubling until
//!   successive estimates agree.
//! * [`adaptive_box`]: tensor composite Gauss-Legendre on a box with the same
//!   doubling check.
//! * [`piecewise_box`]: as above, with panel edges pinned to per-axis kinks.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::par;

/// Result of a quadrature run. `converged` is false when the budget ran out
/// before the tolerance was met; `value` is then the best estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

impl QuadOutcome {
    pub fn into_result(self, tol: f64) -> crate::Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(crate::Error::QuadratureBudget {
                tol,
                estimate: self.error,
            })
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(c + h * x);
        }
        sum * h
    }

    /// Tensor-product integral of `f` over the box `[lo, hi]`.
    pub fn integrate_box<F: Fn(&[f64]) -> f64>(&self, f: &F, lo: &[f64], hi: &[f64]) -> f64 {
        let n = lo.len();
        let q = self.order();
        let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        let mut sum = 0.0;
        loop {
            let mut w = 1.0;
            for d in 0..n {
                x[d] = mid[d] + half[d] * self.nodes[idx[d]];
                w *= self.weights[idx[d]];
            }
            sum += w * f(&x);
            // odometer
            let mut d = n;
            loop {
                if d == 0 {
                    return sum * half.iter().product::<f64>();
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < q {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// 15-point Kronrod estimate and its error on `[a, b]`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let ah = h.abs();
    let err = rescale_error((res_k - res_g) * h, res_abs * ah, res_asc * ah);
    (res_k * h, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive Gauss-Kronrod integration over `[breaks[0], breaks[last]]`.
///
/// `breaks` must be sorted; every interior point starts a new segment.
/// Bisects the worst segment until the summed error estimate drops below
/// `abs_tol` or `max_segments` segments exist.
pub fn adaptive_gk<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    max_segments: usize,
) -> QuadOutcome {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b > a {
            let (value, err) = gk15(&f, a, b);
            heap.push(Segment { a, b, value, err });
        }
    }
    if heap.is_empty() {
        return QuadOutcome {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    let mut total_err: f64 = heap.iter().map(|s| s.err).sum();
    let mut stuck = false;
    while total_err > abs_tol && heap.len() < max_segments {
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-13 * (1.0 + worst.a.abs()) {
            heap.push(worst);
            stuck = true;
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = par::compensated_sum(segs.iter().map(|s| s.value));
    let error: f64 = segs.iter().map(|s| s.err).sum();
    QuadOutcome {
        value,
        error,
        converged: error <= abs_tol && !stuck,
    }
}

/// Sorted breakpoint list `[a, (kinks strictly inside), b]`.
pub fn breakpoints(a: f64, b: f64, kinks: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut inner: Vec<f64> = kinks.into_iter().filter(|&k| k > a && k < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    let mut out = Vec::with_capacity(inner.len() + 2);
    out.push(a);
    out.extend(inner);
    out.push(b);
    out
}

/// Composite Gauss-Legendre with `panels` panels spread over the segments of
/// `breaks` in proportion to their length (at least one per segment).
pub fn composite<F: Fn(f64) -> f64 + Sync>(f: &F, breaks: &[f64], panels: usize, gl: &GaussLegendre) -> f64 {
    let total = breaks[breaks.len() - 1] - breaks[0];
    if !(total > 0.0) {
        return 0.0;
    }
    let mut cells = Vec::new();
    for w in breaks.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let k = ((panels as f64 * len / total).ceil() as usize).max(1);
        let step = len / k as f64;
        for j in 0..k {
            let a = w[0] + j as f64 * step;
            let b = if j + 1 == k { w[1] } else { a + step };
            cells.push((a, b));
        }
    }
    let parts = par::map_slice(&cells, |&(a, b)| gl.integrate(f, a, b));
    par::compensated_sum(parts)
}

/// Composite Gauss-Legendre refined by panel doubling until two successive
/// estimates differ by at most `max(rel_tol * |I|, abs_tol)`.
pub fn refine_composite<F: Fn(f64) -> f64 + Sync>(
    f: F,
    breaks: &[f64],
    start_panels: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
    gl: &GaussLegendre,
) -> QuadOutcome {
    let mut panels = start_panels.max(1);
    let mut prev = composite(&f, breaks, panels, gl);
    loop {
        panels *= 2;
        let cur = composite(&f, breaks, panels, gl);
        let diff = (cur - prev).abs();
        if diff <= (rel_tol * cur.abs()).max(abs_tol) {
            return QuadOutcome {
                value: cur,
                error: diff,
                converged: true,
            };
        }
        if panels >= max_panels {
            return QuadOutcome {
                value: cur,
                error: diff,
                converged: false,
            };
        }
        prev = cur;
    }
}

/// Tensor composite Gauss-Legendre with `panels` panels per axis.
pub fn tensor_composite<F: Fn(&[f64]) -> f64 + Sync>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    panels: usize,
    gl: &GaussLegendre,
) -> f64 {
    let n = lo.len();
    let count = panels.pow(n as u32);
    let steps: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / panels as f64).collect();
    let parts = par::map_range(count, |flat| {
        let mut plo = vec![0.0; n];
        let mut phi = vec![0.0; n];
        let mut rem = flat;
        for d in (0..n).rev() {
            let j = rem % panels;
            rem /= panels;
            plo[d] = lo[d] + j as f64 * steps[d];
            phi[d] = if j + 1 == panels { hi[d] } else { plo[d] + steps[d] };
        }
        gl.integrate_box(f, &plo, &phi)
    });
    par::compensated_sum(parts)
}

/// Tensor composite Gauss-Legendre (order 8) on a box, doubling the panels
/// per axis until successive estimates differ by at most `abs_tol`.
pub fn adaptive_box<F: Fn(&[f64]) -> f64 + Sync>(
    f: F,
    lo: &[f64],
    hi: &[f64],
    abs_tol: f64,
    start_panels: usize,
    max_panels: usize,
) -> QuadOutcome {
    let gl = GaussLegendre::new(8);
    adaptive_box_with(&f, lo, hi, abs_tol, 0.0, start_panels, max_panels, &gl)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn adaptive_box_with<F: Fn(&[f64]) -> f64 + Sync>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    start_panels: usize,
    max_panels: usize,
    gl: &GaussLegendre,
) -> QuadOutcome {
    if lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
        return QuadOutcome {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    let mut panels = start_panels.max(1);
    let mut prev = tensor_composite(f, lo, hi, panels, gl);
    loop {
        panels *= 2;
        let cur = tensor_composite(f, lo, hi, panels, gl);
        let diff = (cur - prev).abs();
        if diff <= abs_tol.max(rel_tol * cur.abs()) {
            return QuadOutcome {
                value: cur,
                error: diff,
                converged: true,
            };
        }
        if panels >= max_panels {
            return QuadOutcome {
                value: cur,
                error: diff,
                converged: false,
            };
        }
        prev = cur;
    }
}

/// Composite nodes and weights over `breaks`, `panels_per_segment` panels
/// on each segment.
pub fn composite_nodes(breaks: &[f64], panels_per_segment: usize, gl: &GaussLegendre) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let len = w[1] - w[0];
        if !(len > 0.0) {
            continue;
        }
        let step = len / panels_per_segment as f64;
        for j in 0..panels_per_segment {
            let a = w[0] + j as f64 * step;
            let b = if j + 1 == panels_per_segment { w[1] } else { a + step };
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, wt) in gl.nodes().iter().zip(gl.weights()) {
                out.push((mid + half * x, half * wt));
            }
        }
    }
    out
}

/// Tensor rule built from one composite rule per axis. Axis `d` is split at
/// `breaks[d]`, and the panels per segment double until successive
/// estimates agree within `max(abs_tol, rel_tol * |I|)`.
#[allow(clippy::too_many_arguments)]
pub fn piecewise_box<F: Fn(&[f64]) -> f64 + Sync>(
    f: &F,
    breaks: &[Vec<f64>],
    abs_tol: f64,
    rel_tol: f64,
    start_panels: usize,
    max_panels: usize,
    gl: &GaussLegendre,
) -> QuadOutcome {
    if breaks.iter().any(|b| b.len() < 2 || !(b[b.len() - 1] > b[0])) {
        return QuadOutcome {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    let estimate = |panels: usize| {
        let axes: Vec<Vec<(f64, f64)>> = breaks.iter().map(|b| composite_nodes(b, panels, gl)).collect();
        tensor_sum(f, &axes)
    };
    let mut panels = start_panels.max(1);
    let mut prev = estimate(panels);
    loop {
        panels *= 2;
        let cur = estimate(panels);
        let diff = (cur - prev).abs();
        if diff <= abs_tol.max(rel_tol * cur.abs()) {
            return QuadOutcome {
                value: cur,
                error: diff,
                converged: true,
            };
        }
        if panels >= max_panels {
            return QuadOutcome {
                value: cur,
                error: diff,
                converged: false,
            };
        }
        prev = cur;
    }
}

fn tensor_sum<F: Fn(&[f64]) -> f64 + Sync>(f: &F, axes: &[Vec<(f64, f64)>]) -> f64 {
    let n = axes.len();
    let rest: usize = axes[1..].iter().map(Vec::len).product();
    let parts = par::map_slice(&axes[0], |&(x0, w0)| {
        let mut x = vec![0.0; n];
        x[0] = x0;
        let mut acc = 0.0;
        for flat in 0..rest {
            let mut rem = flat;
            let mut w = w0;
            for d in (1..n).rev() {
                let (xd, wd) = axes[d][rem % axes[d].len()];
                rem /= axes[d].len();
                x[d] = xd;
                w *= wd;
            }
            acc += w * f(&x);
        }
        acc
    });
    par::compensated_sum(parts)
}
