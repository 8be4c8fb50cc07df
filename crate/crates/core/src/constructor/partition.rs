use crate::error::{invalid, Result};

/// Half-open box `[lo, hi)` in dilated coordinates with its representative.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Point of the closed cell inside the ball of radius `rk`.
    pub rep: Vec<f64>,
}

/// Grid boxes of side `delta / sqrt(n)` anchored at `-rk` on every axis,
/// keeping those that meet the closed ball of radius `rk`. Cells are listed
/// in lexicographic order of their grid index.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPartition {
    pub cells: Vec<Cell>,
    pub delta: f64,
    pub ball_radius: f64,
    pub side: f64,
    pub dim: usize,
}

impl CellPartition {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

struct Layout {
    radius: f64,
    side: f64,
    per_axis: usize,
}

impl Layout {
    fn new(r: f64, k: f64, delta: f64, dim: usize) -> Result<Self> {
        for (name, v) in [("r", r), ("k", k), ("delta", delta)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(1..=2).contains(&dim) {
            return Err(invalid(format!("cell partitions support n = 1 or 2, got {dim}")));
        }
        let radius = r * k;
        let side = delta / (dim as f64).sqrt();
        // An exact tiling of [-rk, rk] should not spawn a sliver cell at +rk;
        // the last box is treated as closed instead.
        let q = 2.0 * radius / side;
        let per_axis = (q * (1.0 - 1e-12)).ceil().max(1.0);
        if per_axis > 1e9 {
            return Err(invalid(format!("delta = {delta} is too small for a ball of radius {radius}")));
        }
        Ok(Self {
            radius,
            side,
            per_axis: per_axis as usize,
        })
    }

    fn edge(&self, j: usize) -> f64 {
        -self.radius + j as f64 * self.side
    }

    /// Squared distance from the origin to `[a, b]`.
    fn gap2(a: f64, b: f64) -> f64 {
        if a > 0.0 {
            a * a
        } else if b < 0.0 {
            b * b
        } else {
            0.0
        }
    }
}

/// Number of cells [`build_partition`] would produce, without building them.
pub fn count_cells(r: f64, k: f64, delta: f64, dim: usize) -> Result<usize> {
    let l = Layout::new(r, k, delta, dim)?;
    if dim == 1 {
        return Ok(l.per_axis);
    }
    let r2 = l.radius * l.radius;
    let mut count = 0;
    for i in 0..l.per_axis {
        let gx = Layout::gap2(l.edge(i), l.edge(i + 1));
        for j in 0..l.per_axis {
            if gx + Layout::gap2(l.edge(j), l.edge(j + 1)) <= r2 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Partition of the closed ball of radius `rk` into cells of diameter at
/// most `delta`.
pub fn build_partition(r: f64, k: f64, delta: f64, dim: usize) -> Result<CellPartition> {
    let l = Layout::new(r, k, delta, dim)?;
    let mut cells = Vec::new();
    if dim == 1 {
        for j in 0..l.per_axis {
            let (a, b) = (l.edge(j), l.edge(j + 1));
            let rep = (0.5 * (a + b)).clamp(-l.radius, l.radius);
            cells.push(Cell {
                lo: vec![a],
                hi: vec![b],
                rep: vec![rep],
            });
        }
    } else {
        let r2 = l.radius * l.radius;
        for i in 0..l.per_axis {
            let (x0, x1) = (l.edge(i), l.edge(i + 1));
            let gx = Layout::gap2(x0, x1);
            for j in 0..l.per_axis {
                let (y0, y1) = (l.edge(j), l.edge(j + 1));
                if gx + Layout::gap2(y0, y1) > r2 {
                    continue;
                }
                let rep = disk_box_rep([x0, x1], [y0, y1], l.radius);
                cells.push(Cell {
                    lo: vec![x0, y0],
                    hi: vec![x1, y1],
                    rep: rep.to_vec(),
                });
            }
        }
    }
    Ok(CellPartition {
        cells,
        delta,
        ball_radius: l.radius,
        side: l.side,
        dim,
    })
}

/// Nearest point to the box centre within box ∩ disk.
///
/// When the centre lies outside the disk the nearest point is on the circle:
/// either the radial projection of the centre, or an end of the arc cut out
/// by the box.
fn disk_box_rep(xs: [f64; 2], ys: [f64; 2], radius: f64) -> [f64; 2] {
    let c = [0.5 * (xs[0] + xs[1]), 0.5 * (ys[0] + ys[1])];
    let norm = c[0].hypot(c[1]);
    if norm <= radius {
        return c;
    }
    let slack = 1e-12 * (radius + xs[1].abs() + ys[1].abs());
    let inside = |p: [f64; 2]| {
        p[0] >= xs[0] - slack && p[0] <= xs[1] + slack && p[1] >= ys[0] - slack && p[1] <= ys[1] + slack
    };
    let radial = [radius * c[0] / norm, radius * c[1] / norm];
    if inside(radial) {
        return clamp_box(radial, xs, ys);
    }
    let mut candidates = Vec::new();
    for &x in &xs {
        if x.abs() <= radius {
            let y = (radius * radius - x * x).sqrt();
            candidates.extend([[x, y], [x, -y]]);
        }
    }
    for &y in &ys {
        if y.abs() <= radius {
            let x = (radius * radius - y * y).sqrt();
            candidates.extend([[x, y], [-x, y]]);
        }
    }
    let dist = |p: &[f64; 2]| (p[0] - c[0]).hypot(p[1] - c[1]);
    candidates
        .into_iter()
        .filter(|p| inside(*p))
        .min_by(|a, b| dist(a).total_cmp(&dist(b)))
        .map(|p| clamp_box(p, xs, ys))
        // A box touching the circle only tangentially: its point nearest
        // the origin.
        .unwrap_or([0.0_f64.clamp(xs[0], xs[1]), 0.0_f64.clamp(ys[0], ys[1])])
}

fn clamp_box(p: [f64; 2], xs: [f64; 2], ys: [f64; 2]) -> [f64; 2] {
    [p[0].clamp(xs[0], xs[1]), p[1].clamp(ys[0], ys[1])]
}
