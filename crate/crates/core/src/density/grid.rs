use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Axis-aligned closed box `[lo_0, hi_0] x ... x [lo_{n-1}, hi_{n-1}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(invalid("box bounds must be nonempty and of equal length"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(invalid("box needs finite lo < hi on every axis"));
        }
        Ok(Self { lo, hi })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    /// The cube `[-half, half]^dim`.
    pub fn centered_cube(half: f64, dim: usize) -> Result<Self> {
        Self::new(vec![-half; dim], vec![half; dim])
    }

    /// Parses `lo,hi` (1-D) or `lo_x,hi_x,lo_y,hi_y` (2-D).
    pub fn parse(text: &str) -> Result<Self> {
        let v = super::parse_list(text)?;
        if v.is_empty() || v.len() % 2 != 0 {
            return Err(Error::ParseError(format!(
                "box needs lo,hi pairs per axis, got `{text}`"
            )));
        }
        let lo = v.iter().step_by(2).copied().collect();
        let hi = v.iter().skip(1).step_by(2).copied().collect();
        Self::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Radius of the smallest origin-centred ball containing the box.
    pub fn origin_radius(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| a.abs().max(b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Euclidean distance from `x` to the box (zero inside).
    pub fn distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&v, (&a, &b))| {
                let d = if v < a {
                    a - v
                } else if v > b {
                    v - b
                } else {
                    0.0
                };
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance(x) == 0.0
    }

    pub fn translated(&self, a: &[f64]) -> Self {
        Self {
            lo: self.lo.iter().zip(a).map(|(l, d)| l + d).collect(),
            hi: self.hi.iter().zip(a).map(|(h, d)| h + d).collect(),
        }
    }

    /// Lattice over the box with `points` per axis.
    pub fn grid(&self, points: usize) -> Result<GridSpec> {
        GridSpec::new(
            self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (b - a)).collect(),
            points,
        )
    }
}

/// Regular evaluation lattice on an axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: Vec<f64>,
    pub half_width: Vec<f64>,
    pub points_per_axis: usize,
}

impl GridSpec {
    pub fn new(center: Vec<f64>, half_width: Vec<f64>, points_per_axis: usize) -> Result<Self> {
        if center.is_empty() || center.len() != half_width.len() {
            return Err(invalid("grid center and half widths must match in length"));
        }
        if half_width.iter().any(|h| !(*h > 0.0)) {
            return Err(invalid("grid half widths must be positive"));
        }
        if points_per_axis < 2 {
            return Err(invalid("grid needs at least 2 points per axis"));
        }
        Ok(Self {
            center,
            half_width,
            points_per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_width[axis] / (self.points_per_axis - 1) as f64
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        // Hit both endpoints exactly.
        if i + 1 == self.points_per_axis {
            self.center[axis] + self.half_width[axis]
        } else {
            self.center[axis] - self.half_width[axis] + i as f64 * self.spacing(axis)
        }
    }

    /// Point with flat index `flat`; axis 0 varies slowest, so flat order is
    /// lexicographic order.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let n = self.dim();
        let mut x = vec![0.0; n];
        let mut rem = flat;
        for axis in (0..n).rev() {
            x[axis] = self.coord(axis, rem % self.points_per_axis);
            rem /= self.points_per_axis;
        }
        x
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}
