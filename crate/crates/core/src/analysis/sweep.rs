use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::constructor::{self, ApproxOptions, BandwidthNorm};
use crate::density::{BoxRegion, DensitySpec};
use crate::error::{invalid, Error, Result};

/// One parameter setting and what was measured there. `None` marks a
/// quantity that does not apply to the row, or a failed row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub labels: Vec<(String, f64)>,
    pub certified_bound: Option<f64>,
    pub measured_sup: Option<f64>,
    pub measured_lp: Option<f64>,
    pub m: Option<usize>,
    pub elapsed_s: f64,
    /// Failure message for rows whose construction or measurement failed.
    pub error: Option<String>,
}

impl SweepRow {
    pub fn label(&self, key: &str) -> Option<f64> {
        self.labels.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// Rows of a convergence study, in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Requires at least one row and the same label keys, in the same order,
    /// on every row.
    pub fn new(rows: Vec<SweepRow>) -> Result<Self> {
        let first = rows.first().ok_or_else(|| invalid("a sweep table needs at least one row"))?;
        let keys: Vec<&str> = first.labels.iter().map(|(k, _)| k.as_str()).collect();
        for row in &rows[1..] {
            if !row.labels.iter().map(|(k, _)| k.as_str()).eq(keys.iter().copied()) {
                return Err(invalid("sweep rows must share their label keys"));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn label_keys(&self) -> Vec<&str> {
        self.rows[0].labels.iter().map(|(k, _)| k.as_str()).collect()
    }

    /// Sets every elapsed time to zero, for byte-reproducible output.
    pub fn zero_timing(&mut self) {
        for row in &mut self.rows {
            row.elapsed_s = 0.0;
        }
    }

    /// CSV with header `labels...,certified_bound,measured_sup,measured_lp,m,elapsed_s`,
    /// 17 significant digits, LF line endings. Missing values are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let csv_err = |e: csv::Error| Error::InvalidParameter(format!("writing CSV: {e}"));
        let mut header: Vec<String> = self.label_keys().iter().map(|k| k.to_string()).collect();
        header.extend(["certified_bound", "measured_sup", "measured_lp", "m", "elapsed_s"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        let opt = |v: Option<f64>| v.map(format_g17).unwrap_or_default();
        for row in &self.rows {
            let mut rec: Vec<String> = row.labels.iter().map(|(_, v)| format_g17(*v)).collect();
            rec.push(opt(row.certified_bound));
            rec.push(opt(row.measured_sup));
            rec.push(opt(row.measured_lp));
            rec.push(row.m.map(|m| m.to_string()).unwrap_or_default());
            rec.push(format_g17(row.elapsed_s));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(format!("writing CSV: {e}")))?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

/// `%.17g` formatting: 17 significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 <= |v| < 1e17`.
pub fn format_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Where a sweep measures the error of `f - h_m`.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepTarget {
    /// Sup norm on a grid over the box; the box is also the truncation set.
    Uniform(BoxRegion),
    /// `L_p` norm; truncation to the cube holding all but `mass_tail` of `f`.
    Lp { p: f64 },
}

/// Runs the constructor at each `(k, delta)` setting and records the
/// certificate, the measured errors and the component count. Rows that fail
/// keep their error message instead of aborting the sweep.
pub fn convergence_sweep(
    f: &DensitySpec,
    g: &DensitySpec,
    target: &SweepTarget,
    settings: &[(f64, f64)],
    opts: &ApproxOptions,
) -> Result<SweepTable> {
    if settings.is_empty() {
        return Err(invalid("convergence sweep needs at least one (k, delta) setting"));
    }
    let setup = constructor::SweepSetup::new(f, g, target, opts)?;
    let rows = settings
        .iter()
        .map(|&(k, delta)| {
            let start = Instant::now();
            let labels = vec![("k".to_string(), k), ("delta".to_string(), delta)];
            match setup.run(k, delta) {
                Ok(out) => SweepRow {
                    labels,
                    certified_bound: Some(out.certified_bound),
                    measured_sup: Some(out.measured_sup),
                    measured_lp: out.measured_lp,
                    m: Some(out.m),
                    elapsed_s: start.elapsed().as_secs_f64(),
                    error: None,
                },
                Err(e) => SweepRow {
                    labels,
                    certified_bound: None,
                    measured_sup: None,
                    measured_lp: None,
                    m: None,
                    elapsed_s: start.elapsed().as_secs_f64(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    SweepTable::new(rows)
}

/// `||g_k * f - f||` for each `k`, in the sup norm on a grid or in `L_p`.
pub fn approximate_identity_curve(f: &DensitySpec, g: &DensitySpec, norm: &BandwidthNorm, ks: &[f64]) -> Result<SweepTable> {
    if ks.is_empty() {
        return Err(invalid("identity curve needs at least one k"));
    }
    if ks.iter().any(|k| !(*k > 0.0) || !k.is_finite()) || ks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("ks must be positive and strictly increasing"));
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let start = Instant::now();
        let err = constructor::mollification_error(f, g, k, norm, 0.0)?;
        let (measured_sup, measured_lp) = match norm {
            BandwidthNorm::Sup(_) => (Some(err), None),
            BandwidthNorm::Lp { .. } => (None, Some(err)),
        };
        rows.push(SweepRow {
            labels: vec![("k".to_string(), k)],
            certified_bound: None,
            measured_sup,
            measured_lp,
            m: None,
            elapsed_s: start.elapsed().as_secs_f64(),
            error: None,
        });
    }
    SweepTable::new(rows)
}
