//! Bit-exact text output: CSV with a '#'-prefixed header carrying the
//! tool version, the fully resolved config echo, the column schema,
//! and the units note. Data values are printed with 17 significant
//! digits so doubles round-trip losslessly; line endings are LF.

use std::io::Write as _;
use std::path::Path;

use crate::config::RunConfig;
use crate::dynamics::TimeSeries;
use crate::error::Result;
use crate::experiments::{HeatmapResult, LabeledCurve};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const UNITS_NOTE: &str = "hbar=1, energies in gamma, times in hbar/gamma";

/// Header block written before any data rows.
#[derive(Debug, Clone)]
pub struct OutputHeader {
    pub version: String,
    pub config: Vec<(String, String)>,
    pub columns: String,
}

impl OutputHeader {
    pub fn new(cfg: &RunConfig, columns: &str) -> Self {
        Self {
            version: VERSION.to_string(),
            config: cfg.echo(),
            columns: columns.to_string(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# qzeno {}\n", self.version));
        s.push_str(&format!("# units: {UNITS_NOTE}\n"));
        s.push_str("# config:\n");
        for (k, v) in &self.config {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s.push_str(&format!("# columns: {}\n", self.columns));
        s
    }
}

/// 17 significant digits: enough for a lossless double round trip.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(body.as_bytes())?;
    Ok(())
}

/// Rows `x,value` (or `x,value,linear_approx` when the companion
/// column is present).
pub fn emit_curve(
    points: &[(f64, f64)],
    linear: Option<&[f64]>,
    header: &OutputHeader,
    path: &Path,
) -> Result<()> {
    let mut body = header.render();
    for (i, (x, v)) in points.iter().enumerate() {
        match linear {
            Some(l) => body.push_str(&format!(
                "{},{},{}\n",
                fmt_value(*x),
                fmt_value(*v),
                fmt_value(l[i])
            )),
            None => body.push_str(&format!("{},{}\n", fmt_value(*x), fmt_value(*v))),
        }
    }
    write_file(path, &body)
}

/// Family of curves in long form: `label,t,value`.
pub fn emit_curve_family(
    curves: &[LabeledCurve],
    header: &OutputHeader,
    path: &Path,
) -> Result<()> {
    let mut body = header.render();
    for c in curves {
        for (t, v) in &c.points {
            body.push_str(&format!("{},{},{}\n", c.label, fmt_value(*t), fmt_value(*v)));
        }
    }
    write_file(path, &body)
}

/// Time series rows `t,value,segment` with segment ∈ {M, F}.
pub fn emit_series(series: &TimeSeries, header: &OutputHeader, path: &Path) -> Result<()> {
    let mut body = header.render();
    for s in &series.samples {
        body.push_str(&format!(
            "{},{},{}\n",
            fmt_value(s.t),
            fmt_value(s.rho00),
            s.segment.label()
        ));
    }
    write_file(path, &body)
}

/// Labeled family of time series: `label,t,value,segment`.
pub fn emit_series_family(
    family: &[(f64, TimeSeries)],
    header: &OutputHeader,
    path: &Path,
) -> Result<()> {
    let mut body = header.render();
    for (tm, series) in family {
        let label = format!("t_m={tm}");
        for s in &series.samples {
            body.push_str(&format!(
                "{},{},{},{}\n",
                label,
                fmt_value(s.t),
                fmt_value(s.rho00),
                s.segment.label()
            ));
        }
    }
    write_file(path, &body)
}

/// Long-form heatmap `axis1,axis2,value,masked`, row-major with axis1
/// outer; masked rows carry an empty value and masked=1.
pub fn emit_heatmap(h: &HeatmapResult, header: &OutputHeader, path: &Path) -> Result<()> {
    let mut body = header.render();
    let a1 = h.grid.axis1.values();
    let a2 = h.grid.axis2.values();
    for (i1, x1) in a1.iter().enumerate() {
        for (i2, x2) in a2.iter().enumerate() {
            match h.value(i1, i2) {
                Some(v) => body.push_str(&format!(
                    "{},{},{},0\n",
                    fmt_value(*x1),
                    fmt_value(*x2),
                    fmt_value(v)
                )),
                None => body.push_str(&format!("{},{},,1\n", fmt_value(*x1), fmt_value(*x2))),
            }
        }
    }
    write_file(path, &body)
}
