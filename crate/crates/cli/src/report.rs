use std::io::Write;

use serde::{Deserialize, Serialize};

use autorbit_core::IdentityReport;

use crate::args::{Format, FunctionName, Suite};

pub const SCHEMA_VERSION: u32 = 1;

/// Decimal text for radii and tolerances, the same on every platform.
pub fn decimal(x: f64) -> String {
    x.to_string()
}

/// The flags of a run, echoed into its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub function: FunctionName,
    /// The resolved function, family and parameters.
    pub function_detail: serde_json::Value,
    pub z: Option<String>,
    pub w: Option<String>,
    pub radius: Option<String>,
    pub suite: Option<Suite>,
    pub r_grid: Option<String>,
    pub wiman: Option<WimanConfig>,
    pub random: usize,
    pub seed: Option<u64>,
    pub quadrature: QuadratureEcho,
    pub format: Format,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WimanConfig {
    pub rho: Option<String>,
    pub eps: String,
    pub r_lo: String,
    pub r_hi: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEcho {
    pub nodes_initial: usize,
    pub max_doublings: u32,
    pub tol_abs: String,
    pub tol_rel: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Expected failure that failed.
    Xfail,
    /// Expected failure that passed.
    Xpass,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub suite: Suite,
    pub label: String,
    pub xfail: bool,
    pub status: Status,
    pub report: Option<IdentityReport>,
    pub error: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub suite: Suite,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub xfail: usize,
    pub xpass: usize,
    pub error: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn of(entries: &[Entry], skipped: usize) -> Self {
        let mut s = Summary { skipped, ..Default::default() };
        for e in entries {
            match e.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Xfail => s.xfail += 1,
                Status::Xpass => s.xpass += 1,
                Status::Error => s.error += 1,
            }
        }
        s
    }

    pub fn failed(&self) -> bool {
        self.fail > 0 || self.error > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Default for Tool {
    fn default() -> Self {
        Tool { name: "autorbit".into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub tool: Tool,
    pub config: RunConfig,
    pub reports: Vec<Entry>,
    /// Orbit samples, counting profiles and Wiman radii.
    pub samples: Vec<serde_json::Value>,
    /// Flat rows for plotting or spreadsheets, one per sample point.
    pub rows: Vec<Row>,
    pub skipped: Vec<Skipped>,
    pub summary: Summary,
    pub notes: Vec<String>,
    pub wall_time_ms: f64,
}

/// One line of tabular output for `orbit` and `density`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Row {
    Point { re: f64, im: f64, multiplicity: u32, residual: f64, polished: bool },
    Radius { r: String, n: Option<usize>, log_m: f64, log_big_m: f64 },
}

/// CSV line per identity report.
#[derive(Serialize)]
struct ReportRow<'a> {
    suite: Suite,
    label: &'a str,
    identity_id: String,
    status: Status,
    lhs_re: Option<f64>,
    lhs_im: Option<f64>,
    rhs_re: Option<f64>,
    rhs_im: Option<f64>,
    abs_err: Option<f64>,
    rel_err: Option<f64>,
    tolerance: Option<String>,
    criterion: String,
    runtime_ms: Option<f64>,
    notes: &'a str,
}

impl ReportFile {
    pub fn write(&self, out: &mut dyn Write, format: Format) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Csv => self.write_csv(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if !self.reports.is_empty() {
            for e in &self.reports {
                let r = e.report.as_ref();
                let tag = |v: serde_json::Value| v.as_str().unwrap_or_default().to_string();
                w.serialize(ReportRow {
                    suite: e.suite,
                    label: &e.label,
                    identity_id: r.map(|r| tag(serde_json::json!(r.identity_id))).unwrap_or_default(),
                    status: e.status,
                    lhs_re: r.map(|r| r.lhs.re),
                    lhs_im: r.map(|r| r.lhs.im),
                    rhs_re: r.map(|r| r.rhs.re),
                    rhs_im: r.map(|r| r.rhs.im),
                    abs_err: r.map(|r| r.abs_err),
                    rel_err: r.map(|r| r.rel_err),
                    tolerance: r.map(|r| decimal(r.tolerance)),
                    criterion: r.map(|r| tag(serde_json::json!(r.criterion))).unwrap_or_default(),
                    runtime_ms: r.map(|r| r.runtime_ms),
                    notes: r.map(|r| r.notes.as_str()).unwrap_or_default(),
                })?;
            }
        } else {
            for row in &self.rows {
                w.serialize(row)?;
            }
        }
        w.flush()
    }
}
