use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use autorbit_core::identities::verify_circular_density;
use autorbit_core::orbit::{counting_profile, orbit, orbit_count, wiman_search};
use autorbit_core::{estimate_order, modulus_extrema, Complex, EntireFunction, Error, OrbitSample};

use crate::args::{parse_complex, parse_grid, Cli, Command, DensityArgs, FunctionName, OrbitArgs, OutputArgs, QuadratureArgs, Suite, VerifyArgs};
use crate::report::{decimal, Entry, QuadratureEcho, ReportFile, Row, RunConfig, Status, Summary, Tool, WimanConfig};
use crate::suites::{run_suites, Context, ALL};

const DEFAULT_GRID: &str = "10:1e4:log";

#[derive(Debug)]
pub enum CliError {
    Engine(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl Serialize for CliError {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CliError::Engine(e) => error_json(e).serialize(s),
            CliError::Io(e) => json!({ "kind": "Io", "message": e.to_string() }).serialize(s),
        }
    }
}

/// An engine error as `{"kind": .., <fields>, "message": ..}`.
pub fn error_json(e: &Error) -> Value {
    let mut v = serde_json::to_value(e).unwrap_or_else(|_| json!({ "kind": "Unknown" }));
    if let Value::Object(map) = &mut v {
        map.insert("message".into(), Value::String(e.to_string()));
    }
    v
}

/// What a finished run wrote and whether it should exit nonzero.
#[derive(Debug)]
pub struct Outcome {
    pub report: ReportFile,
    pub failed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        u8::from(self.failed)
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (mut report, output, failed) = match &cli.command {
        Command::Orbit(a) => {
            let (r, failed) = cmd_orbit(a)?;
            (r, &a.output, failed)
        }
        Command::Verify(a) => {
            let r = cmd_verify(a)?;
            let failed = r.summary.failed();
            (r, &a.output, failed)
        }
        Command::Density(a) => (cmd_density(a)?, &a.output, false),
    };
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    match &output.output {
        Some(path) => write_file(&report, path, output)?,
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report.write(&mut lock, output.format)?;
            lock.flush()?;
        }
    }
    Ok(Outcome { report, failed })
}

fn write_file(report: &ReportFile, path: &Path, output: &OutputArgs) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    report.write(&mut w, output.format)?;
    w.flush()
}

fn echo_quadrature(q: &QuadratureArgs) -> Result<(autorbit_core::ContourConfig, QuadratureEcho), Error> {
    let cfg = q.config()?;
    let echo = QuadratureEcho {
        nodes_initial: cfg.nodes_initial,
        max_doublings: cfg.max_doublings,
        tol_abs: decimal(cfg.tol_abs),
        tol_rel: decimal(cfg.tol_rel),
    };
    Ok((cfg, echo))
}

fn base_config(command: &str, name: FunctionName, f: &EntireFunction, quadrature: QuadratureEcho, output: &OutputArgs) -> RunConfig {
    RunConfig {
        command: command.into(),
        function: name,
        function_detail: serde_json::to_value(f).unwrap_or(Value::Null),
        z: None,
        w: None,
        radius: None,
        suite: None,
        r_grid: None,
        wiman: None,
        random: 0,
        seed: None,
        quadrature,
        format: output.format,
        output: output.output.as_ref().map(|p| p.display().to_string()),
    }
}

fn report_file(config: RunConfig) -> ReportFile {
    ReportFile {
        schema_version: crate::SCHEMA_VERSION,
        tool: Tool::default(),
        config,
        reports: Vec::new(),
        samples: Vec::new(),
        rows: Vec::new(),
        skipped: Vec::new(),
        summary: Summary::default(),
        notes: Vec::new(),
        wall_time_ms: 0.0,
    }
}

#[derive(Debug, Serialize)]
struct OracleDiff {
    oracle_count: usize,
    engine_count: usize,
    /// Largest distance from an oracle point to the nearest recovered point.
    max_distance: f64,
    multiplicities_match: bool,
}

fn oracle_diff(sample: &OrbitSample, oracle: &[(Complex, u32)]) -> OracleDiff {
    let mut max_distance = 0.0f64;
    let mut multiplicities_match = oracle.len() == sample.points.len();
    for (w, m) in oracle {
        let nearest = sample
            .points
            .iter()
            .min_by(|a, b| (a.location - w).norm().total_cmp(&(b.location - w).norm()));
        match nearest {
            Some(p) => {
                max_distance = max_distance.max((p.location - w).norm());
                multiplicities_match &= p.multiplicity == *m;
            }
            None => max_distance = f64::INFINITY,
        }
    }
    OracleDiff {
        oracle_count: oracle.iter().map(|p| p.1 as usize).sum(),
        engine_count: sample.count,
        max_distance,
        multiplicities_match,
    }
}

/// The orbit of `z`, with an oracle comparison where one exists. A fiber
/// through a critical point is written out but rejected.
pub fn cmd_orbit(a: &OrbitArgs) -> Result<(ReportFile, bool), CliError> {
    let name = a.function.name_or(FunctionName::Exp);
    let f = a.function.build(FunctionName::Exp)?;
    let z = parse_complex(&a.z)?;
    let (cfg, quadrature) = echo_quadrature(&a.quadrature)?;
    let mut config = base_config("orbit", name, &f, quadrature, &a.output);
    config.z = Some(a.z.clone());
    config.radius = Some(decimal(a.radius));

    let sample = orbit(&f, z, a.radius, &cfg)?;
    let diff = f.orbit_oracle(z, sample.radius).map(|o| oracle_diff(&sample, &o));
    let mut report = report_file(config);
    report.rows = sample
        .points
        .iter()
        .map(|p| Row::Point {
            re: p.location.re,
            im: p.location.im,
            multiplicity: p.multiplicity,
            residual: p.residual,
            polished: p.polished,
        })
        .collect();
    let critical: Vec<_> = sample.points.iter().filter(|p| p.multiplicity > 1).collect();
    let rejected = !critical.is_empty();
    for p in &critical {
        report.notes.push(format!(
            "rejected: {} is a critical point of multiplicity {}, so z lies in an excluded fiber",
            p.location, p.multiplicity
        ));
    }
    if rejected {
        let first = critical[0];
        let err = json!({ "error": {
            "kind": "ExcludedFiber",
            "location": { "re": first.location.re, "im": first.location.im },
            "multiplicity": first.multiplicity,
            "message": "z lies in a fiber through a critical point",
        }});
        eprintln!("{err}");
    }
    report.samples.push(json!({ "orbit": sample, "oracle_diff": diff }));
    Ok((report, rejected))
}

fn random_points(count: usize, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Complex::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))).collect()
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<ReportFile, CliError> {
    let name = a.function.name_or(FunctionName::Exp);
    let f = a.function.build(FunctionName::Exp)?;
    let (cfg, quadrature) = echo_quadrature(&a.quadrature)?;
    let mut config = base_config("verify", name, &f, quadrature, &a.output);
    config.z = a.z.clone();
    config.w = a.w.clone();
    config.radius = a.radius.map(decimal);
    config.suite = Some(a.suite);
    config.random = a.random;
    config.seed = (a.random > 0).then_some(a.seed);

    let ctx = Context {
        z: a.z.as_deref().map(parse_complex).transpose()?,
        w: a.w.as_deref().map(parse_complex).transpose()?,
        radius: a.radius,
        cfg,
        random_z: random_points(a.random, a.seed),
        f,
    };
    let suites: Vec<Suite> = if a.suite == Suite::All { ALL.to_vec() } else { vec![a.suite] };
    let (entries, skipped) = run_suites(&suites, &ctx);
    for e in entries.iter().filter(|e| e.status == Status::Error) {
        eprintln!("{}", json!({ "error": e.error, "suite": e.suite, "label": e.label }));
    }
    let mut report = report_file(config);
    report.summary = Summary::of(&entries, skipped.len());
    report.reports = entries;
    report.skipped = skipped;
    Ok(report)
}

pub fn cmd_density(a: &DensityArgs) -> Result<ReportFile, CliError> {
    let name = a.function.name_or(FunctionName::Exp);
    let f = a.function.build(FunctionName::Exp)?;
    let z = parse_complex(&a.z)?;
    let (cfg, quadrature) = echo_quadrature(&a.quadrature)?;
    let mut config = base_config("density", name, &f, quadrature, &a.output);
    config.z = Some(a.z.clone());
    let mut report;

    if a.wiman {
        config.wiman = Some(WimanConfig {
            rho: a.rho.map(decimal),
            eps: decimal(a.eps),
            r_lo: decimal(a.r_lo),
            r_hi: decimal(a.r_hi),
        });
        report = report_file(config);
        let rho = a.rho.or_else(|| f.known_order()).ok_or_else(|| Error::InvalidInput {
            message: "the order is not known for this function; pass --rho".into(),
        })?;
        let wr = wiman_search(&f, z, rho, a.eps, a.r_lo, a.r_hi, &cfg)?;
        let counts = wr.radii.par_iter().map(|w| orbit_count(&f, z, w.r, &cfg)).collect::<Result<Vec<_>, Error>>()?;
        report.rows = wr
            .radii
            .iter()
            .zip(&counts)
            .map(|(w, &n)| Row::Radius { r: decimal(w.r), n: Some(n), log_m: w.log_m, log_big_m: w.log_big_m })
            .collect();
        let density = verify_circular_density(&f, z, &wr, rho, &cfg);
        let entry = match density {
            Ok(r) => Entry {
                suite: Suite::Density,
                label: "circular density along the Wiman radii".into(),
                xfail: false,
                status: if r.pass { Status::Pass } else { Status::Fail },
                report: Some(r),
                error: None,
            },
            Err(e) => Entry {
                suite: Suite::Density,
                label: "circular density along the Wiman radii".into(),
                xfail: false,
                status: Status::Error,
                report: None,
                error: Some(error_json(&e)),
            },
        };
        report.notes.push(format!("{} Wiman radii, verified: {}", wr.radii.len(), wr.verified()));
        report.samples.push(json!({ "wiman_radii": wr, "counts": counts }));
        report.reports.push(entry);
        report.summary = Summary::of(&report.reports, 0);
    } else {
        let text = a.rgrid.clone().unwrap_or_else(|| DEFAULT_GRID.into());
        let grid = parse_grid(&text)?;
        config.r_grid = Some(text);
        report = report_file(config);
        let profile = counting_profile(&f, z, &grid, a.rho, &cfg)?;
        let order = estimate_order(&f, &grid)?;
        report.rows = profile
            .samples
            .iter()
            .map(|&(r, n)| {
                let (log_m, log_big_m) = modulus_extrema(&f, r)?;
                Ok(Row::Radius { r: decimal(r), n: Some(n), log_m, log_big_m })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let degenerate = profile.degenerate;
        if degenerate {
            report.notes.push("DegenerateFit: the counting function does not grow over the upper half of the grid".into());
        }
        report.samples.push(json!({
            "counting_profile": profile,
            "order_estimate": order,
            "degenerate_fit": degenerate,
        }));
    }
    Ok(report)
}
