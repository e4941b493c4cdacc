//! Suite definitions. Each suite expands into identity checks for the chosen
//! function; checks that do not apply to it are listed as skipped.

use std::f64::consts::PI;

use rayon::prelude::*;

use autorbit_core::identities::{
    folner_ratios, reconstruct_low_order, verify_circular_density, verify_cycle_chain, verify_derivative_sums,
    verify_exp_g_closed_form, verify_fiber_stability, verify_fixed_points, verify_jensen, verify_negative_moment_g,
    verify_orbit_nesting, verify_path_invariance, verify_poly_vieta, verify_reconstruction_partial_sums,
    verify_shift_homomorphism, verify_vanishing_sums, verify_vieta_coefficients, OrbitSource,
};
use autorbit_core::orbit::{wiman_candidates, wiman_search};
use autorbit_core::{Complex, ContourConfig, EntireFunction, Family, IdentityReport, Result};

use crate::args::Suite;
use crate::report::{Entry, Skipped, Status};

pub const ALL: [Suite; 14] = [
    Suite::Vieta,
    Suite::Jensen,
    Suite::Derivsum,
    Suite::Vanishing,
    Suite::Density,
    Suite::Fixedpoints,
    Suite::Reconstruction,
    Suite::Expg,
    Suite::Tshift,
    Suite::Nesting,
    Suite::Fiber,
    Suite::Cycle,
    Suite::Folner,
    Suite::Metric,
];

/// Everything a suite needs to build its checks.
pub struct Context {
    pub f: EntireFunction,
    pub z: Option<Complex>,
    pub w: Option<Complex>,
    pub radius: Option<f64>,
    pub cfg: ContourConfig,
    /// Extra base points for the derivative sums.
    pub random_z: Vec<Complex>,
}

type Check<'a> = Box<dyn Fn() -> Result<IdentityReport> + Send + Sync + 'a>;

pub struct Item<'a> {
    pub suite: Suite,
    pub label: String,
    pub xfail: bool,
    pub check: Check<'a>,
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn item<'a>(suite: Suite, label: impl Into<String>, check: impl Fn() -> Result<IdentityReport> + Send + Sync + 'a) -> Item<'a> {
    Item { suite, label: label.into(), xfail: false, check: Box::new(check) }
}

fn order_below(f: &EntireFunction, bound: f64) -> bool {
    f.known_order().is_some_and(|r| r < bound)
}

fn is_exp(f: &EntireFunction) -> bool {
    f.family == Family::Exp
}

/// The checks of one suite, or the reason it does not apply.
pub fn plan<'a>(suite: Suite, ctx: &'a Context) -> std::result::Result<Vec<Item<'a>>, String> {
    let f = &ctx.f;
    let cfg = &ctx.cfg;
    let z_or = |d: Complex| ctx.z.unwrap_or(d);
    let w_or = |d: Complex| ctx.w.unwrap_or(d);
    let r_or = |d: f64| ctx.radius.unwrap_or(d);
    let mut items = Vec::new();
    match suite {
        Suite::All => return Err("`all` is expanded by the caller".into()),
        Suite::Vieta => {
            if f.is_polynomial() {
                let z = z_or(c(1.0, 0.0));
                items.push(item(suite, "product of the orbit", move || verify_poly_vieta(f, z, cfg)));
            } else if order_below(f, 1.0) {
                let z = z_or(c(1.0, 0.0));
                let r = r_or(if f.family == Family::QuarterOrder { 1e6 } else { 1e4 });
                items.push(item(suite, "first coefficient from the orbit", move || {
                    verify_vieta_coefficients(f, z, 1, r, OrbitSource::Engine, cfg)
                }));
                if f.family == Family::CosSqrt && ctx.z.is_none() {
                    // orbit of π² is ((2k+1)π)², each double, up to k = 10⁴
                    let r = (PI * (2.0 * 1e4 + 2.0)).powi(2);
                    items.push(item(suite, "pi^2/4 series at z = pi^2", move || {
                        verify_vieta_coefficients(f, c(PI * PI, 0.0), 1, r, OrbitSource::Oracle, cfg)
                    }));
                }
            } else {
                return Err("needs a polynomial or order below 1".into());
            }
        }
        Suite::Jensen => {
            // 1 is a root of the default p, whose fiber is finite
            let z = z_or(if matches!(f.family, Family::PolyTimesExp { .. }) { c(0.5, 0.5) } else { c(1.0, 0.0) });
            let n = match f.degree() {
                Some(d) => d.min(3),
                None => 3,
            };
            items.push(item(suite, format!("first {n} orbit points"), move || verify_jensen(f, z, n, cfg)));
        }
        Suite::Derivsum => {
            let r = r_or(30.0);
            let mut zs = vec![z_or(c(0.7, 0.4))];
            zs.extend(&ctx.random_z);
            for (i, z) in zs.into_iter().enumerate() {
                for k in 1..=3 {
                    let label = if i == 0 { format!("k = {k}") } else { format!("k = {k}, random point {i}") };
                    items.push(item(suite, label, move || verify_derivative_sums(f, z, r, k, cfg)));
                }
            }
        }
        Suite::Vanishing => {
            let z = z_or(c(1.0, 0.0));
            let order = f.known_order();
            match (&f.family, order) {
                // order 1 and order 1/2: order is not below 1/2, so the sums do not vanish
                (Family::Exp, _) => {
                    let mut it = item(suite, "first derivatives, order 1", move || {
                        let wr = wiman_candidates(f, 1.0, 0.05, &[10.0, 20.0, 40.0, 80.0])?;
                        verify_vanishing_sums(f, z, &wr, 1, cfg)
                    });
                    it.xfail = true;
                    items.push(it);
                }
                (Family::CosSqrt, _) => {
                    let mut it = item(suite, "first derivatives, order 1/2", move || {
                        let wr = wiman_candidates(f, 0.5, 0.05, &[1e2, 1e3, 1e4, 1e5])?;
                        verify_vanishing_sums(f, z, &wr, 1, cfg)
                    });
                    it.xfail = true;
                    items.push(it);
                }
                (_, Some(rho)) if rho > 0.0 && rho < 0.5 => {
                    items.push(item(suite, "first derivatives along Wiman radii", move || {
                        let wr = wiman_search(f, z, rho, 0.05, 1e2, 1e8, cfg)?;
                        verify_vanishing_sums(f, z, &wr, 1, cfg)
                    }));
                }
                _ => return Err("needs order in (0, 1/2)".into()),
            }
        }
        Suite::Density => {
            let Some(rho) = f.known_order().filter(|r| *r > 0.0 && *r < 0.5) else {
                return Err("needs order in (0, 1/2)".into());
            };
            let zs = match ctx.z {
                Some(z) => vec![z],
                None => vec![c(1.0, 0.0), c(2.0, 1.0)],
            };
            for z in zs {
                items.push(item(suite, format!("z = {z}"), move || {
                    let wr = wiman_search(f, z, rho, 0.05, 1e2, 1e8, cfg)?;
                    verify_circular_density(f, z, &wr, rho, cfg)
                }));
            }
        }
        Suite::Fixedpoints => {
            let r = r_or(match f.family {
                Family::CosSqrt => 100.0,
                Family::Exp => 30.0,
                _ => 4.0,
            });
            items.push(item(suite, "critical points", move || verify_fixed_points(f, r, cfg)));
        }
        Suite::Reconstruction => {
            if f.has_exact_coefficients() {
                let (w, z, degrees) = match (&f.family, f.degree()) {
                    (_, Some(d)) => (c(1.5, 0.0), c(0.5, 0.2), vec![d]),
                    (Family::Exp, _) => (c(1.0, 0.0), c(0.5, 0.0), vec![10, 20, 30]),
                    _ => (c(1.0, 0.0), c(0.3, 0.0), vec![8, 16, 24]),
                };
                let (w, z) = (w_or(w), z_or(z));
                items.push(item(suite, "partial sums", move || verify_reconstruction_partial_sums(f, w, z, &degrees)));
            }
            if order_below(f, 1.0) {
                let (z, w, r) = match f.family {
                    Family::CosSqrt => (c(4.0, 0.0), c(1.0, 0.0), 1e4),
                    Family::QuarterOrder => (c(1.5, 0.0), c(0.5, 0.0), 1e6),
                    _ => (c(1.0, 0.0), c(3.0, 0.0), 10.0),
                };
                let (z, w, r) = (z_or(z), w_or(w), r_or(r));
                items.push(item(suite, "f(z) from the orbit", move || reconstruct_low_order(f, z, w, r, cfg)));
            }
            if items.is_empty() {
                return Err("needs exact coefficients or order below 1".into());
            }
        }
        Suite::Expg => {
            if !is_exp(f) {
                return Err("exponential family only".into());
            }
            let points = match (ctx.w, ctx.z) {
                (Some(w), Some(z)) => vec![(w, z)],
                _ => vec![(c(0.0, 0.0), c(0.3, 1.1)), (c(1.0, 0.0), c(0.0, PI)), (c(1.0, 0.0), c(0.7, 0.0)), (c(-0.5, 1.2), c(1.5, -0.3))],
            };
            for (w, z) in points {
                items.push(item(suite, format!("w = {w}, z = {z}"), move || verify_exp_g_closed_form(w, z, 100_000)));
            }
            let zs = [c(0.5, 0.0), c(1.0, 1.0), c(-0.7, 0.3), c(0.0, PI), c(1.5, -0.8)];
            items.push(item(suite, "discrepancy of the first moment", move || verify_negative_moment_g(&zs, 100_000)));
        }
        Suite::Tshift => {
            if !is_exp(f) {
                return Err("exponential family only".into());
            }
            let points = match (ctx.w, ctx.z) {
                (Some(w), Some(z)) => vec![(w, z)],
                _ => vec![(c(0.3, 0.2), c(1.2, -0.4)), (c(1.5, 0.0), c(-0.7, 0.9)), (c(-1.0, 1.0), c(0.2, 0.1))],
            };
            let ks: Vec<i64> = (-3..=3).collect();
            for (w, z) in points {
                let ks = ks.clone();
                items.push(item(suite, format!("w = {w}, z = {z}"), move || verify_shift_homomorphism(w, z, &ks)));
            }
        }
        Suite::Nesting => {
            let z = z_or(c(0.3, 0.2));
            let r = r_or(if is_exp(f) { 20.0 } else { 5.0 });
            for n in [2, 3] {
                let h = EntireFunction::monomial(n);
                items.push(item(suite, format!("h = w^{n}"), move || verify_orbit_nesting(f, &h, z, r, cfg)));
            }
        }
        Suite::Fiber => {
            if !matches!(f.family, Family::PolyTimesExp { .. }) {
                return Err("needs p(w) exp(g(w))".into());
            }
            let grid = [5.0, 10.0, 50.0];
            items.push(item(suite, "zero fiber over the radius grid", move || verify_fiber_stability(f, &grid, cfg)));
        }
        Suite::Cycle => {
            let pts = match ctx.z {
                Some(z) => vec![z, z + c(1.2, -0.6), z + c(-2.1, 0.3), z + c(0.6, 0.5), z + c(2.9, 0.8)],
                None => vec![c(0.1, 0.2), c(1.3, -0.4), c(-2.0, 0.5), c(0.7, 0.7), c(3.0, 1.0)],
            };
            items.push(item(suite, "five-point cycle", move || verify_cycle_chain(f, &pts)));
        }
        Suite::Folner => {
            if !f.has_exact_coefficients() {
                return Err("needs exact Maclaurin coefficients".into());
            }
            let z = z_or(c(1.0, 0.0));
            let (radii, degrees) = match f.degree() {
                Some(d) => (vec![r_or(10.0)], vec![d]),
                None => (vec![10.0, 20.0, 40.0], vec![5, 10, 20]),
            };
            items.push(item(suite, "partial-sum orbit ratios", move || folner_ratios(f, z, &radii, &degrees, cfg)));
        }
        Suite::Metric => {
            if !is_exp(f) {
                return Err("exponential family only".into());
            }
            let path = [c(0.0, 0.0), c(1.0, 1.0), c(-0.5, 2.0)];
            items.push(item(suite, "path length under w + 2 pi i k", move || verify_path_invariance(f, &path, 3)));
        }
    }
    Ok(items)
}

/// Builds and runs every check of the selected suites. Checks run in
/// parallel; entries keep the order of the suite definitions.
pub fn run_suites(suites: &[Suite], ctx: &Context) -> (Vec<Entry>, Vec<Skipped>) {
    let mut items = Vec::new();
    let mut skipped = Vec::new();
    for &s in suites {
        match plan(s, ctx) {
            Ok(v) => items.extend(v),
            Err(reason) => skipped.push(Skipped { suite: s, reason }),
        }
    }
    let entries = items
        .par_iter()
        .map(|it| match (it.check)() {
            Ok(report) => {
                let status = match (report.pass, it.xfail) {
                    (true, false) => Status::Pass,
                    (false, false) => Status::Fail,
                    (false, true) => Status::Xfail,
                    (true, true) => Status::Xpass,
                };
                Entry { suite: it.suite, label: it.label.clone(), xfail: it.xfail, status, report: Some(report), error: None }
            }
            Err(e) => Entry {
                suite: it.suite,
                label: it.label.clone(),
                xfail: it.xfail,
                status: Status::Error,
                report: None,
                error: Some(crate::commands::error_json(&e)),
            },
        })
        .collect();
    (entries, skipped)
}
