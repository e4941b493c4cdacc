//! Structural checks: critical points as fixed points of the orbit, nesting of
//! orbits under composition, fibers of `p e^g`, telescoping sums, the path
//! metric and counting ratios of partial sums.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde_json::json;

use super::{cjson, timed, Criterion, IdentityId, IdentityReport};
use crate::contour::{safe_radius_at, ContourConfig};
use crate::error::{invalid, Error, Result};
use crate::function::{Derivative, EntireFunction, Family, TWO_PI};
use crate::orbit::{count_in_disk, fiber_in_disk, orbit, orbit_count, OrbitPoint};
use crate::poly::{horner, roots_with_multiplicity};
use crate::Complex;

const LOCATION_TOLERANCE: f64 = 1e-8;

fn zero() -> Complex {
    Complex::new(0.0, 0.0)
}

/// Largest distance from each expected point to the nearest found point.
fn worst_match(expected: &[f64], found: &[Complex]) -> f64 {
    expected
        .iter()
        .map(|&e| found.iter().map(|f| (f - e).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Critical points of `f` in `|w| < radius` and, for each, a local orbit
/// check that it is a multiple point of its own fiber.
pub fn verify_fixed_points(f: &EntireFunction, radius: f64, cfg: &ContourConfig) -> Result<IdentityReport> {
    timed(|| {
        let df = Derivative { inner: f, m: 1 };
        let r = safe_radius_at(&df, zero(), zero(), radius, cfg)?;
        let crit: Vec<Complex> = fiber_in_disk(&df, zero(), zero(), r, cfg)?.iter().map(|p| p.location).collect();
        let mut worst = 0.0f64;
        let mut confirmed = 0;
        for (i, &c) in crit.iter().enumerate() {
            let nearest_other = crit
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, d)| (d - c).norm())
                .fold(f64::INFINITY, f64::min);
            let local = (0.1 * (1.0 + c.norm())).min(0.5 * nearest_other);
            let value = f.eval(c)?;
            let lr = safe_radius_at(f, value, c, local, cfg)?;
            let pts = fiber_in_disk(f, value, c, lr, cfg)?;
            let hit = pts.iter().min_by(|a, b| (a.location - c).norm().total_cmp(&(b.location - c).norm()));
            if let Some(p) = hit {
                worst = worst.max((p.location - c).norm());
                if p.multiplicity >= 2 {
                    confirmed += 1;
                }
            } else {
                worst = f64::INFINITY;
            }
        }
        let mut ok = confirmed == crit.len();
        let mut notes = format!("{} critical points in |w| < {r:.6}, {confirmed} confirmed multiple", crit.len());
        if f.family == Family::CosSqrt {
            let rz = safe_radius_at(f, zero(), zero(), radius, cfg)?;
            let zeros: Vec<Complex> = fiber_in_disk(f, zero(), zero(), rz, cfg)?.iter().map(|p| p.location).collect();
            let want_crit: Vec<f64> = (1..).map(|k| (k as f64 * PI).powi(2)).take_while(|v| *v < r).collect();
            let want_zero: Vec<f64> =
                (0..).map(|k| ((2 * k + 1) as f64 * PI / 2.0).powi(2)).take_while(|v| *v < rz).collect();
            worst = worst
                .max(worst_match(&want_crit, &crit))
                .max(worst_match(&want_zero, &zeros));
            let counts_match = want_crit.len() == crit.len() && want_zero.len() == zeros.len();
            let interlaced = counts_match && interlaces(&zeros, &crit);
            ok &= counts_match && interlaced;
            notes.push_str(&format!("; closed-form locations matched; zeros interlace critical points: {interlaced}"));
        }
        let inputs = json!({ "function": f, "radius": r });
        Ok(IdentityReport::judged(
            IdentityId::FixedPoints,
            inputs,
            Complex::new(confirmed as f64, 0.0),
            Complex::new(crit.len() as f64, 0.0),
            worst,
            LOCATION_TOLERANCE,
            Criterion::Structural,
            ok && worst <= LOCATION_TOLERANCE,
        )
        .with_notes(notes))
    })
}

/// Real points alternating `z_0 < c_1 < z_1 < c_2 < ...`.
fn interlaces(zeros: &[Complex], crit: &[Complex]) -> bool {
    let real = |v: &[Complex]| v.iter().all(|p| p.im.abs() <= LOCATION_TOLERANCE);
    if !real(zeros) || !real(crit) {
        return false;
    }
    let mut merged: Vec<(f64, bool)> = zeros.iter().map(|p| (p.re, true)).chain(crit.iter().map(|p| (p.re, false))).collect();
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    merged.iter().enumerate().all(|(i, (_, is_zero))| *is_zero == (i % 2 == 0))
}

const NESTING_TOLERANCE: f64 = 1e-7;
const DIVISIBILITY_SAMPLES: usize = 10;

/// Every orbit point of `f` is an orbit point of `h ∘ f`, and
/// `(h ∘ f)' / f' = h'(f)` at sample points.
pub fn verify_orbit_nesting(
    f: &EntireFunction,
    h: &EntireFunction,
    z: Complex,
    radius: f64,
    cfg: &ContourConfig,
) -> Result<IdentityReport> {
    timed(|| {
        let composite = EntireFunction::compose(vec![f.clone(), h.clone()])?;
        let outer = orbit(&composite, z, radius, cfg)?;
        // a slightly smaller disk keeps every inner point inside the outer one
        let inner = orbit(f, z, 0.9 * radius, cfg)?;
        let mut worst = 0.0f64;
        let mut contained = 0;
        for p in &inner.points {
            let hit = outer
                .points
                .iter()
                .min_by(|a, b| (a.location - p.location).norm().total_cmp(&(b.location - p.location).norm()));
            match hit {
                Some(q) => {
                    let d = (q.location - p.location).norm();
                    worst = worst.max(d);
                    if d <= NESTING_TOLERANCE && q.multiplicity >= p.multiplicity {
                        contained += 1;
                    }
                }
                None => worst = f64::INFINITY,
            }
        }
        let mut divisibility = 0.0f64;
        let sample_r = 0.5 * radius.min(2.0);
        for j in 0..DIVISIBILITY_SAMPLES {
            let w = Complex::from_polar(sample_r, TWO_PI * (j as f64 + 0.3) / DIVISIBILITY_SAMPLES as f64);
            let df = f.eval_kderiv(w, 1)?;
            if df.norm() < 1e-8 {
                continue;
            }
            let ratio = composite.eval_kderiv(w, 1)? / df;
            let want = h.eval_kderiv(f.eval(w)?, 1)?;
            divisibility = divisibility.max((ratio - want).norm() / want.norm().max(1e-300));
        }
        let all = contained == inner.points.len();
        let inputs = json!({ "f": f, "h": h, "z": cjson(z), "radius": outer.radius });
        Ok(IdentityReport::judged(
            IdentityId::OrbitNesting,
            inputs,
            Complex::new(contained as f64, 0.0),
            Complex::new(inner.points.len() as f64, 0.0),
            worst,
            NESTING_TOLERANCE,
            Criterion::Structural,
            all && worst <= NESTING_TOLERANCE && divisibility <= 1e-8,
        )
        .with_notes(format!(
            "{} of {} points of the composite orbit; derivative ratio relative error {divisibility:.2e} (tolerance 1e-8)",
            inner.points.len(),
            outer.points.len()
        )))
    })
}

/// For `f = p e^g` and a root `α` of `p`, the orbit of `α` is the zero set of
/// `p` at every radius of the grid.
pub fn verify_fiber_stability(f: &EntireFunction, r_grid: &[f64], cfg: &ContourConfig) -> Result<IdentityReport> {
    timed(|| {
        let Family::PolyTimesExp { p, .. } = &f.family else {
            return invalid("fiber stability needs a function p(w) exp(g(w))");
        };
        let d = p.len() - 1;
        if d == 0 {
            return invalid("p must have degree at least 1");
        }
        if p[0].norm() == 0.0 {
            return invalid("f(0) must be nonzero");
        }
        if r_grid.is_empty() || r_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("radius grid must be increasing");
        }
        let mut roots = roots_with_multiplicity(p);
        roots.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()));
        let alpha = roots[0].0;
        // the fiber through a root is exactly f⁻¹(0)
        let mut counts = Vec::with_capacity(r_grid.len());
        let mut counts_ok = true;
        let mut last_radius = 0.0;
        for &req in r_grid {
            let r = safe_radius_at(f, zero(), zero(), req, cfg)?;
            let n = count_in_disk(f, zero(), zero(), r, cfg)?;
            let expected: u32 = roots.iter().filter(|x| x.0.norm() < r).map(|x| x.1).sum();
            counts_ok &= n <= d && n == expected as usize;
            counts.push(n as f64);
            last_radius = r;
        }
        let points = fiber_in_disk(f, zero(), zero(), last_radius, cfg)?;
        let count: u32 = points.iter().map(|p| p.multiplicity).sum();
        let inside: Vec<&(Complex, u32)> = roots.iter().filter(|x| x.0.norm() < last_radius).collect();
        let mut worst = 0.0f64;
        for (root, m) in &inside {
            let hit: Option<&OrbitPoint> =
                points.iter().min_by(|a, b| (a.location - root).norm().total_cmp(&(b.location - root).norm()));
            match hit {
                Some(q) if q.multiplicity == *m => worst = worst.max((q.location - root).norm()),
                _ => worst = f64::INFINITY,
            }
        }
        let same_size = points.len() == inside.len();
        let inputs = json!({ "function": f, "alpha": cjson(alpha), "r_grid": r_grid });
        Ok(IdentityReport::judged(
            IdentityId::FiberStability,
            inputs,
            Complex::new(count as f64, 0.0),
            Complex::new(inside.iter().map(|x| x.1 as f64).sum(), 0.0),
            worst,
            LOCATION_TOLERANCE,
            Criterion::Structural,
            counts_ok && same_size && worst <= LOCATION_TOLERANCE,
        )
        .with_sequence(counts)
        .with_notes(format!("deg p = {d}; counts bounded by deg p and equal to the roots inside: {counts_ok}")))
    })
}

/// Telescoping: the cycle `Σ (f(z_j) - f(z_(j+1)))` with wrap-around vanishes
/// and the open chain sums to `f(z_1) - f(z_N)`.
pub fn verify_cycle_chain(f: &EntireFunction, z_list: &[Complex]) -> Result<IdentityReport> {
    timed(|| {
        let n = z_list.len();
        if n < 3 {
            return invalid("need at least 3 points");
        }
        if (0..n).any(|j| z_list[j] == z_list[(j + 1) % n]) {
            return invalid("consecutive points must be distinct");
        }
        let values = z_list.iter().map(|z| f.eval(*z)).collect::<Result<Vec<_>>>()?;
        let terms: Vec<Complex> = (0..n).map(|j| values[j] - values[(j + 1) % n]).collect();
        let chain: Complex = terms[..n - 1].iter().sum();
        let cycle = chain + terms[n - 1];
        let chain_err = (chain - (values[0] - values[n - 1])).norm();
        let mut report = IdentityReport::compared(
            IdentityId::CycleChain,
            json!({ "function": f, "z_list": z_list.iter().map(|z| cjson(*z)).collect::<Vec<_>>() }),
            cycle,
            zero(),
            1e-10,
            Criterion::Absolute,
        );
        report.abs_err = report.abs_err.max(chain_err);
        report.pass = report.abs_err <= report.tolerance;
        Ok(report.with_sequence(vec![cycle.norm(), chain_err]).with_notes(
            "abs_err is the larger of the cycle sum and the chain defect; the per-term product factorisations are checked by the closed-form and partial-sum reports",
        ))
    })
}

const PATH_TOLERANCE: f64 = 1e-8;

/// `∫ |f'(γ(t))| |γ'(t)| dt` along a polyline.
pub fn path_length(f: &EntireFunction, polyline: &[Complex]) -> Result<f64> {
    if polyline.len() < 2 {
        return invalid("a path needs at least 2 points");
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut total = 0.0;
    for seg in polyline.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let d = b - a;
        if d.norm() == 0.0 {
            continue;
        }
        let speed = |t: f64| match f.eval_kderiv(a + d * t, 1) {
            Ok(v) => v.norm() * d.norm(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        total += quadrature::integrate(speed, 0.0, 1.0, PATH_TOLERANCE).integral;
    }
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// `l_f(γ) = l_f(γ + 2πik)` for the exponential function.
pub fn verify_path_invariance(f: &EntireFunction, polyline: &[Complex], k: i64) -> Result<IdentityReport> {
    timed(|| {
        if f.family != Family::Exp {
            return invalid("translations are automorphisms of the exponential family only");
        }
        let shift = Complex::new(0.0, TWO_PI * k as f64);
        let moved: Vec<Complex> = polyline.iter().map(|p| p + shift).collect();
        let lhs = path_length(f, polyline)?;
        let rhs = path_length(f, &moved)?;
        let inputs = json!({ "function": f, "polyline": polyline.iter().map(|z| cjson(*z)).collect::<Vec<_>>(), "k": k });
        Ok(IdentityReport::compared(
            IdentityId::PathInvariance,
            inputs,
            Complex::new(lhs, 0.0),
            Complex::new(rhs, 0.0),
            PATH_TOLERANCE,
            Criterion::Either,
        ))
    })
}

/// `orbit_count(p_d, z, R) / d` for partial sums `p_d`; the ratios must lie
/// in `[0, 1]`, and their trend is recorded.
pub fn folner_ratios(
    f: &EntireFunction,
    z: Complex,
    r_schedule: &[f64],
    degree_schedule: &[usize],
    cfg: &ContourConfig,
) -> Result<IdentityReport> {
    timed(|| {
        if r_schedule.len() != degree_schedule.len() || r_schedule.is_empty() {
            return invalid("schedules must be nonempty and of equal length");
        }
        let mut ratios = Vec::with_capacity(r_schedule.len());
        for (&r, &d) in r_schedule.iter().zip(degree_schedule) {
            let p = f.partial_sum(d)?;
            let c = p.polynomial_coeffs().expect("partial sums are polynomials");
            let target = horner(&c, z);
            let safe = safe_radius_at(&p, target, zero(), r, cfg)?;
            let n = orbit_count(&p, z, safe, cfg)?;
            ratios.push(n as f64 / d as f64);
        }
        let in_range = ratios.iter().all(|r| (0.0..=1.0).contains(r));
        let first = ratios[0];
        let last = ratios[ratios.len() - 1];
        let trend = if last > first {
            "increasing"
        } else if last < first {
            "decreasing"
        } else {
            "flat"
        };
        let inputs = json!({ "function": f, "z": cjson(z), "r_schedule": r_schedule, "degree_schedule": degree_schedule });
        Ok(IdentityReport::judged(
            IdentityId::FolnerRatios,
            inputs,
            Complex::new(last, 0.0),
            Complex::new(1.0, 0.0),
            (1.0 - last).abs(),
            0.0,
            Criterion::Diagnostic,
            in_range,
        )
        .with_sequence(ratios)
        .with_notes(format!("ratios in [0, 1]: {in_range}; trend {trend}")))
    })
}
