use rayon::prelude::*;

use super::OrbitPoint;
use crate::contour::{circle_quadrature, safe_radius_at, ContourConfig, QuadratureResult};
use crate::error::{Error, Result};
use crate::function::{Analytic, MAX_DERIVATIVE_ORDER};
use crate::poly::{aberth, cluster_roots, monic_from_elementary, newton_identities, newton_identities_error};
use crate::Complex;

pub(crate) const COUNT_DEFECT: f64 = 1e-6;
/// Largest point count solved from one disk's moments.
pub(crate) const DIRECT_LIMIT: usize = 32;
const MAX_DEPTH: usize = 40;
const POLISH_ITERATIONS: usize = 50;
/// Points closer than this fraction of the disk radius are merged.
pub(crate) const MERGE_RADIUS: f64 = 1e-6;
const MOMENT_TOLERANCE: f64 = 1e-6;
/// Polishing that wanders further than this fraction of the radius is discarded.
const POLISH_LEASH: f64 = 1e-3;
/// Unpolished points are kept only when the last Newton step was this small
/// relative to `1 + |w|`; anything larger is not a solution.
const ACCEPTED_STEP: f64 = 1e-8;
/// Multiple points are confirmed by a count on a circle of this relative radius.
const LOCAL_COUNT_RADIUS: f64 = 1e-4;
const LOCAL_COUNT_DEFECT: f64 = 1e-3;
/// Children sit on a 3x3 grid of squares tiling the parent's bounding square;
/// their disks circumscribe the squares with room for safe-radius perturbation.
const CHILD_RADIUS: f64 = 1.1 * std::f64::consts::SQRT_2 / 3.0;
/// Enlargement of the estimated spread when recentering moments.
const RECENTER_MARGIN: f64 = 1.25;

/// Moments `(1/2πi) ∮ ((w - origin) / scale)^ℓ F'(w) / F(w) dw` for `ℓ < count`
/// over `|w - center| = radius`, with `F = func - target`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn shifted_moments(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    center: Complex,
    radius: f64,
    origin: Complex,
    scale: f64,
    count: usize,
    cfg: &ContourConfig,
) -> Result<Vec<QuadratureResult>> {
    circle_quadrature(center, radius, count, cfg, |w, out| {
        let ld = func.expand(w, 1)?.log_derivative(target);
        let u = (w - origin) / scale;
        let mut p = ld;
        for o in out.iter_mut() {
            *o = p;
            p *= u;
        }
        Ok(())
    })
}

/// Moments about the center of the circle.
pub(crate) fn disk_moments(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    center: Complex,
    radius: f64,
    scale: f64,
    count: usize,
    cfg: &ContourConfig,
) -> Result<Vec<QuadratureResult>> {
    shifted_moments(func, target, center, radius, center, scale, count, cfg)
}

/// Rounds the zeroth moment to the enclosed count.
pub(crate) fn rounded_count(m0: &QuadratureResult, radius: f64) -> Result<usize> {
    let n = m0.value.re.round();
    let defect = (m0.value.re - n).abs().max(m0.value.im.abs());
    if defect <= COUNT_DEFECT && n >= 0.0 {
        Ok(n as usize)
    } else {
        Err(Error::AmbiguousCount { radius, defect })
    }
}

pub(crate) fn residual(func: &(impl Analytic + ?Sized), target: Complex, w: Complex) -> Result<f64> {
    let e = func.expand(w, 0)?;
    Ok((e.scaled_offset(target).norm().ln() + e.log_scale).exp())
}

/// Newton on `F^(m-1)` from `w0`. Returns the final iterate, whether the step
/// criterion `|step| <= 1e-12 (1 + |w|)` was met, and the last step length.
fn polish(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    w0: Complex,
    m: usize,
    leash: f64,
) -> Result<(Complex, bool, f64)> {
    if m >= MAX_DERIVATIVE_ORDER {
        return Ok((w0, false, f64::INFINITY));
    }
    let mut w = w0;
    let mut last = f64::INFINITY;
    for _ in 0..POLISH_ITERATIONS {
        let e = func.expand(w, m)?;
        let step = if m == 1 {
            let ld = e.log_derivative(target);
            if ld.is_infinite() {
                Complex::new(0.0, 0.0)
            } else {
                ld.inv()
            }
        } else {
            e.taylor[m - 1] / (e.taylor[m] * m as f64)
        };
        if !step.is_finite() {
            return Ok((w, false, f64::INFINITY));
        }
        w -= step;
        last = step.norm();
        if (w - w0).norm() > leash {
            return Ok((w0, false, f64::INFINITY));
        }
        if last <= 1e-12 * (1.0 + w.norm()) {
            return Ok((w, true, last));
        }
    }
    Ok((w, false, last))
}

/// Whether exactly `m` solutions lie within `local` of `w`. Near a multiple
/// solution `F` suffers cancellation, so only integrality is asked for.
fn confirms_multiplicity(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    w: Complex,
    m: usize,
    local: f64,
    cfg: &ContourConfig,
) -> bool {
    match disk_moments(func, target, w, local, local, 1, cfg) {
        Ok(q) => (q[0].value - Complex::new(m as f64, 0.0)).norm() <= LOCAL_COUNT_DEFECT,
        Err(_) => false,
    }
}

/// Merges points within `tol`, adding multiplicities.
fn merge_close(points: Vec<OrbitPoint>, tol: f64) -> Vec<OrbitPoint> {
    let mut out: Vec<OrbitPoint> = Vec::with_capacity(points.len());
    for p in points {
        match out.iter_mut().find(|q| (q.location - p.location).norm() <= tol) {
            Some(q) => {
                q.multiplicity += p.multiplicity;
                q.polished &= p.polished;
                q.residual = q.residual.max(p.residual);
            }
            None => out.push(p),
        }
    }
    out
}

/// Outcome of one attempt to read points off a set of moments.
enum Attempt {
    Solved(Vec<OrbitPoint>),
    /// Worst moment deviation and the unpolished root estimates.
    Rejected(f64, Vec<Complex>),
}

/// Points from the moments about `origin` scaled by `scale`, validated
/// against the disk `|w - center| < radius` and the moments themselves.
#[allow(clippy::too_many_arguments)]
fn solve_moments(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    center: Complex,
    radius: f64,
    origin: Complex,
    scale: f64,
    q: &[QuadratureResult],
    n: usize,
    cfg: &ContourConfig,
) -> Result<Attempt> {
    let p: Vec<Complex> = q[1..=n].iter().map(|r| r.value).collect();
    let perr: Vec<f64> = q[1..=n]
        .iter()
        .map(|r| r.est_error.max(1e-14 * n as f64))
        .collect();
    let e = newton_identities(&p);
    let eerr = newton_identities_error(&p, &e, &perr);
    let coeffs = monic_from_elementary(&e);
    let cerr: Vec<f64> = eerr.iter().rev().copied().collect();
    let roots = aberth(&coeffs).roots;
    let estimates: Vec<Complex> = roots.iter().map(|u| origin + u * scale).collect();
    let merge = MERGE_RADIUS * radius / scale / 2.0;
    let clusters = cluster_roots(&coeffs, &roots, &cerr, merge, merge.max(1e-2));

    let mut points = Vec::with_capacity(clusters.len());
    for (u, m) in clusters {
        let w0 = origin + u * scale;
        let (w, polished, last_step) = polish(func, target, w0, m as usize, POLISH_LEASH * scale)?;
        if !(last_step <= ACCEPTED_STEP * (1.0 + w.norm())) {
            return Ok(Attempt::Rejected(f64::INFINITY, estimates));
        }
        if m > 1 && !confirms_multiplicity(func, target, w, m as usize, LOCAL_COUNT_RADIUS * radius, cfg) {
            return Ok(Attempt::Rejected(f64::INFINITY, estimates));
        }
        points.push(OrbitPoint { location: w, multiplicity: m, residual: residual(func, target, w)?, polished });
    }
    let points = merge_close(points, MERGE_RADIUS * radius);

    let total: u32 = points.iter().map(|pt| pt.multiplicity).sum();
    if total as usize != n || points.iter().any(|pt| (pt.location - center).norm() >= radius) {
        return Ok(Attempt::Rejected(f64::INFINITY, estimates));
    }
    let us: Vec<(Complex, f64)> = points
        .iter()
        .map(|pt| ((pt.location - origin) / scale, pt.multiplicity as f64))
        .collect();
    let mut worst = 0.0f64;
    for l in 1..=n {
        let (sum, size) = us.iter().fold((Complex::new(0.0, 0.0), 0.0), |(s, a), (u, m)| {
            let ul = u.powu(l as u32);
            (s + ul * *m, a + ul.norm() * *m)
        });
        let scale = size.max(p[l - 1].norm());
        let dev = ((sum - p[l - 1]).norm() - 10.0 * perr[l - 1]).max(0.0) / scale.max(1e-300);
        worst = worst.max(dev);
    }
    Ok(if worst <= MOMENT_TOLERANCE {
        Attempt::Solved(points)
    } else {
        Attempt::Rejected(worst, estimates)
    })
}

/// Solves a disk directly: first with moments about its center, then with
/// moments about the centroid of the first estimates, scaled to their spread.
fn solve_direct(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    center: Complex,
    radius: f64,
    q: &[QuadratureResult],
    n: usize,
    cfg: &ContourConfig,
) -> Result<std::result::Result<Vec<OrbitPoint>, f64>> {
    let estimates = match solve_moments(func, target, center, radius, center, radius, q, n, cfg)? {
        Attempt::Solved(points) => return Ok(Ok(points)),
        Attempt::Rejected(_, estimates) => estimates,
    };
    let origin = center + q[1].value * radius / n as f64;
    let spread = estimates.iter().map(|w| (w - origin).norm()).fold(0.0, f64::max);
    let scale = (RECENTER_MARGIN * spread).min(2.0 * radius);
    if !(scale > MERGE_RADIUS * radius) {
        return Ok(Err(f64::INFINITY));
    }
    let q = shifted_moments(func, target, center, radius, origin, scale, n + 1, cfg)?;
    Ok(match solve_moments(func, target, center, radius, origin, scale, &q, n, cfg)? {
        Attempt::Solved(points) => Ok(points),
        Attempt::Rejected(dev, _) => Err(dev),
    })
}

/// All solutions of `func(w) = target` in `|w - center| < radius`, where the
/// circle is assumed clear of solutions.
pub(crate) fn recover(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    center: Complex,
    radius: f64,
    cfg: &ContourConfig,
    depth: usize,
) -> Result<Vec<OrbitPoint>> {
    let q = disk_moments(func, target, center, radius, radius, DIRECT_LIMIT + 1, cfg)?;
    let n = rounded_count(&q[0], radius)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut deviation = f64::INFINITY;
    if n <= DIRECT_LIMIT {
        match solve_direct(func, target, center, radius, &q, n, cfg)? {
            Ok(points) => return Ok(points),
            Err(dev) => deviation = dev,
        }
    }
    if depth >= MAX_DEPTH {
        return Err(Error::InconsistentMoments { deviation });
    }

    let step = 2.0 * radius / 3.0;
    let offsets: Vec<(f64, f64)> = (-1..=1)
        .flat_map(|j| (-1..=1).map(move |i| (i as f64, j as f64)))
        .collect();
    let children = offsets
        .par_iter()
        .map(|(a, b)| {
            let c = center + Complex::new(a * step, b * step);
            let r = safe_radius_at(func, target, c, CHILD_RADIUS * radius, cfg)?;
            recover(func, target, c, r, cfg, depth + 1)
        })
        .collect::<Result<Vec<_>>>()?;

    let tol = MERGE_RADIUS * radius;
    let mut points: Vec<OrbitPoint> = Vec::new();
    for p in children.into_iter().flatten() {
        if (p.location - center).norm() >= radius {
            continue;
        }
        match points.iter_mut().find(|q| (q.location - p.location).norm() <= tol) {
            Some(q) => {
                if p.multiplicity > q.multiplicity || (p.polished && !q.polished) {
                    *q = p;
                }
            }
            None => points.push(p),
        }
    }
    let found: u32 = points.iter().map(|p| p.multiplicity).sum();
    if found as usize != n {
        return Err(Error::OrbitIncomplete { found: found as usize, expected: n });
    }
    Ok(points)
}
