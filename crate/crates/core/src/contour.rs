//! Trapezoid quadrature on circles with node doubling, and selection of
//! radii that stay clear of the fiber being integrated around.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::function::{Analytic, EntireFunction, TWO_PI};
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourConfig {
    /// Power of two, at least 16.
    pub nodes_initial: usize,
    pub max_doublings: u32,
    pub tol_abs: f64,
    pub tol_rel: f64,
    /// Smallest accepted distance between the contour and the fiber, relative
    /// to the radius, as estimated by Newton steps `|F / F'|` on the contour.
    pub min_boundary_margin: f64,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig {
            nodes_initial: 256,
            max_doublings: 8,
            tol_abs: 1e-10,
            tol_rel: 1e-10,
            min_boundary_margin: 1e-6,
        }
    }
}

impl ContourConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_initial < 16 || !self.nodes_initial.is_power_of_two() {
            return invalid("nodes_initial must be a power of two and at least 16");
        }
        if !(self.tol_abs > 0.0 && self.tol_rel > 0.0 && self.min_boundary_margin > 0.0) {
            return invalid("tolerances must be positive");
        }
        Ok(())
    }

    pub fn max_nodes(&self) -> usize {
        self.nodes_initial << self.max_doublings
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex,
    pub nodes_used: usize,
    /// Difference between the last two doubling levels.
    pub est_error: f64,
    pub converged: bool,
}

const PARALLEL_THRESHOLD: usize = 2048;

/// Evaluates `integrand` at nodes `center + radius * exp(2πi (offset + j stride) / m)`
/// for `j < count`, into a flat buffer of `count * dim` values multiplied by
/// `w - center`.
fn eval_nodes<F>(
    center: Complex,
    radius: f64,
    m: usize,
    offset: usize,
    stride: usize,
    count: usize,
    dim: usize,
    integrand: &F,
) -> Result<Vec<Complex>>
where
    F: Fn(Complex, &mut [Complex]) -> Result<()> + Sync,
{
    let mut buf = vec![Complex::new(0.0, 0.0); count * dim];
    let fill = |(j, out): (usize, &mut [Complex])| -> Result<()> {
        let k = offset + j * stride;
        let u = Complex::from_polar(1.0, TWO_PI * k as f64 / m as f64);
        let w = center + u * radius;
        integrand(w, out)?;
        let dw = u * radius;
        for v in out.iter_mut() {
            *v *= dw;
        }
        Ok(())
    };
    if count >= PARALLEL_THRESHOLD {
        buf.par_chunks_mut(dim).enumerate().try_for_each(fill)?;
    } else {
        buf.chunks_mut(dim).enumerate().try_for_each(fill)?;
    }
    Ok(buf)
}

/// Vector-valued `(1/2πi) ∮_{|w - center| = radius} g(w) dw` with node doubling.
///
/// Sums are accumulated in ascending node order, so results do not depend on
/// how node evaluations are scheduled.
pub fn circle_quadrature<F>(
    center: Complex,
    radius: f64,
    dim: usize,
    cfg: &ContourConfig,
    integrand: F,
) -> Result<Vec<QuadratureResult>>
where
    F: Fn(Complex, &mut [Complex]) -> Result<()> + Sync,
{
    cfg.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return invalid("radius must be positive and finite");
    }
    let mut m = cfg.nodes_initial;
    let mut sums = vec![Complex::new(0.0, 0.0); dim];
    let first = eval_nodes(center, radius, m, 0, 1, m, dim, &integrand)?;
    for chunk in first.chunks(dim) {
        for (s, v) in sums.iter_mut().zip(chunk) {
            *s += v;
        }
    }
    let mut values: Vec<Complex> = sums.iter().map(|s| s / m as f64).collect();
    let mut est = vec![f64::INFINITY; dim];
    let mut converged = false;
    for _ in 0..cfg.max_doublings {
        let fresh = eval_nodes(center, radius, 2 * m, 1, 2, m, dim, &integrand)?;
        for chunk in fresh.chunks(dim) {
            for (s, v) in sums.iter_mut().zip(chunk) {
                *s += v;
            }
        }
        m *= 2;
        let next: Vec<Complex> = sums.iter().map(|s| s / m as f64).collect();
        for i in 0..dim {
            est[i] = (next[i] - values[i]).norm();
        }
        values = next;
        converged = values
            .iter()
            .zip(&est)
            .all(|(v, e)| *e <= cfg.tol_abs.max(cfg.tol_rel * v.norm()));
        if converged {
            break;
        }
    }
    Ok(values
        .into_iter()
        .zip(est)
        .map(|(value, est_error)| QuadratureResult { value, nodes_used: m, est_error, converged })
        .collect())
}

/// `(1/2πi) ∮_{|w| = radius} g(w) dw` by the trapezoid rule.
///
/// When the tolerance is not met after `max_doublings`, the best estimate is
/// returned with `converged == false`.
pub fn circle_integral(
    g: impl Fn(Complex) -> Complex + Sync,
    radius: f64,
    cfg: &ContourConfig,
) -> Result<QuadratureResult> {
    let r = circle_quadrature(Complex::new(0.0, 0.0), radius, 1, cfg, |w, out| {
        out[0] = g(w);
        Ok(())
    })?;
    Ok(r[0])
}

/// Radii whose Newton distance exceeds this fraction of the radius are
/// accepted without looking further.
const COMFORTABLE_MARGIN: f64 = 2e-3;
const BASE_GRID: usize = 1024;
const MAX_GRID: usize = 1 << 20;
const CANDIDATE_STEP: f64 = 0.005;
const CANDIDATE_STEPS: usize = 10;

/// Smallest `|F/F'| / radius` over a grid on the circle, with `F = func - target`.
pub(crate) fn boundary_margin(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    center: Complex,
    radius: f64,
) -> Result<f64> {
    let scan = |grid: usize| -> Result<(f64, f64)> {
        let pts: Vec<(f64, f64)> = (0..grid)
            .into_par_iter()
            .map(|j| {
                let w = center + Complex::from_polar(radius, TWO_PI * j as f64 / grid as f64);
                let ld = func.expand(w, 1)?.log_derivative(target).norm();
                Ok((1.0 / ld, radius * ld))
            })
            .collect::<Result<Vec<_>>>()?;
        let min_dist = pts.iter().fold(f64::INFINITY, |m, p| m.min(if p.0.is_nan() { 0.0 } else { p.0 }));
        let max_freq = pts.iter().fold(0.0f64, |m, p| if p.1.is_finite() { m.max(p.1) } else { m });
        Ok((min_dist, max_freq))
    };
    // refine until the grid resolves the fastest variation it has seen
    let mut grid = BASE_GRID;
    let (mut min_dist, mut max_freq) = scan(grid)?;
    while grid < MAX_GRID && 8.0 * max_freq > grid as f64 {
        grid = ((8.0 * max_freq).ceil() as usize).next_power_of_two().min(MAX_GRID);
        (min_dist, max_freq) = scan(grid)?;
    }
    Ok(min_dist / radius)
}

/// A radius within 5% of `requested` whose circle around `center` keeps clear
/// of the solutions of `func(w) = target`.
pub fn safe_radius_at(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    center: Complex,
    requested: f64,
    cfg: &ContourConfig,
) -> Result<f64> {
    if !(requested > 0.0 && requested.is_finite()) {
        return invalid("requested radius must be positive");
    }
    let mut best = (0.0, requested);
    for i in 0..=2 * CANDIDATE_STEPS {
        // R, R(1 + δ), R(1 - δ), R(1 + 2δ), ...
        let k = (i + 1) / 2;
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        let r = requested * (1.0 + sign * CANDIDATE_STEP * k as f64);
        let margin = boundary_margin(func, target, center, r)?;
        if margin >= COMFORTABLE_MARGIN {
            return Ok(r);
        }
        if margin > best.0 {
            best = (margin, r);
        }
    }
    if best.0 >= cfg.min_boundary_margin {
        Ok(best.1)
    } else {
        Err(Error::NoSafeRadius { requested })
    }
}

/// A radius near `requested` whose circle `|w| = R` avoids the orbit of `z`.
pub fn safe_radius(f: &EntireFunction, z: Complex, requested: f64, cfg: &ContourConfig) -> Result<f64> {
    let target = f.eval(z)?;
    safe_radius_at(f, target, Complex::new(0.0, 0.0), requested, cfg)
}
