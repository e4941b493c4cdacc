//! Recovery of the fiber `{w : f(w) = f(z)}` inside a disk.
//!
//! The engine integrates `w^ℓ f'(w) / (f(w) - f(z))` around the disk, turns the
//! power sums into a polynomial with Newton's identities, finds its roots and
//! polishes them against `f`. Disks holding many points are split into
//! overlapping subdisks.

mod recover;

use rayon::prelude::*;
use serde::Serialize;

use crate::contour::{safe_radius, safe_radius_at, ContourConfig};
use crate::error::{invalid, Error, Result};
use crate::function::{ls_slope, modulus_extrema, Analytic, EntireFunction, TWO_PI};
use crate::poly::{aberth, monic_from_elementary, newton_identities};
use crate::Complex;

pub(crate) use recover::{disk_moments, rounded_count};

pub const MAX_MOMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentVector {
    #[serde(with = "crate::serde_complex")]
    pub z: Complex,
    pub radius: f64,
    /// `m_0..m_L`.
    #[serde(with = "crate::serde_complex::vec")]
    pub moments: Vec<Complex>,
    /// Quadrature error estimate per moment.
    pub errors: Vec<f64>,
}

impl MomentVector {
    pub fn count(&self) -> usize {
        self.moments[0].re.round().max(0.0) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitPoint {
    #[serde(with = "crate::serde_complex")]
    pub location: Complex,
    pub multiplicity: u32,
    /// `|f(location) - f(z)|`.
    pub residual: f64,
    /// False when Newton polishing did not meet its step criterion.
    pub polished: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSample {
    #[serde(with = "crate::serde_complex")]
    pub z: Complex,
    #[serde(with = "crate::serde_complex::decimal")]
    pub requested_radius: f64,
    /// The radius actually integrated over, after safe-radius adjustment.
    #[serde(with = "crate::serde_complex::decimal")]
    pub radius: f64,
    #[serde(with = "crate::serde_complex")]
    pub value: Complex,
    pub points: Vec<OrbitPoint>,
    pub count: usize,
}

impl OrbitSample {
    pub fn locations(&self) -> Vec<Complex> {
        self.points.iter().map(|p| p.location).collect()
    }
}

fn arg_2pi(w: Complex) -> f64 {
    let a = w.arg();
    if a < 0.0 {
        a + TWO_PI
    } else {
        a
    }
}

/// Sorts by modulus; points whose moduli agree to `1e-9 (1 + |w|)` are
/// ordered by argument in `[0, 2π)`.
pub fn canonical_order(points: &mut [OrbitPoint]) {
    points.sort_by(|a, b| a.location.norm().total_cmp(&b.location.norm()));
    let mut start = 0;
    while start < points.len() {
        let r0 = points[start].location.norm();
        let mut end = start + 1;
        while end < points.len() && points[end].location.norm() - r0 <= 1e-9 * (1.0 + r0) {
            end += 1;
        }
        points[start..end].sort_by(|a, b| arg_2pi(a.location).total_cmp(&arg_2pi(b.location)));
        start = end;
    }
}

/// Number of solutions of `f(w) = f(z)` in `|w| < radius`, counted with
/// multiplicity. The circle should come from [`safe_radius`].
pub fn orbit_count(f: &EntireFunction, z: Complex, radius: f64, cfg: &ContourConfig) -> Result<usize> {
    let target = f.eval(z)?;
    count_in_disk(f, target, Complex::new(0.0, 0.0), radius, cfg)
}

/// Solutions of `func(w) = target` in a disk, counted with multiplicity.
pub fn count_in_disk(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    center: Complex,
    radius: f64,
    cfg: &ContourConfig,
) -> Result<usize> {
    let q = disk_moments(func, target, center, radius, radius, 1, cfg)?;
    rounded_count(&q[0], radius)
}

/// Power sums `m_ℓ = Σ φ^ℓ` over the solutions in `|w| < radius`, `ℓ = 0..=l`.
pub fn orbit_moments(
    f: &EntireFunction,
    z: Complex,
    radius: f64,
    l: usize,
    cfg: &ContourConfig,
) -> Result<MomentVector> {
    if l == 0 || l > MAX_MOMENTS {
        return invalid(format!("moment order must be in 1..={MAX_MOMENTS}"));
    }
    let target = f.eval(z)?;
    // integrate moments of w / radius, whose sizes do not depend on the radius
    let q = disk_moments(f, target, Complex::new(0.0, 0.0), radius, radius, l + 1, cfg)?;
    rounded_count(&q[0], radius)?;
    if let Some(bad) = q[1..].iter().find(|r| !r.converged) {
        return Err(Error::NotConverged { est_error: bad.est_error });
    }
    let scale = |j: usize| radius.powi(j as i32);
    Ok(MomentVector {
        z,
        radius,
        moments: q.iter().enumerate().map(|(j, r)| r.value * scale(j)).collect(),
        errors: q.iter().enumerate().map(|(j, r)| r.est_error * scale(j)).collect(),
    })
}

/// Roots of the monic polynomial whose power sums are `m_1..m_N`, repeated by
/// multiplicity.
pub fn moments_to_points(mv: &MomentVector) -> Result<Vec<Complex>> {
    let n = mv.count();
    if n == 0 {
        return Ok(Vec::new());
    }
    if mv.moments.len() <= n {
        return invalid(format!("{n} points need moments up to order {n}"));
    }
    let p = &mv.moments[1..=n];
    let e = newton_identities(p);
    let mut roots = aberth(&monic_from_elementary(&e)).roots;
    let mut worst = 0.0f64;
    for (l, want) in p.iter().enumerate() {
        let k = l as u32 + 1;
        let got: Complex = roots.iter().map(|r| r.powu(k)).sum();
        let size: f64 = roots.iter().map(|r| r.norm().powi(k as i32)).sum();
        worst = worst.max((got - want).norm() / size.max(want.norm()).max(1e-300));
    }
    if worst > 1e-4 {
        return Err(Error::InconsistentMoments { deviation: worst });
    }
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(arg_2pi(*a).total_cmp(&arg_2pi(*b))));
    Ok(roots)
}

/// Solutions of `func(w) = target` in the disk, which must already be safe.
pub fn fiber_in_disk(
    func: &(impl Analytic + ?Sized),
    target: Complex,
    center: Complex,
    radius: f64,
    cfg: &ContourConfig,
) -> Result<Vec<OrbitPoint>> {
    let mut points = recover::recover(func, target, center, radius, cfg, 0)?;
    canonical_order(&mut points);
    Ok(points)
}

/// The orbit of `z` inside `|w| < radius`, with the radius nudged off the orbit.
pub fn orbit(f: &EntireFunction, z: Complex, radius: f64, cfg: &ContourConfig) -> Result<OrbitSample> {
    let value = f.eval(z)?;
    let r = safe_radius(f, z, radius, cfg)?;
    let points = fiber_in_disk(f, value, Complex::new(0.0, 0.0), r, cfg)?;
    let count = points.iter().map(|p| p.multiplicity as usize).sum();
    Ok(OrbitSample { z, requested_radius: radius, radius: r, value, points, count })
}

/// `φ^(k)(z)` for each orbit point `φ`, from differentiating `f(φ(z)) = f(z)`.
pub fn derivative_ladder(f: &EntireFunction, z: Complex, points: &[Complex], k: usize) -> Result<Vec<Complex>> {
    if !(1..=3).contains(&k) {
        return invalid("derivative order must be 1, 2 or 3");
    }
    let at_z = f.expand(z, k)?;
    let dz: Vec<Complex> = (1..=k).map(|j| at_z.derivative(j)).collect();
    points
        .iter()
        .enumerate()
        .map(|(index, &p)| {
            let e = f.expand(p, k)?;
            let a: Vec<Complex> = (0..=k).map(|j| e.scaled_derivative(j)).collect();
            let log_d1 = a[1].norm().ln() + e.log_scale;
            if !(log_d1 > 1e-9f64.ln()) {
                return Err(Error::CriticalOrbitPoint { index, derivative: log_d1.exp() });
            }
            // f^(j)(φ) = a[j] e^s; divide the z-side by e^s instead
            let inv = (-e.log_scale).exp();
            let d1 = dz[0] * inv / a[1];
            if k == 1 {
                return Ok(d1);
            }
            let d2 = (dz[1] * inv - d1 * d1 * a[2]) / a[1];
            if k == 2 {
                return Ok(d2);
            }
            Ok((dz[2] * inv - d1 * d2 * a[2] * 3.0 - d1 * d1 * d1 * a[3]) / a[1])
        })
        .collect()
}

/// `φ^(k)(z)` for every point of a sample; all points must be simple.
pub fn derivative_orbit(f: &EntireFunction, s: &OrbitSample, k: usize) -> Result<Vec<Complex>> {
    if let Some((index, p)) = s.points.iter().enumerate().find(|(_, p)| p.multiplicity > 1) {
        let derivative = f.eval_kderiv(p.location, 1).map(|d| d.norm()).unwrap_or(0.0);
        return Err(Error::CriticalOrbitPoint { index, derivative });
    }
    derivative_ladder(f, s.z, &s.locations(), k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingProfile {
    #[serde(with = "crate::serde_complex")]
    pub z: Complex,
    /// `(r, n(r, z))` at the safe radii actually used.
    pub samples: Vec<(f64, usize)>,
    pub rho_hat: f64,
    /// Set when `n` does not grow over the upper half of the grid.
    pub degenerate: bool,
    /// Exponent used for the densities.
    pub rho: f64,
    pub upper_density: f64,
    pub lower_density: f64,
}

const PROFILE_EXTRA_DOUBLINGS: u32 = 4;

/// Counting function `n(r, z)` over a radius grid, with the fitted
/// convergence exponent and density surrogates over the largest decade.
pub fn counting_profile(
    f: &EntireFunction,
    z: Complex,
    r_grid: &[f64],
    rho: Option<f64>,
    cfg: &ContourConfig,
) -> Result<CountingProfile> {
    if r_grid.len() < 2 || r_grid[0] <= 0.0 || r_grid.windows(2).any(|p| !(p[1] > p[0])) {
        return invalid("radius grid must be positive and increasing");
    }
    if (r_grid[r_grid.len() - 1] / r_grid[0]).log10() < 2.0 - 1e-9 {
        return invalid("radius grid must span at least 2 decades");
    }
    let count_at = |r: f64, cfg: &ContourConfig| -> Result<(f64, usize)> {
        let safe = safe_radius(f, z, r, cfg)?;
        Ok((safe, orbit_count(f, z, safe, cfg)?))
    };
    // large disks hold thousands of points; give those a bigger node budget
    let wider = ContourConfig { max_doublings: cfg.max_doublings + PROFILE_EXTRA_DOUBLINGS, ..*cfg };
    let samples = r_grid
        .par_iter()
        .map(|&r| match count_at(r, cfg) {
            Err(Error::AmbiguousCount { .. } | Error::NotConverged { .. }) => count_at(r, &wider),
            other => other,
        })
        .collect::<Result<Vec<(f64, usize)>>>()?;

    let upper = &samples[samples.len() / 2..];
    let growing: Vec<&(f64, usize)> = upper.iter().filter(|s| s.1 > 0).collect();
    let flat = growing.len() < 2 || growing.iter().all(|s| s.1 == growing[0].1);
    let (rho_hat, degenerate) = if flat {
        (0.0, true)
    } else {
        let x: Vec<f64> = growing.iter().map(|s| s.0.ln()).collect();
        let y: Vec<f64> = growing.iter().map(|s| (s.1 as f64).ln()).collect();
        (ls_slope(&x, &y), false)
    };
    let rho = rho.unwrap_or(rho_hat);
    let r_max = samples[samples.len() - 1].0;
    let ratios: Vec<f64> = samples
        .iter()
        .filter(|s| s.0 >= r_max / 10.0)
        .map(|s| s.1 as f64 / s.0.powf(rho))
        .collect();
    Ok(CountingProfile {
        z,
        upper_density: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        lower_density: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        samples,
        rho_hat,
        degenerate,
        rho,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WimanRadius {
    #[serde(with = "crate::serde_complex::decimal")]
    pub r: f64,
    pub log_m: f64,
    pub log_big_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WimanRadii {
    pub rho: f64,
    pub epsilon: f64,
    pub radii: Vec<WimanRadius>,
}

impl WimanRadii {
    /// `log m_f(r) > (cos πρ - ε) log M_f(r)` at every stored radius.
    pub fn verified(&self) -> bool {
        let c = (std::f64::consts::PI * self.rho).cos() - self.epsilon;
        self.radii.iter().all(|w| w.log_m > c * w.log_big_m) && self.radii.windows(2).all(|p| p[1].r > p[0].r)
    }
}

/// Radii with their modulus extrema but without the Wiman test, for checks
/// that deliberately leave the admissible range (such as order 1).
pub fn wiman_candidates(f: &EntireFunction, rho: f64, epsilon: f64, radii: &[f64]) -> Result<WimanRadii> {
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|p| !(p[1] > p[0])) {
        return invalid("radii must be positive and increasing");
    }
    let radii = radii
        .iter()
        .map(|&r| {
            let (log_m, log_big_m) = modulus_extrema(f, r)?;
            Ok(WimanRadius { r, log_m, log_big_m })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WimanRadii { rho, epsilon, radii })
}

const WIMAN_CANDIDATES_PER_DECADE: f64 = 4.0;

/// Radii in `[r_lo, r_hi]` where the minimum modulus beats `M_f^(cos πρ - ε)`,
/// each moved off the orbit of `z`.
pub fn wiman_search(
    f: &EntireFunction,
    z: Complex,
    rho: f64,
    epsilon: f64,
    r_lo: f64,
    r_hi: f64,
    cfg: &ContourConfig,
) -> Result<WimanRadii> {
    if !(rho > 0.0 && rho < 0.5) {
        return invalid("rho must lie in (0, 1/2)");
    }
    let c = (std::f64::consts::PI * rho).cos();
    if !(epsilon > 0.0 && epsilon < c) {
        return invalid("epsilon must lie in (0, cos πρ)");
    }
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return invalid("need 0 < r_lo < r_hi");
    }
    let c = c - epsilon;
    let steps = ((r_hi / r_lo).log10() * WIMAN_CANDIDATES_PER_DECADE).ceil().max(1.0) as usize;
    let candidates: Vec<f64> = (0..=steps)
        .map(|i| r_lo * (r_hi / r_lo).powf(i as f64 / steps as f64))
        .collect();
    let target = f.eval(z)?;
    let checked = candidates
        .par_iter()
        .map(|&r| -> Result<Option<WimanRadius>> {
            let (log_m, log_big_m) = modulus_extrema(f, r)?;
            if !(log_m > c * log_big_m) {
                return Ok(None);
            }
            let safe = match safe_radius_at(f, target, Complex::new(0.0, 0.0), r, cfg) {
                Ok(s) => s,
                Err(Error::NoSafeRadius { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let (log_m, log_big_m) = modulus_extrema(f, safe)?;
            Ok((log_m > c * log_big_m).then_some(WimanRadius { r: safe, log_m, log_big_m }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut radii: Vec<WimanRadius> = Vec::new();
    for w in checked.into_iter().flatten() {
        if radii.last().map_or(true, |last| w.r > last.r) {
            radii.push(w);
        }
    }
    if radii.is_empty() {
        return Err(Error::NoneFound { r_lo, r_hi });
    }
    Ok(WimanRadii { rho, epsilon, radii })
}
