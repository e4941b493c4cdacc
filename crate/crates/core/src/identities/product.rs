//! Product and symmetric-function identities: Vieta, Jensen and the
//! reconstruction formulas.

use rayon::prelude::*;
use serde_json::json;

use super::{cjson, timed, Criterion, IdentityId, IdentityReport};
use crate::contour::ContourConfig;
use crate::error::{invalid, Error, Result};
use crate::function::{estimate_order, Analytic, EntireFunction, TWO_PI};
use crate::orbit::orbit;
use crate::poly::{cauchy_bound, horner, newton_identities, roots_with_multiplicity};
use crate::Complex;

/// Where the orbit used by [`verify_vieta_coefficients`] comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitSource {
    /// The contour-moment engine.
    Engine,
    /// The family's closed-form orbit.
    Oracle,
}

const ORDER_GRID: [f64; 5] = [1.0, 10.0, 1e2, 1e3, 1e4];

/// Order of growth, known or estimated; fails unless it is below 1.
fn order_below_one(f: &EntireFunction) -> Result<f64> {
    let rho = match f.known_order() {
        Some(r) => r,
        None => estimate_order(f, &ORDER_GRID)?.rho,
    };
    if rho >= 1.0 {
        return Err(Error::OrderTooHigh { order: rho });
    }
    Ok(rho)
}

fn distinct_from_origin_value(f: &EntireFunction, z: Complex) -> Result<(Complex, Complex)> {
    let f0 = f.eval(Complex::new(0.0, 0.0))?;
    let fz = f.eval(z)?;
    if (f0 - fz).norm() <= 1e-12 * (1.0 + f0.norm()) {
        return invalid("f(z) must differ from f(0)");
    }
    Ok((f0, fz))
}

fn sorted_by_modulus(mut pts: Vec<(Complex, u32)>) -> Vec<(Complex, u32)> {
    pts.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()));
    pts
}

/// `p(z) = p(0) + (-1)^(d+1) a_d ∏ φ_j(z)` over the full orbit of `z`.
pub fn verify_poly_vieta(p: &EntireFunction, z: Complex, cfg: &ContourConfig) -> Result<IdentityReport> {
    timed(|| {
        let Some(c) = p.polynomial_coeffs() else {
            return invalid("verify_poly_vieta needs a polynomial");
        };
        let d = c.len() - 1;
        let (p0, pz) = distinct_from_origin_value(p, z)?;
        let mut shifted = c.clone();
        shifted[0] -= pz;
        let radius = 1.1 * cauchy_bound(&shifted);
        let s = orbit(p, z, radius, cfg)?;
        if s.count < d {
            return Err(Error::OrbitIncomplete { found: s.count, expected: d });
        }
        let prod = s
            .points
            .iter()
            .fold(Complex::new(1.0, 0.0), |acc, pt| acc * pt.location.powu(pt.multiplicity));
        let sign = if d % 2 == 1 { 1.0 } else { -1.0 };
        let rhs = p0 + c[d] * prod * sign;
        let inputs = json!({ "function": p, "z": cjson(z), "radius": s.radius });
        Ok(IdentityReport::compared(IdentityId::PolyVieta, inputs, pz, rhs, 1e-8, Criterion::Either)
            .with_notes("full orbit from the contour engine; relative tolerance, absolute when p(z) is near 0"))
    })
}

/// `a_n = (-1)^n (f(0) - f(z)) e_n(1/φ)`, with `e_n` taken over the orbit in
/// `|w| < radius`.
pub fn verify_vieta_coefficients(
    f: &EntireFunction,
    z: Complex,
    n: usize,
    radius: f64,
    source: OrbitSource,
    cfg: &ContourConfig,
) -> Result<IdentityReport> {
    timed(|| {
        if !(1..=3).contains(&n) {
            return invalid("coefficient index must be 1, 2 or 3");
        }
        let rho = order_below_one(f)?;
        let (f0, fz) = distinct_from_origin_value(f, z)?;
        let (pts, used_radius) = match source {
            OrbitSource::Engine => {
                let s = orbit(f, z, radius, cfg)?;
                (s.points.iter().map(|p| (p.location, p.multiplicity)).collect(), s.radius)
            }
            OrbitSource::Oracle => match f.orbit_oracle(z, radius) {
                Some(p) => (p, radius),
                None => return invalid("this family has no closed-form orbit"),
            },
        };
        let pts = sorted_by_modulus(pts);
        // reciprocal power sums, accumulated symmetrically by modulus
        let recip: Vec<Complex> = (1..=n as i32)
            .map(|j| pts.iter().map(|(p, m)| p.powi(-j) * *m as f64).sum())
            .collect();
        let e = newton_identities(&recip);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = (f0 - fz) * e[n] * sign;
        let lhs = f.maclaurin(n + 1)[n];

        let k: u32 = pts.iter().map(|p| p.1).sum();
        // Σ_{|φ| ≥ R} 1/|φ| for a counting function growing like K (r/R)^ρ
        let tail_recip = k as f64 * rho / ((1.0 - rho) * used_radius);
        let tail = (f0 - fz).norm() * tail_recip * e[n - 1].norm().max(1.0);
        let tolerance = tail.max(1e-3);
        let inputs = json!({
            "function": f, "z": cjson(z), "n": n, "radius": used_radius,
            "source": format!("{source:?}").to_lowercase(),
        });
        Ok(IdentityReport::compared(IdentityId::VietaCoefficients, inputs, lhs, rhs, tolerance, Criterion::Absolute)
            .with_notes(format!(
                "{k} orbit points; tail estimate {tail:.3e} from K ρ / ((1 - ρ) R) with ρ = {rho}; tolerance max(1e-3, tail)"
            )))
    })
}

/// Orbit points sorted by modulus and repeated by multiplicity, enough of
/// them to have `n_cut + 1` points or the whole fiber of a polynomial.
fn leading_points(
    f: &EntireFunction,
    z: Complex,
    n_cut: usize,
    cfg: &ContourConfig,
) -> Result<(Vec<Complex>, f64)> {
    let degree = if f.is_polynomial() { f.degree() } else { None };
    if let Some(d) = degree {
        if n_cut > d {
            return invalid(format!("the orbit has only {d} points"));
        }
    }
    let mut radius = 4.0;
    loop {
        let s = orbit(f, z, radius, cfg)?;
        let pts: Vec<Complex> = s
            .points
            .iter()
            .flat_map(|p| std::iter::repeat(p.location).take(p.multiplicity as usize))
            .collect();
        let full = degree == Some(pts.len());
        if pts.len() > n_cut || full {
            let r = if pts.len() > n_cut { pts[n_cut].norm() } else { 2.0 * pts[pts.len() - 1].norm() + 1.0 };
            // keep room beyond the cut so that points near it are known
            if full || s.radius >= 1.25 * r {
                return Ok((pts, r));
            }
            radius = 1.3 * r;
        } else {
            radius *= 2.0;
        }
        if radius > 1e8 {
            return Err(Error::OrbitIncomplete { found: pts.len(), expected: n_cut + 1 });
        }
    }
}

const JENSEN_NODES: usize = 4096;
const JENSEN_MAX_NODES: usize = 1 << 20;
/// Orbit points this close to the circle, relative to its radius, have
/// their logarithmic singularity subtracted.
const NEAR_BAND: f64 = 0.1;

/// Circle mean of `log |f(w) - target|` on `|w| = r`, with the nearby zeros'
/// `log |w - a|` removed and their exact means added back.
fn jensen_mean(f: &EntireFunction, target: Complex, r: f64, near: &[Complex]) -> Result<(f64, usize)> {
    let known: f64 = near.iter().map(|a| a.norm().max(r).ln()).sum();
    let mean = |m: usize| -> Result<f64> {
        // midpoint nodes stay off zeros placed at rational angles
        let vals = (0..m)
            .into_par_iter()
            .map(|j| {
                let w = Complex::from_polar(r, TWO_PI * (j as f64 + 0.5) / m as f64);
                let mut v = f.expand(w, 0)?.log_abs_offset(target);
                for a in near {
                    v -= (w - a).norm().ln();
                }
                Ok(v)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(vals.iter().sum::<f64>() / m as f64)
    };
    let mut m = JENSEN_NODES;
    let mut prev = mean(m)?;
    loop {
        let next = mean(2 * m)?;
        m *= 2;
        if (next - prev).abs() <= 1e-12 * (1.0 + next.abs()) || m >= JENSEN_MAX_NODES {
            return Ok((next + known, m));
        }
        prev = next;
    }
}

/// Jensen's formula for the product of the `n_cut` orbit points of least
/// modulus, with the cut at `r = |φ_(n_cut)|`.
pub fn verify_jensen(f: &EntireFunction, z: Complex, n_cut: usize, cfg: &ContourConfig) -> Result<IdentityReport> {
    timed(|| {
        if n_cut == 0 {
            return invalid("n_cut must be positive");
        }
        let (f0, fz) = distinct_from_origin_value(f, z)?;
        let (pts, r) = leading_points(f, z, n_cut, cfg)?;
        let log_lhs: f64 = pts[..n_cut].iter().map(|p| p.norm().ln()).sum();
        let near: Vec<Complex> = pts.iter().copied().filter(|p| (p.norm() - r).abs() < NEAR_BAND * r).collect();
        let (mean, nodes) = jensen_mean(f, fz, r, &near)?;
        let log_rhs = n_cut as f64 * r.ln() + (f0 - fz).norm().ln() - mean;
        let lhs = Complex::new(log_lhs.exp(), 0.0);
        let rhs = Complex::new(log_rhs.exp(), 0.0);
        let tied = pts.iter().filter(|p| (p.norm() - r).abs() <= 1e-9 * r).count();
        let inputs = json!({ "function": f, "z": cjson(z), "n_cut": n_cut, "r": r });
        let mut report = IdentityReport::compared(IdentityId::Jensen, inputs, lhs, rhs, 1e-6, Criterion::Relative);
        // compare in log space so that huge products keep their precision
        report.rel_err = (log_lhs - log_rhs).exp_m1().abs();
        report.pass = report.rel_err <= report.tolerance;
        Ok(report.with_notes(format!(
            "angular mean with {nodes} nodes, {} near-circle zeros subtracted; {tied} orbit points on the cut circle (each contributes r/|φ| = 1)",
            near.len()
        )))
    })
}

/// `f(z) = (f(0) L - f(w)) / (L - 1)` with `L = ∏ (1 - w/φ)` over the orbit.
pub fn reconstruct_low_order(
    f: &EntireFunction,
    z: Complex,
    w: Complex,
    radius: f64,
    cfg: &ContourConfig,
) -> Result<IdentityReport> {
    timed(|| {
        let rho = order_below_one(f)?;
        let (f0, fz) = distinct_from_origin_value(f, z)?;
        let fw = f.eval(w)?;
        let s = orbit(f, z, radius, cfg)?;
        let pts = sorted_by_modulus(s.points.iter().map(|p| (p.location, p.multiplicity)).collect());
        let partial = pts
            .iter()
            .fold(Complex::new(1.0, 0.0), |acc, (p, m)| acc * (Complex::new(1.0, 0.0) - w / p).powu(*m));
        let full = f.is_polynomial() && f.degree() == Some(s.count);
        let tail = if full || rho <= 0.0 { None } else { reciprocal_tail(&pts, rho, s.radius) };
        let l = partial * (-w * tail.unwrap_or_default()).exp();
        let distance = (l - 1.0).norm();
        if distance < 1e-6 {
            return Err(Error::LNearOne { distance });
        }
        let recon = (f0 * l - fw) / (l - 1.0);
        let tolerance = if full { 1e-10 } else { s.radius.powf(-0.5).clamp(1e-10, 1e-2) };
        let inputs = json!({ "function": f, "z": cjson(z), "w": cjson(w), "radius": s.radius });
        let tail_note = match tail {
            Some(t) => format!("tail Σ 1/φ beyond R fitted as {:.3e}{:+.3e}i", t.re, t.im),
            None if full => "full orbit, no tail".to_string(),
            None => "too few points to fit the tail".to_string(),
        };
        Ok(IdentityReport::compared(IdentityId::ReconstructLowOrder, inputs, recon, fz, tolerance, Criterion::Absolute)
            .with_notes(format!("{} orbit points; {tail_note}; tolerance R^(-1/2)", s.count)))
    })
}

/// Estimate of `Σ_{|φ| ≥ R} 1/φ` from a fit `S(r) ≈ S_∞ + A r^(ρ-1)` of the
/// reciprocal partial sums over the outer part of the recovered orbit.
fn reciprocal_tail(pts: &[(Complex, u32)], rho: f64, radius: f64) -> Option<Complex> {
    let mut sum = Complex::new(0.0, 0.0);
    let mut samples: Vec<(f64, Complex)> = Vec::with_capacity(pts.len());
    for (p, m) in pts {
        let step = p.inv() * *m as f64;
        // midpoint of the jump smooths the staircase
        samples.push((p.norm(), sum + step * 0.5));
        sum += step;
    }
    let outer: Vec<&(f64, Complex)> = samples.iter().filter(|s| s.0 >= radius / 16.0).collect();
    let used: Vec<&(f64, Complex)> = if outer.len() >= 3 {
        outer
    } else {
        samples.iter().rev().take(6).collect()
    };
    if used.len() < 3 {
        return None;
    }
    let x: Vec<f64> = used.iter().map(|s| s.0.powf(rho - 1.0)).collect();
    let nf = x.len() as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = used.iter().map(|s| s.1).sum::<Complex>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: Complex = x.iter().zip(&used).map(|(v, s)| (s.1 - my) * (v - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let a = sxy / sxx;
    let s_inf = my - a * mx;
    Some(s_inf - sum)
}

/// Errors of `a_n ∏ (w - φ_j^(n))` against `f(w) - f(z)`, and of the pairing
/// with `z` divided out against `f'(z)`, for partial sums of degree `n`.
pub fn verify_reconstruction_partial_sums(
    f: &EntireFunction,
    w: Complex,
    z: Complex,
    n_list: &[usize],
) -> Result<IdentityReport> {
    timed(|| {
        if n_list.is_empty() {
            return invalid("degree list is empty");
        }
        if w.norm() > 2.0 || z.norm() > 2.0 {
            return invalid("w and z must lie in |w| <= 2");
        }
        let target = f.eval(w)? - f.eval(z)?;
        let dz = f.eval_kderiv(z, 1)?;
        let mut errors = Vec::with_capacity(n_list.len());
        let mut floors = Vec::with_capacity(n_list.len());
        let mut last = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        for &n in n_list {
            let p = f.partial_sum(n)?;
            let mut c = p.polynomial_coeffs().expect("partial sums are polynomials");
            let lead = c[n];
            let pz = horner(&c, z);
            c[0] -= pz;
            let roots = roots_with_multiplicity(&c);
            let value = roots.iter().fold(lead, |acc, (r, m)| acc * (w - r).powu(*m));
            let nearest = roots
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 .0 - z).norm().total_cmp(&(b.1 .0 - z).norm()))
                .map(|(i, _)| i)
                .expect("degree is positive");
            let slope = roots.iter().enumerate().fold(lead, |acc, (i, (r, m))| {
                let m = if i == nearest { m - 1 } else { *m };
                acc * (z - r).powu(m)
            });
            errors.push((value - target).norm().max((slope - dz).norm()));
            // first-order rounding level: each root moves by about
            // n ε Σ|c_k||φ|^k / |p'(φ)|, and the products feel it through 1/|w - φ|
            let dc: Vec<Complex> = c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
            let shift = |r: &Complex| {
                let size = c.iter().rev().fold(0.0, |acc, a| acc * r.norm() + a.norm());
                n as f64 * f64::EPSILON * size / horner(&dc, *r).norm().max(f64::MIN_POSITIVE)
            };
            let spread_w: f64 = roots.iter().map(|(r, _)| shift(r) / (w - r).norm()).sum();
            let spread_z: f64 =
                roots.iter().enumerate().filter(|(i, _)| *i != nearest).map(|(_, (r, _))| shift(r) / (z - r).norm()).sum();
            floors.push((value.norm() * spread_w).max(slope.norm() * spread_z));
            last = (value, target);
        }
        let final_err = errors[errors.len() - 1];
        let from = errors.len().saturating_sub(3);
        // once an error is down at rounding level the sequence is noise, not a trend
        let decreasing = (from + 1..errors.len()).all(|i| errors[i] < errors[i - 1] || errors[i] <= floors[i]);
        let inputs = json!({ "function": f, "w": cjson(w), "z": cjson(z), "n_list": n_list });
        let tolerance = if f.is_polynomial() && f.degree() == n_list.last().copied() { 1e-12 } else { 1e-6 };
        Ok(IdentityReport::judged(
            IdentityId::ReconstructionPartialSums,
            inputs,
            last.0,
            last.1,
            final_err,
            tolerance,
            Criterion::Trend,
            final_err <= tolerance && decreasing,
        )
        .with_sequence(errors)
        .with_notes(format!(
            "error per degree is the larger of the f(w)-f(z) and f'(z) errors; decreasing over the last entries, or at rounding level {:.1e}: {decreasing}",
            floors[floors.len() - 1]
        )))
    })
}
