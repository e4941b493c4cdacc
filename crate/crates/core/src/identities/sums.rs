//! Sums of orbit derivatives over disks, and their behaviour along Wiman radii.

use std::f64::consts::PI;

use serde_json::json;

use super::{cjson, timed, Criterion, IdentityId, IdentityReport};
use crate::contour::{circle_quadrature, safe_radius, ContourConfig};
use crate::error::{invalid, Error, Result};
use crate::function::{Analytic, EntireFunction};
use crate::orbit::{derivative_orbit, orbit, orbit_count, WimanRadii};
use crate::Complex;

/// `∮_j = (1/2πi) ∮ (f(w) - target)^(-j) dw` on `|w| = radius` for `j = 1..=3`.
fn inverse_powers(f: &EntireFunction, target: Complex, radius: f64, cfg: &ContourConfig) -> Result<[Complex; 3]> {
    let q = circle_quadrature(Complex::new(0.0, 0.0), radius, 3, cfg, |w, out| {
        let inv = f.expand(w, 0)?.inv_offset(target);
        out[0] = inv;
        out[1] = inv * inv;
        out[2] = inv * inv * inv;
        Ok(())
    })?;
    if let Some(bad) = q.iter().find(|r| !r.converged) {
        return Err(Error::NotConverged { est_error: bad.est_error });
    }
    Ok([q[0].value, q[1].value, q[2].value])
}

/// `Σ_{|φ| < radius} φ^(k)(z)` from contour integrals of powers of
/// `1 / (f(w) - f(z))`. The radius is used as given.
pub fn contour_derivative_sum(
    f: &EntireFunction,
    z: Complex,
    radius: f64,
    k: usize,
    cfg: &ContourConfig,
) -> Result<Complex> {
    if !(1..=3).contains(&k) {
        return invalid("derivative order must be 1, 2 or 3");
    }
    let e = f.expand(z, k)?;
    let d: Vec<Complex> = (0..=k).map(|j| e.derivative(j)).collect();
    let c = inverse_powers(f, d[0], radius, cfg)?;
    Ok(match k {
        1 => d[1] * c[0],
        2 => d[2] * c[0] + d[1] * d[1] * c[1],
        _ => d[3] * c[0] + d[1] * d[2] * c[1] * 3.0 + d[1] * d[1] * d[1] * c[2] * 2.0,
    })
}

/// Contour side against the sum of chain-rule derivatives over the recovered
/// orbit.
pub fn verify_derivative_sums(
    f: &EntireFunction,
    z: Complex,
    radius: f64,
    k: usize,
    cfg: &ContourConfig,
) -> Result<IdentityReport> {
    timed(|| {
        let s = orbit(f, z, radius, cfg)?;
        let lhs = contour_derivative_sum(f, z, s.radius, k, cfg)?;
        let rhs: Complex = derivative_orbit(f, &s, k)?.into_iter().sum();
        let inputs = json!({ "function": f, "z": cjson(z), "radius": s.radius, "k": k });
        Ok(IdentityReport::compared(IdentityId::DerivativeSums, inputs, lhs, rhs, 1e-6, Criterion::Either)
            .with_notes(format!("{} orbit points; absolute or relative tolerance", s.count)))
    })
}

fn admissible_order(f: &EntireFunction) -> bool {
    f.known_order().is_some_and(|r| r > 0.0 && r < 0.5)
}

/// `|S_k(R_j)|` along the radii, where `S_k(R) = Σ_{|φ| < R} φ^(k)(z)`;
/// passes when the last three values do not increase and the final one is at
/// most `1e-3`.
pub fn verify_vanishing_sums(
    f: &EntireFunction,
    z: Complex,
    wr: &WimanRadii,
    k: usize,
    cfg: &ContourConfig,
) -> Result<IdentityReport> {
    timed(|| {
        if wr.radii.is_empty() {
            return invalid("no radii given");
        }
        let mut sums = Vec::with_capacity(wr.radii.len());
        let mut radii = Vec::with_capacity(wr.radii.len());
        for w in &wr.radii {
            let r = safe_radius(f, z, w.r, cfg)?;
            sums.push(contour_derivative_sum(f, z, r, k, cfg)?);
            radii.push(r);
        }
        let seq: Vec<f64> = sums.iter().map(|s| s.norm()).collect();
        let last = seq[seq.len() - 1];
        let enough = seq.len() >= 3;
        let tail = &seq[seq.len().saturating_sub(3)..];
        let decaying = enough && tail.windows(2).all(|p| p[1] <= p[0]);
        let premise = admissible_order(f) && wr.verified();
        let inputs = json!({ "function": f, "z": cjson(z), "k": k, "radii": radii });
        let mut notes = format!("order in (0, 1/2) with verified radii: {premise}");
        if !enough {
            notes.push_str("; inconclusive: fewer than 3 radii");
        }
        Ok(IdentityReport::judged(
            IdentityId::VanishingSums,
            inputs,
            sums[sums.len() - 1],
            Complex::new(0.0, 0.0),
            last,
            1e-3,
            Criterion::Trend,
            decaying && last <= 1e-3,
        )
        .with_sequence(seq)
        .with_notes(notes))
    })
}

/// `D_j = (n(r_j, z) + 1) log r_j - r_j^ρ cos πρ` along the radii; passes when
/// the last three values increase and the last exceeds the first.
pub fn verify_circular_density(
    f: &EntireFunction,
    z: Complex,
    wr: &WimanRadii,
    rho: f64,
    cfg: &ContourConfig,
) -> Result<IdentityReport> {
    timed(|| {
        if !(rho > 0.0 && rho < 0.5) {
            return invalid("rho must lie in (0, 1/2)");
        }
        if wr.radii.is_empty() {
            return invalid("no radii given");
        }
        let mut d = Vec::with_capacity(wr.radii.len());
        let mut counts = Vec::with_capacity(wr.radii.len());
        for w in &wr.radii {
            let r = safe_radius(f, z, w.r, cfg)?;
            let n = orbit_count(f, z, r, cfg)?;
            counts.push(n);
            d.push((n as f64 + 1.0) * r.ln() - r.powf(rho) * (PI * rho).cos());
        }
        let inconclusive = d.len() < 2;
        let tail = &d[d.len().saturating_sub(3)..];
        let increasing = tail.windows(2).all(|p| p[1] > p[0]);
        let first = d[0];
        let last = d[d.len() - 1];
        let pass = !inconclusive && increasing && last > first;
        let inputs = json!({ "function": f, "z": cjson(z), "rho": rho, "counts": counts });
        let notes = if inconclusive {
            "inconclusive: a single radius shows no trend".to_string()
        } else {
            format!("increasing over the last radii: {increasing}")
        };
        Ok(IdentityReport::judged(
            IdentityId::CircularDensity,
            inputs,
            Complex::new(last, 0.0),
            Complex::new(first, 0.0),
            0.0,
            0.0,
            Criterion::Trend,
            pass,
        )
        .with_sequence(d)
        .with_notes(notes))
    })
}
