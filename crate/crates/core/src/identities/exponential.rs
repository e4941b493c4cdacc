//! The exponential family: the closed form of the Weierstrass exponent
//! `g(w, z)` of `e^w - e^z`, its branch shifts along the orbit, and its
//! first `w`-derivative at the origin.

use std::f64::consts::PI;

use serde_json::json;

use super::{cjson, timed, Criterion, IdentityId, IdentityReport, QLambda};
use crate::error::{invalid, Error, Result};
use crate::function::TWO_PI;
use crate::Complex;

const I: Complex = Complex { re: 0.0, im: 1.0 };

/// `sin(z / 2i)`.
fn half_sin(z: Complex) -> Complex {
    (z / (2.0 * I)).sin()
}

/// `cot(z / 2i)`.
fn half_cot(z: Complex) -> Complex {
    let a = z / (2.0 * I);
    a.cos() / a.sin()
}

fn check_pole(z: Complex) -> Result<()> {
    if half_sin(z).norm() < 1e-9 {
        return Err(Error::NearPole { re: z.re, im: z.im });
    }
    Ok(())
}

/// `exp(g(w, z)) = (e^w - e^z) sin(z/2i) / sin((z-w)/2i) exp(-(w/2i) cot(z/2i))`.
pub fn g_closed_exp(w: Complex, z: Complex) -> Result<Complex> {
    check_pole(z)?;
    let ratio = half_sin(z) / half_sin(z - w);
    Ok((w.exp() - z.exp()) * ratio * (-(w / (2.0 * I)) * half_cot(z)).exp())
}

/// `e^w - e^z` against `exp(g)` times the genus-one canonical product over
/// the orbit `z + 2πik`, paired symmetrically up to `|k| = K`, with the tail
/// replaced by `exp(w² / (4π² K))`.
pub fn verify_exp_g_closed_form(w: Complex, z: Complex, k_max: usize) -> Result<IdentityReport> {
    timed(|| {
        if k_max == 0 {
            return invalid("truncation must be positive");
        }
        if w == z {
            return invalid("w must differ from z");
        }
        if half_sin(z - w).norm() < 1e-9 {
            return Err(Error::NearPole { re: (z - w).re, im: (z - w).im });
        }
        let eg = g_closed_exp(w, z)?;
        let q = QLambda::new(1);
        let mut product = q.factor(w / z);
        let zz = z * z;
        let a = zz - (z - w) * (z - w);
        for n in 1..=k_max {
            let d = zz + 4.0 * PI * PI * (n * n) as f64;
            product *= (Complex::new(1.0, 0.0) - a / d) * (2.0 * z * w / d).exp();
        }
        let tail = (w * w / (4.0 * PI * PI * k_max as f64)).exp();
        let rhs = eg * product * tail;
        let lhs = w.exp() - z.exp();
        let inputs = json!({ "w": cjson(w), "z": cjson(z), "K": k_max });
        Ok(IdentityReport::compared(IdentityId::ExpGClosedForm, inputs, lhs, rhs, 1e-6, Criterion::Either)
            .with_notes("pairs k and -k combined; tail factor exp(w²/(4π²K)), next term O(w²/K²)"))
    })
}

/// `A(t)` of the branch tracking: the multivalued part of `exp(g)` along
/// `z + 2πi k t`.
fn tracked(w: Complex, z: Complex) -> Complex {
    (w.exp() - z.exp()) * half_sin(z) / half_sin(z - w)
}

const PATH_STEPS: usize = 1000;
const MAX_BISECTIONS: u32 = 30;

/// Argument change of `A` from `t0` to `t1`, bisecting until each jump is
/// below `π/2`.
fn arg_change(a: &impl Fn(f64) -> Complex, t0: f64, t1: f64, v0: Complex, v1: Complex, depth: u32) -> Option<f64> {
    let jump = (v1 / v0).arg();
    if jump.abs() < PI / 2.0 {
        return Some(jump);
    }
    if depth == MAX_BISECTIONS {
        return None;
    }
    let tm = 0.5 * (t0 + t1);
    let vm = a(tm);
    if !(vm.is_finite() && vm.norm() > 0.0) {
        return None;
    }
    Some(arg_change(a, t0, tm, v0, vm, depth + 1)? + arg_change(a, tm, t1, vm, v1, depth + 1)?)
}

/// `T = (g(w, z + 2πik) - g(w, z)) / 2πi`, following `g` continuously along
/// the straight path from `z` to `z + 2πik`.
pub fn compute_shift_t_exp(k: i64, w: Complex, z: Complex) -> Result<i64> {
    if k == 0 {
        return Ok(0);
    }
    check_pole(z)?;
    if (z - w).norm() < 1e-12 {
        return invalid("w must differ from z");
    }
    // keep the path off the lines where A vanishes or has poles
    let mut z0 = z;
    if z0.re.abs() < 1e-6 {
        z0.re += 1e-3;
    }
    if (z0.re - w.re).abs() < 1e-6 {
        z0.re += 1e-3;
    }
    let shift = Complex::new(0.0, TWO_PI * k as f64);
    let a = |t: f64| tracked(w, z0 + shift * t);
    let steps = PATH_STEPS * k.unsigned_abs() as usize;
    let mut total = 0.0;
    let mut prev = a(0.0);
    for j in 1..=steps {
        let t1 = j as f64 / steps as f64;
        let next = a(t1);
        let t0 = (j - 1) as f64 / steps as f64;
        let valid = next.is_finite() && next.norm() > 0.0;
        match valid.then(|| arg_change(&a, t0, t1, prev, next, 0)).flatten() {
            Some(d) => total += d,
            None => return Err(Error::BranchTrackingFailed { defect: 0.5 }),
        }
        prev = next;
    }
    // the exponential factor is single-valued; its change enters directly
    let e = |zz: Complex| -(w / (2.0 * I)) * half_cot(zz);
    let exponent = (e(z0 + shift) - e(z0)) / (2.0 * PI * I);
    let t = total / TWO_PI + exponent.re;
    let n = t.round();
    let defect = (t - n).abs().max(exponent.im.abs());
    if defect > 1e-6 {
        return Err(Error::BranchTrackingFailed { defect });
    }
    Ok(n as i64)
}

/// `T(k)` for every `k` in `ks`: each must come out integral, and `T(2) = 2 T(1)`.
pub fn verify_shift_homomorphism(w: Complex, z: Complex, ks: &[i64]) -> Result<IdentityReport> {
    timed(|| {
        let t1 = compute_shift_t_exp(1, w, z)?;
        let t2 = compute_shift_t_exp(2, w, z)?;
        let values = ks.iter().map(|&k| compute_shift_t_exp(k, w, z)).collect::<Result<Vec<i64>>>()?;
        let t_of = |k: i64| ks.iter().position(|&j| j == k).map(|i| values[i]);
        let odd = ks.iter().all(|&k| match (t_of(k), t_of(-k)) {
            (Some(a), Some(b)) => a == -b,
            _ => true,
        });
        let inputs = json!({ "w": cjson(w), "z": cjson(z), "k": ks });
        Ok(IdentityReport::judged(
            IdentityId::ShiftHomomorphism,
            inputs,
            Complex::new(t2 as f64, 0.0),
            Complex::new(2.0 * t1 as f64, 0.0),
            (t2 - 2 * t1).unsigned_abs() as f64,
            0.0,
            Criterion::Structural,
            t2 == 2 * t1 && odd,
        )
        .with_sequence(values.iter().map(|&t| t as f64).collect())
        .with_notes(format!("T(1) = {t1}; every T(k) integral to 1e-6; T(-k) = -T(k)")))
    })
}

/// `∂_w g(0, z)` from the closed form, term by term.
fn dg_dw_at_zero(z: Complex) -> Complex {
    let one = Complex::new(1.0, 0.0);
    // log(e^w - e^z), -log sin((z-w)/2i), -(w/2i) cot(z/2i)
    one / (one - z.exp()) + half_cot(z) / (2.0 * I) - half_cot(z) / (2.0 * I)
}

/// `Σ_{|k| ≤ K} 1/(z + 2πik)` paired symmetrically, plus the first-order tail
/// `2z / (4π² (K + 1/2))`.
fn symmetric_reciprocal_sum(z: Complex, k_max: usize) -> Complex {
    let zz = z * z;
    let mut s = Complex::new(0.0, 0.0);
    for k in (1..=k_max).rev() {
        s += 2.0 * z / (zz + 4.0 * PI * PI * (k * k) as f64);
    }
    s + z.inv() + 2.0 * z / (4.0 * PI * PI * (k_max as f64 + 0.5))
}

/// The discrepancy `δ(z) = ∂_w g(0, z) + Σ 1/φ_k(z)` over several base
/// points; passes when it does not depend on `z`.
pub fn verify_negative_moment_g(z_list: &[Complex], k_max: usize) -> Result<IdentityReport> {
    timed(|| {
        if z_list.len() < 2 {
            return invalid("need at least two base points");
        }
        if k_max == 0 {
            return invalid("truncation must be positive");
        }
        let mut deltas = Vec::with_capacity(z_list.len());
        for &z in z_list {
            check_pole(z)?;
            let lhs = dg_dw_at_zero(z);
            let rhs = -symmetric_reciprocal_sum(z, k_max);
            deltas.push(lhs - rhs);
        }
        let mean = deltas.iter().sum::<Complex>() / deltas.len() as f64;
        let spread: Vec<f64> = deltas.iter().map(|d| (d - mean).norm()).collect();
        let worst = (0..deltas.len()).max_by(|&a, &b| spread[a].total_cmp(&spread[b])).unwrap_or(0);
        let inputs = json!({ "z_list": z_list.iter().map(|z| cjson(*z)).collect::<Vec<_>>(), "K": k_max });
        let report = IdentityReport::compared(
            IdentityId::NegativeMomentG,
            inputs,
            deltas[worst],
            mean,
            1e-6,
            Criterion::Absolute,
        );
        Ok(report.with_sequence(spread).with_notes(format!(
            "discrepancy δ(z) ≈ {:.12}{:+.12}i for every z; symmetric summation with tail 2z/(4π²(K+1/2))",
            mean.re, mean.im
        )))
    })
}
