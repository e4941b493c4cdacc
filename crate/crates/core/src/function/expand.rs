use super::{EntireFunction, Family, LocalExpansion, TWO_PI};
use crate::error::{Error, Result};
use crate::taylor::{binom_real, compose, exp_shifted, factorial, mul, poly_at};
use crate::Complex;

const ZERO: Complex = Complex::new(0.0, 0.0);

/// Series are used below these moduli; the closed forms lose accuracy in
/// high derivatives closer to the origin.
const COS_SQRT_SERIES_RADIUS: f64 = 16.0;
const QUARTER_SERIES_RADIUS: f64 = 4096.0;

/// Maclaurin coefficient generators by ratio `a_n / a_{n-1}`.
fn cos_sqrt_coeff(n: usize) -> f64 {
    // (-1)^n / (2n)!
    let mut a = 1.0;
    for k in 1..=n {
        a /= -((2 * k - 1) as f64 * (2 * k) as f64);
    }
    a
}

fn quarter_coeff(n: usize) -> f64 {
    // 1 / (4n)!
    let mut a = 1.0;
    for k in 1..=n {
        let m = 4 * k;
        a /= (m - 3) as f64 * (m - 2) as f64 * (m - 1) as f64 * m as f64;
    }
    a
}

/// Taylor coefficients at `w` of `Σ a_n w^n` (real `a_n` from a ratio recurrence).
fn series_at(ratio: impl Fn(usize) -> f64, w: Complex, order: usize, terms: usize) -> Vec<Complex> {
    let mut a = vec![0.0; terms + 1];
    a[0] = 1.0;
    for n in 1..=terms {
        a[n] = a[n - 1] * ratio(n);
    }
    let mut pw = vec![Complex::new(1.0, 0.0); terms + 1];
    for m in 1..=terms {
        pw[m] = pw[m - 1] * w;
    }
    (0..=order)
        .map(|j| {
            let mut s = ZERO;
            let mut binom = 1.0; // C(n, j) for n = j
            for n in j..=terms {
                if n > j {
                    binom = binom * n as f64 / (n - j) as f64;
                }
                s += pw[n - j] * (a[n] * binom);
            }
            s
        })
        .collect()
}

/// `exp(x - s)` for the scaled trigonometric expansions.
fn scaled_exp(x: Complex, s: f64) -> Complex {
    Complex::new(x.re - s, x.im).exp()
}

/// Taylor coefficients at `t` of `cos` scaled by `exp(-s)`.
fn cos_taylor_scaled(t: Complex, order: usize, s: f64) -> Vec<Complex> {
    let i = Complex::new(0.0, 1.0);
    let ep = scaled_exp(i * t, s);
    let em = scaled_exp(-i * t, s);
    let cos = (ep + em) * 0.5;
    let sin = (ep - em) / (2.0 * i);
    (0..=order)
        .map(|j| {
            let d = match j % 4 {
                0 => cos,
                1 => -sin,
                2 => -cos,
                _ => sin,
            };
            d / factorial(j)
        })
        .collect()
}

fn cosh_taylor_scaled(t: Complex, order: usize, s: f64) -> Vec<Complex> {
    let ep = scaled_exp(t, s);
    let em = scaled_exp(-t, s);
    let cosh = (ep + em) * 0.5;
    let sinh = (ep - em) * 0.5;
    (0..=order)
        .map(|j| if j % 2 == 0 { cosh } else { sinh } / factorial(j))
        .collect()
}

/// Taylor coefficients of `w^alpha` at `w` with `root = w^alpha` (principal).
fn power_taylor(w: Complex, root: Complex, alpha: f64, order: usize) -> Vec<Complex> {
    let mut out = Vec::with_capacity(order + 1);
    let mut wp = Complex::new(1.0, 0.0);
    for j in 0..=order {
        out.push(root * binom_real(alpha, j) / wp);
        wp *= w;
    }
    out
}

fn overflow(w: Complex) -> Error {
    Error::EvaluationOverflow { re: w.re, im: w.im }
}

pub(super) fn expand(f: &EntireFunction, w: Complex, order: usize) -> Result<LocalExpansion> {
    let e = match &f.family {
        Family::Monomial(_)
        | Family::QuadraticZZ
        | Family::GeneralPolynomial(_)
        | Family::TruncatedSeries(_) => {
            let c = f.polynomial_coeffs().expect("polynomial family");
            LocalExpansion::unscaled(poly_at(&c, w, order))
        }
        Family::Exp => {
            let unit = Complex::new(0.0, w.im).exp();
            LocalExpansion {
                taylor: (0..=order).map(|j| unit / factorial(j)).collect(),
                log_scale: w.re,
            }
        }
        Family::CosSqrt => {
            if w.norm() < COS_SQRT_SERIES_RADIUS {
                LocalExpansion::unscaled(series_at(
                    |n| -1.0 / ((2 * n - 1) as f64 * (2 * n) as f64),
                    w,
                    order,
                    40 + order,
                ))
            } else {
                let t = w.sqrt();
                let s = t.im.abs();
                let outer = cos_taylor_scaled(t, order, s);
                let inner = power_taylor(w, t, 0.5, order);
                LocalExpansion { taylor: compose(&outer, &inner, order), log_scale: s }
            }
        }
        Family::QuarterOrder => {
            if w.norm() < QUARTER_SERIES_RADIUS {
                LocalExpansion::unscaled(series_at(
                    |n| {
                        let m = 4 * n;
                        1.0 / ((m - 3) as f64 * (m - 2) as f64 * (m - 1) as f64 * m as f64)
                    },
                    w,
                    order,
                    40 + order,
                ))
            } else {
                let t = w.sqrt().sqrt();
                let s = t.re.abs().max(t.im.abs());
                let c = cos_taylor_scaled(t, order, s);
                let ch = cosh_taylor_scaled(t, order, s);
                let outer: Vec<Complex> = c.iter().zip(&ch).map(|(a, b)| (a + b) * 0.5).collect();
                let inner = power_taylor(w, t, 0.25, order);
                LocalExpansion { taylor: compose(&outer, &inner, order), log_scale: s }
            }
        }
        Family::PolyTimesExp { p, g } => {
            let pt = poly_at(p, w, order);
            let gt = poly_at(g, w, order);
            let mut et = exp_shifted(&gt, order);
            let unit = Complex::new(0.0, gt[0].im).exp();
            for c in et.iter_mut() {
                *c *= unit;
            }
            LocalExpansion { taylor: mul(&pt, &et, order), log_scale: gt[0].re }
        }
        Family::NgFactor(c) => {
            let s = w.re.max(0.0);
            let ce = c * Complex::new(w.re - s, w.im).exp();
            let damp = (-s).exp();
            let taylor = (0..=order)
                .map(|j| match j {
                    0 => ce + w * damp,
                    1 => ce + damp,
                    _ => ce / factorial(j),
                })
                .collect();
            LocalExpansion { taylor, log_scale: s }
        }
        Family::CompositionTower(layers) => {
            let mut cur = layers[0].expand_checked(w, order)?;
            for layer in &layers[1..] {
                let factor = cur.log_scale.exp();
                if !factor.is_finite() {
                    return Err(overflow(w));
                }
                let inner: Vec<Complex> = cur.taylor.iter().map(|c| c * factor).collect();
                let outer = layer.expand_checked(inner[0], order)?;
                cur = LocalExpansion {
                    taylor: compose(&outer.taylor, &inner, order),
                    log_scale: outer.log_scale,
                };
            }
            cur
        }
    };
    if e.taylor.iter().all(|c| c.is_finite()) && e.log_scale.is_finite() {
        Ok(e)
    } else {
        Err(overflow(w))
    }
}

impl EntireFunction {
    fn expand_checked(&self, w: Complex, order: usize) -> Result<LocalExpansion> {
        if !w.is_finite() {
            return Err(overflow(w));
        }
        expand(self, w, order)
    }
}

pub(super) fn maclaurin(f: &EntireFunction, count: usize) -> Vec<Complex> {
    let real = |x: f64| Complex::new(x, 0.0);
    let mut out = match &f.family {
        Family::Monomial(_)
        | Family::QuadraticZZ
        | Family::GeneralPolynomial(_)
        | Family::TruncatedSeries(_) => f.polynomial_coeffs().expect("polynomial family"),
        Family::Exp => (0..count).map(|k| real(1.0 / factorial(k))).collect(),
        Family::CosSqrt => (0..count).map(|k| real(cos_sqrt_coeff(k))).collect(),
        Family::QuarterOrder => (0..count).map(|k| real(quarter_coeff(k))).collect(),
        Family::NgFactor(c) => (0..count)
            .map(|k| c / factorial(k) + if k == 1 { real(1.0) } else { ZERO })
            .collect(),
        Family::PolyTimesExp { p, g } => {
            let order = count.saturating_sub(1);
            let gt = poly_at(g, ZERO, order);
            let e = exp_shifted(&gt, order);
            let scale = gt[0].exp();
            let mut pp = p.clone();
            pp.resize(count.max(p.len()), ZERO);
            mul(&pp, &e, order).into_iter().map(|c| c * scale).collect()
        }
        Family::CompositionTower(_) => numeric_maclaurin(f, count),
    };
    out.resize(count, ZERO);
    out
}

/// Coefficients from the trapezoid rule on the unit circle.
fn numeric_maclaurin(f: &EntireFunction, count: usize) -> Vec<Complex> {
    let m = (4 * count).next_power_of_two().max(256);
    let vals: Vec<Complex> = (0..m)
        .map(|j| {
            let w = Complex::from_polar(1.0, TWO_PI * j as f64 / m as f64);
            f.eval(w).unwrap_or(ZERO)
        })
        .collect();
    (0..count)
        .map(|k| {
            let mut s = ZERO;
            for (j, v) in vals.iter().enumerate() {
                let phase = -TWO_PI * ((j * k) % m) as f64 / m as f64;
                s += v * Complex::from_polar(1.0, phase);
            }
            s / m as f64
        })
        .collect()
}
