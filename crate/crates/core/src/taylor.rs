//! Truncated Taylor arithmetic on coefficient vectors `c[j] = f^(j)(w) / j!`.

use crate::Complex;

pub(crate) fn mul(a: &[Complex], b: &[Complex], order: usize) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); order + 1];
    for (i, ai) in a.iter().enumerate().take(order + 1) {
        for (j, bj) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Taylor coefficients of `outer(inner(w + h))`, where `outer` is expanded
/// around `inner[0]`. Only `inner[1..]` is used.
pub(crate) fn compose(outer: &[Complex], inner: &[Complex], order: usize) -> Vec<Complex> {
    let mut shift = inner[..=order.min(inner.len() - 1)].to_vec();
    shift.resize(order + 1, Complex::new(0.0, 0.0));
    shift[0] = Complex::new(0.0, 0.0);

    let mut acc = vec![Complex::new(0.0, 0.0); order + 1];
    for j in (0..=order.min(outer.len() - 1)).rev() {
        acc = mul(&acc, &shift, order);
        acc[0] += outer[j];
    }
    acc
}

/// Taylor coefficients of `exp(g(w + h) - g(w))`.
pub(crate) fn exp_shifted(g: &[Complex], order: usize) -> Vec<Complex> {
    let mut e = vec![Complex::new(0.0, 0.0); order + 1];
    e[0] = Complex::new(1.0, 0.0);
    for k in 1..=order {
        let mut s = Complex::new(0.0, 0.0);
        for j in 1..=k.min(g.len().saturating_sub(1)) {
            s += g[j] * e[k - j] * j as f64;
        }
        e[k] = s / k as f64;
    }
    e
}

/// Taylor coefficients of a polynomial (ascending coefficients) at `w`.
pub(crate) fn poly_at(coeffs: &[Complex], w: Complex, order: usize) -> Vec<Complex> {
    // repeated synthetic division
    let mut work: Vec<Complex> = coeffs.to_vec();
    let mut out = Vec::with_capacity(order + 1);
    for _ in 0..=order {
        if work.is_empty() {
            out.push(Complex::new(0.0, 0.0));
            continue;
        }
        let n = work.len();
        let mut q = vec![Complex::new(0.0, 0.0); n.saturating_sub(1)];
        let mut acc = work[n - 1];
        for i in (0..n - 1).rev() {
            q[i] = acc;
            acc = acc * w + work[i];
        }
        out.push(acc);
        work = q;
    }
    out
}

/// Binomial coefficient `C(alpha, j)` for real `alpha`.
pub(crate) fn binom_real(alpha: f64, j: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..j {
        b *= (alpha - i as f64) / (i as f64 + 1.0);
    }
    b
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn poly_shift_matches_derivatives() {
        // p(w) = 1 + 2w + 3w^2 at w = 2: p = 17, p' = 14, p''/2 = 3
        let t = poly_at(&[c(1.0), c(2.0), c(3.0)], c(2.0), 3);
        assert_eq!(t, vec![c(17.0), c(14.0), c(3.0), c(0.0)]);
    }

    #[test]
    fn compose_square_of_shift() {
        // outer(v) = v^2 around v0 = 3 : [9, 6, 1]; inner(w) = 3 + w
        let out = compose(&[c(9.0), c(6.0), c(1.0)], &[c(3.0), c(1.0)], 3);
        assert_eq!(out, vec![c(9.0), c(6.0), c(1.0), c(0.0)]);
    }

    #[test]
    fn exp_of_linear_is_exponential_series() {
        let e = exp_shifted(&[c(0.0), c(2.0)], 4);
        for (k, v) in e.iter().enumerate() {
            let want = 2f64.powi(k as i32) / factorial(k);
            assert!((v.re - want).abs() < 1e-15);
        }
    }
}
