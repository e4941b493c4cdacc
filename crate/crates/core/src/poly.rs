//! Polynomial utilities: Aberth–Ehrlich root finding, Newton's identities and
//! cluster detection for multiple roots.
//!
//! Coefficient slices are in ascending order: `c[0] + c[1] x + ... + c[n] x^n`.

use crate::Complex;

const EPS: f64 = f64::EPSILON;

pub fn horner(coeffs: &[Complex], x: Complex) -> Complex {
    coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * x + c)
}

fn horner_abs(coeffs: &[Complex], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// `p(x) / p'(x)` evaluated through the reversed polynomial when `|x| > 1`,
/// together with a flag telling whether `p(x)` is below its rounding noise.
fn newton_ratio(coeffs: &[Complex], x: Complex) -> (Complex, bool) {
    let n = coeffs.len() - 1;
    let noise_scale = 4.0 * (n as f64 + 1.0) * EPS;
    if x.norm() <= 1.0 {
        let mut p = coeffs[n];
        let mut dp = Complex::new(0.0, 0.0);
        for c in coeffs[..n].iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        let noisy = p.norm() <= noise_scale * horner_abs(coeffs, x.norm());
        (p / dp, noisy)
    } else {
        let y = x.inv();
        // q(y) = y^n p(1/y), coefficients reversed
        let mut q = coeffs[0];
        let mut dq = Complex::new(0.0, 0.0);
        for c in coeffs[1..].iter() {
            dq = dq * y + q;
            q = q * y + c;
        }
        let rev_abs = coeffs.iter().fold(0.0, |acc, c| acc * y.norm() + c.norm());
        let noisy = q.norm() <= noise_scale * rev_abs;
        // p'/p = y (n - y q'/q)
        let dlog = y * (Complex::new(n as f64, 0.0) - y * dq / q);
        (dlog.inv(), noisy)
    }
}

/// Initial guesses placed on circles whose radii come from the upper convex
/// hull of `(k, log|c_k|)`.
fn newton_polygon_guesses(coeffs: &[Complex]) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    let pts: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| (k as f64, c.norm().ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut guesses = Vec::with_capacity(n);
    let sigma = 0.7;
    for pair in hull.windows(2) {
        let (i, li) = pair[0];
        let (j, lj) = pair[1];
        let m = (j - i) as usize;
        let radius = ((li - lj) / (j - i)).exp();
        for l in 0..m {
            let theta = 2.0 * std::f64::consts::PI * (l as f64 / m as f64 + i / n as f64) + sigma;
            guesses.push(Complex::from_polar(radius, theta));
        }
    }
    guesses
}

#[derive(Debug, Clone)]
pub struct AberthRoots {
    pub roots: Vec<Complex>,
    pub converged: bool,
    pub sweeps: usize,
}

/// All roots of a polynomial by simultaneous Aberth–Ehrlich iteration.
pub fn aberth(coeffs: &[Complex]) -> AberthRoots {
    let zero = Complex::new(0.0, 0.0);
    let mut top = coeffs.len();
    while top > 0 && coeffs[top - 1] == zero {
        top -= 1;
    }
    if top <= 1 {
        return AberthRoots { roots: Vec::new(), converged: true, sweeps: 0 };
    }
    let lead_zeros = coeffs[..top].iter().take_while(|c| **c == zero).count();
    let p = &coeffs[lead_zeros..top];
    let deg = p.len() - 1;

    let mut x = newton_polygon_guesses(p);
    let mut done = vec![false; deg];
    let mut sweeps = 0;
    let max_sweeps = 1000;
    while sweeps < max_sweeps && done.iter().any(|d| !d) {
        sweeps += 1;
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let (ratio, noisy) = newton_ratio(p, x[i]);
            if noisy || !ratio.is_finite() {
                done[i] = true;
                continue;
            }
            let mut s = zero;
            for j in 0..deg {
                if j != i {
                    s += (x[i] - x[j]).inv();
                }
            }
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * s);
            if !step.is_finite() {
                done[i] = true;
                continue;
            }
            x[i] -= step;
            if step.norm() <= 2.0 * EPS * x[i].norm() {
                done[i] = true;
            }
        }
    }
    let mut roots = vec![zero; lead_zeros];
    roots.extend(x);
    AberthRoots { roots, converged: done.iter().all(|d| *d), sweeps }
}

/// Elementary symmetric functions `e_0..e_N` from power sums `p_1..p_N`.
pub fn newton_identities(power_sums: &[Complex]) -> Vec<Complex> {
    let n = power_sums.len();
    let mut e = vec![Complex::new(0.0, 0.0); n + 1];
    e[0] = Complex::new(1.0, 0.0);
    for k in 1..=n {
        let mut s = Complex::new(0.0, 0.0);
        for i in 1..=k {
            let term = e[k - i] * power_sums[i - 1];
            if i % 2 == 1 {
                s += term;
            } else {
                s -= term;
            }
        }
        e[k] = s / k as f64;
    }
    e
}

/// Propagated absolute error bounds of `e_0..e_N` given error bounds of the
/// power sums.
pub(crate) fn newton_identities_error(
    power_sums: &[Complex],
    e: &[Complex],
    sum_errors: &[f64],
) -> Vec<f64> {
    let n = power_sums.len();
    let mut de = vec![0.0; n + 1];
    for k in 1..=n {
        let mut s = 0.0;
        for i in 1..=k {
            s += de[k - i] * power_sums[i - 1].norm() + e[k - i].norm() * sum_errors[i - 1];
            s += 2.0 * EPS * (e[k - i] * power_sums[i - 1]).norm();
        }
        de[k] = s / k as f64;
    }
    de
}

/// Ascending coefficients of the monic polynomial `∏ (x - r)` whose roots
/// have the given elementary symmetric functions.
pub fn monic_from_elementary(e: &[Complex]) -> Vec<Complex> {
    let n = e.len() - 1;
    let mut c = vec![Complex::new(0.0, 0.0); n + 1];
    for (k, ek) in e.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[n - k] = ek * sign;
    }
    c
}

/// Groups approximate roots whose Gerschgorin-type inclusion disks overlap.
///
/// `coeff_err[k]` bounds the absolute error of `coeffs[k]`. Returns cluster
/// centroids with their sizes.
pub(crate) fn cluster_roots(
    coeffs: &[Complex],
    roots: &[Complex],
    coeff_err: &[f64],
    min_radius: f64,
    max_radius: f64,
) -> Vec<(Complex, u32)> {
    let n = roots.len();
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[coeffs.len() - 1].norm();
    let mut radii = vec![0.0; n];
    for i in 0..n {
        let r = roots[i].norm();
        let val = horner(coeffs, roots[i]).norm();
        let noise: f64 = coeff_err.iter().rev().fold(0.0, |acc, e| acc * r + e)
            + 4.0 * (n as f64 + 1.0) * EPS * horner_abs(coeffs, r);
        let mut log_den = lead.ln();
        for j in 0..n {
            if j != i {
                log_den += (roots[i] - roots[j]).norm().ln();
            }
        }
        let log_r = (n as f64).ln() + (val + noise).ln() - log_den;
        let rad = if log_r.is_nan() { max_radius } else { log_r.exp() };
        radii[i] = rad.clamp(min_radius, max_radius);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let next = p[k];
            p[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= radii[i] + radii[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex, u32)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += roots[i];
                g.2 += 1;
            }
            None => groups.push((root, roots[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, m)| (sum / m as f64, m))
        .collect()
}

/// Roots of a polynomial with exact coefficients, grouped by multiplicity.
pub fn roots_with_multiplicity(coeffs: &[Complex]) -> Vec<(Complex, u32)> {
    let found = aberth(coeffs);
    let scale = found.roots.iter().fold(0.0f64, |m, r| m.max(r.norm()));
    let err = vec![0.0; coeffs.len()];
    cluster_roots(coeffs, &found.roots, &err, 1e-9 * (1.0 + scale), 1e-2 * (1.0 + scale))
}

/// Cauchy bound `1 + max |c_k / c_n|` on the moduli of all roots.
pub fn cauchy_bound(coeffs: &[Complex]) -> f64 {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].norm();
    1.0 + coeffs[..n].iter().fold(0.0f64, |m, c| m.max(c.norm() / lead))
}
