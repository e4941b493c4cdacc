use super::{Analytic, EntireFunction, TWO_PI};
use crate::error::{invalid, Error, Result};
use crate::Complex;

const GRID: usize = 1024;
const ANGLE_RESOLUTION: f64 = 1e-8;
const REFINED_EXTREMA: usize = 3;

fn log_abs(f: &EntireFunction, r: f64, theta: f64) -> Result<f64> {
    let w = Complex::from_polar(r, theta);
    let e = f.expand(w, 0)?;
    let v = e.taylor[0].norm().ln() + e.log_scale;
    if v.is_nan() || v == f64::INFINITY {
        Err(Error::EvaluationOverflow { re: w.re, im: w.im })
    } else {
        Ok(v)
    }
}

/// Golden-section search for a minimum of `g` on `[a, b]`.
fn golden_min(g: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    while (b - a).abs() > ANGLE_RESOLUTION {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d)?;
        }
    }
    Ok(if gc < gd { (c, gc) } else { (d, gd) })
}

/// Indices of the `count` most extreme strict local minima of a periodic sequence.
fn local_minima(values: &[f64], count: usize) -> Vec<usize> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            values[i] <= prev && values[i] <= next
        })
        .collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx.truncate(count);
    idx
}

/// `(log m_f(r), log M_f(r))`, the logarithms of the minimum and maximum of
/// `|f|` on the circle `|w| = r`.
pub fn modulus_extrema(f: &EntireFunction, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid("radius must be positive");
    }
    let step = TWO_PI / GRID as f64;
    let values = (0..GRID)
        .map(|j| log_abs(f, r, step * j as f64))
        .collect::<Result<Vec<f64>>>()?;

    let mut log_m = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut log_big_m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let lower = |t: f64| log_abs(f, r, t);
    for i in local_minima(&values, REFINED_EXTREMA) {
        let t = step * i as f64;
        let (_, v) = golden_min(&lower, t - step, t + step)?;
        log_m = log_m.min(v);
    }
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    let upper = |t: f64| log_abs(f, r, t).map(|v| -v);
    for i in local_minima(&negated, REFINED_EXTREMA) {
        let t = step * i as f64;
        let (_, v) = golden_min(&upper, t - step, t + step)?;
        log_big_m = log_big_m.max(-v);
    }
    Ok((log_m, log_big_m))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OrderEstimate {
    pub rho: f64,
    /// Set when the fit is meaningless: polynomials, or `log log M` not
    /// increasing across the grid. `rho` is 0 in that case.
    pub degenerate: bool,
}

/// Least-squares slope of `x -> y`.
pub(crate) fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Order of growth from the slope of `log log M_f(r)` against `log r`.
pub fn estimate_order(f: &EntireFunction, r_grid: &[f64]) -> Result<OrderEstimate> {
    if r_grid.len() < 4 {
        return invalid("order estimation needs at least 4 radii");
    }
    if r_grid.windows(2).any(|p| !(p[1] > p[0])) || r_grid[0] <= 0.0 {
        return invalid("radius grid must be positive and increasing");
    }
    if (r_grid[r_grid.len() - 1] / r_grid[0]).log10() < 3.0 - 1e-9 {
        return invalid("radius grid must span at least 3 decades");
    }
    let degenerate = OrderEstimate { rho: 0.0, degenerate: true };
    if f.is_polynomial() {
        return Ok(degenerate);
    }
    let mut lm = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        lm.push(modulus_extrema(f, r)?.1);
    }
    if lm.iter().any(|v| *v <= 0.0) || lm.windows(2).any(|p| p[1] <= p[0]) {
        return Ok(degenerate);
    }
    let x: Vec<f64> = r_grid.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = lm.iter().map(|v| v.ln()).collect();
    let rho = ls_slope(&x, &y);
    if rho.is_finite() && rho > 0.0 {
        Ok(OrderEstimate { rho, degenerate: false })
    } else {
        Ok(degenerate)
    }
}
