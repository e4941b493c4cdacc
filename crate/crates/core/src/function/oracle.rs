use super::{EntireFunction, Family, TWO_PI};
use crate::poly::{horner, roots_with_multiplicity};
use crate::Complex;

/// Merges points closer than `1e-9 (1 + |p|)` and keeps those with `|p| < radius`.
fn collect(points: impl IntoIterator<Item = (Complex, u32)>, radius: f64) -> Vec<(Complex, u32)> {
    let mut inside: Vec<(Complex, u32)> = points.into_iter().filter(|(p, _)| p.norm() < radius).collect();
    inside.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()));
    let mut out: Vec<(Complex, u32)> = Vec::new();
    for (p, m) in inside {
        let tol = 1e-9 * (1.0 + p.norm());
        // only entries with nearly the same modulus can coincide
        let twin = out
            .iter_mut()
            .rev()
            .take_while(|(q, _)| p.norm() - q.norm() <= tol)
            .find(|(q, _)| (q - p).norm() <= tol);
        match twin {
            Some(entry) => entry.1 += m,
            None => out.push((p, m)),
        }
    }
    out
}

/// Integers `k` with `|a + 2πi k| < radius`-style bounds: all k with `|k| ≤ K`.
fn k_range(radius: f64, offset: f64) -> std::ops::RangeInclusive<i64> {
    let kmax = ((radius + offset.abs()) / TWO_PI).ceil() as i64 + 1;
    -kmax..=kmax
}

pub(super) fn orbit_oracle(f: &EntireFunction, z: Complex, radius: f64) -> Option<Vec<(Complex, u32)>> {
    let pts = match &f.family {
        Family::Monomial(n) => {
            if z.norm() == 0.0 {
                vec![(z, *n)]
            } else {
                (0..*n)
                    .map(|k| (z * Complex::from_polar(1.0, TWO_PI * k as f64 / *n as f64), 1))
                    .collect()
            }
        }
        Family::QuadraticZZ => vec![(z, 1), (-z - 1.0, 1)],
        Family::GeneralPolynomial(_) => {
            let mut c = f.polynomial_coeffs()?;
            let fz = horner(&c, z);
            c[0] -= fz;
            roots_with_multiplicity(&c)
        }
        Family::Exp => k_range(radius, z.im)
            .map(|k| (z + Complex::new(0.0, TWO_PI * k as f64), 1))
            .collect(),
        Family::CosSqrt => {
            let s = z.sqrt();
            k_range(radius.sqrt(), s.norm())
                .map(|k| {
                    let t = s + TWO_PI * k as f64;
                    (t * t, 1)
                })
                .collect()
        }
        _ => return None,
    };
    Some(collect(pts, radius))
}
