//! Entire functions: closed-form families and truncated power series.

mod expand;
mod growth;
mod oracle;

pub use growth::{estimate_order, modulus_extrema, OrderEstimate};
pub(crate) use growth::ls_slope;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::taylor::factorial;
use crate::Complex;

/// Highest derivative order exposed through [`EntireFunction::eval_kderiv`].
pub const MAX_DERIVATIVE_ORDER: usize = 6;

/// Taylor coefficients of a function at a point, stored with a common scale:
/// `f^(j)(w) / j! = taylor[j] * exp(log_scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalExpansion {
    pub taylor: Vec<Complex>,
    pub log_scale: f64,
}

impl LocalExpansion {
    pub(crate) fn unscaled(taylor: Vec<Complex>) -> Self {
        LocalExpansion { taylor, log_scale: 0.0 }
    }

    /// `f^(k)(w)` without scaling; may overflow to infinity.
    pub fn derivative(&self, k: usize) -> Complex {
        self.taylor[k] * factorial(k) * self.log_scale.exp()
    }

    /// `f^(k)(w) * exp(-log_scale)`.
    pub fn scaled_derivative(&self, k: usize) -> Complex {
        self.taylor[k] * factorial(k)
    }

    /// `f(w) - target`, scaled by `exp(-log_scale)`.
    pub fn scaled_offset(&self, target: Complex) -> Complex {
        self.taylor[0] - scale_by(target, (-self.log_scale).exp())
    }

    /// `f'(w) / (f(w) - target)`, formed without leaving the scaled range.
    pub fn log_derivative(&self, target: Complex) -> Complex {
        if self.log_scale >= 0.0 {
            self.taylor[1] / self.scaled_offset(target)
        } else {
            let k = self.log_scale.exp();
            scale_by(self.taylor[1], k) / (scale_by(self.taylor[0], k) - target)
        }
    }

    /// `1 / (f(w) - target)`; underflows to zero rather than overflowing.
    pub fn inv_offset(&self, target: Complex) -> Complex {
        if self.log_scale >= 0.0 {
            scale_by(self.scaled_offset(target).inv(), (-self.log_scale).exp())
        } else {
            (scale_by(self.taylor[0], self.log_scale.exp()) - target).inv()
        }
    }

    /// `log |f(w) - target|`.
    pub fn log_abs_offset(&self, target: Complex) -> f64 {
        self.scaled_offset(target).norm().ln() + self.log_scale
    }
}

/// `c * k` that keeps exact zeros when `k` is infinite.
fn scale_by(c: Complex, k: f64) -> Complex {
    let mul = |x: f64| if x == 0.0 { 0.0 } else { x * k };
    Complex::new(mul(c.re), mul(c.im))
}

/// Anything whose Taylor expansion can be computed at arbitrary points.
pub trait Analytic: Sync {
    fn expand(&self, w: Complex, order: usize) -> Result<LocalExpansion>;
}

/// The closed-form families supported by the library.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", content = "params")]
pub enum Family {
    /// `w^N`
    Monomial(u32),
    /// `w^2 + w`
    QuadraticZZ,
    /// Ascending coefficients.
    GeneralPolynomial(#[serde(with = "crate::serde_complex::vec")] Vec<Complex>),
    Exp,
    /// `cos(sqrt(w))`
    CosSqrt,
    /// `(cos(w^(1/4)) + cosh(w^(1/4))) / 2`
    QuarterOrder,
    /// `p(w) * exp(g(w))` with polynomial `p`, `g`.
    PolyTimesExp {
        #[serde(with = "crate::serde_complex::vec")]
        p: Vec<Complex>,
        #[serde(with = "crate::serde_complex::vec")]
        g: Vec<Complex>,
    },
    /// `c * exp(w) + w`
    NgFactor(#[serde(with = "crate::serde_complex")] Complex),
    /// `f_n ∘ ... ∘ f_1`, the first element is applied first.
    CompositionTower(Vec<EntireFunction>),
    TruncatedSeries(#[serde(with = "crate::serde_complex::vec")] Vec<Complex>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntireFunction {
    pub name: String,
    pub family: Family,
}

fn trim_poly(coeffs: &[Complex]) -> Vec<Complex> {
    let mut v = coeffs.to_vec();
    while v.len() > 1 && v[v.len() - 1] == Complex::new(0.0, 0.0) {
        v.pop();
    }
    v
}

impl EntireFunction {
    pub fn exp() -> Self {
        EntireFunction { name: "exp".into(), family: Family::Exp }
    }

    pub fn cos_sqrt() -> Self {
        EntireFunction { name: "cossqrt".into(), family: Family::CosSqrt }
    }

    pub fn quarter_order() -> Self {
        EntireFunction { name: "quarter".into(), family: Family::QuarterOrder }
    }

    pub fn monomial(n: u32) -> Self {
        assert!(n >= 1, "monomial degree must be positive");
        EntireFunction { name: format!("monomial{n}"), family: Family::Monomial(n) }
    }

    pub fn quadratic_zz() -> Self {
        EntireFunction { name: "quadzz".into(), family: Family::QuadraticZZ }
    }

    /// A polynomial from ascending coefficients; trailing zeros are dropped.
    pub fn polynomial(coeffs: &[Complex]) -> Result<Self> {
        let c = trim_poly(coeffs);
        if c.len() < 2 {
            return invalid("polynomial must have degree at least 1");
        }
        if c.iter().any(|x| !x.is_finite()) {
            return invalid("polynomial coefficients must be finite");
        }
        Ok(EntireFunction { name: "poly".into(), family: Family::GeneralPolynomial(c) })
    }

    pub fn poly_times_exp(p: &[Complex], g: &[Complex]) -> Result<Self> {
        let p = trim_poly(p);
        let g = trim_poly(g);
        if p.iter().all(|c| c.norm() == 0.0) {
            return invalid("p must be nonzero");
        }
        Ok(EntireFunction { name: "polyexp".into(), family: Family::PolyTimesExp { p, g } })
    }

    pub fn ng_factor(c: Complex) -> Self {
        EntireFunction { name: "ngfactor".into(), family: Family::NgFactor(c) }
    }

    /// `layers[n-1] ∘ ... ∘ layers[0]`.
    pub fn compose(layers: Vec<EntireFunction>) -> Result<Self> {
        if layers.is_empty() {
            return invalid("composition needs at least one layer");
        }
        let name = layers.iter().rev().map(|f| f.name.as_str()).collect::<Vec<_>>().join("∘");
        Ok(EntireFunction { name, family: Family::CompositionTower(layers) })
    }

    pub fn truncated_series(coeffs: &[Complex]) -> Result<Self> {
        let c = trim_poly(coeffs);
        if c.len() < 2 {
            return invalid("series must have degree at least 1");
        }
        Ok(EntireFunction { name: "series".into(), family: Family::TruncatedSeries(c) })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Polynomial coefficients when the function is a polynomial.
    pub fn polynomial_coeffs(&self) -> Option<Vec<Complex>> {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        match &self.family {
            Family::Monomial(n) => {
                let mut c = vec![zero; *n as usize + 1];
                c[*n as usize] = one;
                Some(c)
            }
            Family::QuadraticZZ => Some(vec![zero, one, one]),
            Family::GeneralPolynomial(c) | Family::TruncatedSeries(c) => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        match &self.family {
            Family::PolyTimesExp { g, .. } => g.len() <= 1,
            Family::CompositionTower(layers) => layers.iter().all(|f| f.is_polynomial()),
            _ => self.polynomial_coeffs().is_some(),
        }
    }

    /// Degree, when the function is a polynomial.
    pub fn degree(&self) -> Option<usize> {
        match &self.family {
            Family::PolyTimesExp { p, g } if g.len() <= 1 => Some(p.len() - 1),
            Family::CompositionTower(layers) => {
                layers.iter().try_fold(1usize, |acc, f| f.degree().map(|d| acc * d))
            }
            _ => self.polynomial_coeffs().map(|c| c.len() - 1),
        }
    }

    /// Order of growth when it is known in closed form.
    pub fn known_order(&self) -> Option<f64> {
        match &self.family {
            Family::Exp | Family::NgFactor(_) => Some(1.0),
            Family::CosSqrt => Some(0.5),
            Family::QuarterOrder => Some(0.25),
            Family::PolyTimesExp { g, .. } => Some((g.len() - 1) as f64),
            Family::CompositionTower(_) => {
                if self.is_polynomial() {
                    Some(0.0)
                } else {
                    None
                }
            }
            _ => Some(0.0),
        }
    }

    /// Uniform genus of the Weierstrass factors of `f(w) - f(z)`.
    pub fn genus_lambda(&self) -> Option<u32> {
        let rho = self.known_order()?;
        if rho.fract() == 0.0 {
            Some(rho as u32)
        } else {
            Some(rho.floor() as u32)
        }
    }

    fn check_finite(w: Complex) -> Result<()> {
        if w.is_finite() {
            Ok(())
        } else {
            invalid("argument must be finite")
        }
    }

    /// `f^(k)(w)` from the family's closed form.
    pub fn eval_kderiv(&self, w: Complex, k: usize) -> Result<Complex> {
        if k > MAX_DERIVATIVE_ORDER {
            return Err(Error::UnsupportedDerivativeOrder { order: k });
        }
        Self::check_finite(w)?;
        let e = self.expand(w, k)?;
        let v = e.derivative(k);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::EvaluationOverflow { re: w.re, im: w.im })
        }
    }

    pub fn eval(&self, w: Complex) -> Result<Complex> {
        self.eval_kderiv(w, 0)
    }

    /// The first `count` Maclaurin coefficients `a_0..a_{count-1}`.
    pub fn maclaurin(&self, count: usize) -> Vec<Complex> {
        expand::maclaurin(self, count)
    }

    /// Whether [`maclaurin`](Self::maclaurin) is generated from exact formulas.
    pub fn has_exact_coefficients(&self) -> bool {
        !matches!(self.family, Family::CompositionTower(_))
    }

    /// The degree-`n` partial sum of the Maclaurin series.
    pub fn partial_sum(&self, n: usize) -> Result<EntireFunction> {
        if n == 0 {
            return invalid("partial sum degree must be positive");
        }
        let coeffs = self.maclaurin(n + 1);
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let lead = coeffs[n].norm();
        let negligible = if self.has_exact_coefficients() { 0.0 } else { 1e-13 * scale };
        if lead <= negligible {
            return Err(Error::ZeroLeadingCoefficient { degree: n });
        }
        Ok(EntireFunction {
            name: format!("{}_partial{}", self.name, n),
            family: Family::GeneralPolynomial(coeffs),
        })
    }

    /// Closed-form orbit `{w : f(w) = f(z), |w| < radius}` with multiplicities,
    /// for the families that admit one.
    pub fn orbit_oracle(&self, z: Complex, radius: f64) -> Option<Vec<(Complex, u32)>> {
        oracle::orbit_oracle(self, z, radius)
    }
}

impl Analytic for EntireFunction {
    fn expand(&self, w: Complex, order: usize) -> Result<LocalExpansion> {
        expand::expand(self, w, order)
    }
}

/// The `m`-th derivative of a function, seen as an analytic function itself.
pub struct Derivative<'a, F: Analytic + ?Sized> {
    pub inner: &'a F,
    pub m: usize,
}

impl<F: Analytic + ?Sized> Analytic for Derivative<'_, F> {
    fn expand(&self, w: Complex, order: usize) -> Result<LocalExpansion> {
        let e = self.inner.expand(w, order + self.m)?;
        let taylor = (0..=order)
            .map(|j| {
                // f^(m+j)/j! = taylor[m+j] (m+j)!/j!
                let falling = ((j + 1)..=(j + self.m)).fold(1.0, |a, k| a * k as f64);
                e.taylor[j + self.m] * falling
            })
            .collect();
        Ok(LocalExpansion { taylor, log_scale: e.log_scale })
    }
}

pub(crate) const TWO_PI: f64 = 2.0 * PI;
