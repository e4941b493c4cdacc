//! Numerical checks of identities that tie an entire function to its fibers.
//!
//! Each check computes its two sides along separate routes (series against
//! contour integrals, closed forms against the recovery engine) and returns an
//! [`IdentityReport`].

mod exponential;
mod product;
mod structure;
mod sums;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::Complex;

pub use exponential::{
    compute_shift_t_exp, g_closed_exp, verify_exp_g_closed_form, verify_negative_moment_g, verify_shift_homomorphism,
};
pub use product::{
    reconstruct_low_order, verify_jensen, verify_poly_vieta, verify_reconstruction_partial_sums,
    verify_vieta_coefficients, OrbitSource,
};
pub use structure::{
    folner_ratios, path_length, verify_cycle_chain, verify_fiber_stability, verify_fixed_points,
    verify_orbit_nesting, verify_path_invariance,
};
pub use sums::{contour_derivative_sum, verify_circular_density, verify_derivative_sums, verify_vanishing_sums};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    PolyVieta,
    VietaCoefficients,
    Jensen,
    DerivativeSums,
    VanishingSums,
    CircularDensity,
    FixedPoints,
    ReconstructionPartialSums,
    ReconstructLowOrder,
    ExpGClosedForm,
    NegativeMomentG,
    ShiftHomomorphism,
    CycleChain,
    OrbitNesting,
    FiberStability,
    PathInvariance,
    FolnerRatios,
}

/// How a report's verdict is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `abs_err <= tolerance`.
    Absolute,
    /// `rel_err <= tolerance`.
    Relative,
    /// `abs_err <= tolerance || rel_err <= tolerance`.
    Either,
    /// The error bound plus a monotonicity condition on `sequence`.
    Trend,
    /// The error bound plus discrete conditions described in `notes`.
    Structural,
    /// Only hard range assertions; the trend is descriptive.
    Diagnostic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub inputs: serde_json::Value,
    #[serde(with = "crate::serde_complex")]
    pub lhs: Complex,
    #[serde(with = "crate::serde_complex")]
    pub rhs: Complex,
    #[serde(with = "crate::serde_complex::float")]
    pub abs_err: f64,
    #[serde(with = "crate::serde_complex::float")]
    pub rel_err: f64,
    #[serde(with = "crate::serde_complex::decimal")]
    pub tolerance: f64,
    pub criterion: Criterion,
    pub pass: bool,
    pub notes: String,
    pub runtime_ms: f64,
    /// Per-radius or per-degree values behind the verdict, when there are any.
    #[serde(with = "crate::serde_complex::float::vec")]
    pub sequence: Vec<f64>,
}

fn relative(abs_err: f64, rhs: Complex) -> f64 {
    if abs_err == 0.0 {
        0.0
    } else {
        abs_err / rhs.norm()
    }
}

impl IdentityReport {
    /// A report judged by comparing `lhs` with `rhs`.
    pub(crate) fn compared(
        id: IdentityId,
        inputs: serde_json::Value,
        lhs: Complex,
        rhs: Complex,
        tolerance: f64,
        criterion: Criterion,
    ) -> Self {
        let abs_err = (lhs - rhs).norm();
        let rel_err = relative(abs_err, rhs);
        let pass = match criterion {
            Criterion::Absolute => abs_err <= tolerance,
            Criterion::Relative => rel_err <= tolerance,
            _ => abs_err <= tolerance || rel_err <= tolerance,
        };
        IdentityReport {
            identity_id: id,
            inputs,
            lhs,
            rhs,
            abs_err,
            rel_err,
            tolerance,
            criterion,
            pass,
            notes: String::new(),
            runtime_ms: 0.0,
            sequence: Vec::new(),
        }
    }

    /// A report whose verdict also depends on conditions beyond `abs_err`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn judged(
        id: IdentityId,
        inputs: serde_json::Value,
        lhs: Complex,
        rhs: Complex,
        abs_err: f64,
        tolerance: f64,
        criterion: Criterion,
        pass: bool,
    ) -> Self {
        IdentityReport {
            identity_id: id,
            inputs,
            lhs,
            rhs,
            abs_err,
            rel_err: relative(abs_err, rhs),
            tolerance,
            criterion,
            pass,
            notes: String::new(),
            runtime_ms: 0.0,
            sequence: Vec::new(),
        }
    }

    pub(crate) fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    pub(crate) fn with_sequence(mut self, sequence: Vec<f64>) -> Self {
        self.sequence = sequence;
        self
    }
}

/// Runs `body` and stamps the wall time on the report.
pub(crate) fn timed(body: impl FnOnce() -> Result<IdentityReport>) -> Result<IdentityReport> {
    let start = Instant::now();
    let mut report = body()?;
    report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// The convergence-factor polynomial `Q_λ(u) = u + u²/2 + ... + u^λ/λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QLambda {
    pub lambda: u32,
}

impl QLambda {
    pub fn new(lambda: u32) -> Self {
        QLambda { lambda }
    }

    pub fn eval(&self, u: Complex) -> Complex {
        let mut power = Complex::new(1.0, 0.0);
        let mut sum = Complex::new(0.0, 0.0);
        for j in 1..=self.lambda {
            power *= u;
            sum += power / j as f64;
        }
        sum
    }

    /// `Q_λ'(u) = 1 + u + ... + u^(λ-1)`.
    pub fn derivative(&self, u: Complex) -> Complex {
        let mut power = Complex::new(1.0, 0.0);
        let mut sum = Complex::new(0.0, 0.0);
        for _ in 0..self.lambda {
            sum += power;
            power *= u;
        }
        sum
    }

    /// The Weierstrass factor `(1 - u) exp(Q_λ(u))`.
    pub fn factor(&self, u: Complex) -> Complex {
        (Complex::new(1.0, 0.0) - u) * self.eval(u).exp()
    }
}

/// `{"re": .., "im": ..}`, for report inputs.
pub(crate) fn cjson(z: Complex) -> serde_json::Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

#[cfg(test)]
mod tests;
