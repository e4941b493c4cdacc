use serde::Serialize;
use thiserror::Error;

/// Errors raised by the evaluation, quadrature and recovery engines.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum Error {
    #[error("derivative order {order} is not supported (maximum is 6)")]
    UnsupportedDerivativeOrder { order: usize },

    #[error("Maclaurin coefficient of degree {degree} vanishes")]
    ZeroLeadingCoefficient { degree: usize },

    #[error("log-modulus is not representable at w = {re}{im:+}i")]
    EvaluationOverflow { re: f64, im: f64 },

    #[error("no safe radius within 5% of {requested}")]
    NoSafeRadius { requested: f64 },

    #[error("argument-principle count is ambiguous at radius {radius} (defect {defect:e})")]
    AmbiguousCount { radius: f64, defect: f64 },

    #[error("quadrature did not converge (estimated error {est_error:e})")]
    NotConverged { est_error: f64 },

    #[error("moments are inconsistent with the recovered points (deviation {deviation:e})")]
    InconsistentMoments { deviation: f64 },

    #[error("orbit point {index} is critical (|f'| = {derivative:e})")]
    CriticalOrbitPoint { index: usize, derivative: f64 },

    #[error("no radius in [{r_lo}, {r_hi}] satisfies the minimum-modulus inequality")]
    NoneFound { r_lo: f64, r_hi: f64 },

    #[error("orbit incomplete: found {found} of {expected} points")]
    OrbitIncomplete { found: usize, expected: usize },

    #[error("order {order} is not below 1")]
    OrderTooHigh { order: f64 },

    #[error("the product L is too close to 1 (|L - 1| = {distance:e})")]
    LNearOne { distance: f64 },

    #[error("closed form is singular near z = {re}{im:+}i")]
    NearPole { re: f64, im: f64 },

    #[error("branch tracking failed (integer defect {defect:e})")]
    BranchTrackingFailed { defect: f64 },

    #[error("invalid input: {message}")]
    InvalidInput { message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput { message: msg.into() })
}
