//! Fibers of entire functions.
//!
//! For an entire function `f` and a point `z`, the fiber `{w : f(w) = f(z)}`
//! is the orbit of `z` under the automorphic group of `f`. This crate recovers
//! the part of the orbit inside a disk from contour-integral moments and checks
//! a collection of identities relating the orbit to `f`.

pub mod contour;
pub mod error;
pub mod function;
pub mod identities;
pub mod orbit;
pub mod poly;
pub mod serde_complex;
mod taylor;

pub use num_complex::Complex64 as Complex;

pub use contour::{circle_integral, safe_radius, ContourConfig, QuadratureResult};
pub use error::{Error, Result};
pub use function::{estimate_order, modulus_extrema, Analytic, EntireFunction, Family, OrderEstimate};
pub use identities::{IdentityId, IdentityReport};
pub use orbit::{MomentVector, OrbitPoint, OrbitSample};
