//! Pulse-response analysis for the one-dimensional reaction-advection-diffusion
//! (RAD) equation
//!
//! ```text
//! c_t = D c_xx - v c_x - k c,   0 <= x <= L,
//! v c - D c_x = 0 at x = 0,     c = 0 at x = L,
//! ```
//!
//! driven by a narrow pulse of `a` units of gas injected at `x0`.
//!
//! The analytic side of the crate ([`eigen`], [`series`], [`signatures`]) is
//! generic over the floating point type through [`Scalar`]; `f64` aliases are
//! exported at the crate root for the common case. The data-facing modules
//! ([`curve`], [`kinetics`], [`oracles`]) work in `f64`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod eigen;
pub mod error;
pub mod kinetics;
pub mod oracles;
pub mod params;
pub mod quad;
pub mod scalar;
pub mod series;
pub mod signatures;

pub use curve::{Curve, CurveKind, CurveMeta};
pub use error::{RadError, Result};
pub use scalar::{CompensatedSum, Scalar};

/// Eigenbasis in double precision.
pub type EigenBasis = eigen::EigenBasis<f64>;
/// Péclet number in double precision.
pub type PecletNumber = eigen::PecletNumber<f64>;
/// Physical parameters in double precision.
pub type ModelParams = params::ModelParams<f64>;
/// Series truncation settings in double precision.
pub type Truncation = params::Truncation<f64>;
/// Peak characteristic in double precision.
pub type PeakResult = signatures::PeakResult<f64>;
/// Signature set in double precision.
pub type SignatureSet = signatures::SignatureSet<f64>;

/// Single precision variants, mostly useful for cheap sweeps.
pub mod f32 {
    pub type EigenBasis = crate::eigen::EigenBasis<f32>;
    pub type PecletNumber = crate::eigen::PecletNumber<f32>;
    pub type ModelParams = crate::params::ModelParams<f32>;
    pub type Truncation = crate::params::Truncation<f32>;
}
