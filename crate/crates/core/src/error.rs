//! Error types shared across the library.

use thiserror::Error;

/// Library-wide error type.
///
/// `Domain` covers parameter-range violations caught at construction time.
/// `GridResolution` and `RateResolution` are numeric-configuration errors:
/// the grid (or time step) cannot resolve what the scenario asks for, and
/// the message names the violated ratio so the caller can fix the grid.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its valid range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sampled quantity does not fit on the grid it is paired with.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The grid cannot resolve the scenario; the violated ratio is named.
    #[error("grid resolution: {ratio} = {actual:.6e}, require {bound} {required:.6e}")]
    GridResolution {
        ratio: &'static str,
        bound: &'static str,
        actual: f64,
        required: f64,
    },

    /// Poisson bin-occupancy validity violated during event generation.
    #[error("rate resolution: max(mu)*dt = {actual:.6e} exceeds {limit:.2}")]
    RateResolution { actual: f64, limit: f64 },

    /// Semiclassical sampling requested for a state that violates the
    /// classical cross-spectrum bound.
    #[error(
        "semiclassical sampling invalid: state classified {label} \
         (classical-bound margin {margin:.3e} at omega = {omega:.6e} rad/s)"
    )]
    SemiclassicalGate {
        label: &'static str,
        margin: f64,
        omega: f64,
    },

    /// A per-bin synthesis covariance failed to factor (not positive
    /// semidefinite beyond numerical tolerance).
    #[error("covariance factorization failed at omega = {omega:.6e} rad/s (det = {det:.3e})")]
    Factorization { omega: f64, det: f64 },

    /// The requested closed form does not exist for this configuration.
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    /// Contrast is undefined because the accidentals level vanishes.
    #[error("degenerate source: accidentals level is zero")]
    DegenerateSource,

    /// No half-maximum crossing exists inside the reported window.
    #[error("width undefined: {0}")]
    WidthUndefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;
