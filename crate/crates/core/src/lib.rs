//! Simulation engine for nonlocal dispersion cancellation with jointly
//! Gaussian signal/reference light.
//!
//! The library propagates phase-sensitive correlation spectra through
//! dispersive filter pairs, computes ensemble-average photocurrent
//! cross-correlations analytically and by semiclassical Monte Carlo, and
//! classifies joint states against the quantum and classical bounds on
//! the phase-sensitive cross spectrum.
//!
//! Modules:
//! - [`grid`]: sampling domains and the discrete transform pair
//! - [`spectra`]: source families, correlation traces, bound classification
//! - [`filters`]: dispersive elements and detector response
//! - [`analytic`]: C(tau) closed forms, numeric path, contrasts, sweeps
//! - [`montecarlo`]: field synthesis, Poisson detection, C(tau) estimation

pub mod analytic;
pub mod error;
pub mod filters;
pub mod grid;
pub mod montecarlo;
pub mod scenario;
pub mod spectra;

pub use analytic::{
    closed_form_gaussian, closed_form_rect_noise, contrast, contrast_rect, critical_gain,
    cross_correlation, dispersion_sweep, gain_sweep, high_brightness_delta, signature_width,
    CrossCorrResult, DispersionSweepRow, GainSweepRow, SweepTable,
};
pub use error::{Error, Result};
pub use filters::{
    detector_rgg, filter_response, propagate_spectra, Detector, DetectorResponse, DispersiveFilter,
    FilterPair, Rgg,
};
pub use grid::SpectralGrid;
pub use montecarlo::{
    apply_filter, detect, estimate_c, mc_run, photocurrent, synthesize_fields, trial_rng,
    DetectorArm, EventTrain, FieldRealization, MCConfig, MCEstimate, McRunInfo,
};
pub use scenario::Scenario;
pub use spectra::{
    classify_state, correlation_to_spectrum, eval_gaussian_source, eval_rect_noise_source,
    eval_sinc_source, spectrum_to_correlation, CorrelationKind, CorrelationTrace, GaussianKind,
    JointGaussianSource, SampledSpectra, SpectraTable, SpectralDensities, StateClass, StateLabel,
    DEFAULT_CLASSIFY_TOL,
};
