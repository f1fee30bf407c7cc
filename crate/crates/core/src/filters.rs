//! Dispersive elements and detector response.
//!
//! Each arm carries a lossless filter with frequency response
//! `H(omega) = e^{i omega0 tau_p} e^{-i (omega tau_g + omega^2 beta)}`.
//! Propagation through the pair leaves the auto-spectra untouched
//! (`|H|^2 = 1`) and multiplies the cross spectrum by
//! `H_S(-omega) * H_R(omega)`, so a balanced pair
//! (`beta_S = -beta_R`, equal delays) preserves the cross correlation up
//! to a constant unit-modulus phase. That is the module-level statement
//! of nonlocal dispersion cancellation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpectralGrid;
use crate::spectra::SampledSpectra;

/// A lossless quadratic-phase filter in one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveFilter {
    /// Phase delay tau_p (s).
    pub phase_delay: f64,
    /// Group delay tau_g (s).
    pub group_delay: f64,
    /// Dispersion coefficient beta (s^2).
    pub dispersion: f64,
    /// Optical center frequency omega_0 (rad/s); shared by both arms.
    pub center_frequency: f64,
}

impl DispersiveFilter {
    pub fn new(phase_delay: f64, group_delay: f64, dispersion: f64, center_frequency: f64) -> Result<Self> {
        for (name, v) in [
            ("tau_p", phase_delay),
            ("tau_g", group_delay),
            ("beta", dispersion),
            ("omega0", center_frequency),
        ] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite (got {v})")));
            }
        }
        Ok(Self {
            phase_delay,
            group_delay,
            dispersion,
            center_frequency,
        })
    }

    /// The identity element (all delays and dispersion zero).
    pub fn identity() -> Self {
        Self {
            phase_delay: 0.0,
            group_delay: 0.0,
            dispersion: 0.0,
            center_frequency: 0.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.phase_delay == 0.0 && self.group_delay == 0.0 && self.dispersion == 0.0
    }
}

/// `H(omega) = e^{i omega0 tau_p} e^{-i (omega tau_g + omega^2 beta)}`.
pub fn filter_response(f: &DispersiveFilter, omega: f64) -> Complex64 {
    let constant = Complex64::from_polar(1.0, f.center_frequency * f.phase_delay);
    let dispersive = Complex64::from_polar(1.0, -(omega * f.group_delay + omega * omega * f.dispersion));
    constant * dispersive
}

/// The two arms of the correlator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterPair {
    pub signal: DispersiveFilter,
    pub reference: DispersiveFilter,
}

impl FilterPair {
    /// Both arms must share the scenario's center frequency.
    pub fn new(signal: DispersiveFilter, reference: DispersiveFilter) -> Result<Self> {
        if signal.center_frequency != reference.center_frequency {
            return Err(Error::Domain(format!(
                "omega0 must match across arms (signal {}, reference {})",
                signal.center_frequency, reference.center_frequency
            )));
        }
        Ok(Self { signal, reference })
    }

    /// The canonical balanced configuration: `beta_S = beta`,
    /// `beta_R = -beta`, equal (zero) delays.
    pub fn balanced(beta: f64, center_frequency: f64) -> Result<Self> {
        Self::new(
            DispersiveFilter::new(0.0, 0.0, beta, center_frequency)?,
            DispersiveFilter::new(0.0, 0.0, -beta, center_frequency)?,
        )
    }

    pub fn identity() -> Self {
        Self {
            signal: DispersiveFilter::identity(),
            reference: DispersiveFilter::identity(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.signal.is_identity() && self.reference.is_identity()
    }
}

/// Propagate the three spectra through the filter pair.
///
/// Auto-spectra pass through unchanged (the filters are lossless); the
/// cross spectrum is multiplied bin by bin by the literal product
/// `H_S(-omega_k) * H_R(omega_k)`.
pub fn propagate_spectra(spectra: &SampledSpectra, pair: &FilterPair) -> SampledSpectra {
    let grid = &spectra.grid;
    let s_sr = spectra
        .s_sr
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let omega = grid.omega(k);
            v * filter_response(&pair.signal, -omega) * filter_response(&pair.reference, omega)
        })
        .collect();
    SampledSpectra {
        grid: *grid,
        s_ss: spectra.s_ss.clone(),
        s_rr: spectra.s_rr.clone(),
        s_sr,
    }
}

/// Detector baseband impulse response model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DetectorResponse {
    /// Delta-function response: convolution with `R_gg` is the identity.
    Ideal,
    /// `g(t) = e^{-t^2/Tg^2} / sqrt(pi Tg^2)` (non-causal, unit area).
    Gaussian {
        /// Response time Tg (s).
        response_time: f64,
    },
}

/// Photodetector model: quantum efficiency, impulse response, charge scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    /// Quantum efficiency in (0, 1].
    pub eta: f64,
    pub response: DetectorResponse,
    /// Charge per detection event; rescales C(tau) by q^2 only.
    pub charge: f64,
}

impl Detector {
    pub fn new(eta: f64, response: DetectorResponse, charge: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Domain(format!("eta must lie in (0, 1] (got {eta})")));
        }
        if let DetectorResponse::Gaussian { response_time } = response {
            if !(response_time > 0.0) || !response_time.is_finite() {
                return Err(Error::Domain(format!(
                    "Tg must be positive (got {response_time})"
                )));
            }
        }
        if !(charge > 0.0) || !charge.is_finite() {
            return Err(Error::Domain(format!("q must be positive (got {charge})")));
        }
        Ok(Self { eta, response, charge })
    }

    /// Ideal detector with unit efficiency and unit charge.
    pub fn ideal() -> Self {
        Self {
            eta: 1.0,
            response: DetectorResponse::Ideal,
            charge: 1.0,
        }
    }

    /// Response time, zero for the ideal detector.
    pub fn response_time(&self) -> f64 {
        match self.response {
            DetectorResponse::Ideal => 0.0,
            DetectorResponse::Gaussian { response_time } => response_time,
        }
    }

    /// `g(t)` sampled at one instant (gaussian response only).
    pub fn impulse_response(&self, t: f64) -> f64 {
        match self.response {
            DetectorResponse::Ideal => panic!("ideal detector has no sampled impulse response"),
            DetectorResponse::Gaussian { response_time } => {
                let tg2 = response_time * response_time;
                (-t * t / tg2).exp() / (std::f64::consts::PI * tg2).sqrt()
            }
        }
    }
}

/// The autocorrelation integral of the detector impulse response,
/// `R_gg(tau) = Integral dt g(t + tau) g(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Rgg {
    /// Flagged delta: convolution with it is the identity.
    Identity,
    /// `R_gg(tau) = e^{-tau^2 / 2 Tg^2} / sqrt(2 pi Tg^2)` sampled on the
    /// grid in storage order.
    Trace(Vec<f64>),
}

/// Sample `R_gg` for a detector on a grid. A gaussian response must be
/// resolvable: `dt <= Tg / 8`.
pub fn detector_rgg(det: &Detector, grid: &SpectralGrid) -> Result<Rgg> {
    match det.response {
        DetectorResponse::Ideal => Ok(Rgg::Identity),
        DetectorResponse::Gaussian { response_time } => {
            let ratio = response_time / grid.dt();
            if ratio < 8.0 {
                return Err(Error::GridResolution {
                    ratio: "Tg/dt",
                    bound: ">=",
                    actual: ratio,
                    required: 8.0,
                });
            }
            let tg2 = response_time * response_time;
            let norm = 1.0 / (2.0 * std::f64::consts::PI * tg2).sqrt();
            Ok(Rgg::Trace(
                (0..grid.len())
                    .map(|j| {
                        let tau = grid.tau(j);
                        norm * (-tau * tau / (2.0 * tg2)).exp()
                    })
                    .collect(),
            ))
        }
    }
}
