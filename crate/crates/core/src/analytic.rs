//! Ensemble-average photocurrent cross-correlations: the numeric FFT
//! path, the Gaussian-family and additive-noise closed forms, contrast
//! and width measurements, and parameter sweeps.
//!
//! The central quantity is
//!
//! ```text
//! C(tau) = q^2 eta^2 [ K_SS(0) K_RR(0) + (|K_SR|^2 * R_gg)(tau) ]
//! ```
//!
//! with the first term the accidental-coincidence background `C_acc` and
//! the second the dispersion-cancelled signature `C_dc(tau)`. Contrast is
//! `max_tau C_dc(tau) / C_acc`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{detector_rgg, propagate_spectra, Detector, DetectorResponse, FilterPair, Rgg};
use crate::grid::{self, SpectralGrid};
use crate::scenario::Scenario;
use crate::spectra::{
    classify_state, spectrum_to_correlation, CorrelationKind, GaussianKind, JointGaussianSource,
    StateClass, StateLabel, DEFAULT_CLASSIFY_TOL,
};

/// A photocurrent cross-correlation over the reported window
/// `tau in [-T/4, T/4]` (the outer quarters absorb circular-convolution
/// wraparound and are not reported).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCorrResult {
    pub grid: SpectralGrid,
    /// Lags in ascending order.
    pub taus: Vec<f64>,
    /// `C(tau) = C_acc + C_dc(tau)`.
    pub c: Vec<f64>,
    /// Accidental-coincidence level, computed from `K(0)` values rather
    /// than read off the trace tails.
    pub c_acc: f64,
    /// Dispersion-cancelled signature term.
    pub c_dc: Vec<f64>,
    /// Echo of the scenario that produced this result.
    pub meta: ResultMeta,
}

/// Provenance echo attached to every result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMeta {
    pub source: String,
    pub detector: String,
    pub route: String,
}

fn detector_label(det: &Detector) -> String {
    match det.response {
        DetectorResponse::Ideal => format!("ideal (eta {}, q {})", det.eta, det.charge),
        DetectorResponse::Gaussian { response_time } => format!(
            "gaussian Tg {:.3e} s (eta {}, q {})",
            response_time, det.eta, det.charge
        ),
    }
}

/// Numeric path: propagate the sampled spectra through the pair, transform
/// the cross spectrum, and convolve its squared modulus with `R_gg`.
pub fn cross_correlation(scenario: &Scenario) -> Result<CrossCorrResult> {
    scenario.check_grid_adequacy()?;
    let g = scenario.grid;
    let det = &scenario.detector;

    let input = scenario.source.sample(&g);
    let output = propagate_spectra(&input, &scenario.pair);

    // K(0) = (1/(n dt)) sum_k S(omega_k)
    let norm = 1.0 / (g.len() as f64 * g.dt());
    let k_ss0: f64 = output.s_ss.iter().sum::<f64>() * norm;
    let k_rr0: f64 = output.s_rr.iter().sum::<f64>() * norm;

    let k_sr = spectrum_to_correlation(&g, &output.s_sr, CorrelationKind::CrossPhaseSensitive)?;
    let k_sq: Vec<f64> = k_sr.values.iter().map(|v| v.norm_sqr()).collect();

    let signature = match detector_rgg(det, &g)? {
        Rgg::Identity => k_sq,
        Rgg::Trace(rgg) => grid::circular_convolve(&g, &k_sq, &rgg),
    };

    let scale = det.charge * det.charge * det.eta * det.eta;
    let c_acc = scale * k_ss0 * k_rr0;
    let idx = g.report_indices();
    let taus: Vec<f64> = idx.iter().map(|&j| g.tau(j)).collect();
    let c_dc: Vec<f64> = idx.iter().map(|&j| scale * signature[j]).collect();
    let c: Vec<f64> = c_dc.iter().map(|v| c_acc + v).collect();

    Ok(CrossCorrResult {
        grid: g,
        taus,
        c,
        c_acc,
        c_dc,
        meta: ResultMeta {
            source: scenario.source.family_name().to_string(),
            detector: detector_label(det),
            route: "fft".into(),
        },
    })
}

/// Gaussian-family closed form evaluated on the grid's reported window.
///
/// ```text
/// C_c(tau) = q^2 eta^2 P^2 (1 + e^{-tau^2/(T0^2 + 2 Tg^2)} / sqrt(1 + 2 Tg^2/T0^2))
/// C_q(tau) = C_c(tau) + q^2 eta^2 P e^{-2 tau^2/(T0^2 + 4 Tg^2)} / sqrt(pi (T0^2/2 + 2 Tg^2))
/// ```
///
/// The ideal detector sets `Tg = 0`.
pub fn closed_form_gaussian(
    flux: f64,
    coherence_time: f64,
    response: DetectorResponse,
    kind: GaussianKind,
    charge: f64,
    eta: f64,
    grid: &SpectralGrid,
) -> Result<CrossCorrResult> {
    if !(flux > 0.0) || !(coherence_time > 0.0) {
        return Err(Error::Domain("P and T0 must be positive".into()));
    }
    if !(charge > 0.0) || !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain("q must be positive and eta in (0, 1]".into()));
    }
    let tg = match response {
        DetectorResponse::Ideal => 0.0,
        DetectorResponse::Gaussian { response_time } => {
            if !(response_time > 0.0) {
                return Err(Error::Domain("Tg must be positive".into()));
            }
            response_time
        }
    };

    let t0sq = coherence_time * coherence_time;
    let tgsq = tg * tg;
    let scale = charge * charge * eta * eta;
    let c_acc = scale * flux * flux;
    let classical_width = t0sq + 2.0 * tgsq;
    let classical_peak = scale * flux * flux / (1.0 + 2.0 * tgsq / t0sq).sqrt();
    let quantum_width = t0sq / 2.0 + 2.0 * tgsq;
    let quantum_peak = scale * flux / (std::f64::consts::PI * quantum_width).sqrt();

    let idx = grid.report_indices();
    let taus: Vec<f64> = idx.iter().map(|&j| grid.tau(j)).collect();
    let c_dc: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            let mut v = classical_peak * (-tau * tau / classical_width).exp();
            if kind == GaussianKind::Quantum {
                v += quantum_peak * (-tau * tau / quantum_width).exp();
            }
            v
        })
        .collect();
    let c: Vec<f64> = c_dc.iter().map(|v| c_acc + v).collect();

    Ok(CrossCorrResult {
        grid: *grid,
        taus,
        c,
        c_acc,
        c_dc,
        meta: ResultMeta {
            source: match kind {
                GaussianKind::Quantum => "gaussian_quantum".into(),
                GaussianKind::Classical => "gaussian_classical".into(),
            },
            detector: if tg == 0.0 {
                "ideal".into()
            } else {
                format!("gaussian Tg {tg:.3e} s")
            },
            route: "closed_form".into(),
        },
    })
}

/// Additive-noise closed form, fast-detector limit only:
///
/// ```text
/// C(tau) = q^2 eta^2 (P + (G-1) Omega/pi)^2
///        + q^2 eta^2 (P^2 + P Omega/pi) (sin(Omega tau) / (Omega tau))^2
/// ```
pub fn closed_form_rect_noise(
    flux: f64,
    half_bandwidth: f64,
    gain: f64,
    detector: &Detector,
    grid: &SpectralGrid,
) -> Result<CrossCorrResult> {
    // validate the family parameters
    JointGaussianSource::rect_noise(flux, half_bandwidth, gain)?;
    if detector.response != DetectorResponse::Ideal {
        return Err(Error::UnsupportedCombination(
            "the additive-noise closed form holds only in the fast-detector limit; \
             use the numeric cross-correlation path for a finite response time"
                .into(),
        ));
    }
    let scale = detector.charge * detector.charge * detector.eta * detector.eta;
    let c_acc = {
        let bg = flux + (gain - 1.0) * half_bandwidth / std::f64::consts::PI;
        scale * bg * bg
    };
    let peak = scale * (flux * flux + flux * half_bandwidth / std::f64::consts::PI);
    let idx = grid.report_indices();
    let taus: Vec<f64> = idx.iter().map(|&j| grid.tau(j)).collect();
    let c_dc: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            let x = half_bandwidth * tau;
            let s = if x == 0.0 { 1.0 } else { x.sin() / x };
            peak * s * s
        })
        .collect();
    let c: Vec<f64> = c_dc.iter().map(|v| c_acc + v).collect();
    Ok(CrossCorrResult {
        grid: *grid,
        taus,
        c,
        c_acc,
        c_dc,
        meta: ResultMeta {
            source: "rect_noise".into(),
            detector: detector_label(detector),
            route: "closed_form".into(),
        },
    })
}

/// `max_tau C_dc(tau) / C_acc` over the reported window.
pub fn contrast(result: &CrossCorrResult) -> Result<f64> {
    if !(result.c_acc > 0.0) {
        return Err(Error::DegenerateSource);
    }
    let peak = result.c_dc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(peak / result.c_acc)
}

/// Gain at which the additive-noise source crosses from nonclassical to
/// maximally-correlated classical:
///
/// ```text
/// G_c = 1 + (pi P / Omega) (sqrt(1 + Omega/(pi P)) - 1)
/// ```
///
/// At this gain `|S_SR|^2 = S_SS S_RR` in-band and the contrast equals 1
/// exactly.
pub fn critical_gain(flux: f64, half_bandwidth: f64) -> Result<f64> {
    if !(flux > 0.0) || !(half_bandwidth > 0.0) {
        return Err(Error::Domain("P and Omega must be positive".into()));
    }
    let s0 = std::f64::consts::PI * flux / half_bandwidth;
    Ok(1.0 + s0 * ((1.0 + 1.0 / s0).sqrt() - 1.0))
}

/// Fast-detector contrast of the additive-noise family:
/// `(1 + Omega/(pi P)) / (1 + (G-1) Omega/(pi P))^2`.
pub fn contrast_rect(flux: f64, half_bandwidth: f64, gain: f64) -> Result<f64> {
    JointGaussianSource::rect_noise(flux, half_bandwidth, gain)?;
    let x = half_bandwidth / (std::f64::consts::PI * flux);
    let d = 1.0 + (gain - 1.0) * x;
    Ok((1.0 + x) / (d * d))
}

/// Full width at half maximum of `C_dc`, with linear interpolation between
/// grid samples. Requires a positive interior peak with a half-crossing on
/// each side.
pub fn signature_width(result: &CrossCorrResult) -> Result<f64> {
    let n = result.c_dc.len();
    if n < 3 {
        return Err(Error::WidthUndefined("trace too short".into()));
    }
    let (peak_idx, &peak) = result
        .c_dc
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    if !(peak > 0.0) {
        return Err(Error::WidthUndefined("nonpositive peak".into()));
    }
    if peak_idx == 0 || peak_idx == n - 1 {
        return Err(Error::WidthUndefined("peak sits at the window edge".into()));
    }
    let half = peak / 2.0;

    let cross = |i_out: usize, i_in: usize| -> f64 {
        // linear interpolation of the half crossing between two samples
        let (t0, v0) = (result.taus[i_out], result.c_dc[i_out]);
        let (t1, v1) = (result.taus[i_in], result.c_dc[i_in]);
        t0 + (half - v0) / (v1 - v0) * (t1 - t0)
    };

    let mut left = None;
    for i in (0..peak_idx).rev() {
        if result.c_dc[i] < half {
            left = Some(cross(i, i + 1));
            break;
        }
    }
    let mut right = None;
    for i in peak_idx + 1..n {
        if result.c_dc[i] < half {
            right = Some(cross(i, i - 1));
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::WidthUndefined(
            "no half-maximum crossing inside the reported window".into(),
        )),
    }
}

/// One row of a dispersion sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionSweepRow {
    pub beta_s: f64,
    pub beta_r: f64,
    pub contrast: f64,
    pub fwhm: f64,
    pub c_acc: f64,
    pub peak_c_dc: f64,
}

/// One row of a gain sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainSweepRow {
    pub gain: f64,
    pub contrast: f64,
    pub state: StateLabel,
    pub c_acc: f64,
    pub peak_c_dc: f64,
    pub fwhm: f64,
}

/// A parameter sweep result. The two sweep kinds report different row
/// shapes, so the table is a tagged union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SweepTable {
    Dispersion(Vec<DispersionSweepRow>),
    Gain(Vec<GainSweepRow>),
}

/// Run `cross_correlation` once per `(beta_S, beta_R)` pair, reusing the
/// scenario's source, detector, and grid.
pub fn dispersion_sweep(scenario: &Scenario, pairs: &[(f64, f64)]) -> Result<SweepTable> {
    if pairs.is_empty() {
        return Err(Error::Domain("dispersion sweep needs at least one pair".into()));
    }
    let omega0 = scenario.pair.signal.center_frequency;
    let mut rows = Vec::with_capacity(pairs.len());
    for &(beta_s, beta_r) in pairs {
        let pair = FilterPair::new(
            crate::filters::DispersiveFilter::new(0.0, 0.0, beta_s, omega0)?,
            crate::filters::DispersiveFilter::new(0.0, 0.0, beta_r, omega0)?,
        )?;
        let run = Scenario::new(
            scenario.source.clone(),
            pair,
            scenario.detector,
            scenario.grid,
        );
        let result = cross_correlation(&run)?;
        let peak = result.c_dc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        rows.push(DispersionSweepRow {
            beta_s,
            beta_r,
            contrast: contrast(&result)?,
            fwhm: signature_width(&result)?,
            c_acc: result.c_acc,
            peak_c_dc: peak,
        });
    }
    Ok(SweepTable::Dispersion(rows))
}

/// Sweep the additive-noise amplifier gain, classifying the input state at
/// each value. Contrast decreases strictly with G.
pub fn gain_sweep(flux: f64, half_bandwidth: f64, gains: &[f64]) -> Result<SweepTable> {
    if gains.is_empty() {
        return Err(Error::Domain("gain sweep needs at least one value".into()));
    }
    // A small internal grid: the in-band spectra are flat, so coverage of
    // the band is all classification needs.
    let dt = std::f64::consts::PI / (16.0 * half_bandwidth);
    let grid = SpectralGrid::new(64, dt)?;
    let half_x = 1.3915573782515100; // sinc^2(x) = 1/2
    let mut rows = Vec::with_capacity(gains.len());
    for &gain in gains {
        let source = JointGaussianSource::rect_noise(flux, half_bandwidth, gain)?;
        let class = classify_state(&source, &grid, DEFAULT_CLASSIFY_TOL)?;
        let scale = 1.0;
        let bg = flux + (gain - 1.0) * half_bandwidth / std::f64::consts::PI;
        rows.push(GainSweepRow {
            gain,
            contrast: contrast_rect(flux, half_bandwidth, gain)?,
            state: class.label,
            c_acc: scale * bg * bg,
            peak_c_dc: scale * (flux * flux + flux * half_bandwidth / std::f64::consts::PI),
            fwhm: 2.0 * half_x / half_bandwidth,
        });
    }
    Ok(SweepTable::Gain(rows))
}

/// Maximal relative deviation between the quantum and classical closed
/// forms, `max_tau |C_q(tau) - C_c(tau)| / C_c(tau)`. At high brightness
/// this collapses toward zero, bounded by `1/(P T0 sqrt(pi/2))`.
pub fn high_brightness_delta(
    flux: f64,
    coherence_time: f64,
    response: DetectorResponse,
    grid: &SpectralGrid,
) -> Result<f64> {
    let q = closed_form_gaussian(flux, coherence_time, response, GaussianKind::Quantum, 1.0, 1.0, grid)?;
    let c = closed_form_gaussian(flux, coherence_time, response, GaussianKind::Classical, 1.0, 1.0, grid)?;
    Ok(q.c
        .iter()
        .zip(&c.c)
        .map(|(a, b)| (a - b).abs() / b)
        .fold(0.0, f64::max))
}

/// Convenience for tests and callers that need the classification of the
/// state a result came from.
pub fn classify_scenario(scenario: &Scenario, tol: f64) -> Result<StateClass> {
    classify_state(&scenario.source, &scenario.grid, tol)
}
