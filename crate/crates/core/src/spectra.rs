//! Joint Gaussian source families, their spectra and correlation
//! functions, and classification against the quantum and classical
//! cross-spectrum bounds.
//!
//! Every source is a zero-mean stationary jointly Gaussian state defined
//! by three spectra: the phase-insensitive auto-spectra `S_SS`, `S_RR`
//! (real, nonnegative) and the phase-sensitive cross spectrum `S_SR`
//! (complex). Phase-insensitive cross correlations and phase-sensitive
//! autocorrelations are identically zero by construction.
//!
//! The two bounds on the cross spectrum are
//!
//! ```text
//! quantum:   |S_SR(w)|^2 <= S_SS(w) * (1 + S_RR(-w))
//! classical: |S_SR(w)|^2 <= S_SS(w) * S_RR(-w)
//! ```
//!
//! The gap between them is the nonclassicality window this crate
//! quantifies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, SpectralGrid};

/// Relative saturation tolerance used when classifying states unless the
/// caller supplies one.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Bins with `S_SS` below this fraction of its grid maximum are excluded
/// from saturation tests (they would otherwise compare 0/0 at spectral
/// tails).
pub const SUPPORT_FLOOR: f64 = 1e-12;

/// The three spectral densities of a joint source at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensities {
    pub s_ss: f64,
    pub s_rr: f64,
    pub s_sr: Complex64,
}

/// Which of the two Gaussian-family cross correlations to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaussianKind {
    /// Cross spectrum at the quantum limit (downconverter model).
    Quantum,
    /// Cross spectrum at the classical limit (conjugate classical fields).
    Classical,
}

/// Tabulated spectra for a user-supplied source. Values are linearly
/// interpolated onto the grid and clamped to zero outside the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraTable {
    /// Strictly ascending angular frequencies (rad/s).
    pub omega: Vec<f64>,
    pub s_ss: Vec<f64>,
    pub s_rr: Vec<f64>,
    pub s_sr_re: Vec<f64>,
    pub s_sr_im: Vec<f64>,
}

impl SpectraTable {
    fn validate(&self) -> Result<()> {
        let n = self.omega.len();
        if n < 2 {
            return Err(Error::Domain("spectra table needs at least 2 points".into()));
        }
        for w in self.omega.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain(
                    "spectra table frequencies must be strictly ascending".into(),
                ));
            }
        }
        if [&self.s_ss, &self.s_rr, &self.s_sr_re, &self.s_sr_im]
            .iter()
            .any(|v| v.len() != n)
        {
            return Err(Error::Domain("spectra table columns must share one length".into()));
        }
        if self.s_ss.iter().chain(&self.s_rr).any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::Domain(
                "auto-spectra must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }

    fn interp(&self, xs: &[f64], omega: f64) -> f64 {
        let w = &self.omega;
        if omega < w[0] || omega > w[w.len() - 1] {
            return 0.0;
        }
        let i = match w.binary_search_by(|v| v.partial_cmp(&omega).unwrap()) {
            Ok(i) => return xs[i],
            Err(i) => i,
        };
        let (w0, w1) = (w[i - 1], w[i]);
        let t = (omega - w0) / (w1 - w0);
        xs[i - 1] + t * (xs[i] - xs[i - 1])
    }

    fn eval(&self, omega: f64) -> SpectralDensities {
        SpectralDensities {
            s_ss: self.interp(&self.s_ss, omega),
            s_rr: self.interp(&self.s_rr, omega),
            s_sr: Complex64::new(
                self.interp(&self.s_sr_re, omega),
                self.interp(&self.s_sr_im, omega),
            ),
        }
    }
}

/// A parametrized zero-mean stationary jointly Gaussian source.
///
/// Constructors validate parameter ranges, so evaluation is infallible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum JointGaussianSource {
    GaussianQuantum {
        /// Photon flux P (photons/s).
        flux: f64,
        /// Coherence time T0 (s).
        coherence_time: f64,
    },
    GaussianClassical {
        flux: f64,
        coherence_time: f64,
    },
    RectNoise {
        flux: f64,
        /// Half-bandwidth Omega (rad/s).
        half_bandwidth: f64,
        /// Amplifier gain G >= 1.
        gain: f64,
    },
    SincDownconverter {
        /// Dimensionless gain amplitude g0.
        gain_amplitude: f64,
        /// Group-velocity mismatch time Dl (s).
        group_mismatch: f64,
        /// Pump phase (rad); rotates the cross spectrum by e^{i phi}.
        /// Contrast and C(tau) are invariant since only |K_SR|^2 enters.
        pump_phase: f64,
    },
    CustomTabulated(SpectraTable),
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive (got {v})")));
    }
    Ok(())
}

impl JointGaussianSource {
    pub fn gaussian_quantum(flux: f64, coherence_time: f64) -> Result<Self> {
        require_positive("P", flux)?;
        require_positive("T0", coherence_time)?;
        Ok(Self::GaussianQuantum { flux, coherence_time })
    }

    pub fn gaussian_classical(flux: f64, coherence_time: f64) -> Result<Self> {
        require_positive("P", flux)?;
        require_positive("T0", coherence_time)?;
        Ok(Self::GaussianClassical { flux, coherence_time })
    }

    pub fn rect_noise(flux: f64, half_bandwidth: f64, gain: f64) -> Result<Self> {
        require_positive("P", flux)?;
        require_positive("Omega", half_bandwidth)?;
        if !(gain >= 1.0) || !gain.is_finite() {
            return Err(Error::Domain(format!(
                "G: amplifier gain must be >= 1 (got {gain})"
            )));
        }
        Ok(Self::RectNoise { flux, half_bandwidth, gain })
    }

    pub fn sinc_downconverter(gain_amplitude: f64, group_mismatch: f64, pump_phase: f64) -> Result<Self> {
        require_positive("g0", gain_amplitude)?;
        require_positive("Dl", group_mismatch)?;
        Ok(Self::SincDownconverter {
            gain_amplitude,
            group_mismatch,
            pump_phase,
        })
    }

    pub fn custom_tabulated(table: SpectraTable) -> Result<Self> {
        table.validate()?;
        Ok(Self::CustomTabulated(table))
    }

    /// Evaluate the three spectral densities at one frequency.
    pub fn eval(&self, omega: f64) -> SpectralDensities {
        match *self {
            Self::GaussianQuantum { flux, coherence_time } => {
                gaussian_densities(flux, coherence_time, GaussianKind::Quantum, omega)
            }
            Self::GaussianClassical { flux, coherence_time } => {
                gaussian_densities(flux, coherence_time, GaussianKind::Classical, omega)
            }
            Self::RectNoise { flux, half_bandwidth, gain } => {
                rect_noise_densities(flux, half_bandwidth, gain, omega)
            }
            Self::SincDownconverter {
                gain_amplitude,
                group_mismatch,
                pump_phase,
            } => sinc_densities(gain_amplitude, group_mismatch, pump_phase, omega),
            Self::CustomTabulated(ref table) => table.eval(omega),
        }
    }

    /// Sample all three spectra over a grid.
    pub fn sample(&self, grid: &SpectralGrid) -> SampledSpectra {
        let n = grid.len();
        let mut s_ss = Vec::with_capacity(n);
        let mut s_rr = Vec::with_capacity(n);
        let mut s_sr = Vec::with_capacity(n);
        for k in 0..n {
            let d = self.eval(grid.omega(k));
            s_ss.push(d.s_ss);
            s_rr.push(d.s_rr);
            s_sr.push(d.s_sr);
        }
        SampledSpectra {
            grid: *grid,
            s_ss,
            s_rr,
            s_sr,
        }
    }

    /// Characteristic correlation time of the family, used by grid
    /// adequacy checks.
    pub fn time_scale(&self) -> f64 {
        match *self {
            Self::GaussianQuantum { coherence_time, .. }
            | Self::GaussianClassical { coherence_time, .. } => coherence_time,
            Self::RectNoise { half_bandwidth, .. } => std::f64::consts::PI / half_bandwidth,
            Self::SincDownconverter { group_mismatch, .. } => group_mismatch,
            Self::CustomTabulated(ref t) => {
                let wmax = t
                    .omega
                    .iter()
                    .fold(0.0f64, |acc, &w| acc.max(w.abs()))
                    .max(f64::MIN_POSITIVE);
                2.0 * std::f64::consts::PI / wmax
            }
        }
    }

    /// Characteristic spectral half-width (rad/s); the grid's Nyquist span
    /// must at least cover it for classification to make sense.
    pub fn support_width(&self) -> f64 {
        match *self {
            Self::GaussianQuantum { coherence_time, .. }
            | Self::GaussianClassical { coherence_time, .. } => 1.0 / coherence_time,
            Self::RectNoise { half_bandwidth, .. } => half_bandwidth,
            Self::SincDownconverter { group_mismatch, .. } => {
                2.0 * std::f64::consts::PI / group_mismatch
            }
            Self::CustomTabulated(ref t) => t.omega.iter().fold(0.0f64, |acc, &w| acc.max(w.abs())),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::GaussianQuantum { .. } => "gaussian_quantum",
            Self::GaussianClassical { .. } => "gaussian_classical",
            Self::RectNoise { .. } => "rect_noise",
            Self::SincDownconverter { .. } => "sinc_downconverter",
            Self::CustomTabulated(_) => "custom_tabulated",
        }
    }
}

fn gaussian_densities(flux: f64, t0: f64, kind: GaussianKind, omega: f64) -> SpectralDensities {
    let s = flux * (2.0 * std::f64::consts::PI * t0 * t0).sqrt() * (-omega * omega * t0 * t0 / 2.0).exp();
    let s_sr = match kind {
        GaussianKind::Classical => Complex64::new(s, 0.0),
        GaussianKind::Quantum => Complex64::new(
            s,
            flux.sqrt()
                * (2.0 * std::f64::consts::PI * t0 * t0).powf(0.25)
                * (-omega * omega * t0 * t0 / 4.0).exp(),
        ),
    };
    SpectralDensities { s_ss: s, s_rr: s, s_sr }
}

fn rect_noise_densities(flux: f64, half_bandwidth: f64, gain: f64, omega: f64) -> SpectralDensities {
    // Edge bins with |omega| == Omega are inside the passband; no smoothing.
    if omega.abs() <= half_bandwidth {
        let s0 = std::f64::consts::PI * flux / half_bandwidth;
        SpectralDensities {
            s_ss: s0 + (gain - 1.0),
            s_rr: s0 + (gain - 1.0),
            s_sr: Complex64::new(s0, s0.sqrt()),
        }
    } else {
        SpectralDensities {
            s_ss: 0.0,
            s_rr: 0.0,
            s_sr: Complex64::new(0.0, 0.0),
        }
    }
}

fn sinc_densities(g0: f64, dl: f64, pump_phase: f64, omega: f64) -> SpectralDensities {
    let x = omega * dl / 2.0;
    let s = if x == 0.0 { 1.0 } else { x.sin() / x };
    let cross = Complex64::new(0.0, g0 * s) * Complex64::from_polar(1.0, pump_phase);
    SpectralDensities {
        s_ss: g0 * g0 * s * s,
        s_rr: g0 * g0 * s * s,
        s_sr: cross,
    }
}

/// Gaussian-family spectra at one frequency.
pub fn eval_gaussian_source(
    flux: f64,
    coherence_time: f64,
    kind: GaussianKind,
    omega: f64,
) -> Result<SpectralDensities> {
    require_positive("P", flux)?;
    require_positive("T0", coherence_time)?;
    Ok(gaussian_densities(flux, coherence_time, kind, omega))
}

/// Bandlimited additive-noise family spectra at one frequency.
pub fn eval_rect_noise_source(
    flux: f64,
    half_bandwidth: f64,
    gain: f64,
    omega: f64,
) -> Result<SpectralDensities> {
    // Reuse constructor validation, then evaluate.
    let src = JointGaussianSource::rect_noise(flux, half_bandwidth, gain)?;
    Ok(src.eval(omega))
}

/// Downconverter sinc-family spectra at one frequency (pump phase taken
/// real-positive).
pub fn eval_sinc_source(gain_amplitude: f64, group_mismatch: f64, omega: f64) -> Result<SpectralDensities> {
    let src = JointGaussianSource::sinc_downconverter(gain_amplitude, group_mismatch, 0.0)?;
    Ok(src.eval(omega))
}

/// The three spectra sampled on a common grid, in storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectra {
    pub grid: SpectralGrid,
    pub s_ss: Vec<f64>,
    pub s_rr: Vec<f64>,
    pub s_sr: Vec<Complex64>,
}

impl SampledSpectra {
    /// Build from already-sampled vectors; lengths must match the grid.
    pub fn new(
        grid: SpectralGrid,
        s_ss: Vec<f64>,
        s_rr: Vec<f64>,
        s_sr: Vec<Complex64>,
    ) -> Result<Self> {
        if s_ss.len() != grid.len() || s_rr.len() != grid.len() || s_sr.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "spectra lengths ({}, {}, {}) do not match grid length {}",
                s_ss.len(),
                s_rr.len(),
                s_sr.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, s_ss, s_rr, s_sr })
    }
}

/// What a sampled correlation function represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelationKind {
    AutoSignal,
    AutoReference,
    CrossPhaseSensitive,
}

/// A sampled complex correlation function over `tau in [-T/2, T/2)`,
/// stored in FFT index order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTrace {
    pub grid: SpectralGrid,
    pub values: Vec<Complex64>,
    pub kind: CorrelationKind,
}

impl CorrelationTrace {
    /// Largest Hermitian-symmetry defect `|K(-tau) - K*(tau)|`, normalized
    /// by the trace's peak modulus. Auto kinds should keep this at grid
    /// tolerance.
    pub fn hermitian_defect(&self) -> f64 {
        let peak = self
            .values
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.norm()))
            .max(f64::MIN_POSITIVE);
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for j in 0..n {
            let m = self.grid.neg_index(j);
            worst = worst.max((self.values[m] - self.values[j].conj()).norm());
        }
        worst / peak
    }
}

/// Inverse transform: `K(tau) = Integral domega/2pi S(omega) e^{-i omega tau}`,
/// realized as the exact discrete pair of [`correlation_to_spectrum`].
pub fn spectrum_to_correlation(
    grid: &SpectralGrid,
    spectrum: &[Complex64],
    kind: CorrelationKind,
) -> Result<CorrelationTrace> {
    if spectrum.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "spectrum length {} does not match grid length {}",
            spectrum.len(),
            grid.len()
        )));
    }
    Ok(CorrelationTrace {
        grid: *grid,
        values: grid::spectrum_samples_to_correlation(grid, spectrum),
        kind,
    })
}

/// Forward transform: `S(omega) = Integral dtau K(tau) e^{+i omega tau}`.
pub fn correlation_to_spectrum(trace: &CorrelationTrace) -> Vec<Complex64> {
    grid::correlation_samples_to_spectrum(&trace.grid, &trace.values)
}

/// Classification labels ordered from most to least correlated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateLabel {
    /// Quantum bound saturated at every supported frequency.
    MaximallyEntangled,
    /// Classical bound exceeded somewhere, quantum bound respected.
    Nonclassical,
    /// Classical bound saturated at every supported frequency.
    ClassicalMaximallyCorrelated,
    /// Classical bound satisfied everywhere.
    Classical,
    /// Quantum bound exceeded: not a physical state.
    Invalid,
}

impl StateLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::MaximallyEntangled => "maximally_entangled",
            Self::Nonclassical => "nonclassical",
            Self::ClassicalMaximallyCorrelated => "classical_maximally_correlated",
            Self::Classical => "classical",
            Self::Invalid => "invalid",
        }
    }

    pub fn is_classical(&self) -> bool {
        matches!(self, Self::Classical | Self::ClassicalMaximallyCorrelated)
    }
}

/// Result of classifying a source against the cross-spectrum bounds.
///
/// `worst_margin` is the extremal normalized margin against the bound that
/// decides the label: the quantum-saturation margin for
/// `MaximallyEntangled` and `Invalid`, the classical-bound excess
/// otherwise. Margins are normalized by the quantum bound
/// `S_SS(w)(1 + S_RR(-w))`, so a maximal state reports ~0 and a violating
/// state reports how far past the bound it sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateClass {
    pub label: StateLabel,
    pub worst_margin: f64,
    /// Frequency (rad/s) at which `worst_margin` occurs.
    pub worst_omega: f64,
}

/// Classify a source by scanning both bounds over the grid.
///
/// `tol` is the relative saturation/violation tolerance, in (0, 1e-2].
/// Bins where `S_SS` falls below [`SUPPORT_FLOOR`] times its maximum are
/// excluded from saturation tests; violation tests cover every bin.
pub fn classify_state(
    source: &JointGaussianSource,
    grid: &SpectralGrid,
    tol: f64,
) -> Result<StateClass> {
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::Domain(format!(
            "classification tolerance must lie in (0, 1e-2] (got {tol})"
        )));
    }
    let support = source.support_width();
    if grid.nyquist() < support {
        return Err(Error::GridResolution {
            ratio: "nyquist/support_width",
            bound: ">=",
            actual: grid.nyquist() / support,
            required: 1.0,
        });
    }
    let spectra = source.sample(grid);
    classify_sampled(&spectra, tol)
}

pub(crate) fn classify_sampled(spectra: &SampledSpectra, tol: f64) -> Result<StateClass> {
    let grid = &spectra.grid;
    let n = grid.len();
    let s_max = spectra.s_ss.iter().fold(0.0f64, |a, &v| a.max(v));
    let floor = SUPPORT_FLOOR * s_max;

    // All-zero source: both bounds hold trivially.
    if s_max == 0.0 {
        let violated = spectra.s_sr.iter().any(|v| v.norm_sqr() > 0.0);
        return Ok(StateClass {
            label: if violated { StateLabel::Invalid } else { StateLabel::Classical },
            worst_margin: if violated { f64::INFINITY } else { 0.0 },
            worst_omega: 0.0,
        });
    }

    // Normalized margins against each bound, scanned over every bin.
    // Supported bins normalize by their own quantum bound; bins below the
    // support floor normalize by the grid's largest bound instead, so
    // spectral tails (where the densities underflow toward subnormals)
    // cannot manufacture spurious margins.
    let qbound_max = (0..n)
        .map(|k| spectra.s_ss[k] * (1.0 + spectra.s_rr[grid.neg_index(k)]))
        .fold(0.0f64, f64::max);
    let mut worst_q = f64::NEG_INFINITY; // max (|S_sr|^2 - qbound)/scale
    let mut worst_q_omega = 0.0;
    let mut worst_c = f64::NEG_INFINITY; // max (|S_sr|^2 - cbound)/scale
    let mut worst_c_omega = 0.0;
    let mut sat_q = 0.0f64; // max |quantum margin| over supported bins
    let mut sat_q_omega = 0.0;
    let mut sat_c = 0.0f64; // max |classical margin| over supported bins
    let mut sat_c_omega = 0.0;
    let mut any_supported = false;

    for k in 0..n {
        let omega = grid.omega(k);
        let s_ss = spectra.s_ss[k];
        let s_rr_neg = spectra.s_rr[grid.neg_index(k)];
        let cross_sq = spectra.s_sr[k].norm_sqr();
        let qbound = s_ss * (1.0 + s_rr_neg);
        let cbound = s_ss * s_rr_neg;
        let scale = if s_ss >= floor && qbound > 0.0 {
            qbound
        } else {
            qbound_max
        };

        let mq = (cross_sq - qbound) / scale;
        let mc = (cross_sq - cbound) / scale;
        if mq > worst_q {
            worst_q = mq;
            worst_q_omega = omega;
        }
        if mc > worst_c {
            worst_c = mc;
            worst_c_omega = omega;
        }
        if s_ss >= floor {
            any_supported = true;
            if mq.abs() > sat_q {
                sat_q = mq.abs();
                sat_q_omega = omega;
            }
            if mc.abs() > sat_c {
                sat_c = mc.abs();
                sat_c_omega = omega;
            }
        }
    }

    if worst_q > tol {
        return Ok(StateClass {
            label: StateLabel::Invalid,
            worst_margin: worst_q,
            worst_omega: worst_q_omega,
        });
    }
    if any_supported && sat_q <= tol {
        return Ok(StateClass {
            label: StateLabel::MaximallyEntangled,
            worst_margin: sat_q,
            worst_omega: sat_q_omega,
        });
    }
    if any_supported && sat_c <= tol {
        return Ok(StateClass {
            label: StateLabel::ClassicalMaximallyCorrelated,
            worst_margin: sat_c,
            worst_omega: sat_c_omega,
        });
    }
    if worst_c <= tol {
        return Ok(StateClass {
            label: StateLabel::Classical,
            worst_margin: worst_c,
            worst_omega: worst_c_omega,
        });
    }
    Ok(StateClass {
        label: StateLabel::Nonclassical,
        worst_margin: worst_c,
        worst_omega: worst_c_omega,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn gaussian_classical_at_dc() {
        // P = 1, T0 = 1: S_SS(0) = sqrt(2 pi)
        let d = eval_gaussian_source(1.0, 1.0, GaussianKind::Classical, 0.0).unwrap();
        close(d.s_ss, 2.5066282746310002, 1e-15);
        assert_eq!(d.s_rr, d.s_ss);
        assert_eq!(d.s_sr, Complex64::new(d.s_ss, 0.0));
    }

    #[test]
    fn gaussian_quantum_at_dc() {
        let d = eval_gaussian_source(1.0, 1.0, GaussianKind::Quantum, 0.0).unwrap();
        close(d.s_sr.re, 2.5066282746310002, 1e-15);
        // imaginary part is (2 pi)^(1/4)
        close(d.s_sr.im, 1.5832334870861595, 1e-15);
    }

    #[test]
    fn gaussian_decays_at_large_detuning() {
        for kind in [GaussianKind::Quantum, GaussianKind::Classical] {
            let d = eval_gaussian_source(3.0, 2.0, kind, 40.0).unwrap();
            assert!(d.s_ss < 1e-200);
            assert!(d.s_sr.norm() < 1e-150);
        }
    }

    #[test]
    fn gaussian_rejects_nonpositive_parameters() {
        assert!(eval_gaussian_source(0.0, 1.0, GaussianKind::Quantum, 0.0).is_err());
        assert!(eval_gaussian_source(1.0, -1.0, GaussianKind::Classical, 0.0).is_err());
    }

    #[test]
    fn rect_noise_inside_and_outside_band() {
        // pi P / Omega = 1, G = 1
        let omega_b = 2.0;
        let flux = omega_b / std::f64::consts::PI;
        let d = eval_rect_noise_source(flux, omega_b, 1.0, 0.0).unwrap();
        close(d.s_ss, 1.0, 1e-12);
        close(d.s_sr.re, 1.0, 1e-12);
        close(d.s_sr.im, 1.0, 1e-12);

        let out = eval_rect_noise_source(flux, omega_b, 1.0, 2.5).unwrap();
        assert_eq!(out.s_ss, 0.0);
        assert_eq!(out.s_sr, Complex64::new(0.0, 0.0));

        // Edge bin included exactly.
        let edge = eval_rect_noise_source(flux, omega_b, 1.0, omega_b).unwrap();
        close(edge.s_ss, 1.0, 1e-12);

        // Gain raises the autos only.
        let g2 = eval_rect_noise_source(flux, omega_b, 2.0, 0.0).unwrap();
        close(g2.s_ss, 2.0, 1e-12);
        close(g2.s_sr.re, 1.0, 1e-12);
        close(g2.s_sr.im, 1.0, 1e-12);
    }

    #[test]
    fn rect_noise_rejects_subunity_gain() {
        assert!(eval_rect_noise_source(1.0, 1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn sinc_family_values() {
        let dl = 1e-12;
        let d = eval_sinc_source(0.1, dl, 0.0).unwrap();
        close(d.s_ss, 0.01, 1e-12);
        assert!(d.s_sr.re.abs() < 1e-15);
        close(d.s_sr.im, 0.1, 1e-12);

        // sinc zero at omega Dl / 2 = pi
        let w0 = 2.0 * std::f64::consts::PI / dl;
        let z = eval_sinc_source(0.1, dl, w0).unwrap();
        assert!(z.s_ss.abs() < 1e-25);
        assert!(z.s_sr.norm() < 1e-14);
    }

    #[test]
    fn pump_phase_rotates_cross_spectrum_only() {
        let phi = 0.7;
        let a = JointGaussianSource::sinc_downconverter(0.1, 1e-12, 0.0).unwrap();
        let b = JointGaussianSource::sinc_downconverter(0.1, 1e-12, phi).unwrap();
        let w = 3e11;
        let da = a.eval(w);
        let db = b.eval(w);
        assert_eq!(da.s_ss, db.s_ss);
        close(db.s_sr.norm(), da.s_sr.norm(), 1e-12);
        close((db.s_sr / da.s_sr).arg(), phi, 1e-12);
    }

    #[test]
    fn classify_gaussian_families() {
        let grid = SpectralGrid::new(256, 1.0 / 16.0).unwrap();
        let q = JointGaussianSource::gaussian_quantum(2.0, 1.0).unwrap();
        let c = JointGaussianSource::gaussian_classical(2.0, 1.0).unwrap();
        let sq = classify_state(&q, &grid, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(sq.label, StateLabel::MaximallyEntangled);
        assert!(sq.worst_margin <= 1e-12, "margin {}", sq.worst_margin);
        let sc = classify_state(&c, &grid, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(sc.label, StateLabel::ClassicalMaximallyCorrelated);
        assert!(sc.worst_margin <= 1e-12);
    }

    #[test]
    fn classify_sinc_is_nonclassical() {
        let dl = 1.0;
        let grid = SpectralGrid::new(512, dl / 16.0).unwrap();
        let s = JointGaussianSource::sinc_downconverter(0.1, dl, 0.0).unwrap();
        let cls = classify_state(&s, &grid, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(cls.label, StateLabel::Nonclassical);
        assert!(cls.worst_margin > 0.0);
    }

    #[test]
    fn classify_detects_bound_violation() {
        // rect_noise with the cross spectrum scaled by 10, via a table
        let omega_b = 2.0;
        let s0 = 1.0;
        let table = SpectraTable {
            omega: vec![-omega_b, omega_b],
            s_ss: vec![s0, s0],
            s_rr: vec![s0, s0],
            s_sr_re: vec![10.0 * s0, 10.0 * s0],
            s_sr_im: vec![10.0 * s0.sqrt(), 10.0 * s0.sqrt()],
        };
        let src = JointGaussianSource::custom_tabulated(table).unwrap();
        let grid = SpectralGrid::new(256, std::f64::consts::PI / (8.0 * omega_b)).unwrap();
        let cls = classify_state(&src, &grid, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(cls.label, StateLabel::Invalid);
        assert!(cls.worst_margin > 1.0);
        assert!(cls.worst_omega.abs() <= omega_b);
    }

    #[test]
    fn classify_rejects_undersized_grid() {
        let src = JointGaussianSource::rect_noise(1.0, 100.0, 1.0).unwrap();
        let grid = SpectralGrid::new(64, 1.0).unwrap(); // nyquist pi << 100
        assert!(matches!(
            classify_state(&src, &grid, 1e-9),
            Err(Error::GridResolution { .. })
        ));
    }

    #[test]
    fn classify_rejects_bad_tolerance() {
        let grid = SpectralGrid::new(64, 0.05).unwrap();
        let src = JointGaussianSource::gaussian_classical(1.0, 1.0).unwrap();
        assert!(classify_state(&src, &grid, 0.0).is_err());
        assert!(classify_state(&src, &grid, 0.5).is_err());
    }

    #[test]
    fn bound_chain_holds_everywhere() {
        // classical bound never exceeds the quantum bound
        let grid = SpectralGrid::new(128, 0.1).unwrap();
        for src in [
            JointGaussianSource::gaussian_quantum(0.3, 1.0).unwrap(),
            JointGaussianSource::rect_noise(1.0, 3.0, 2.0).unwrap(),
            JointGaussianSource::sinc_downconverter(0.5, 1.0, 0.0).unwrap(),
        ] {
            let s = src.sample(&grid);
            for k in 0..grid.len() {
                let rr = s.s_rr[grid.neg_index(k)];
                assert!(s.s_ss[k] * rr <= s.s_ss[k] * (1.0 + rr));
            }
        }
    }

    #[test]
    fn transform_gaussian_pair_matches_closed_form() {
        // P = 1, T0 = 1: K(tau) = e^{-tau^2/2}
        let grid = SpectralGrid::new(512, 16.0 / 512.0 * 2.0).unwrap(); // T = 32
        let src = JointGaussianSource::gaussian_classical(1.0, 1.0).unwrap();
        let spectra = src.sample(&grid);
        let trace =
            spectrum_to_correlation(&grid, &spectra.s_sr, CorrelationKind::CrossPhaseSensitive)
                .unwrap();
        for j in 0..grid.len() {
            let tau = grid.tau(j);
            let expect = (-tau * tau / 2.0).exp();
            assert!(
                (trace.values[j].re - expect).abs() < 1e-9,
                "tau = {tau}: {} vs {expect}",
                trace.values[j].re
            );
            assert!(trace.values[j].im.abs() < 1e-12);
        }
        close(trace.values[0].re, 1.0, 1e-9);
    }

    #[test]
    fn transform_zero_spectrum_gives_zero_trace() {
        let grid = SpectralGrid::new(64, 0.1).unwrap();
        let zeros = vec![Complex64::new(0.0, 0.0); 64];
        let trace = spectrum_to_correlation(&grid, &zeros, CorrelationKind::AutoSignal).unwrap();
        assert!(trace.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn transform_rect_spectrum_matches_dirichlet_sum() {
        // Rect of height S0 over |omega| <= Omega with the band edge at a
        // half-bin offset: the discrete transform equals the Dirichlet
        // kernel and K(0) = P exactly.
        let n = 1024usize;
        let dt = 0.05;
        let grid = SpectralGrid::new(n, dt).unwrap();
        let m = 100i64;
        let omega_b = (m as f64 + 0.5) * grid.domega();
        let flux = 2.0; // so S0 = pi P / Omega
        let s0 = std::f64::consts::PI * flux / omega_b;
        let spectrum: Vec<Complex64> = (0..n)
            .map(|k| {
                if grid.omega(k).abs() <= omega_b {
                    Complex64::new(s0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let trace = spectrum_to_correlation(&grid, &spectrum, CorrelationKind::AutoSignal).unwrap();
        // K(0) = S0 * (2m+1) * domega / 2pi = P exactly on this grid
        close(trace.values[0].re, flux, 1e-12);
        // and K(tau) follows the closed-form kernel at every lag
        for j in [1usize, 5, 17, 200, n - 3] {
            let tau = grid.tau(j);
            let expect =
                s0 / (2.0 * std::f64::consts::PI) * (omega_b * tau).sin() / (tau * grid.domega() / 2.0).sin()
                    * grid.domega();
            assert!(
                (trace.values[j].re - expect).abs() < 1e-10 * flux,
                "lag {j}"
            );
        }
    }

    #[test]
    fn transform_roundtrip_is_exact() {
        let grid = SpectralGrid::new(256, 0.125).unwrap();
        let src = JointGaussianSource::gaussian_quantum(0.5, 1.0).unwrap();
        let spectra = src.sample(&grid);
        let trace =
            spectrum_to_correlation(&grid, &spectra.s_sr, CorrelationKind::CrossPhaseSensitive)
                .unwrap();
        let back = correlation_to_spectrum(&trace);
        let peak = spectra.s_sr.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        for (orig, rt) in spectra.s_sr.iter().zip(&back) {
            assert!((orig - rt).norm() <= 1e-12 * peak);
        }
    }

    #[test]
    fn transform_gaussian_correlation_to_spectrum() {
        // K(tau) = P e^{-tau^2 / 2 T0^2}  ->  S(0) = P sqrt(2 pi T0^2)
        let grid = SpectralGrid::new(1024, 32.0 / 1024.0).unwrap();
        let flux = 3.0;
        let values: Vec<Complex64> = (0..grid.len())
            .map(|j| {
                let tau = grid.tau(j);
                Complex64::new(flux * (-tau * tau / 2.0).exp(), 0.0)
            })
            .collect();
        let trace = CorrelationTrace {
            grid,
            values,
            kind: CorrelationKind::AutoSignal,
        };
        let spec = correlation_to_spectrum(&trace);
        close(spec[0].re, flux * (2.0 * std::f64::consts::PI).sqrt(), 1e-9);
    }

    #[test]
    fn transform_delta_correlation_gives_flat_spectrum() {
        let grid = SpectralGrid::new(64, 0.5).unwrap();
        let mut values = vec![Complex64::new(0.0, 0.0); 64];
        values[0] = Complex64::new(2.0, 0.0);
        let trace = CorrelationTrace {
            grid,
            values,
            kind: CorrelationKind::AutoSignal,
        };
        let spec = correlation_to_spectrum(&trace);
        for v in &spec {
            close(v.re, 2.0 * grid.dt(), 1e-13);
            assert!(v.im.abs() < 1e-13);
        }
    }

    #[test]
    fn auto_traces_are_hermitian() {
        let grid = SpectralGrid::new(256, 0.125).unwrap();
        for src in [
            JointGaussianSource::gaussian_quantum(1.0, 1.0).unwrap(),
            JointGaussianSource::rect_noise(1.0, 4.0, 1.5).unwrap(),
        ] {
            let spectra = src.sample(&grid);
            let s_ss_c: Vec<Complex64> =
                spectra.s_ss.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let trace =
                spectrum_to_correlation(&grid, &s_ss_c, CorrelationKind::AutoSignal).unwrap();
            assert!(trace.hermitian_defect() < 1e-12);
            assert!(trace.values[0].re >= 0.0);
            assert!(trace.values[0].im.abs() < 1e-12 * trace.values[0].re.max(1e-300));
        }
    }

    #[test]
    fn custom_table_interpolates_and_clamps() {
        let table = SpectraTable {
            omega: vec![-1.0, 0.0, 1.0],
            s_ss: vec![0.0, 2.0, 0.0],
            s_rr: vec![0.0, 2.0, 0.0],
            s_sr_re: vec![0.0, 1.0, 0.0],
            s_sr_im: vec![0.0, 0.0, 0.0],
        };
        let src = JointGaussianSource::custom_tabulated(table).unwrap();
        let mid = src.eval(0.5);
        close(mid.s_ss, 1.0, 1e-12);
        close(mid.s_sr.re, 0.5, 1e-12);
        assert_eq!(src.eval(5.0).s_ss, 0.0);
        assert_eq!(src.eval(-1.5).s_sr, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn custom_table_rejects_malformed_input() {
        let bad = SpectraTable {
            omega: vec![0.0, 0.0],
            s_ss: vec![1.0, 1.0],
            s_rr: vec![1.0, 1.0],
            s_sr_re: vec![0.0, 0.0],
            s_sr_im: vec![0.0, 0.0],
        };
        assert!(JointGaussianSource::custom_tabulated(bad).is_err());
        let neg = SpectraTable {
            omega: vec![0.0, 1.0],
            s_ss: vec![-1.0, 1.0],
            s_rr: vec![1.0, 1.0],
            s_sr_re: vec![0.0, 0.0],
            s_sr_im: vec![0.0, 0.0],
        };
        assert!(JointGaussianSource::custom_tabulated(neg).is_err());
    }
}
