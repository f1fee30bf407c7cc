//! Scenario configuration: a single JSON document with SI units
//! throughout (seconds, rad/s, photons/s).
//!
//! Parsing is two-stage: the raw layer rejects unknown keys and captures
//! whatever fields are present; the validation layer then checks every
//! module precondition and reports *all* violations, each with a path to
//! the offending key.

use serde::{Deserialize, Serialize};

use dispcancel_core::{
    critical_gain, Detector, DetectorResponse, DispersiveFilter, FilterPair, JointGaussianSource,
    MCConfig, Scenario, SpectraTable, SpectralGrid,
};

/// One validation failure, with the config path it applies to.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

/// Parse or validation failure: either the document itself was malformed,
/// or one or more fields violated preconditions.
#[derive(Debug)]
pub enum ConfigError {
    Malformed(String),
    Invalid(Vec<Violation>),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Malformed(msg) => write!(f, "malformed config: {msg}"),
            Self::Invalid(violations) => {
                writeln!(f, "invalid config ({} violation(s)):", violations.len())?;
                for v in violations {
                    writeln!(f, "  {}: {}", v.path, v.message)?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    /// Machine-readable form for stderr.
    pub fn to_json(&self) -> String {
        match self {
            Self::Malformed(msg) => serde_json::json!({
                "error": "malformed",
                "message": msg,
            })
            .to_string(),
            Self::Invalid(violations) => serde_json::json!({
                "error": "invalid",
                "violations": violations,
            })
            .to_string(),
        }
    }
}

// ---------------------------------------------------------------------
// canonical (validated) configuration
// ---------------------------------------------------------------------

/// Validated source block. Serialized form uses the family tag plus the
/// family's parameter keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum SourceConfig {
    #[serde(rename = "gaussian_quantum")]
    GaussianQuantum {
        #[serde(rename = "P")]
        flux: f64,
        #[serde(rename = "T0")]
        coherence_time: f64,
    },
    #[serde(rename = "gaussian_classical")]
    GaussianClassical {
        #[serde(rename = "P")]
        flux: f64,
        #[serde(rename = "T0")]
        coherence_time: f64,
    },
    #[serde(rename = "rect_noise")]
    RectNoise {
        #[serde(rename = "P")]
        flux: f64,
        #[serde(rename = "Omega")]
        half_bandwidth: f64,
        #[serde(rename = "G")]
        gain: f64,
    },
    #[serde(rename = "sinc_downconverter")]
    SincDownconverter {
        #[serde(rename = "g0")]
        gain_amplitude: f64,
        #[serde(rename = "Dl")]
        group_mismatch: f64,
        #[serde(default)]
        pump_phase: f64,
    },
    #[serde(rename = "custom_tabulated")]
    CustomTabulated {
        omega: Vec<f64>,
        s_ss: Vec<f64>,
        s_rr: Vec<f64>,
        s_sr_re: Vec<f64>,
        s_sr_im: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmConfig {
    #[serde(default)]
    pub tau_p: f64,
    #[serde(default)]
    pub tau_g: f64,
    #[serde(default)]
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiltersConfig {
    #[serde(default)]
    pub omega0: f64,
    pub signal: ArmConfig,
    pub reference: ArmConfig,
}

impl Default for FiltersConfig {
    fn default() -> Self {
        Self {
            omega0: 0.0,
            signal: ArmConfig {
                tau_p: 0.0,
                tau_g: 0.0,
                beta: 0.0,
            },
            reference: ArmConfig {
                tau_p: 0.0,
                tau_g: 0.0,
                beta: 0.0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub eta: f64,
    /// "ideal" or "gaussian"; gaussian requires `Tg`.
    pub response: DetectorKind,
    #[serde(rename = "Tg", skip_serializing_if = "Option::is_none")]
    pub response_time: Option<f64>,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Ideal,
    Gaussian,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            eta: 1.0,
            response: DetectorKind::Ideal,
            response_time: None,
            q: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub trials: u64,
    pub seed: u64,
    pub burn_margin: f64,
}

/// The canonical, fully validated scenario document. Serializing and
/// re-parsing it yields an equal value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub source: SourceConfig,
    pub filters: FiltersConfig,
    pub detector: DetectorConfig,
    pub grid: GridConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<MonteCarloConfig>,
}

impl ScenarioConfig {
    pub fn source(&self) -> JointGaussianSource {
        match &self.source {
            SourceConfig::GaussianQuantum {
                flux,
                coherence_time,
            } => JointGaussianSource::gaussian_quantum(*flux, *coherence_time),
            SourceConfig::GaussianClassical {
                flux,
                coherence_time,
            } => JointGaussianSource::gaussian_classical(*flux, *coherence_time),
            SourceConfig::RectNoise {
                flux,
                half_bandwidth,
                gain,
            } => JointGaussianSource::rect_noise(*flux, *half_bandwidth, *gain),
            SourceConfig::SincDownconverter {
                gain_amplitude,
                group_mismatch,
                pump_phase,
            } => JointGaussianSource::sinc_downconverter(*gain_amplitude, *group_mismatch, *pump_phase),
            SourceConfig::CustomTabulated {
                omega,
                s_ss,
                s_rr,
                s_sr_re,
                s_sr_im,
            } => JointGaussianSource::custom_tabulated(SpectraTable {
                omega: omega.clone(),
                s_ss: s_ss.clone(),
                s_rr: s_rr.clone(),
                s_sr_re: s_sr_re.clone(),
                s_sr_im: s_sr_im.clone(),
            }),
        }
        .expect("validated at parse time")
    }

    pub fn scenario(&self) -> Scenario {
        let f = &self.filters;
        let pair = FilterPair::new(
            DispersiveFilter::new(f.signal.tau_p, f.signal.tau_g, f.signal.beta, f.omega0)
                .expect("validated"),
            DispersiveFilter::new(
                f.reference.tau_p,
                f.reference.tau_g,
                f.reference.beta,
                f.omega0,
            )
            .expect("validated"),
        )
        .expect("validated");
        let response = match self.detector.response {
            DetectorKind::Ideal => DetectorResponse::Ideal,
            DetectorKind::Gaussian => DetectorResponse::Gaussian {
                response_time: self.detector.response_time.expect("validated"),
            },
        };
        let detector = Detector::new(self.detector.eta, response, self.detector.q).expect("validated");
        let grid = SpectralGrid::new(self.grid.n, self.grid.dt).expect("validated");
        Scenario::new(self.source(), pair, detector, grid)
    }

    pub fn mc_config(&self) -> Option<MCConfig> {
        self.montecarlo
            .map(|m| MCConfig::new(m.trials, m.seed, m.burn_margin).expect("validated"))
    }

    /// Canonical serialized form (defaults materialized, balanced betas
    /// expanded).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

// ---------------------------------------------------------------------
// raw layer
// ---------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    source: Option<RawSource>,
    filters: Option<RawFilters>,
    detector: Option<RawDetector>,
    grid: Option<RawGrid>,
    montecarlo: Option<RawMonteCarlo>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    family: Option<String>,
    #[serde(rename = "P")]
    flux: Option<f64>,
    #[serde(rename = "T0")]
    coherence_time: Option<f64>,
    #[serde(rename = "Omega")]
    half_bandwidth: Option<f64>,
    #[serde(rename = "G")]
    gain: Option<f64>,
    #[serde(rename = "g0")]
    gain_amplitude: Option<f64>,
    #[serde(rename = "Dl")]
    group_mismatch: Option<f64>,
    pump_phase: Option<f64>,
    omega: Option<Vec<f64>>,
    s_ss: Option<Vec<f64>>,
    s_rr: Option<Vec<f64>>,
    s_sr_re: Option<Vec<f64>>,
    s_sr_im: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArm {
    tau_p: Option<f64>,
    tau_g: Option<f64>,
    beta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilters {
    omega0: Option<f64>,
    balanced_beta: Option<f64>,
    signal: Option<RawArm>,
    reference: Option<RawArm>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    eta: Option<f64>,
    response: Option<String>,
    #[serde(rename = "Tg")]
    response_time: Option<f64>,
    q: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: Option<u64>,
    dt: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonteCarlo {
    trials: Option<u64>,
    seed: Option<u64>,
    burn_margin: Option<f64>,
}

struct Validator {
    violations: Vec<Violation>,
}

impl Validator {
    fn new() -> Self {
        Self {
            violations: Vec::new(),
        }
    }

    fn fail(&mut self, path: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn require<T: Copy>(&mut self, path: &str, value: Option<T>) -> Option<T> {
        if value.is_none() {
            self.fail(path, "missing required field");
        }
        value
    }

    fn forbid<T>(&mut self, path: &str, value: &Option<T>, family: &str) {
        if value.is_some() {
            self.fail(path, format!("not a parameter of family {family}"));
        }
    }
}

fn validate_source(raw: &RawSource, v: &mut Validator) -> Option<SourceConfig> {
    let family = match raw.family.as_deref() {
        Some(f) => f,
        None => {
            v.fail("source.family", "missing required field");
            return None;
        }
    };
    match family {
        "gaussian_quantum" | "gaussian_classical" => {
            v.forbid("source.Omega", &raw.half_bandwidth, family);
            v.forbid("source.G", &raw.gain, family);
            v.forbid("source.g0", &raw.gain_amplitude, family);
            v.forbid("source.Dl", &raw.group_mismatch, family);
            v.forbid("source.pump_phase", &raw.pump_phase, family);
            v.forbid("source.omega", &raw.omega, family);
            let flux = v.require("source.P", raw.flux)?;
            let t0 = v.require("source.T0", raw.coherence_time)?;
            if !(flux > 0.0) {
                v.fail("source.P", format!("photon flux must be positive (got {flux})"));
                return None;
            }
            if !(t0 > 0.0) {
                v.fail("source.T0", format!("coherence time must be positive (got {t0})"));
                return None;
            }
            Some(if family == "gaussian_quantum" {
                SourceConfig::GaussianQuantum {
                    flux,
                    coherence_time: t0,
                }
            } else {
                SourceConfig::GaussianClassical {
                    flux,
                    coherence_time: t0,
                }
            })
        }
        "rect_noise" => {
            v.forbid("source.T0", &raw.coherence_time, family);
            v.forbid("source.g0", &raw.gain_amplitude, family);
            v.forbid("source.Dl", &raw.group_mismatch, family);
            let flux = v.require("source.P", raw.flux)?;
            let half_bandwidth = v.require("source.Omega", raw.half_bandwidth)?;
            let gain = v.require("source.G", raw.gain)?;
            let mut ok = true;
            if !(flux > 0.0) {
                v.fail("source.P", format!("photon flux must be positive (got {flux})"));
                ok = false;
            }
            if !(half_bandwidth > 0.0) {
                v.fail(
                    "source.Omega",
                    format!("half-bandwidth must be positive (got {half_bandwidth})"),
                );
                ok = false;
            }
            if !(gain >= 1.0) {
                v.fail("source.G", format!("amplifier gain must be >= 1 (got {gain})"));
                ok = false;
            }
            ok.then_some(SourceConfig::RectNoise {
                flux,
                half_bandwidth,
                gain,
            })
        }
        "sinc_downconverter" => {
            v.forbid("source.P", &raw.flux, family);
            v.forbid("source.T0", &raw.coherence_time, family);
            v.forbid("source.Omega", &raw.half_bandwidth, family);
            v.forbid("source.G", &raw.gain, family);
            let g0 = v.require("source.g0", raw.gain_amplitude)?;
            let dl = v.require("source.Dl", raw.group_mismatch)?;
            let mut ok = true;
            if !(g0 > 0.0) {
                v.fail("source.g0", format!("gain amplitude must be positive (got {g0})"));
                ok = false;
            }
            if !(dl > 0.0) {
                v.fail("source.Dl", format!("group mismatch must be positive (got {dl})"));
                ok = false;
            }
            ok.then_some(SourceConfig::SincDownconverter {
                gain_amplitude: g0,
                group_mismatch: dl,
                pump_phase: raw.pump_phase.unwrap_or(0.0),
            })
        }
        "custom_tabulated" => {
            v.forbid("source.P", &raw.flux, family);
            v.forbid("source.T0", &raw.coherence_time, family);
            let omega = raw.omega.clone();
            let s_ss = raw.s_ss.clone();
            let s_rr = raw.s_rr.clone();
            let s_sr_re = raw.s_sr_re.clone();
            let s_sr_im = raw.s_sr_im.clone();
            if omega.is_none() {
                v.fail("source.omega", "missing required field");
            }
            if s_ss.is_none() {
                v.fail("source.s_ss", "missing required field");
            }
            if s_rr.is_none() {
                v.fail("source.s_rr", "missing required field");
            }
            if s_sr_re.is_none() {
                v.fail("source.s_sr_re", "missing required field");
            }
            if s_sr_im.is_none() {
                v.fail("source.s_sr_im", "missing required field");
            }
            let (omega, s_ss, s_rr, s_sr_re, s_sr_im) =
                (omega?, s_ss?, s_rr?, s_sr_re?, s_sr_im?);
            match JointGaussianSource::custom_tabulated(SpectraTable {
                omega: omega.clone(),
                s_ss: s_ss.clone(),
                s_rr: s_rr.clone(),
                s_sr_re: s_sr_re.clone(),
                s_sr_im: s_sr_im.clone(),
            }) {
                Ok(_) => Some(SourceConfig::CustomTabulated {
                    omega,
                    s_ss,
                    s_rr,
                    s_sr_re,
                    s_sr_im,
                }),
                Err(e) => {
                    v.fail("source", e.to_string());
                    None
                }
            }
        }
        other => {
            v.fail("source.family", format!("unknown family \"{other}\""));
            None
        }
    }
}

fn validate_filters(raw: Option<&RawFilters>, v: &mut Validator) -> FiltersConfig {
    let raw = match raw {
        None => return FiltersConfig::default(),
        Some(r) => r,
    };
    let omega0 = raw.omega0.unwrap_or(0.0);
    if !omega0.is_finite() || omega0 < 0.0 {
        v.fail(
            "filters.omega0",
            format!("center frequency must be finite and nonnegative (got {omega0})"),
        );
    }
    let arm = |raw_arm: Option<&RawArm>| ArmConfig {
        tau_p: raw_arm.and_then(|a| a.tau_p).unwrap_or(0.0),
        tau_g: raw_arm.and_then(|a| a.tau_g).unwrap_or(0.0),
        beta: raw_arm.and_then(|a| a.beta).unwrap_or(0.0),
    };
    match (raw.balanced_beta, &raw.signal, &raw.reference) {
        (Some(beta), None, None) => FiltersConfig {
            omega0,
            signal: ArmConfig {
                tau_p: 0.0,
                tau_g: 0.0,
                beta,
            },
            reference: ArmConfig {
                tau_p: 0.0,
                tau_g: 0.0,
                beta: -beta,
            },
        },
        (Some(_), _, _) => {
            v.fail(
                "filters.balanced_beta",
                "balanced_beta cannot be combined with explicit signal/reference arms",
            );
            FiltersConfig::default()
        }
        (None, s, r) => FiltersConfig {
            omega0,
            signal: arm(s.as_ref()),
            reference: arm(r.as_ref()),
        },
    }
}

fn validate_detector(raw: Option<&RawDetector>, v: &mut Validator) -> DetectorConfig {
    let raw = match raw {
        None => return DetectorConfig::default(),
        Some(r) => r,
    };
    let eta = raw.eta.unwrap_or(1.0);
    if !(eta > 0.0 && eta <= 1.0) {
        v.fail("detector.eta", format!("quantum efficiency must lie in (0, 1] (got {eta})"));
    }
    let q = raw.q.unwrap_or(1.0);
    if !(q > 0.0) {
        v.fail("detector.q", format!("charge scale must be positive (got {q})"));
    }
    let response = match raw.response.as_deref() {
        None | Some("ideal") => {
            if raw.response_time.is_some() {
                v.fail("detector.Tg", "Tg is only valid for the gaussian response");
            }
            DetectorKind::Ideal
        }
        Some("gaussian") => DetectorKind::Gaussian,
        Some(other) => {
            v.fail(
                "detector.response",
                format!("unknown response \"{other}\" (expected \"ideal\" or \"gaussian\")"),
            );
            DetectorKind::Ideal
        }
    };
    let response_time = if response == DetectorKind::Gaussian {
        match raw.response_time {
            Some(tg) if tg > 0.0 => Some(tg),
            Some(tg) => {
                v.fail("detector.Tg", format!("response time must be positive (got {tg})"));
                None
            }
            None => {
                v.fail("detector.Tg", "gaussian response requires Tg");
                None
            }
        }
    } else {
        None
    };
    DetectorConfig {
        eta,
        response,
        response_time,
        q,
    }
}

fn validate_grid(raw: Option<&RawGrid>, v: &mut Validator) -> Option<GridConfig> {
    let raw = match raw {
        None => {
            v.fail("grid", "missing required block");
            return None;
        }
        Some(r) => r,
    };
    let n = v.require("grid.n", raw.n)?;
    let dt = v.require("grid.dt", raw.dt)?;
    let n = n as usize;
    if let Err(e) = SpectralGrid::new(n, dt) {
        v.fail("grid", e.to_string());
        return None;
    }
    Some(GridConfig { n, dt })
}

fn validate_montecarlo(
    raw: Option<&RawMonteCarlo>,
    source: Option<&SourceConfig>,
    v: &mut Validator,
) -> Option<MonteCarloConfig> {
    let raw = raw?;
    let trials = raw.trials.unwrap_or(1000);
    let seed = raw.seed.unwrap_or(0);
    let burn_margin = raw.burn_margin.unwrap_or(0.1);
    if trials < 1 {
        v.fail("montecarlo.trials", "trials must be >= 1");
    }
    if !(0.0..=0.25).contains(&burn_margin) {
        v.fail(
            "montecarlo.burn_margin",
            format!("burn margin must lie in [0, 0.25] (got {burn_margin})"),
        );
    }
    // Family-level semiclassical gate: sampling is only valid for
    // classical states, and three families are decidable at parse time.
    match source {
        Some(SourceConfig::GaussianQuantum { .. }) => v.fail(
            "montecarlo",
            "semiclassical sampling requires a classical source; \
             family gaussian_quantum saturates the quantum bound (nonclassical)",
        ),
        Some(SourceConfig::SincDownconverter { .. }) => v.fail(
            "montecarlo",
            "semiclassical sampling requires a classical source; \
             family sinc_downconverter violates the classical bound (nonclassical)",
        ),
        Some(SourceConfig::RectNoise {
            flux,
            half_bandwidth,
            gain,
        }) => {
            if let Ok(gc) = critical_gain(*flux, *half_bandwidth) {
                if *gain < gc {
                    v.fail(
                        "montecarlo",
                        format!(
                            "semiclassical sampling requires a classical source; \
                             rect_noise with G = {gain} is below the critical gain G_c = {gc:.12}"
                        ),
                    );
                }
            }
        }
        // classical by construction, or decided at run time (custom)
        _ => {}
    }
    Some(MonteCarloConfig {
        trials,
        seed,
        burn_margin,
    })
}

/// Parse a configuration document, reporting every violation found.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
    let mut v = Validator::new();
    let source = match &raw.source {
        None => {
            v.fail("source", "missing required block");
            None
        }
        Some(s) => validate_source(s, &mut v),
    };
    let filters = validate_filters(raw.filters.as_ref(), &mut v);
    let detector = validate_detector(raw.detector.as_ref(), &mut v);
    let grid = validate_grid(raw.grid.as_ref(), &mut v);
    let montecarlo = validate_montecarlo(raw.montecarlo.as_ref(), source.as_ref(), &mut v);
    if !v.violations.is_empty() {
        return Err(ConfigError::Invalid(v.violations));
    }
    Ok(ScenarioConfig {
        source: source.expect("no violations"),
        filters,
        detector,
        grid: grid.expect("no violations"),
        montecarlo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let text = r#"{
            "source": {"family": "gaussian_quantum", "P": 1e6, "T0": 1e-12},
            "grid": {"n": 1024, "dt": 6.25e-14}
        }"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.detector.q, 1.0);
        assert_eq!(cfg.detector.eta, 1.0);
        assert_eq!(cfg.detector.response, DetectorKind::Ideal);
        assert_eq!(cfg.filters.signal.beta, 0.0);
        assert!(cfg.montecarlo.is_none());
        // montecarlo defaults apply when the block is present
        let text2 = r#"{
            "source": {"family": "gaussian_classical", "P": 1e6, "T0": 1e-12},
            "grid": {"n": 1024, "dt": 6.25e-14},
            "montecarlo": {"trials": 100, "seed": 1}
        }"#;
        let cfg2 = parse_config(text2).unwrap();
        assert_eq!(cfg2.montecarlo.unwrap().burn_margin, 0.1);
    }

    #[test]
    fn subunity_gain_reports_path() {
        let text = r#"{
            "source": {"family": "rect_noise", "P": 1.0, "Omega": 1e12, "G": 0.5},
            "grid": {"n": 1024, "dt": 1e-13}
        }"#;
        match parse_config(text) {
            Err(ConfigError::Invalid(violations)) => {
                assert!(violations.iter().any(|v| v.path == "source.G"));
                assert!(violations
                    .iter()
                    .any(|v| v.message.contains(">= 1")));
            }
            other => panic!("expected invalid config, got {other:?}"),
        }
    }

    #[test]
    fn montecarlo_with_quantum_source_cites_gate() {
        let text = r#"{
            "source": {"family": "gaussian_quantum", "P": 1e6, "T0": 1e-12},
            "grid": {"n": 1024, "dt": 6.25e-14},
            "montecarlo": {"trials": 100, "seed": 0}
        }"#;
        match parse_config(text) {
            Err(ConfigError::Invalid(violations)) => {
                let gate = violations.iter().find(|v| v.path == "montecarlo").unwrap();
                assert!(gate.message.contains("semiclassical"));
            }
            other => panic!("expected gate violation, got {other:?}"),
        }
    }

    #[test]
    fn all_violations_are_collected() {
        let text = r#"{
            "source": {"family": "rect_noise", "P": -1.0, "Omega": 0.0, "G": 0.5},
            "detector": {"eta": 2.0, "q": -1.0, "response": "ideal"},
            "grid": {"n": 100, "dt": -1e-13}
        }"#;
        match parse_config(text) {
            Err(ConfigError::Invalid(violations)) => {
                let paths: Vec<&str> = violations.iter().map(|v| v.path.as_str()).collect();
                for expected in ["source.P", "source.Omega", "source.G", "detector.eta", "detector.q", "grid"] {
                    assert!(paths.contains(&expected), "missing {expected} in {paths:?}");
                }
            }
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{
            "source": {"family": "gaussian_quantum", "P": 1e6, "T0": 1e-12, "bogus": 1},
            "grid": {"n": 1024, "dt": 6.25e-14}
        }"#;
        match parse_config(text) {
            Err(ConfigError::Malformed(msg)) => assert!(msg.contains("bogus")),
            other => panic!("expected malformed, got {other:?}"),
        }
    }

    #[test]
    fn foreign_family_parameters_are_rejected() {
        let text = r#"{
            "source": {"family": "gaussian_quantum", "P": 1e6, "T0": 1e-12, "G": 2.0},
            "grid": {"n": 1024, "dt": 6.25e-14}
        }"#;
        match parse_config(text) {
            Err(ConfigError::Invalid(violations)) => {
                assert!(violations.iter().any(|v| v.path == "source.G"));
            }
            other => panic!("expected invalid, got {other:?}"),
        }
    }

    #[test]
    fn balanced_beta_expands() {
        let text = r#"{
            "source": {"family": "gaussian_classical", "P": 1e6, "T0": 1e-12},
            "filters": {"omega0": 1.2e15, "balanced_beta": 1e-24},
            "grid": {"n": 1024, "dt": 6.25e-14}
        }"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.filters.signal.beta, 1e-24);
        assert_eq!(cfg.filters.reference.beta, -1e-24);
        assert_eq!(cfg.filters.omega0, 1.2e15);
    }

    #[test]
    fn roundtrip_is_identity() {
        let text = r#"{
            "source": {"family": "rect_noise", "P": 2.5, "Omega": 3.14e12, "G": 1.7},
            "filters": {"omega0": 2.4e15, "signal": {"beta": 1e-25}, "reference": {"beta": -1e-25, "tau_g": 1e-12}},
            "detector": {"eta": 0.8, "response": "gaussian", "Tg": 1e-9, "q": 1.6e-19},
            "grid": {"n": 4096, "dt": 1e-14},
            "montecarlo": {"trials": 500, "seed": 99, "burn_margin": 0.2}
        }"#;
        let cfg = parse_config(text).unwrap();
        let serialized = cfg.to_json();
        let reparsed = parse_config(&serialized).unwrap();
        assert_eq!(cfg, reparsed);
    }

    #[test]
    fn scenario_construction_succeeds_for_valid_config() {
        let text = r#"{
            "source": {"family": "gaussian_classical", "P": 0.5, "T0": 1.0},
            "grid": {"n": 2048, "dt": 0.0078125},
            "montecarlo": {"trials": 10, "seed": 7, "burn_margin": 0.1}
        }"#;
        let cfg = parse_config(text).unwrap();
        let scenario = cfg.scenario();
        assert!(scenario.check_grid_adequacy().is_ok());
        assert_eq!(cfg.mc_config().unwrap().trials, 10);
    }
}
