//! Result serialization: CSV traces and the JSON report record.
//!
//! Trace CSV columns are fixed: `tau_s,C,C_acc,C_dc` with a trailing
//! `stderr` column for Monte Carlo estimates. Floats are written with 17
//! significant digits so regression comparisons round-trip exactly.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use dispcancel_core::{CrossCorrResult, MCEstimate, StateClass, SweepTable};

use crate::config::ScenarioConfig;

/// 17 significant digits: 1 before the point, 16 after.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// SHA-256 of the canonical serialized scenario; every numeric output in
/// a report traces back to this hash.
pub fn scenario_hash(config: &ScenarioConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// The JSON report emitted next to every trace file.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord {
    pub tool_version: String,
    pub timestamp: String,
    pub command: String,
    pub scenario_hash: String,
    pub scenario: ScenarioConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_acc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contrast: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fwhm_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    pub trace_files: Vec<String>,
    pub warnings: Vec<String>,
}

impl ReportRecord {
    pub fn new(command: &str, config: &ScenarioConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            command: command.to_string(),
            scenario_hash: scenario_hash(config),
            scenario: config.clone(),
            state: None,
            c_acc: None,
            contrast: None,
            fwhm_s: None,
            master_seed: None,
            trace_files: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, serde_json::to_string_pretty(self).expect("report serializes"))
    }
}

pub fn trace_csv(result: &CrossCorrResult) -> String {
    let mut out = String::from("tau_s,C,C_acc,C_dc\n");
    for i in 0..result.taus.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(result.taus[i]),
            fmt_f64(result.c[i]),
            fmt_f64(result.c_acc),
            fmt_f64(result.c_dc[i]),
        ));
    }
    out
}

pub fn mc_trace_csv(est: &MCEstimate) -> String {
    let mut out = String::from("tau_s,C,C_acc,C_dc,stderr\n");
    for i in 0..est.taus.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(est.taus[i]),
            fmt_f64(est.mean[i]),
            fmt_f64(est.c_acc),
            fmt_f64(est.mean[i] - est.c_acc),
            fmt_f64(est.stderr[i]),
        ));
    }
    out
}

pub fn sweep_csv(table: &SweepTable) -> String {
    match table {
        SweepTable::Dispersion(rows) => {
            let mut out = String::from("beta_s,beta_r,contrast,fwhm_s,c_acc,peak_c_dc\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt_f64(r.beta_s),
                    fmt_f64(r.beta_r),
                    fmt_f64(r.contrast),
                    fmt_f64(r.fwhm),
                    fmt_f64(r.c_acc),
                    fmt_f64(r.peak_c_dc),
                ));
            }
            out
        }
        SweepTable::Gain(rows) => {
            let mut out = String::from("gain,contrast,state,c_acc,peak_c_dc,fwhm_s\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt_f64(r.gain),
                    fmt_f64(r.contrast),
                    r.state.as_str(),
                    fmt_f64(r.c_acc),
                    fmt_f64(r.peak_c_dc),
                    fmt_f64(r.fwhm),
                ));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn float_formatting_round_trips() {
        for v in [0.0, 1.0, -3.725e-12, 2.0 / 3.0, 1.6651092223153954e9, f64::MIN_POSITIVE] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
    }

    #[test]
    fn hash_is_stable_and_input_sensitive() {
        let a = parse_config(
            r#"{"source": {"family": "gaussian_quantum", "P": 1e6, "T0": 1e-12},
                "grid": {"n": 1024, "dt": 6.25e-14}}"#,
        )
        .unwrap();
        let b = parse_config(
            r#"{"source": {"family": "gaussian_quantum", "P": 2e6, "T0": 1e-12},
                "grid": {"n": 1024, "dt": 6.25e-14}}"#,
        )
        .unwrap();
        assert_eq!(scenario_hash(&a), scenario_hash(&a));
        assert_ne!(scenario_hash(&a), scenario_hash(&b));
        assert_eq!(scenario_hash(&a).len(), 64);
    }
}
