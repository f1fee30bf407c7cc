//! Command implementations shared by the binary and the test suites.

use std::fs;
use std::path::{Path, PathBuf};

use dispcancel_core::{
    classify_state, contrast, cross_correlation, dispersion_sweep, gain_sweep, mc_run,
    signature_width, Error as CoreError, SweepTable, DEFAULT_CLASSIFY_TOL,
};

use crate::config::{ConfigError, ScenarioConfig, SourceConfig};
use crate::report::{mc_trace_csv, sweep_csv, trace_csv, ReportRecord};

/// Anything a command can fail with, mapped onto the exit-code contract:
/// 2 for validation errors, 3 for numeric-configuration errors, 1
/// otherwise.
#[derive(Debug)]
pub enum CmdError {
    Config(ConfigError),
    Core(CoreError),
    Io(std::io::Error),
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(e) => write!(f, "{e}"),
            Self::Core(e) => write!(f, "{e}"),
            Self::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CmdError {}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Core(e) => match e {
                CoreError::GridResolution { .. }
                | CoreError::RateResolution { .. }
                | CoreError::Factorization { .. } => 3,
                _ => 2,
            },
            Self::Io(_) => 1,
        }
    }

    /// Machine-readable error for stderr.
    pub fn to_json(&self) -> String {
        match self {
            Self::Config(e) => e.to_json(),
            Self::Core(e) => serde_json::json!({
                "error": "core",
                "message": e.to_string(),
            })
            .to_string(),
            Self::Io(e) => serde_json::json!({
                "error": "io",
                "message": e.to_string(),
            })
            .to_string(),
        }
    }
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        Self::Core(e)
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

fn validation_error(path: &str, message: &str) -> CmdError {
    CmdError::Config(ConfigError::Invalid(vec![crate::config::Violation {
        path: path.to_string(),
        message: message.to_string(),
    }]))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CmdError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

/// Analytic cross-correlation: writes `trace.csv` and `report.json`.
pub fn cmd_analyze(config: &ScenarioConfig, out_dir: &Path) -> Result<ReportRecord, CmdError> {
    let scenario = config.scenario();
    let result = cross_correlation(&scenario)?;
    let mut report = ReportRecord::new("analyze", config);
    report.c_acc = Some(result.c_acc);
    report.contrast = Some(contrast(&result)?);
    report.fwhm_s = match signature_width(&result) {
        Ok(w) => Some(w),
        Err(CoreError::WidthUndefined(msg)) => {
            report.warnings.push(format!("fwhm undefined: {msg}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    report.state = Some(classify_state(
        &scenario.source,
        &scenario.grid,
        DEFAULT_CLASSIFY_TOL,
    )?);
    let trace_path = write_file(out_dir, "trace.csv", &trace_csv(&result))?;
    report.trace_files.push(trace_path.display().to_string());
    report.write(&out_dir.join("report.json"))?;
    Ok(report)
}

/// Monte Carlo estimation: writes `mc_trace.csv` and `report.json`.
pub fn cmd_montecarlo(config: &ScenarioConfig, out_dir: &Path) -> Result<ReportRecord, CmdError> {
    let mc = config
        .mc_config()
        .ok_or_else(|| validation_error("montecarlo", "missing required block for this command"))?;
    let scenario = config.scenario();
    let est = mc_run(&mc, &scenario)?;
    let mut report = ReportRecord::new("montecarlo", config);
    report.master_seed = Some(mc.seed);
    report.c_acc = Some(est.c_acc);
    let peak_dc = est
        .mean
        .iter()
        .map(|v| v - est.c_acc)
        .fold(f64::NEG_INFINITY, f64::max);
    if est.c_acc > 0.0 {
        report.contrast = Some(peak_dc / est.c_acc);
    }
    report.state = Some(classify_state(
        &scenario.source,
        &scenario.grid,
        DEFAULT_CLASSIFY_TOL,
    )?);
    report.warnings.extend(est.info.warnings.iter().cloned());
    let trace_path = write_file(out_dir, "mc_trace.csv", &mc_trace_csv(&est))?;
    report.trace_files.push(trace_path.display().to_string());
    report.write(&out_dir.join("report.json"))?;
    Ok(report)
}

/// Bound classification only: writes `report.json`.
pub fn cmd_bounds(config: &ScenarioConfig, out_dir: &Path) -> Result<ReportRecord, CmdError> {
    let scenario = config.scenario();
    let state = classify_state(&scenario.source, &scenario.grid, DEFAULT_CLASSIFY_TOL)?;
    let mut report = ReportRecord::new("bounds", config);
    report.state = Some(state);
    fs::create_dir_all(out_dir)?;
    report.write(&out_dir.join("report.json"))?;
    Ok(report)
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Balanced dispersion: each value v becomes the pair (v, -v).
    Beta,
    /// Additive-noise amplifier gain (rect_noise sources only).
    Gain,
}

/// Parameter sweep: writes `sweep.csv` and `report.json`.
pub fn cmd_sweep(
    config: &ScenarioConfig,
    param: SweepParam,
    values: &[f64],
    out_dir: &Path,
) -> Result<ReportRecord, CmdError> {
    if values.is_empty() {
        return Err(validation_error("values", "sweep needs at least one value"));
    }
    let table: SweepTable = match param {
        SweepParam::Beta => {
            let pairs: Vec<(f64, f64)> = values.iter().map(|&v| (v, -v)).collect();
            dispersion_sweep(&config.scenario(), &pairs)?
        }
        SweepParam::Gain => match &config.source {
            SourceConfig::RectNoise {
                flux,
                half_bandwidth,
                ..
            } => gain_sweep(*flux, *half_bandwidth, values)?,
            other => {
                return Err(validation_error(
                    "source.family",
                    &format!(
                        "gain sweeps require a rect_noise source (got {})",
                        match other {
                            SourceConfig::GaussianQuantum { .. } => "gaussian_quantum",
                            SourceConfig::GaussianClassical { .. } => "gaussian_classical",
                            SourceConfig::SincDownconverter { .. } => "sinc_downconverter",
                            SourceConfig::CustomTabulated { .. } => "custom_tabulated",
                            SourceConfig::RectNoise { .. } => unreachable!(),
                        }
                    ),
                ));
            }
        },
    };
    let mut report = ReportRecord::new("sweep", config);
    let path = write_file(out_dir, "sweep.csv", &sweep_csv(&table))?;
    report.trace_files.push(path.display().to_string());
    report.write(&out_dir.join("report.json"))?;
    Ok(report)
}
