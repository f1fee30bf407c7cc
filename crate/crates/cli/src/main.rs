use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dispcancel::commands::{cmd_analyze, cmd_bounds, cmd_montecarlo, cmd_sweep, CmdError, SweepParam};
use dispcancel::config::parse_config;
use dispcancel::report::ReportRecord;

/// Dispersion-cancellation simulator for jointly Gaussian signal and
/// reference light with phase-sensitive cross correlations.
#[derive(Parser)]
#[command(name = "dispcancel", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the ensemble-average photocurrent cross-correlation.
    Analyze {
        /// Scenario configuration file (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for trace.csv and report.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Estimate C(tau) by semiclassical Monte Carlo (classical sources).
    Montecarlo {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Classify the source against the quantum and classical bounds.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Sweep balanced dispersion or amplifier gain.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Parameter to sweep.
        #[arg(long = "sweep-param", value_enum)]
        sweep_param: SweepParamArg,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepParamArg {
    Beta,
    Gain,
}

fn load_config(path: &PathBuf) -> Result<dispcancel::ScenarioConfig, CmdError> {
    let text = std::fs::read_to_string(path).map_err(CmdError::Io)?;
    parse_config(&text).map_err(CmdError::Config)
}

fn summarize(report: &ReportRecord) {
    println!("command: {}", report.command);
    if let Some(state) = &report.state {
        println!(
            "state: {} (worst margin {:.3e} at omega {:.6e} rad/s)",
            state.label.as_str(),
            state.worst_margin,
            state.worst_omega
        );
    }
    if let Some(c_acc) = report.c_acc {
        println!("c_acc: {c_acc:.6e}");
    }
    if let Some(contrast) = report.contrast {
        println!("contrast: {contrast:.6e}");
    }
    if let Some(fwhm) = report.fwhm_s {
        println!("fwhm_s: {fwhm:.6e}");
    }
    if let Some(seed) = report.master_seed {
        println!("master_seed: {seed}");
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for f in &report.trace_files {
        println!("wrote: {f}");
    }
    println!("scenario_hash: {}", report.scenario_hash);
}

fn run(cli: Cli) -> Result<ReportRecord, CmdError> {
    match cli.command {
        Command::Analyze { config, out } => {
            let cfg = load_config(&config)?;
            cmd_analyze(&cfg, &out)
        }
        Command::Montecarlo { config, out } => {
            let cfg = load_config(&config)?;
            cmd_montecarlo(&cfg, &out)
        }
        Command::Bounds { config, out } => {
            let cfg = load_config(&config)?;
            cmd_bounds(&cfg, &out)
        }
        Command::Sweep {
            config,
            out,
            sweep_param,
            values,
        } => {
            let cfg = load_config(&config)?;
            let param = match sweep_param {
                SweepParamArg::Beta => SweepParam::Beta,
                SweepParamArg::Gain => SweepParam::Gain,
            };
            cmd_sweep(&cfg, param, &values, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    // DISPCANCEL_THREADS caps internal parallelism (Monte Carlo trials).
    let pool = match std::env::var("DISPCANCEL_THREADS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(k) if k >= 1 => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .expect("thread pool"),
            ),
            _ => {
                eprintln!("DISPCANCEL_THREADS must be a positive integer (got \"{v}\")");
                return ExitCode::from(2);
            }
        },
        Err(_) => None,
    };

    let outcome = match pool {
        Some(p) => p.install(|| run(cli)),
        None => run(cli),
    };

    match outcome {
        Ok(report) => {
            summarize(&report);
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            eprintln!("error: {err}");
            ExitCode::from(u8::try_from(err.exit_code()).unwrap_or(1))
        }
    }
}
