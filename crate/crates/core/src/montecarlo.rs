//! Semiclassical Monte Carlo for classical-state sources.
//!
//! Pipeline per trial: synthesize a jointly Gaussian field realization by
//! circular spectral synthesis, filter it, generate Poisson photodetection
//! events by thinning, form photocurrents, and time-average
//! `i_S(t + tau) i_R(t)` over a burn-trimmed window. Averaging across
//! trials yields the estimate of `C(tau)` with a per-lag standard error.
//!
//! Sampling is gated to classical states: the estimator's validity rests
//! on the fields being ordinary random processes, which requires the
//! classical cross-spectrum bound to hold. Nonclassical inputs are
//! refused, never emulated.
//!
//! Determinism: one master seed; trial `t` draws from an independent
//! counter-selected stream (`ChaCha8` stream id = trial index), and
//! accumulation across trials runs in trial order with compensated
//! summation, so serial and concurrent execution produce identical
//! results bit for bit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{filter_response, Detector, DetectorResponse, FilterPair};
use crate::grid::{self, SpectralGrid};
use crate::scenario::Scenario;
use crate::spectra::{classify_state, JointGaussianSource, DEFAULT_CLASSIFY_TOL};

/// Maximum allowed bin occupancy `max(mu) * dt` for event generation.
pub const MAX_RATE_DT: f64 = 0.1;

/// Monte Carlo run parameters. The realization grid comes from the
/// scenario; trials are averaged i.i.d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub trials: u64,
    /// Master seed; per-trial streams derive from it deterministically.
    pub seed: u64,
    /// Fraction of the domain excluded at each end of the correlator
    /// window, in [0, 0.25].
    pub burn_margin: f64,
}

impl MCConfig {
    pub fn new(trials: u64, seed: u64, burn_margin: f64) -> Result<Self> {
        if trials < 1 {
            return Err(Error::Domain("trials must be >= 1".into()));
        }
        if !(0.0..=0.25).contains(&burn_margin) {
            return Err(Error::Domain(format!(
                "burn_margin must lie in [0, 0.25] (got {burn_margin})"
            )));
        }
        Ok(Self {
            trials,
            seed,
            burn_margin,
        })
    }
}

/// RNG stream for one trial: same master seed, counter-selected stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One synthesized realization of the signal and reference fields,
/// sampled in time (units sqrt(photons/s)).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    pub grid: SpectralGrid,
    pub e_s: Vec<Complex64>,
    pub e_r: Vec<Complex64>,
}

/// Which detector an event train belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorArm {
    Signal,
    Reference,
}

/// Ordered photodetection event times within one realization window.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTrain {
    /// Strictly increasing times in [0, T).
    pub times: Vec<f64>,
    pub arm: DetectorArm,
    pub trial: u64,
}

/// Per-bin Cholesky factors for the synthesis covariance. Bin `k` draws
/// the coefficient pair for (E_S mode at omega_k, E_R mode at -omega_k).
struct SynthesisPlan {
    /// (l11, l21, l22, saturated_ratio) per bin; when the 2x2 covariance
    /// is singular the second coefficient is the deterministic multiple
    /// `ratio * z1` instead of an independent draw.
    factors: Vec<BinFactor>,
}

#[derive(Clone, Copy)]
enum BinFactor {
    Zero,
    /// Second coefficient fully determined by the first.
    Saturated { l11: f64, ratio: Complex64 },
    Full { l11: f64, l21: Complex64, l22: f64 },
}

fn build_plan(source: &JointGaussianSource, grid: &SpectralGrid) -> Result<SynthesisPlan> {
    let class = classify_state(source, grid, DEFAULT_CLASSIFY_TOL)?;
    if !class.label.is_classical() {
        return Err(Error::SemiclassicalGate {
            label: class.label.as_str(),
            margin: class.worst_margin,
            omega: class.worst_omega,
        });
    }
    let spectra = source.sample(grid);
    let scale = 1.0 / (grid.len() as f64 * grid.dt());
    let mut factors = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let neg = grid.neg_index(k);
        let c11 = spectra.s_ss[k] * scale;
        let c22 = spectra.s_rr[neg] * scale;
        // Cross moment of (E_S mode k, E_R mode -k) is the cross spectrum
        // at -omega_k under the e^{+i omega t} synthesis convention; this
        // is what makes the realized correlations reproduce the K
        // functions (all built-in families have even cross spectra, for
        // which it coincides with S_SR(omega_k)).
        let c12 = spectra.s_sr[neg] * scale;
        let det = c11 * c22 - c12.norm_sqr();
        let psd_floor = 1e-12 * (c11 * c22 + c12.norm_sqr());
        if det < -psd_floor {
            return Err(Error::Factorization {
                omega: grid.omega(k),
                det,
            });
        }
        if c11 <= 0.0 {
            if c12.norm_sqr() > psd_floor {
                return Err(Error::Factorization {
                    omega: grid.omega(k),
                    det,
                });
            }
            if c22 <= 0.0 {
                factors.push(BinFactor::Zero);
            } else {
                // signal mode dark, reference mode free
                factors.push(BinFactor::Full {
                    l11: 0.0,
                    l21: Complex64::new(0.0, 0.0),
                    l22: c22.sqrt(),
                });
            }
            continue;
        }
        if det <= psd_floor {
            factors.push(BinFactor::Saturated {
                l11: c11.sqrt(),
                ratio: c12.conj() / c11,
            });
        } else {
            let l11 = c11.sqrt();
            factors.push(BinFactor::Full {
                l11,
                l21: c12.conj() / l11,
                l22: (det / c11).sqrt(),
            });
        }
    }
    Ok(SynthesisPlan { factors })
}

/// Draw one standard circular complex Gaussian (unit mean-square modulus).
#[inline]
fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(rand_distr::StandardNormal);
    let im: f64 = rng.sample(rand_distr::StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn synthesize_from_plan(
    plan: &SynthesisPlan,
    grid: &SpectralGrid,
    rng: &mut ChaCha8Rng,
) -> FieldRealization {
    let n = grid.len();
    let mut alpha = vec![Complex64::new(0.0, 0.0); n];
    let mut beta = vec![Complex64::new(0.0, 0.0); n];
    for (k, factor) in plan.factors.iter().enumerate() {
        // Draw both unit Gaussians unconditionally so the stream position
        // never depends on the source.
        let u1 = complex_normal(rng);
        let u2 = complex_normal(rng);
        let (z1, z2) = match *factor {
            BinFactor::Zero => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            BinFactor::Saturated { l11, ratio } => {
                let z1 = u1 * l11;
                (z1, ratio * z1)
            }
            BinFactor::Full { l11, l21, l22 } => {
                let z1 = u1 * l11;
                (z1, l21 * u1 + l22 * u2)
            }
        };
        alpha[k] = z1;
        beta[grid.neg_index(k)] = z2.conj();
    }
    // E(t_j) = sum_k coeff_k e^{+2 pi i j k / n}
    let (_, inv) = grid::plan(grid);
    inv.process(&mut alpha);
    inv.process(&mut beta);
    FieldRealization {
        grid: *grid,
        e_s: alpha,
        e_r: beta,
    }
}

/// Synthesize one realization whose exact (infinite-trial) correlations
/// equal the source's `K` functions on the circular domain.
///
/// Refuses nonclassical sources; a per-bin covariance that fails to
/// factor numerically is a factorization error.
pub fn synthesize_fields(
    source: &JointGaussianSource,
    grid: &SpectralGrid,
    rng: &mut ChaCha8Rng,
) -> Result<FieldRealization> {
    let plan = build_plan(source, grid)?;
    Ok(synthesize_from_plan(&plan, grid, rng))
}

fn filter_field(field: &[Complex64], response: &[Complex64], grid: &SpectralGrid) -> Vec<Complex64> {
    let (fwd, inv) = grid::plan(grid);
    let mut modes = field.to_vec();
    fwd.process(&mut modes);
    let n_inv = 1.0 / grid.len() as f64;
    for (m, h) in modes.iter_mut().zip(response) {
        *m *= h * n_inv;
    }
    inv.process(&mut modes);
    modes
}

fn arm_response(filter: &crate::filters::DispersiveFilter, grid: &SpectralGrid) -> Vec<Complex64> {
    (0..grid.len())
        .map(|k| filter_response(filter, grid.omega(k)))
        .collect()
}

/// Apply each arm's `H(omega)` to its field in the frequency domain
/// (circular convolution in time). Identity pairs return the input
/// unchanged.
pub fn apply_filter(fields: &FieldRealization, pair: &FilterPair) -> FieldRealization {
    if pair.is_identity() {
        return fields.clone();
    }
    let grid = &fields.grid;
    let h_s = arm_response(&pair.signal, grid);
    let h_r = arm_response(&pair.reference, grid);
    FieldRealization {
        grid: *grid,
        e_s: filter_field(&fields.e_s, &h_s, grid),
        e_r: filter_field(&fields.e_r, &h_r, grid),
    }
}

/// Inhomogeneous Poisson photodetection by thinning against the
/// realization's maximum rate. The rate is `mu(t) = eta |E(t)|^2`, held
/// constant across each sample bin, so the event count over the window is
/// exactly Poisson with mean `integral mu(t) dt`.
pub fn detect(
    field: &[Complex64],
    det: &Detector,
    grid: &SpectralGrid,
    arm: DetectorArm,
    trial: u64,
    rng: &mut ChaCha8Rng,
) -> Result<EventTrain> {
    debug_assert_eq!(field.len(), grid.len());
    let rates: Vec<f64> = field.iter().map(|e| det.eta * e.norm_sqr()).collect();
    let mu_max = rates.iter().cloned().fold(0.0f64, f64::max);
    if mu_max == 0.0 {
        return Ok(EventTrain {
            times: Vec::new(),
            arm,
            trial,
        });
    }
    let occupancy = mu_max * grid.dt();
    if occupancy > MAX_RATE_DT {
        return Err(Error::RateResolution {
            actual: occupancy,
            limit: MAX_RATE_DT,
        });
    }
    let total_time = grid.total_time();
    let candidates = Poisson::new(mu_max * total_time)
        .expect("positive rate")
        .sample(rng) as u64;
    let mut times = Vec::new();
    for _ in 0..candidates {
        let t: f64 = rng.random_range(0.0..total_time);
        let u: f64 = rng.random();
        let bin = ((t / grid.dt()) as usize).min(grid.len() - 1);
        if u * mu_max < rates[bin] {
            times.push(t);
        }
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    Ok(EventTrain { times, arm, trial })
}

/// Photocurrent trace `i(t) = q sum_n g(t - t_n)` on the grid. The ideal
/// detector deposits `q/dt` into the containing bin; the gaussian response
/// spreads each event over `+-8 Tg` with circular wraparound.
pub fn photocurrent(events: &EventTrain, det: &Detector, grid: &SpectralGrid) -> Vec<f64> {
    let n = grid.len();
    let mut trace = vec![0.0; n];
    match det.response {
        DetectorResponse::Ideal => {
            let height = det.charge / grid.dt();
            for &t in &events.times {
                let bin = ((t / grid.dt()) as usize).min(n - 1);
                trace[bin] += height;
            }
        }
        DetectorResponse::Gaussian { response_time } => {
            let half_span = (8.0 * response_time / grid.dt()).ceil() as i64;
            let total_time = grid.total_time();
            for &t in &events.times {
                let center = (t / grid.dt()).round() as i64;
                for off in -half_span..=half_span {
                    let j = (center + off).rem_euclid(n as i64) as usize;
                    // circular distance from sample to event
                    let mut delta = grid.dt() * j as f64 - t;
                    delta -= (delta / total_time).round() * total_time;
                    trace[j] += det.charge * det.impulse_response(delta);
                }
            }
        }
    }
    trace
}

/// Monte Carlo estimate of `C(tau)` over the reported window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub grid: SpectralGrid,
    /// Lags in ascending order (`[-T/4, T/4]`).
    pub taus: Vec<f64>,
    /// Trial-averaged estimate of `C(tau)`.
    pub mean: Vec<f64>,
    /// Standard error of the mean per lag.
    pub stderr: Vec<f64>,
    /// Analytic accidentals level of the scenario, for the `C_dc` split.
    pub c_acc: f64,
    pub trials: u64,
    pub info: McRunInfo,
}

/// Run provenance and diagnostics recorded with every estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRunInfo {
    pub seed: u64,
    pub burn_margin: f64,
    pub mean_events_signal: f64,
    pub mean_events_reference: f64,
    /// Mean events per detector response time, when the response is
    /// gaussian; interpretation of counting-regime validity is left to
    /// the user.
    pub events_per_tg: Option<f64>,
    pub warnings: Vec<String>,
}

struct TrialOutput {
    c_trace: Vec<f64>,
    events_s: u64,
    events_r: u64,
}

/// Compensated (Kahan) accumulator, one compensation term per lag.
struct KahanVec {
    sum: Vec<f64>,
    comp: Vec<f64>,
}

impl KahanVec {
    fn new(n: usize) -> Self {
        Self {
            sum: vec![0.0; n],
            comp: vec![0.0; n],
        }
    }

    fn add(&mut self, values: impl Iterator<Item = f64>) {
        for (i, v) in values.enumerate() {
            let y = v - self.comp[i];
            let t = self.sum[i] + y;
            self.comp[i] = (t - self.sum[i]) - y;
            self.sum[i] = t;
        }
    }
}

fn run_trial(
    trial: u64,
    seed: u64,
    plan: &SynthesisPlan,
    scenario: &Scenario,
    responses: Option<&(Vec<Complex64>, Vec<Complex64>)>,
    window: (usize, usize),
) -> Result<TrialOutput> {
    let grid = &scenario.grid;
    let mut rng = trial_rng(seed, trial);
    let fields = synthesize_from_plan(plan, grid, &mut rng);
    let (e_s, e_r) = match responses {
        Some((h_s, h_r)) => (
            filter_field(&fields.e_s, h_s, grid),
            filter_field(&fields.e_r, h_r, grid),
        ),
        None => (fields.e_s, fields.e_r),
    };
    let det = &scenario.detector;
    let ev_s = detect(&e_s, det, grid, DetectorArm::Signal, trial, &mut rng)?;
    let ev_r = detect(&e_r, det, grid, DetectorArm::Reference, trial, &mut rng)?;
    let i_s = photocurrent(&ev_s, det, grid);
    let i_r = photocurrent(&ev_r, det, grid);

    // windowed time-average of i_S(t + tau) i_R(t) with circular shifts
    let (w_start, w_end) = window;
    let mut windowed_r = vec![0.0; grid.len()];
    windowed_r[w_start..w_end].copy_from_slice(&i_r[w_start..w_end]);
    let mut c_trace = grid::circular_crosscorr(grid, &windowed_r, &i_s);
    let norm = 1.0 / (w_end - w_start) as f64;
    for v in &mut c_trace {
        *v *= norm;
    }
    Ok(TrialOutput {
        c_trace,
        events_s: ev_s.times.len() as u64,
        events_r: ev_r.times.len() as u64,
    })
}

/// Estimate `C(tau)` by averaging the per-trial time-averaged photocurrent
/// products. Deterministic for a fixed seed, serial or parallel.
pub fn estimate_c(config: &MCConfig, scenario: &Scenario) -> Result<MCEstimate> {
    MCConfig::new(config.trials, config.seed, config.burn_margin)?;
    scenario.check_grid_adequacy()?;
    let grid = &scenario.grid;
    let plan = build_plan(&scenario.source, grid)?;
    let responses = if scenario.pair.is_identity() {
        None
    } else {
        Some((
            arm_response(&scenario.pair.signal, grid),
            arm_response(&scenario.pair.reference, grid),
        ))
    };

    let burn = (config.burn_margin * grid.len() as f64).floor() as usize;
    let window = (burn, grid.len() - burn);

    let n = grid.len();
    let mut sum = KahanVec::new(n);
    let mut sum_sq = KahanVec::new(n);
    let mut events_s_total = 0u64;
    let mut events_r_total = 0u64;

    // Parallel within batches, reduced in trial order so thread count
    // never changes the result.
    const BATCH: u64 = 64;
    let mut start = 0u64;
    while start < config.trials {
        let end = (start + BATCH).min(config.trials);
        let outputs: Vec<Result<TrialOutput>> = (start..end)
            .into_par_iter()
            .map(|trial| {
                run_trial(
                    trial,
                    config.seed,
                    &plan,
                    scenario,
                    responses.as_ref(),
                    window,
                )
            })
            .collect();
        for out in outputs {
            let out = out?;
            sum.add(out.c_trace.iter().cloned());
            sum_sq.add(out.c_trace.iter().map(|v| v * v));
            events_s_total += out.events_s;
            events_r_total += out.events_r;
        }
        start = end;
    }

    let trials_f = config.trials as f64;
    let mean_full: Vec<f64> = sum.sum.iter().map(|s| s / trials_f).collect();
    let stderr_full: Vec<f64> = sum
        .sum
        .iter()
        .zip(&sum_sq.sum)
        .map(|(&s, &sq)| {
            if config.trials < 2 {
                0.0
            } else {
                let var = ((sq - s * s / trials_f) / (trials_f - 1.0)).max(0.0);
                (var / trials_f).sqrt()
            }
        })
        .collect();

    let idx = grid.report_indices();
    let taus: Vec<f64> = idx.iter().map(|&j| grid.tau(j)).collect();
    let mean: Vec<f64> = idx.iter().map(|&j| mean_full[j]).collect();
    let stderr: Vec<f64> = idx.iter().map(|&j| stderr_full[j]).collect();

    // analytic accidentals for the C_dc split
    let spectra = scenario.source.sample(grid);
    let norm = 1.0 / (grid.len() as f64 * grid.dt());
    let k_ss0: f64 = spectra.s_ss.iter().sum::<f64>() * norm;
    let k_rr0: f64 = spectra.s_rr.iter().sum::<f64>() * norm;
    let det = &scenario.detector;
    let c_acc = det.charge * det.charge * det.eta * det.eta * k_ss0 * k_rr0;

    let mean_events_signal = events_s_total as f64 / trials_f;
    let mean_events_reference = events_r_total as f64 / trials_f;
    let mut warnings = Vec::new();
    if mean_events_signal < 10.0 || mean_events_reference < 10.0 {
        warnings.push(format!(
            "insufficient events: mean events/trial = {mean_events_signal:.2} (signal), \
             {mean_events_reference:.2} (reference); estimates will be noisy"
        ));
    }
    let events_per_tg = match det.response {
        DetectorResponse::Ideal => None,
        DetectorResponse::Gaussian { response_time } => Some(
            (mean_events_signal + mean_events_reference) / 2.0 / grid.total_time() * response_time,
        ),
    };

    Ok(MCEstimate {
        grid: *grid,
        taus,
        mean,
        stderr,
        c_acc,
        trials: config.trials,
        info: McRunInfo {
            seed: config.seed,
            burn_margin: config.burn_margin,
            mean_events_signal,
            mean_events_reference,
            events_per_tg,
            warnings,
        },
    })
}

/// Orchestrated Monte Carlo run: validates the configuration, runs the
/// estimator, and returns the estimate with its run record. Identical
/// seeds produce identical estimates, serial or concurrent.
pub fn mc_run(config: &MCConfig, scenario: &Scenario) -> Result<MCEstimate> {
    estimate_c(config, scenario)
}
