//! Uniform time/frequency sampling and the discrete transform pair.
//!
//! All sampled functions in this crate live on a [`SpectralGrid`]: `n`
//! samples spaced `dt` apart covering one period `T = n*dt`, with the
//! matching angular-frequency comb spaced `domega = 2*pi/T`. Samples are
//! stored in FFT index order: index 0 is tau = 0 (or omega = 0), indices
//! `1..n/2` are positive, and `n/2..n` wrap to negative values. The signed
//! value carried by index `k` is `k*dt` (or `k*domega`) for `k < n/2` and
//! `(k - n)*dt` for `k >= n/2`.
//!
//! The transform conventions are
//!
//! ```text
//! S(omega) = Integral dtau K(tau) e^{+i omega tau}          (correlation -> spectrum)
//! K(tau)   = Integral domega/2pi S(omega) e^{-i omega tau}  (spectrum -> correlation)
//! ```
//!
//! discretized so that the pair is an exact inverse on the grid:
//! `K_j = (1/(n*dt)) * sum_k S_k e^{-2 pi i j k / n}` and
//! `S_k = dt * sum_j K_j e^{+2 pi i j k / n}`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform sampling of one circular time/frequency domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    n: usize,
    dt: f64,
}

impl SpectralGrid {
    /// `n` must be a power of two, at least 16; `dt` must be positive.
    pub fn new(n: usize, dt: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "grid.n must be a power of two >= 16 (got {n})"
            )));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("grid.dt must be positive (got {dt})")));
        }
        Ok(Self { n, dt })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Time step in seconds.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Domain length `T = n*dt`.
    pub fn total_time(&self) -> f64 {
        self.n as f64 * self.dt
    }

    /// Angular-frequency step `2*pi/T`.
    pub fn domega(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.total_time()
    }

    /// Nyquist angular frequency `pi/dt`; the sampled comb spans
    /// `[-pi/dt, pi/dt)`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.dt
    }

    /// Signed index carried by storage index `k`.
    #[inline]
    pub fn signed_index(&self, k: usize) -> i64 {
        debug_assert!(k < self.n);
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Angular frequency of bin `k` (signed).
    #[inline]
    pub fn omega(&self, k: usize) -> f64 {
        self.signed_index(k) as f64 * self.domega()
    }

    /// Time lag of bin `j` (signed).
    #[inline]
    pub fn tau(&self, j: usize) -> f64 {
        self.signed_index(j) as f64 * self.dt
    }

    /// Storage index of the bin carrying `-omega_k`. The DC and Nyquist
    /// bins pair with themselves.
    #[inline]
    pub fn neg_index(&self, k: usize) -> usize {
        debug_assert!(k < self.n);
        (self.n - k) % self.n
    }

    /// All angular frequencies in storage order.
    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.omega(k)).collect()
    }

    /// All time lags in storage order.
    pub fn taus(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.tau(j)).collect()
    }

    /// Storage indices for lags in `[-T/4, T/4]`, in ascending-tau order.
    /// This is the window every result reports: circular-convolution
    /// wraparound stays in the discarded margins.
    pub fn report_indices(&self) -> Vec<usize> {
        let q = self.n / 4;
        let mut idx = Vec::with_capacity(2 * q + 1);
        for j in -(q as i64)..=(q as i64) {
            idx.push(j.rem_euclid(self.n as i64) as usize);
        }
        idx
    }
}

/// Plan a forward and inverse FFT pair of the grid's length.
pub(crate) fn plan(grid: &SpectralGrid) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(grid.len());
    let inv = planner.plan_fft_inverse(grid.len());
    (fwd, inv)
}

/// `K_j = (1/(n*dt)) sum_k S_k e^{-2 pi i j k / n}`.
pub(crate) fn spectrum_samples_to_correlation(
    grid: &SpectralGrid,
    spectrum: &[Complex64],
) -> Vec<Complex64> {
    debug_assert_eq!(spectrum.len(), grid.len());
    let (fwd, _) = plan(grid);
    let mut buf = spectrum.to_vec();
    fwd.process(&mut buf);
    let scale = 1.0 / (grid.len() as f64 * grid.dt());
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// `S_k = dt * sum_j K_j e^{+2 pi i j k / n}`.
pub(crate) fn correlation_samples_to_spectrum(
    grid: &SpectralGrid,
    correlation: &[Complex64],
) -> Vec<Complex64> {
    debug_assert_eq!(correlation.len(), grid.len());
    let (_, inv) = plan(grid);
    let mut buf = correlation.to_vec();
    inv.process(&mut buf);
    for v in &mut buf {
        *v *= grid.dt();
    }
    buf
}

/// Circular continuous-convolution approximation of two real traces:
/// `(f * g)(tau_j) = dt * sum_m f_m g_{j-m}`.
pub(crate) fn circular_convolve(grid: &SpectralGrid, f: &[f64], g: &[f64]) -> Vec<f64> {
    debug_assert_eq!(f.len(), grid.len());
    debug_assert_eq!(g.len(), grid.len());
    let (fwd, inv) = plan(grid);
    let mut a: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut b: Vec<Complex64> = g.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    let scale = grid.dt() / grid.len() as f64;
    a.into_iter().map(|v| v.re * scale).collect()
}

/// Circular cross-correlation sum `X_m = sum_j a_j b_{j+m mod n}` (no
/// normalization). Used by the photocurrent correlator.
pub(crate) fn circular_crosscorr(grid: &SpectralGrid, a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), grid.len());
    debug_assert_eq!(b.len(), grid.len());
    let (fwd, inv) = plan(grid);
    let mut fa: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = x.conj() * y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / grid.len() as f64;
    fa.into_iter().map(|v| v.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(SpectralGrid::new(15, 1.0).is_err());
        assert!(SpectralGrid::new(24, 1.0).is_err());
        assert!(SpectralGrid::new(0, 1.0).is_err());
        assert!(SpectralGrid::new(64, 0.0).is_err());
        assert!(SpectralGrid::new(64, -1.0).is_err());
        assert!(SpectralGrid::new(16, 1e-12).is_ok());
    }

    #[test]
    fn frequency_samples_pair_about_zero() {
        let g = SpectralGrid::new(32, 0.5).unwrap();
        for k in 0..g.len() {
            let m = g.neg_index(k);
            if k == 0 || k == g.len() / 2 {
                assert_eq!(m, k);
            } else {
                assert_eq!(g.omega(m), -g.omega(k));
            }
        }
        assert_eq!(g.omega(0), 0.0);
        assert!((g.omega(1) - g.domega()).abs() < 1e-15);
        assert!((g.omega(g.len() - 1) + g.domega()).abs() < 1e-15);
        // Nyquist bin sits at the negative end of the span.
        assert!((g.omega(16) + g.nyquist()).abs() < 1e-12);
    }

    #[test]
    fn report_window_is_quarter_period() {
        let g = SpectralGrid::new(16, 1.0).unwrap();
        let idx = g.report_indices();
        assert_eq!(idx.len(), 9);
        let taus: Vec<f64> = idx.iter().map(|&j| g.tau(j)).collect();
        assert_eq!(taus, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn convolution_with_unit_mass_kernel_preserves_constant() {
        let g = SpectralGrid::new(64, 0.25).unwrap();
        // kernel with integral 1 (single bin of height 1/dt)
        let mut kern = vec![0.0; 64];
        kern[0] = 1.0 / g.dt();
        let f: Vec<f64> = (0..64).map(|i| (i as f64 * 0.1).sin() + 2.0).collect();
        let out = circular_convolve(&g, &f, &kern);
        for (a, b) in out.iter().zip(&f) {
            assert!((a - b).abs() < 1e-12 * b.abs());
        }
    }

    #[test]
    fn crosscorr_matches_direct_sum() {
        let g = SpectralGrid::new(16, 1.0).unwrap();
        let a: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).cos()).collect();
        let b: Vec<f64> = (0..16).map(|i| (i as f64 * 0.11).sin() + 0.5).collect();
        let x = circular_crosscorr(&g, &a, &b);
        for m in 0..16 {
            let direct: f64 = (0..16).map(|j| a[j] * b[(j + m) % 16]).sum();
            assert!(
                (x[m] - direct).abs() < 1e-10,
                "lag {m}: {} vs {direct}",
                x[m]
            );
        }
    }
}
