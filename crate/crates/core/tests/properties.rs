//! Property tests for the module-level invariants: transform exactness,
//! filter losslessness and cascades, balanced-pair state preservation,
//! bound ordering, and contrast scale invariance.

use num_complex::Complex64;
use proptest::prelude::*;

use dispcancel_core::{
    classify_state, closed_form_gaussian, contrast, correlation_to_spectrum, critical_gain,
    cross_correlation, filter_response, propagate_spectra, spectrum_to_correlation,
    CorrelationKind, Detector, DetectorResponse, DispersiveFilter, FilterPair, GaussianKind,
    JointGaussianSource, Scenario, SpectralGrid, StateLabel, DEFAULT_CLASSIFY_TOL,
};

fn grid64() -> SpectralGrid {
    SpectralGrid::new(64, 0.25).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_roundtrip_is_exact(values in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 64)) {
        let grid = grid64();
        let spectrum: Vec<Complex64> = values.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let trace = spectrum_to_correlation(&grid, &spectrum, CorrelationKind::CrossPhaseSensitive).unwrap();
        let back = correlation_to_spectrum(&trace);
        let peak = spectrum.iter().fold(0.0f64, |a, v| a.max(v.norm())).max(1e-300);
        for (orig, rt) in spectrum.iter().zip(&back) {
            prop_assert!((orig - rt).norm() <= 1e-12 * peak);
        }
    }

    #[test]
    fn filters_are_lossless(
        tau_p in -1e-9f64..1e-9,
        tau_g in -1e-9f64..1e-9,
        beta in -1e-20f64..1e-20,
        omega0 in 1e14f64..3e15,
        omega in -1e13f64..1e13,
    ) {
        let f = DispersiveFilter::new(tau_p, tau_g, beta, omega0).unwrap();
        prop_assert!((filter_response(&f, omega).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn filter_cascade_matches_summed_parameters(
        // ranges keep total phases O(100) rad, where the summed-parameter
        // identity is meaningful at 1e-12 in double precision
        p1 in -1e-13f64..1e-13, g1 in -1e-10f64..1e-10, b1 in -1e-22f64..1e-22,
        p2 in -1e-13f64..1e-13, g2 in -1e-10f64..1e-10, b2 in -1e-22f64..1e-22,
        omega in -1e12f64..1e12,
    ) {
        let omega0 = 1.2e15;
        let f1 = DispersiveFilter::new(p1, g1, b1, omega0).unwrap();
        let f2 = DispersiveFilter::new(p2, g2, b2, omega0).unwrap();
        let fsum = DispersiveFilter::new(p1 + p2, g1 + g2, b1 + b2, omega0).unwrap();
        let chained = filter_response(&f1, omega) * filter_response(&f2, omega);
        let combined = filter_response(&fsum, omega);
        prop_assert!((chained - combined).norm() <= 1e-12);
    }

    #[test]
    fn balanced_pair_preserves_correlation_set(beta in 1e-26f64..1e-22, flux in 0.1f64..10.0) {
        // {K_SS, K_RR, |K_SR|} at the output equal the input set: the
        // statement of nonlocal dispersion cancellation at the level of
        // correlation functions.
        let t0 = 1e-12;
        let grid = SpectralGrid::new(512, t0 / 16.0).unwrap();
        let src = JointGaussianSource::gaussian_quantum(flux / t0, t0).unwrap();
        let input = src.sample(&grid);
        let pair = FilterPair::balanced(beta, 1.2e15).unwrap();
        let output = propagate_spectra(&input, &pair);
        prop_assert_eq!(&output.s_ss, &input.s_ss);
        prop_assert_eq!(&output.s_rr, &input.s_rr);
        let k_in = spectrum_to_correlation(&grid, &input.s_sr, CorrelationKind::CrossPhaseSensitive).unwrap();
        let k_out = spectrum_to_correlation(&grid, &output.s_sr, CorrelationKind::CrossPhaseSensitive).unwrap();
        let peak = k_in.values.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        for (a, b) in k_out.values.iter().zip(&k_in.values) {
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-12 * peak);
        }
    }

    #[test]
    fn contrast_invariant_under_charge_and_efficiency(
        charge in 0.1f64..10.0,
        eta in 0.05f64..1.0,
    ) {
        let grid = SpectralGrid::new(1024, 1.0 / 16.0).unwrap();
        let base = closed_form_gaussian(0.3, 1.0, DetectorResponse::Ideal, GaussianKind::Quantum, 1.0, 1.0, &grid).unwrap();
        let scaled = closed_form_gaussian(0.3, 1.0, DetectorResponse::Ideal, GaussianKind::Quantum, charge, eta, &grid).unwrap();
        let c0 = contrast(&base).unwrap();
        let c1 = contrast(&scaled).unwrap();
        prop_assert!((c0 - c1).abs() <= 1e-9 * c0);
        let f = charge * charge * eta * eta;
        prop_assert!((scaled.c_acc - f * base.c_acc).abs() <= 1e-12 * scaled.c_acc);
    }

    #[test]
    fn beta_invariance_of_full_trace(beta in 1e-26f64..1e-22) {
        // for beta_S = -beta_R the entire C(tau) trace is independent of
        // beta to <= 1e-9 relative
        let t0 = 1e-12;
        let grid = SpectralGrid::new(1024, t0 / 16.0).unwrap();
        let det = Detector::ideal();
        let run = |b: f64, kind: GaussianKind| {
            let src = match kind {
                GaussianKind::Quantum => JointGaussianSource::gaussian_quantum(1e6, t0).unwrap(),
                GaussianKind::Classical => JointGaussianSource::gaussian_classical(1e6, t0).unwrap(),
            };
            cross_correlation(&Scenario::new(
                src,
                FilterPair::balanced(b, 1.2e15).unwrap(),
                det,
                grid,
            ))
            .unwrap()
        };
        for kind in [GaussianKind::Quantum, GaussianKind::Classical] {
            let reference = run(0.0, kind);
            let dispersed = run(beta, kind);
            for (a, b) in reference.c.iter().zip(&dispersed.c) {
                prop_assert!((a - b).abs() <= 1e-9 * a.abs());
            }
        }
    }
}

#[test]
fn classification_is_monotone_in_violation_margin() {
    // sweeping the rect-noise gain downward through G_c walks the label
    // chain classical -> classical_maximally_correlated -> nonclassical,
    // and pushing the cross spectrum past the quantum bound gives invalid
    let omega_b = std::f64::consts::PI;
    let flux = 1.0;
    let grid = SpectralGrid::new(64, std::f64::consts::PI / (16.0 * omega_b)).unwrap();
    let gc = critical_gain(flux, omega_b).unwrap();
    let mut last_rank = i32::MIN;
    for gain in [4.0, 2.0, gc + 1e-4, gc, gc - 1e-4, 1.0 + 1e-9, 1.0] {
        let src = JointGaussianSource::rect_noise(flux, omega_b, gain).unwrap();
        let label = classify_state(&src, &grid, DEFAULT_CLASSIFY_TOL).unwrap().label;
        let rank = match label {
            StateLabel::Classical => 0,
            StateLabel::ClassicalMaximallyCorrelated => 1,
            StateLabel::Nonclassical => 2,
            StateLabel::MaximallyEntangled => 3,
            StateLabel::Invalid => 4,
        };
        assert!(rank >= last_rank, "gain {gain}: rank regressed");
        last_rank = rank;
    }
    assert_eq!(last_rank, 3); // G = 1 saturates the quantum bound
}
