// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use pcz_core::circuit::{
    calibrate_g_curve, charging_energy, coupler_frequency, ej_of_flux, find_decoupling_flux,
    josephson_energy, transmon_spectrum, ClosureCurve, DeviceModel, SpectralParams,
};
use pcz_core::config::REFERENCE_ANCHORS;
use proptest::prelude::*;

#[test]
fn junction_energy_constants() {
    // E_J/h = I_c / (4 pi e) and E_C/h = e^2 / (2 C h), from the exact SI constants
    let e = 1.602_176_634e-19_f64;
    let h = 6.626_070_15e-34_f64;
    let ej_per_na = 1e-9 / (4.0 * std::f64::consts::PI * e) * 1e-9;
    let ec_per_ff = e * e / (2.0 * 1e-15 * h) * 1e-9;
    assert!((josephson_energy(1.0) - ej_per_na).abs() < 1e-12);
    assert!((josephson_energy(28.0) - 13.9071).abs() < 1e-3);
    assert!((charging_energy(1.0) - ec_per_ff).abs() < 1e-9);
    assert!((charging_energy(85.21) - 0.227_33).abs() < 1e-4);
}

proptest! {
    #[test]
    fn squid_energy_is_even_periodic_and_bounded(d in 0.0f64..1.0, phi in -3.0f64..3.0) {
        let e = ej_of_flux(1.0, d, phi);
        prop_assert!((e - ej_of_flux(1.0, d, -phi)).abs() < 1e-12);
        prop_assert!((e - ej_of_flux(1.0, d, phi + 1.0)).abs() < 1e-9);
        prop_assert!(e >= d - 1e-12 && e <= 1.0 + 1e-12);
    }

    #[test]
    fn transmon_frequency_rises_with_ej(ec in 0.1f64..0.4, ej in 10.0f64..40.0, step in 0.01f64..5.0) {
        let a = transmon_spectrum(ej, ec).unwrap();
        let b = transmon_spectrum(ej + step, ec).unwrap();
        prop_assert!(b.f01 > a.f01);
        prop_assert_eq!(a.eta, -ec);
    }

    #[test]
    fn coupler_frequency_peaks_at_integer_flux(phi in -0.5f64..0.5) {
        prop_assert!(coupler_frequency(11.0, 0.3, phi) <= coupler_frequency(11.0, 0.3, 0.0) + 1e-12);
    }
}

#[test]
fn coupler_bottom_is_set_by_asymmetry() {
    let d: f64 = 0.336;
    assert!((coupler_frequency(10.0, d, 0.5) - 10.0 * d.sqrt()).abs() < 1e-12);
}

#[test]
fn root_finder_locates_synthetic_crossing() {
    let curve = ClosureCurve::new(|phi: f64| 40.0 * (phi - 0.123) + 3.0 * (phi - 0.123).powi(3));
    let root = find_decoupling_flux(&curve, (-0.2, 0.4)).unwrap();
    assert!((root - 0.123).abs() < 1e-9, "root {root}");
    assert!(find_decoupling_flux(&curve, (0.2, 0.4)).is_err());
}

#[test]
fn calibration_reproduces_its_anchors() {
    let anchors: Vec<(f64, f64)> = REFERENCE_ANCHORS.iter().map(|a| (a[0], a[1])).collect();
    let s = calibrate_g_curve(&anchors, &SpectralParams::reference_uncalibrated()).unwrap();
    let m = DeviceModel::new(s, 0.0).unwrap();
    for (phi, g) in anchors {
        assert!((m.coupling(phi).unwrap() - g).abs() < 0.05, "g({phi})");
    }
}

#[test]
fn reference_working_point() {
    let m = common::calibrated();
    assert!((m.flux_idle + 0.35).abs() < 0.03);
    assert!(m.coupling(m.flux_idle).unwrap().abs() < 1e-6);
    // target drive sits below the qubit detuning and above the leak detuning
    assert!((m.target_frequency() - 0.301).abs() < 1e-9);
    assert!((m.qubit_detuning() - 0.069).abs() < 1e-9);
    assert!((m.leak_detuning() - 0.161).abs() < 1e-9);
    // the coupling is monotone across the decoupling point
    assert!(m.idle_slope().unwrap() > 0.0);
}
