// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use std::f64::consts::PI;

use pcz_core::circuit::{DeviceModel, SpectralParams};
use pcz_core::pulse::{
    coupling_series, flux_pulse, line_amplitude, nonlinear_harmonic, spectrum, PulseParams,
    SEED_LAMBDA,
};
use pcz_core::Error;
use proptest::prelude::*;

fn seeded(scale: f64) -> PulseParams {
    PulseParams {
        amplitude_scale: scale,
        ..PulseParams::default()
    }
}

#[test]
fn seed_envelope_midpoint() {
    let p = seeded(1.0);
    assert!((p.shape(p.t_active / 2.0) - 1.5018).abs() < 1e-12);
    assert_eq!(p.lambda, SEED_LAMBDA);
}

#[test]
fn carrier_phase_shift_by_pi_negates_flux() {
    let p = seeded(0.08);
    let q = PulseParams {
        phase: PI,
        ..p.clone()
    };
    let a = flux_pulse(&p).unwrap();
    let b = flux_pulse(&q).unwrap();
    assert_eq!(a.t, b.t);
    assert!(a
        .values
        .iter()
        .zip(&b.values)
        .all(|(x, y)| (x + y).abs() < 1e-12));
}

#[test]
fn record_length_matches_window() {
    let p = seeded(0.08);
    let s = flux_pulse(&p).unwrap();
    assert_eq!(s.len(), 10_600);
    assert!((s.uniform_step().unwrap() - 0.01).abs() < 1e-12);
}

#[test]
fn calibrated_coupling_is_asymmetric_about_idle() {
    // equal flux excursions either side of idle give unequal coupling
    let m = common::calibrated();
    let d = 0.15;
    let up = m.coupling(m.flux_idle + d).unwrap();
    let dn = m.coupling(m.flux_idle - d).unwrap();
    assert!(up > 0.0 && dn < 0.0);
    let asym = (up.abs() - dn.abs()).abs() / up.abs().max(dn.abs());
    assert!(asym > 0.10, "asymmetry {asym}");
}

#[test]
fn calibrated_spectrum_has_carrier_harmonics() {
    let m = common::calibrated();
    let mut p = seeded(0.08);
    p.f_carrier = m.target_frequency();
    let lines = spectrum(&coupling_series(&m, &flux_pulse(&p).unwrap()).unwrap()).unwrap();
    let tol = 1.0 / p.total_duration();
    let f1 = line_amplitude(&lines, p.f_carrier, tol);
    let f2 = line_amplitude(&lines, 2.0 * p.f_carrier, tol);
    let f3 = line_amplitude(&lines, 3.0 * p.f_carrier, tol);
    assert!(f1 > 0.0);
    assert!(f2 / f1 > 0.05 && f3 < f2, "{f1} {f2} {f3}");
    // the curvature also rectifies part of the drive into a DC offset
    assert!(nonlinear_harmonic(&m, &p, 0).unwrap() > 0.01);
}

#[test]
fn excursion_beyond_curve_domain_is_reported() {
    // a low coupler swung towards half flux comes within the degeneracy guard
    let spectral = SpectralParams {
        fc_max: 9.0,
        ..SpectralParams::reference_uncalibrated()
    };
    let m = DeviceModel::new(spectral, 0.0).unwrap();
    let p = seeded(0.3);
    match coupling_series(&m, &flux_pulse(&p).unwrap()) {
        Err(Error::DomainExcursion { index, .. }) => assert!(index > 0),
        other => panic!("expected an excursion error, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval_holds_for_random_pulses(
        l in prop::array::uniform4(-1.0f64..1.0),
        scale in 0.0f64..0.2,
        f in 0.05f64..1.0,
    ) {
        let p = PulseParams { lambda: l, amplitude_scale: scale, f_carrier: f, ..PulseParams::default() };
        let s = flux_pulse(&p).unwrap();
        let lines = spectrum(&s).unwrap();
        let energy: f64 = s.values.iter().map(|v| v * v).sum();
        let spec: f64 = lines.iter().map(|l| l.magnitude * l.magnitude).sum();
        prop_assert!((energy - spec).abs() <= 1e-9 * energy.max(1e-300));
    }

    #[test]
    fn affine_image_has_no_harmonic_residue(slope in 20.0f64..200.0, scale in 0.01f64..0.2) {
        let m = common::affine(slope);
        let p = PulseParams { amplitude_scale: scale, f_carrier: m.target_frequency(), ..PulseParams::default() };
        prop_assert!(nonlinear_harmonic(&m, &p, 2).unwrap() < 1e-9);
    }
}
