// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate. Runs every criterion, prints one line each, then fails
//! if any criterion outside `KNOWN_RED` failed or if a known-red criterion
//! unexpectedly passed.

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use pcz_core::benchmark::{
    extract_gate_error, gate_fidelity, pauli_error, xeb_simulate, BudgetReport, Depolarizing,
    GateSpec, NoiseModel, XebConfig, XebTarget,
};
use pcz_core::circuit::{find_decoupling_flux, spectral_from_circuit, CircuitParams};
use pcz_core::config::linspace;
use pcz_core::dynamics::{evolve, interaction_frame, S00, S11};
use pcz_core::metrics::{extract_metrics, scan_both, wrap_phase};
use pcz_core::optimizer::{
    analytic_amplitude, delta_sweep, family_collisions, optimize_cz, OptimizerConfig,
};
use pcz_core::pulse::{
    coupling_series, flux_pulse, line_amplitude, nonlinear_harmonic, spectrum, PulseParams,
};

/// The simulated decoherence error of the reference noise model lands near
/// 0.9%, above the [0.3%, 0.7%] bracket.
const KNOWN_RED: &[u32] = &[9];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn table_algebra() -> Outcome {
    let report = BudgetReport::from_decays(
        (0.9978, 0.9982, 0.0),
        (0.9980, 0.9981, 0.0),
        (0.9884, 0.9899, 0.0),
        50.0,
        106.0,
    )
    .unwrap();
    let row = |g: &str| report.rows.iter().find(|r| r.gate == g).unwrap().budget;
    let (cycle, cz, q1, q2) = (row("cycle-CZ"), row("CZ"), row("Q1"), row("Q2"));
    // direct route through the three primitives
    let r_cz = extract_gate_error(
        pauli_error(0.9884, 2).unwrap(),
        pauli_error(0.9978, 1).unwrap(),
        pauli_error(0.9980, 1).unwrap(),
    )
    .unwrap();
    let checks = [
        ("r_p,xeb", cycle.r_p_xeb, 0.0109),
        ("r_p,spb", cycle.r_p_spb, 0.0095),
        ("r_ctrl", cycle.r_p_ctrl, 0.0014),
        ("CZ r_p", cz.r_p_xeb, 0.0078),
        ("CZ r_p direct", r_cz, 0.0078),
        ("CZ F", cz.fidelity, 0.9938),
        ("CZ F direct", gate_fidelity(r_cz, 2).unwrap(), 0.9938),
        ("Q1 F", q1.fidelity, 0.9989),
        ("Q2 F", q2.fidelity, 0.9990),
    ];
    let worst = checks
        .iter()
        .map(|(_, v, t)| (v - t).abs())
        .fold(0.0, f64::max);
    let detail = checks
        .iter()
        .map(|(n, v, _)| format!("{n}={:.3}%", 100.0 * v))
        .collect::<Vec<_>>()
        .join(" ");
    outcome(
        worst <= 2e-4,
        format!("{detail}; worst deviation {:.4}%", 100.0 * worst),
    )
}

fn coupling_curve() -> Outcome {
    let m = common::calibrated();
    let g_half = m.coupling(0.5).unwrap();
    let g_zero = m.coupling(0.0).unwrap();
    let crossing = find_decoupling_flux(m.curve(), (-0.45, -0.25)).unwrap();
    let pass =
        within(g_half, -22.0, 3.0) && within(g_zero, 11.0, 4.0) && within(crossing, -0.35, 0.03);
    outcome(
        pass,
        format!("g(0.5)={g_half:.3} MHz g(0)={g_zero:.3} MHz crossing={crossing:.4}"),
    )
}

fn circuit_spectra() -> Outcome {
    let s = spectral_from_circuit(&CircuitParams::reference()).unwrap();
    let (f, eta) = (s.f01_q1, s.eta_q1);
    let pass = within(f, 4.770, 0.150) && within(eta, -0.232, 0.015);
    outcome(
        pass,
        format!("f01,max={:.1} MHz eta={:.1} MHz", 1e3 * f, 1e3 * eta),
    )
}

fn coherent_floor() -> Outcome {
    let m = common::calibrated();
    let mut parts = Vec::new();
    let mut pass = true;
    for include_shift in [false, true] {
        let cfg = OptimizerConfig {
            include_shift,
            ..OptimizerConfig::default()
        };
        let r = optimize_cz(&m, 100.0, &cfg).unwrap();
        let iters = r.trace.entries.len().saturating_sub(1);
        pass &= r.metrics.coherent_error < 1e-3 && iters <= 200;
        parts.push(format!(
            "shift={include_shift}: error {:.2e} after {iters} iterations{}",
            r.metrics.coherent_error,
            if r.metrics.coherent_error < 1e-4 {
                " (below 1e-4)"
            } else {
                ""
            }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn collision_structure() -> Outcome {
    let m = common::calibrated();
    let (lo, hi) = (50.0, 200.0);
    let collisions = family_collisions(&m, 2, lo, hi);
    let mut deltas = linspace(lo, hi, 31);
    deltas.extend(collisions.iter().map(|c| c.0));
    deltas.sort_by(f64::total_cmp);
    deltas.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let points = delta_sweep(&m, &deltas, 100.0, &OptimizerConfig::default()).unwrap();
    let mut pass = !collisions.is_empty() && deltas.len() >= 15;
    let mut parts = Vec::new();
    for (c, k, tr) in &collisions {
        let near: Vec<f64> = points
            .iter()
            .filter(|p| (p.delta_mhz - c).abs() <= 5.0)
            .map(|p| p.coherent_error)
            .collect();
        let mut ring: Vec<f64> = points
            .iter()
            .filter(|p| {
                let d = (p.delta_mhz - c).abs();
                d > 5.0 && d <= 20.0
            })
            .map(|p| p.coherent_error)
            .collect();
        ring.sort_by(f64::total_cmp);
        let spike = near.iter().cloned().fold(0.0, f64::max);
        let floor = if ring.is_empty() {
            f64::NAN
        } else {
            ring[ring.len() / 2]
        };
        let ok = spike >= 10.0 * floor;
        pass &= ok;
        parts.push(format!(
            "{c:.1} MHz (k={k} {tr:?}) spike/floor={:.0}",
            spike / floor
        ));
    }
    outcome(
        pass,
        format!("{} detunings; {}", deltas.len(), parts.join(", ")),
    )
}

fn ridge() -> Outcome {
    let m = common::calibrated();
    let base = PulseParams {
        t_active: 250.0,
        ..PulseParams::default()
    };
    let amps = linspace(0.0, 0.045, 31);
    let dets = linspace(-1.5, 1.5, 31);
    let row = dets.iter().position(|d| d.abs() < 1e-12).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for include_shift in [false, true] {
        let (swap, phase) = scan_both(&m, &base, &amps, &dets, include_shift).unwrap();
        let best = (0..amps.len())
            .filter(|&i| swap.get(i, row) >= 0.98)
            .map(|i| (i, (wrap_phase(phase.get(i, row) - PI)).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, miss)) => {
                pass &= miss <= 0.1;
                parts.push(format!(
                    "shift={include_shift}: A={:.4} P11={:.4} theta={:.4}",
                    amps[i],
                    swap.get(i, row),
                    phase.get(i, row)
                ));
            }
            None => {
                pass = false;
                parts.push(format!("shift={include_shift}: no point with P11 >= 0.98"));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn harmonics() -> Outcome {
    let m = common::calibrated();
    let mut p = PulseParams {
        f_carrier: m.target_frequency(),
        ..PulseParams::default()
    };
    p.amplitude_scale = analytic_amplitude(&m, &p).unwrap();
    let lines = spectrum(&coupling_series(&m, &flux_pulse(&p).unwrap()).unwrap()).unwrap();
    let tol = 1.0 / p.total_duration();
    let raw =
        line_amplitude(&lines, 2.0 * p.f_carrier, tol) / line_amplitude(&lines, p.f_carrier, tol);
    let calibrated = nonlinear_harmonic(&m, &p, 2).unwrap();
    let lin = common::affine(m.idle_slope().unwrap());
    let linear = nonlinear_harmonic(&lin, &p, 2).unwrap();
    let pass = raw >= 0.05 && calibrated >= 0.05 && linear < 1e-9;
    outcome(
        pass,
        format!("calibrated 2x/1x={raw:.3} (nonlinear part {calibrated:.3}); affine nonlinear part {linear:.1e}"),
    )
}

fn benchmarking_round_trip() -> Outcome {
    let cfg = XebConfig {
        depths: vec![1, 2, 4, 8, 16, 32, 64],
        n_circuits: 20,
        seed: 11,
        shots: None,
    };
    let r = 0.02;
    let noise = Depolarizing::new(r).unwrap();
    let ds = xeb_simulate(XebTarget::Pair(GateSpec::IdealCz), &noise, &cfg).unwrap();
    let f = ds.fits().unwrap();
    let p_true = 1.0 - noise.strength(2);
    let fit_miss = (f.xeb.p - p_true).abs().max((f.spb.p - p_true).abs());

    let clean = xeb_simulate(
        XebTarget::Pair(GateSpec::IdealCz),
        &NoiseModel::noiseless(),
        &cfg,
    )
    .unwrap();
    let unit_miss = clean
        .alpha
        .iter()
        .chain(&clean.sqrt_purity)
        .map(|v| (v - 1.0).abs())
        .fold(0.0, f64::max);
    let leak = clean.leak_pop.iter().cloned().fold(0.0, f64::max);

    let report = BudgetReport::from_decays(
        (0.9978, 0.9982, 1e-4),
        (0.9980, 0.9981, 2e-4),
        (0.9884, 0.9899, 6e-4),
        50.0,
        106.0,
    )
    .unwrap();
    let identity_miss = report
        .rows
        .iter()
        .map(|row| {
            let b = row.budget;
            (b.r_p_xeb - b.r_p_ctrl - b.r_p_dec - b.r_leak)
                .abs()
                .max((b.r_p_spb - b.r_p_dec - b.r_leak).abs())
        })
        .fold(0.0, f64::max);
    let pass = fit_miss <= 1e-3 && unit_miss <= 1e-9 && leak == 0.0 && identity_miss <= 1e-12;
    outcome(
        pass,
        format!(
            "depolarizing p fit miss {fit_miss:.1e}; noiseless |alpha-1|,|sqrtP-1| <= {unit_miss:.1e}, leak {leak:.1e}; budget identity miss {identity_miss:.1e}"
        ),
    )
}

fn decoherence_bracket() -> Outcome {
    let noise = NoiseModel::reference();
    let cfg = XebConfig {
        n_circuits: 100,
        ..XebConfig::default()
    };
    let (report, _) = pcz_core::benchmark::simulate_budget(
        GateSpec::IdealCz,
        &noise,
        &cfg,
        noise.t_single,
        noise.t_cz,
    )
    .unwrap();
    let cz = report.rows.iter().find(|r| r.gate == "CZ").unwrap().budget;
    let pass = (0.003..=0.007).contains(&cz.r_p_dec);
    outcome(
        pass,
        format!(
            "CZ r_p,dec={:.3}% (r_p,spb={:.3}%, r_leak={:.3}%)",
            100.0 * cz.r_p_dec,
            100.0 * cz.r_p_spb,
            100.0 * cz.r_leak
        ),
    )
}

fn rwa_oracle() -> Outcome {
    // one full |11> <-> |20> cycle under a weak resonant (1 - cos) drive
    let m = common::affine(100.0);
    let mut p = PulseParams {
        lambda: [0.0, 1.0, 0.0, 0.0],
        t_active: 250.0,
        f_carrier: m.target_frequency(),
        ..PulseParams::default()
    };
    // analytic area condition: sqrt(2) * slope * scale * T = 1 (GHz ns)
    let analytic = 1.0 / (std::f64::consts::SQRT_2 * 0.1 * p.t_active);
    p.amplitude_scale = analytic;
    let u = interaction_frame(&evolve(&m, &p, false).unwrap(), &m);
    let p11 = u.population(S11, S11);
    let phase = wrap_phase(u.matrix[(S11, S11)].arg() - u.matrix[(S00, S00)].arg());
    let miss = wrap_phase(phase - PI).abs();
    let control = extract_metrics(&u).unwrap().control_phase;
    let scale_miss = (analytic_amplitude(&m, &p).unwrap() - analytic).abs() / analytic;
    let pass = (1.0 - p11) <= 2e-2 && miss <= 0.05 && scale_miss < 1e-6;
    outcome(
        pass,
        format!("P11={p11:.5} phase={phase:.4} (miss {miss:.4} rad, control phase {control:.4})"),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        (1, "budget algebra", table_algebra),
        (2, "calibrated coupling curve", coupling_curve),
        (3, "circuit-mode spectra", circuit_spectra),
        (4, "coherent gate floor", coherent_floor),
        (5, "collision structure", collision_structure),
        (6, "swap/phase ridge", ridge),
        (7, "harmonic generation", harmonics),
        (8, "benchmarking round trip", benchmarking_round_trip),
        (9, "decoherence bracket", decoherence_bracket),
        (10, "rotating-wave oracle", rwa_oracle),
    ];
    let mut unexpected = Vec::new();
    for (n, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let known = KNOWN_RED.contains(&n);
        let note = if known { " [known red]" } else { "" };
        // Written to the raw handle so the line survives libtest capture.
        let _ = writeln!(
            std::io::stderr(),
            "criterion {n:>2}: {status}{note} {name}: {} ({:.1} s)",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if o.pass == known {
            unexpected.push(n);
        }
    }
    assert!(
        unexpected.is_empty(),
        "criteria with unexpected outcome: {unexpected:?}"
    );
}
