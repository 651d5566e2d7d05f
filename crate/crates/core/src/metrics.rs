// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! CZ figures of merit and amplitude-by-detuning scans.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::DeviceModel;
use crate::dynamics::{
    evolve, interaction_frame, SubspaceUnitary, COMPUTATIONAL, S00, S01, S02, S10, S11, S20,
};
use crate::error::{invalid, Error, Result};
use crate::pulse::PulseParams;

type C = Complex64;

/// Largest `|U^dag U - I|` entry accepted by [`extract_metrics`].
pub const UNITARITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateMetrics {
    /// Conditional phase, wrapped to (-pi, pi].
    pub control_phase: f64,
    /// Virtual-Z corrections `(theta_z1, theta_z2)`.
    pub single_qubit_phases: (f64, f64),
    /// Mean population left in `|02>`, `|20>` over computational inputs.
    pub leakage: f64,
    /// `|<01|U|10>|^2`.
    pub swap_error: f64,
    /// Phase-corrected average gate fidelity against CZ.
    pub avg_fidelity: f64,
    pub coherent_error: f64,
}

/// First-order split of the coherent error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    pub leakage: f64,
    /// Contribution of the swap error, `0.4 * swap_error`.
    pub swap: f64,
    /// Conditional-phase miss, `0.3 (1 - cos(theta - pi))`.
    pub phase: f64,
}

impl ErrorBreakdown {
    pub fn total(&self) -> f64 {
        self.leakage + self.swap + self.phase
    }
}

impl GateMetrics {
    pub fn breakdown(&self) -> ErrorBreakdown {
        ErrorBreakdown {
            leakage: self.leakage,
            swap: 0.4 * self.swap_error,
            phase: 0.3 * (1.0 + self.control_phase.cos()),
        }
    }
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Ideal CZ embedded in the six-level space, identity on `|02>`, `|20>`.
pub fn ideal_cz(t_total: f64) -> SubspaceUnitary {
    let mut u = SubspaceUnitary::identity(t_total);
    u.matrix[(S11, S11)] = C::new(-1.0, 0.0);
    u
}

/// Metrics of a frame-removed propagator. Phases are referenced to `|00>`.
pub fn extract_metrics(u: &SubspaceUnitary) -> Result<GateMetrics> {
    let dev = u.unitarity_deviation();
    if !(dev < UNITARITY_TOLERANCE) {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let m = &u.matrix;
    let a0 = m[(S00, S00)].arg();
    let theta_z1 = wrap_phase(m[(S10, S10)].arg() - a0);
    let theta_z2 = wrap_phase(m[(S01, S01)].arg() - a0);
    let control_phase = wrap_phase(m[(S11, S11)].arg() - a0 - theta_z1 - theta_z2);
    let leakage = COMPUTATIONAL
        .iter()
        .map(|&c| u.population(S02, c) + u.population(S20, c))
        .sum::<f64>()
        / 4.0;
    let swap_error = u.population(S01, S10);

    // M = CZ^dag Z^dag P U P with Z the virtual-Z (and global) phase
    let z = [0.0, theta_z2, theta_z1, theta_z1 + theta_z2];
    let cz = [1.0, 1.0, 1.0, -1.0];
    let block = Matrix4::from_fn(|r, c| {
        let rr = COMPUTATIONAL[r];
        let cc = COMPUTATIONAL[c];
        m[(rr, cc)] * C::from_polar(cz[r], -(z[r] + a0))
    });
    let tr = block.trace();
    let tr_mm = block.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let avg_fidelity = ((tr_mm + tr.norm_sqr()) / 20.0).clamp(0.0, 1.0);
    Ok(GateMetrics {
        control_phase,
        single_qubit_phases: (theta_z1, theta_z2),
        leakage: leakage.clamp(0.0, 1.0),
        swap_error: swap_error.clamp(0.0, 1.0),
        avg_fidelity,
        coherent_error: 1.0 - avg_fidelity,
    })
}

/// Evolves `pulse` and extracts metrics in the idle rotating frame.
pub fn gate_metrics(
    model: &DeviceModel,
    pulse: &PulseParams,
    include_shift: bool,
) -> Result<GateMetrics> {
    let u = evolve(model, pulse, include_shift)?;
    extract_metrics(&interaction_frame(&u, model))
}

/// Q1 Ramsey phase with Q2 in `|0>` and in `|1>`; returns their difference.
pub fn ramsey_control_phase(u: &SubspaceUnitary) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = [C::new(0.0, 0.0); 6];
    a[S00] = C::new(h, 0.0);
    a[S10] = C::new(h, 0.0);
    let mut b = [C::new(0.0, 0.0); 6];
    b[S01] = C::new(h, 0.0);
    b[S11] = C::new(h, 0.0);
    let pa = u.apply(&a);
    let pb = u.apply(&b);
    let theta_q2_ground = (pa[S10] * pa[S00].conj()).arg();
    let theta_q2_excited = (pb[S11] * pb[S01].conj()).arg();
    wrap_phase(theta_q2_excited - theta_q2_ground)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    /// `P(|11> -> |11>)`.
    Swap,
    /// Conditional phase.
    Phase,
}

/// Values on a detuning-by-amplitude grid, `values[iy][ix]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub kind: ScanKind,
    /// Averaged amplitude `A-bar` (flux quanta).
    pub x: Vec<f64>,
    /// Carrier detuning from the bare target frequency (MHz).
    pub y: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl ScanResult {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy][ix]
    }
}

/// Pulse used at scan point `(a_bar, detune_mhz)`.
pub fn scan_pulse(
    model: &DeviceModel,
    base: &PulseParams,
    a_bar: f64,
    detune_mhz: f64,
) -> PulseParams {
    let mut p = base.clone().with_average_amplitude(a_bar);
    p.f_carrier = model.target_frequency() + detune_mhz * 1e-3;
    p
}

/// Both scan maps from one set of evolutions.
pub fn scan_both(
    model: &DeviceModel,
    base: &PulseParams,
    amp_grid: &[f64],
    detune_grid: &[f64],
    include_shift: bool,
) -> Result<(ScanResult, ScanResult)> {
    if amp_grid.is_empty() || detune_grid.is_empty() {
        return Err(invalid("grid", "scan grids must be non-empty"));
    }
    let nx = amp_grid.len();
    let points: Vec<(f64, f64)> = (0..nx * detune_grid.len())
        .into_par_iter()
        .map(|i| {
            let p = scan_pulse(model, base, amp_grid[i % nx], detune_grid[i / nx]);
            let u = interaction_frame(&evolve(model, &p, include_shift)?, model);
            Ok((
                u.population(S11, S11).clamp(0.0, 1.0),
                ramsey_control_phase(&u),
            ))
        })
        .collect::<Result<_>>()?;
    let rows = |f: fn(&(f64, f64)) -> f64| -> Vec<Vec<f64>> {
        points
            .chunks(nx)
            .map(|r| r.iter().map(f).collect())
            .collect()
    };
    let mk = |kind, values| ScanResult {
        kind,
        x: amp_grid.to_vec(),
        y: detune_grid.to_vec(),
        values,
    };
    Ok((
        mk(ScanKind::Swap, rows(|p| p.0)),
        mk(ScanKind::Phase, rows(|p| p.1)),
    ))
}

pub fn swap_scan(
    model: &DeviceModel,
    base: &PulseParams,
    amp_grid: &[f64],
    detune_grid: &[f64],
    include_shift: bool,
) -> Result<ScanResult> {
    Ok(scan_both(model, base, amp_grid, detune_grid, include_shift)?.0)
}

pub fn phase_scan(
    model: &DeviceModel,
    base: &PulseParams,
    amp_grid: &[f64],
    detune_grid: &[f64],
    include_shift: bool,
) -> Result<ScanResult> {
    Ok(scan_both(model, base, amp_grid, detune_grid, include_shift)?.1)
}
