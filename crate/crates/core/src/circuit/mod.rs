// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Device model: transmon and asymmetric-SQUID spectra, the coupler-mediated
//! qubit-qubit coupling as a function of coupler flux, and working-point checks.
//!
//! Frequencies are linear (GHz) throughout; couplings are in MHz.

mod calibrate;
mod coupling;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use calibrate::{calibrate_g_curve, CalibParam, Calibration, Calibrator};
pub use coupling::{
    coupling_registry, effective_coupling, AffineCoupling, ClosureCurve, ConstantCoupling,
    CouplingCurve, DispersiveCoupler, DEFAULT_DEGENERACY_FACTOR,
};

/// Elementary charge (C), exact in SI 2019.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J s), exact in SI 2019.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Magnetic flux quantum h / 2e (Wb).
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

/// Ratio E_J/E_C below which the transmon approximation is flagged.
pub const TRANSMON_REGIME_MIN: f64 = 20.0;

/// Circuit-level description: capacitances in fF, junction critical currents in nA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub c_qubit1: f64,
    pub c_qubit2: f64,
    pub c_coupler: f64,
    pub c_qq: f64,
    pub c_qc1: f64,
    pub c_qc2: f64,
    pub ic_q1a: f64,
    pub ic_q1b: f64,
    pub ic_q2a: f64,
    pub ic_q2b: f64,
    pub ic_ca: f64,
    pub ic_cb: f64,
}

impl CircuitParams {
    /// Capacitances and fitted critical currents of the reference device.
    pub fn reference() -> Self {
        Self {
            c_qubit1: 70.9,
            c_qubit2: 70.9,
            c_coupler: 80.3,
            c_qq: 0.71,
            c_qc1: 13.6,
            c_qc2: 13.6,
            ic_q1a: 14.0,
            ic_q1b: 14.0,
            ic_q2a: 14.0,
            ic_q2b: 14.0,
            ic_ca: 35.0,
            ic_cb: 70.4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let caps = [
            ("c_qubit1", self.c_qubit1),
            ("c_qubit2", self.c_qubit2),
            ("c_coupler", self.c_coupler),
            ("c_qq", self.c_qq),
            ("c_qc1", self.c_qc1),
            ("c_qc2", self.c_qc2),
            ("ic_q1a", self.ic_q1a),
            ("ic_q1b", self.ic_q1b),
            ("ic_q2a", self.ic_q2a),
            ("ic_q2b", self.ic_q2b),
            ("ic_ca", self.ic_ca),
            ("ic_cb", self.ic_cb),
        ];
        for (name, v) in caps {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Spectral description of the two qubits and the coupler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    /// Q1 idle transition frequency (GHz); the `|10>` excitation.
    pub f01_q1: f64,
    /// Q2 idle transition frequency (GHz); the `|01>` excitation.
    pub f01_q2: f64,
    /// Anharmonicities f12 - f01 (GHz, negative for transmons).
    pub eta_q1: f64,
    pub eta_q2: f64,
    /// Coupler frequency at zero flux (GHz).
    pub fc_max: f64,
    /// Coupler SQUID junction asymmetry.
    pub d_coupler: f64,
    /// Direct qubit-qubit coupling (MHz).
    pub g_qq: f64,
    /// Qubit-coupler couplings (MHz).
    pub g_qc1: f64,
    pub g_qc2: f64,
}

impl SpectralParams {
    /// Table-level idle frequencies and anharmonicities of the reference pair,
    /// with an uncalibrated coupler guess. Feed through [`calibrate_g_curve`]
    /// before use.
    pub fn reference_uncalibrated() -> Self {
        Self {
            f01_q1: 4.770,
            f01_q2: 4.839,
            eta_q1: -0.232,
            eta_q2: -0.230,
            fc_max: 11.0,
            d_coupler: 0.336,
            g_qq: 20.0,
            g_qc1: 250.0,
            g_qc2: 250.0,
        }
    }

    /// Minimum coupler frequency, reached at half a flux quantum.
    pub fn fc_min(&self) -> f64 {
        coupler_frequency(self.fc_max, self.d_coupler, 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("f01_q1", self.f01_q1),
            ("f01_q2", self.f01_q2),
            ("fc_max", self.fc_max),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("eta_q1", self.eta_q1),
            ("eta_q2", self.eta_q2),
            ("g_qq", self.g_qq),
            ("g_qc1", self.g_qc1),
            ("g_qc2", self.g_qc2),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if !(0.0..1.0).contains(&self.d_coupler) {
            return Err(invalid(
                "d_coupler",
                format!("must lie in [0, 1), got {}", self.d_coupler),
            ));
        }
        let coupled = self.g_qc1 != 0.0 || self.g_qc2 != 0.0;
        let f_top = self.f01_q1.max(self.f01_q2);
        if coupled && self.fc_min() <= f_top {
            return Err(invalid(
                "fc_max",
                format!(
                    "coupler minimum {:.4} GHz does not clear the qubits ({f_top:.4} GHz)",
                    self.fc_min()
                ),
            ));
        }
        if coupled && self.fc_min() - f_top < 2.0 {
            log::debug!(
                "coupler-qubit separation {:.3} GHz is below the 2 GHz design goal",
                self.fc_min() - f_top
            );
        }
        Ok(())
    }
}

/// Transmon levels in the E_J/E_C >> 1 approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonLevels {
    pub f01: f64,
    pub eta: f64,
    /// Set when E_J/E_C falls below [`TRANSMON_REGIME_MIN`].
    pub outside_regime: bool,
}

/// `f01 = sqrt(8 E_J E_C) - E_C`, `eta = -E_C`. Energies in GHz.
pub fn transmon_spectrum(ej: f64, ec: f64) -> Result<TransmonLevels> {
    if !(ej > 0.0 && ec > 0.0 && ej.is_finite() && ec.is_finite()) {
        return Err(invalid("ej/ec", format!("must be positive, got {ej}/{ec}")));
    }
    let outside_regime = ej / ec < TRANSMON_REGIME_MIN;
    if outside_regime {
        log::warn!(
            "E_J/E_C = {:.2} below transmon regime ({TRANSMON_REGIME_MIN})",
            ej / ec
        );
    }
    Ok(TransmonLevels {
        f01: (8.0 * ej * ec).sqrt() - ec,
        eta: -ec,
        outside_regime,
    })
}

/// Josephson and charging energies of one circuit node (GHz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeEnergies {
    pub ej_max: f64,
    pub d: f64,
    pub ec: f64,
    /// Total node capacitance (fF).
    pub c_sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionEnergies {
    pub qubit1: NodeEnergies,
    pub qubit2: NodeEnergies,
    pub coupler: NodeEnergies,
}

/// E_J/h of a junction with critical current `ic_na` (nA), in GHz.
pub fn josephson_energy(ic_na: f64) -> f64 {
    ic_na * 1e-9 * FLUX_QUANTUM / (2.0 * PI * PLANCK) * 1e-9
}

/// E_C/h of a node with total capacitance `c_ff` (fF), in GHz.
pub fn charging_energy(c_ff: f64) -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * c_ff * 1e-15 * PLANCK) * 1e-9
}

fn squid_node(ic_a: f64, ic_b: f64, c_sigma: f64) -> NodeEnergies {
    NodeEnergies {
        ej_max: josephson_energy(ic_a + ic_b),
        d: (ic_a - ic_b).abs() / (ic_a + ic_b),
        ec: charging_energy(c_sigma),
        c_sigma,
    }
}

pub fn junction_energies(params: &CircuitParams) -> Result<JunctionEnergies> {
    params.validate()?;
    let p = params;
    Ok(JunctionEnergies {
        qubit1: squid_node(p.ic_q1a, p.ic_q1b, p.c_qubit1 + p.c_qc1 + p.c_qq),
        qubit2: squid_node(p.ic_q2a, p.ic_q2b, p.c_qubit2 + p.c_qc2 + p.c_qq),
        coupler: squid_node(p.ic_ca, p.ic_cb, p.c_coupler + p.c_qc1 + p.c_qc2),
    })
}

/// Asymmetric SQUID: `E_J(phi) = E_Jmax |cos(pi phi)| sqrt(1 + d^2 tan^2(pi phi))`,
/// written without the tangent so that half-integer flux is regular.
pub fn ej_of_flux(ej_max: f64, d: f64, phi: f64) -> f64 {
    let (s, c) = (PI * phi).sin_cos();
    ej_max * (c * c + d * d * s * s).sqrt()
}

/// Coupler frequency in spectral mode, `fc_max * (E_J(phi)/E_Jmax)^(1/2)`.
pub fn coupler_frequency(fc_max: f64, d: f64, phi: f64) -> f64 {
    fc_max * ej_of_flux(1.0, d, phi).sqrt()
}

/// Capacitive coupling `g = C_ab / (2 sqrt(C_a C_b)) * sqrt(f_a f_b)`, in MHz.
pub fn capacitive_coupling(c_ab: f64, c_a: f64, c_b: f64, f_a: f64, f_b: f64) -> f64 {
    c_ab / (2.0 * (c_a * c_b).sqrt()) * (f_a * f_b).sqrt() * 1e3
}

/// Spectral parameters derived from the circuit (qubits at their sweet spot).
pub fn spectral_from_circuit(params: &CircuitParams) -> Result<SpectralParams> {
    let e = junction_energies(params)?;
    let q1 = transmon_spectrum(ej_of_flux(e.qubit1.ej_max, e.qubit1.d, 0.0), e.qubit1.ec)?;
    let q2 = transmon_spectrum(ej_of_flux(e.qubit2.ej_max, e.qubit2.d, 0.0), e.qubit2.ec)?;
    let c = transmon_spectrum(e.coupler.ej_max, e.coupler.ec)?;
    let p = params;
    Ok(SpectralParams {
        f01_q1: q1.f01,
        f01_q2: q2.f01,
        eta_q1: q1.eta,
        eta_q2: q2.eta,
        fc_max: c.f01,
        d_coupler: e.coupler.d,
        g_qq: capacitive_coupling(p.c_qq, e.qubit1.c_sigma, e.qubit2.c_sigma, q1.f01, q2.f01),
        g_qc1: capacitive_coupling(p.c_qc1, e.qubit1.c_sigma, e.coupler.c_sigma, q1.f01, c.f01),
        g_qc2: capacitive_coupling(p.c_qc2, e.qubit2.c_sigma, e.coupler.c_sigma, q2.f01, c.f01),
    })
}

/// Qubit spectra plus an effective-coupling curve over coupler flux.
#[derive(Debug, Clone)]
pub struct DeviceModel {
    pub spectral: SpectralParams,
    /// Coupler idle flux in units of the flux quantum.
    pub flux_idle: f64,
    curve: Arc<dyn CouplingCurve>,
}

impl DeviceModel {
    /// Model backed by the dispersive tunable-coupler curve of `spectral`.
    pub fn new(spectral: SpectralParams, flux_idle: f64) -> Result<Self> {
        spectral.validate()?;
        let curve = Arc::new(DispersiveCoupler::new(spectral.clone()));
        Ok(Self {
            spectral,
            flux_idle,
            curve,
        })
    }

    /// Model with an arbitrary coupling curve; only the qubit entries of
    /// `spectral` enter the Hamiltonian.
    pub fn with_curve(
        spectral: SpectralParams,
        flux_idle: f64,
        curve: Arc<dyn CouplingCurve>,
    ) -> Self {
        Self {
            spectral,
            flux_idle,
            curve,
        }
    }

    /// Model idling at the decoupling point found inside `bracket`.
    pub fn at_decoupling_point(spectral: SpectralParams, bracket: (f64, f64)) -> Result<Self> {
        let mut model = Self::new(spectral, 0.0)?;
        model.flux_idle = find_decoupling_flux(model.curve(), bracket)?;
        Ok(model)
    }

    pub fn curve(&self) -> &dyn CouplingCurve {
        self.curve.as_ref()
    }

    pub fn curve_handle(&self) -> Arc<dyn CouplingCurve> {
        Arc::clone(&self.curve)
    }

    /// Effective coupling at coupler flux `phi` (MHz).
    pub fn coupling(&self, phi: f64) -> Result<f64> {
        self.curve.coupling(phi)
    }

    /// Dispersive qubit-frequency shifts at `phi` relative to idle (MHz).
    pub fn shift_from_idle(&self, phi: f64) -> Option<[f64; 2]> {
        let at = self.curve.qubit_shifts(phi)?;
        let idle = self.curve.qubit_shifts(self.flux_idle)?;
        Some([at[0] - idle[0], at[1] - idle[1]])
    }

    /// `d g / d phi` at idle (MHz per flux quantum), central difference.
    pub fn idle_slope(&self) -> Result<f64> {
        let h = 1e-4;
        let up = self.coupling(self.flux_idle + h)?;
        let dn = self.coupling(self.flux_idle - h)?;
        Ok((up - dn) / (2.0 * h))
    }

    pub fn tabulate(&self, phis: &[f64]) -> Result<Vec<(f64, f64)>> {
        phis.iter()
            .map(|&phi| Ok((phi, self.coupling(phi)?)))
            .collect()
    }

    /// `|f11 - f20|` at idle, the parametric drive frequency (GHz).
    pub fn target_frequency(&self) -> f64 {
        let s = &self.spectral;
        let f11 = s.f01_q1 + s.f01_q2;
        let f20 = 2.0 * s.f01_q1 + s.eta_q1;
        (f11 - f20).abs()
    }

    /// `Delta = |f10 - f01|` (GHz).
    pub fn qubit_detuning(&self) -> f64 {
        (self.spectral.f01_q1 - self.spectral.f01_q2).abs()
    }

    /// `Delta_leak = |f11 - f02|` (GHz).
    pub fn leak_detuning(&self) -> f64 {
        let s = &self.spectral;
        let f11 = s.f01_q1 + s.f01_q2;
        let f02 = 2.0 * s.f01_q2 + s.eta_q2;
        (f11 - f02).abs()
    }

    /// Copy of the model with Q1 placed `delta_mhz` above Q2
    /// (`Delta = f10 - f01`, signed). The coupling curve is kept.
    pub fn with_qubit_detuning(&self, delta_mhz: f64) -> Self {
        let mut spectral = self.spectral.clone();
        spectral.f01_q1 = spectral.f01_q2 + delta_mhz * 1e-3;
        Self {
            spectral,
            flux_idle: self.flux_idle,
            curve: Arc::clone(&self.curve),
        }
    }
}

/// Bisection for the decoupling flux inside `bracket`; the result has
/// `|g| < 1e-3 MHz` and lies strictly inside the bracket.
pub fn find_decoupling_flux(curve: &dyn CouplingCurve, bracket: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let mut g_lo = curve.coupling(lo)?;
    let g_hi = curve.coupling(hi)?;
    if g_lo == 0.0 && lo > bracket.0.min(bracket.1) {
        return Ok(lo);
    }
    if g_lo.signum() == g_hi.signum() || g_lo == 0.0 || g_hi == 0.0 {
        return Err(Error::NoSignChange { lo, hi, g_lo, g_hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = curve.coupling(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Which transition a drive harmonic lands near.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transition {
    /// `|01> <-> |10>`, at Delta.
    Swap,
    /// `|11> <-> |02>`, at Delta_leak.
    Leak02,
    /// `|11> <-> |20>`, the target transition itself.
    Leak20,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Clear,
    /// Margin below ten times the drive envelope peak.
    Warn,
    /// Margin below the drive envelope peak itself.
    Collision,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionMargin {
    pub harmonic: u32,
    pub transition: Transition,
    /// `|k f_target - f_transition|` (MHz).
    pub margin_mhz: f64,
    pub severity: Severity,
}

/// Margins between drive harmonics `k f_target` (k = 0..=k_max) and the
/// three coupled transitions. `drive_peak_mhz` is the envelope peak of the
/// coupling modulation.
pub fn working_point_check(
    model: &DeviceModel,
    f_target: f64,
    k_max: u32,
    drive_peak_mhz: f64,
) -> Vec<CollisionMargin> {
    let transitions = [
        (Transition::Swap, model.qubit_detuning()),
        (Transition::Leak02, model.leak_detuning()),
        (Transition::Leak20, model.target_frequency()),
    ];
    let peak = drive_peak_mhz.abs();
    let mut out = Vec::new();
    for k in 0..=k_max {
        for (transition, f) in transitions {
            if k == 1 && transition == Transition::Leak20 {
                continue;
            }
            let margin_mhz = (k as f64 * f_target - f).abs() * 1e3;
            let severity = if margin_mhz <= peak || margin_mhz < 1e-9 {
                Severity::Collision
            } else if margin_mhz < 10.0 * peak {
                Severity::Warn
            } else {
                Severity::Clear
            };
            out.push(CollisionMargin {
                harmonic: k,
                transition,
                margin_mhz,
                severity,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constants_reproduce_flux_quantum() {
        assert_relative_eq!(FLUX_QUANTUM, 2.067_833_848e-15, max_relative = 1e-9);
    }

    #[test]
    fn transmon_reference_values() {
        // independent evaluation of sqrt(8 * 13.905 * 0.2273) - 0.2273
        let expected = (8.0_f64 * 13.905 * 0.2273).sqrt() - 0.2273;
        let lv = transmon_spectrum(13.905, 0.2273).unwrap();
        assert_relative_eq!(lv.f01, expected, epsilon = 1e-12);
        assert!((lv.f01 - 4.801).abs() < 1e-3);
        assert_relative_eq!(lv.eta, -0.2273);
        assert!(!lv.outside_regime);
    }

    #[test]
    fn transmon_small_ec_limit() {
        let lv = transmon_spectrum(10.0, 1e-9).unwrap();
        assert!(lv.f01 < 1e-3 && lv.eta.abs() < 1e-8);
        assert!(!lv.outside_regime);
    }

    #[test]
    fn transmon_regime_violation_warns_only() {
        let lv = transmon_spectrum(2.0, 0.2).unwrap();
        assert!(lv.outside_regime);
        assert!(lv.f01 > 0.0 && lv.eta < 0.0);
    }

    #[test]
    fn transmon_rejects_non_positive() {
        assert!(transmon_spectrum(0.0, 0.2).is_err());
        assert!(transmon_spectrum(10.0, -0.2).is_err());
    }

    #[test]
    fn junction_energies_reference_circuit() {
        let e = junction_energies(&CircuitParams::reference()).unwrap();
        // I_c Phi0 / (2 pi h) for 28 nA
        let ej = 28e-9 * (6.626_070_15e-34 / (2.0 * 1.602_176_634e-19))
            / (2.0 * PI * 6.626_070_15e-34)
            / 1e9;
        assert_relative_eq!(e.qubit1.ej_max, ej, max_relative = 1e-12);
        assert!((e.qubit1.ej_max - 13.905).abs() < 5e-3);
        // e^2 / (2 C h) with C = 85.21 fF
        let ec = 1.602_176_634e-19_f64.powi(2) / (2.0 * 85.21e-15 * 6.626_070_15e-34) / 1e9;
        assert_relative_eq!(e.qubit1.ec, ec, max_relative = 1e-12);
        assert!((e.qubit1.ec - 0.2273).abs() < 1e-4);
        assert_eq!(e.qubit1.d, 0.0);
        assert!((e.coupler.d - 35.4 / 105.4).abs() < 1e-12);
        assert!((e.coupler.ej_max - 52.3).abs() < 0.1);
    }

    #[test]
    fn ej_of_flux_landmarks() {
        assert_relative_eq!(ej_of_flux(52.3, 0.336, 0.0), 52.3);
        assert_relative_eq!(ej_of_flux(52.3, 0.336, 0.5), 0.336 * 52.3, epsilon = 1e-12);
        // |cos| sqrt(1 + d^2 tan^2) at phi = 1/4: cos = tan-based closed form
        let x = PI * 0.25;
        let direct = 52.3 * x.cos().abs() * (1.0 + 0.336_f64.powi(2) * x.tan().powi(2)).sqrt();
        assert_relative_eq!(ej_of_flux(52.3, 0.336, 0.25), direct, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn ej_of_flux_even_periodic_bounded(phi in -3.0f64..3.0, d in 0.0f64..0.99) {
            let e = ej_of_flux(10.0, d, phi);
            prop_assert!((e - ej_of_flux(10.0, d, -phi)).abs() < 1e-12);
            prop_assert!((e - ej_of_flux(10.0, d, phi + 1.0)).abs() < 1e-9);
            prop_assert!(e >= d * 10.0 - 1e-12 && e <= 10.0 + 1e-12);
        }

        #[test]
        fn transmon_f01_increases_with_ej(ej in 5.0f64..60.0, step in 1e-3f64..5.0, ec in 0.1f64..0.3) {
            let a = transmon_spectrum(ej, ec).unwrap().f01;
            let b = transmon_spectrum(ej + step, ec).unwrap().f01;
            prop_assert!(b > a);
        }
    }

    #[test]
    fn circuit_mode_reproduces_q1_table_values() {
        let s = spectral_from_circuit(&CircuitParams::reference()).unwrap();
        assert!((s.f01_q1 - 4.770).abs() < 0.150, "f01 = {}", s.f01_q1);
        assert!((s.eta_q1 + 0.232).abs() < 0.015, "eta = {}", s.eta_q1);
    }

    #[test]
    fn decoupling_on_synthetic_curves() {
        let linear = ClosureCurve::new(|phi| phi);
        let root = find_decoupling_flux(&linear, (-0.3, 0.2)).unwrap();
        assert!(root.abs() < 1e-12);

        let cubic = ClosureCurve::new(|phi| (phi - 0.123) * (1.0 + phi * phi) * 40.0);
        let root = find_decoupling_flux(&cubic, (0.0, 0.4)).unwrap();
        assert!((root - 0.123).abs() < 1e-6);
        assert!(cubic.coupling(root).unwrap().abs() < 1e-3);
        assert!(root > 0.0 && root < 0.4);

        let flat = ClosureCurve::new(|_| 2.0);
        assert!(matches!(
            find_decoupling_flux(&flat, (0.0, 0.4)),
            Err(Error::NoSignChange { .. })
        ));
    }

    fn table_model() -> DeviceModel {
        let spectral = SpectralParams::reference_uncalibrated();
        DeviceModel::with_curve(spectral, -0.35, Arc::new(ConstantCoupling::new(0.0)))
    }

    #[test]
    fn working_point_table_values() {
        let m = table_model();
        assert!((m.target_frequency() - 0.301).abs() < 1e-12);
        assert!((m.qubit_detuning() - 0.069).abs() < 1e-12);
        assert!((m.leak_detuning() - 0.161).abs() < 1e-12);
        let margins = working_point_check(&m, m.target_frequency(), 2, 10.0);
        let k1_swap = margins
            .iter()
            .find(|c| c.harmonic == 1 && c.transition == Transition::Swap)
            .unwrap();
        assert!((k1_swap.margin_mhz - 232.0).abs() < 1e-9);
        assert!(margins.iter().all(|c| c.severity != Severity::Collision));
    }

    #[test]
    fn working_point_flags_degenerate_qubits() {
        let mut s = SpectralParams::reference_uncalibrated();
        s.f01_q2 = s.f01_q1;
        s.eta_q1 = 0.0;
        s.eta_q2 = 0.0;
        let m = DeviceModel::with_curve(s, 0.0, Arc::new(ConstantCoupling::new(0.0)));
        assert_eq!(m.qubit_detuning(), 0.0);
        let margins = working_point_check(&m, 0.3, 1, 5.0);
        let dc = margins
            .iter()
            .find(|c| c.harmonic == 0 && c.transition == Transition::Swap)
            .unwrap();
        assert_eq!(dc.severity, Severity::Collision);
    }

    #[test]
    fn working_point_constructed_collision() {
        let m = table_model();
        let margins = working_point_check(&m, m.leak_detuning(), 1, 5.0);
        let hit = margins
            .iter()
            .find(|c| c.harmonic == 1 && c.transition == Transition::Leak02)
            .unwrap();
        assert!(hit.margin_mhz < 1e-9);
        assert_ne!(hit.severity, Severity::Clear);
    }
}
