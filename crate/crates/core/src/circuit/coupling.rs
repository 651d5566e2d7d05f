// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde_json::Value;

use super::{coupler_frequency, SpectralParams};
use crate::error::{Error, Result};
use crate::registry::{opt_f64, Registry};

/// Minimum |qubit - coupler| detuning, in units of the qubit-coupler
/// coupling, for the dispersive formula to be evaluated.
pub const DEFAULT_DEGENERACY_FACTOR: f64 = 5.0;

/// Effective qubit-qubit coupling as a function of coupler flux.
pub trait CouplingCurve: Send + Sync + fmt::Debug {
    fn kind(&self) -> &'static str;

    /// Coupling in MHz at flux `phi` (units of the flux quantum).
    fn coupling(&self, phi: f64) -> Result<f64>;

    /// Absolute dispersive shifts of (Q1, Q2) at `phi` in MHz, when the
    /// curve models them.
    fn qubit_shifts(&self, _phi: f64) -> Option<[f64; 2]> {
        None
    }
}

/// Tunable-coupler curve
/// `g = g_qq + (g1 g2 / 2)(1/D1 + 1/D2 - 1/S1 - 1/S2)`,
/// `Di = fi - fc(phi)`, `Si = fi + fc(phi)`.
#[derive(Debug, Clone)]
pub struct DispersiveCoupler {
    spectral: SpectralParams,
    degeneracy_factor: f64,
}

impl DispersiveCoupler {
    pub fn new(spectral: SpectralParams) -> Self {
        Self {
            spectral,
            degeneracy_factor: DEFAULT_DEGENERACY_FACTOR,
        }
    }

    pub fn with_degeneracy_factor(mut self, factor: f64) -> Self {
        self.degeneracy_factor = factor;
        self
    }

    pub fn spectral(&self) -> &SpectralParams {
        &self.spectral
    }

    /// Qubit-coupler detunings and sums (MHz), after the degeneracy check.
    fn detunings(&self, phi: f64) -> Result<([f64; 2], [f64; 2])> {
        let s = &self.spectral;
        let fc = coupler_frequency(s.fc_max, s.d_coupler, phi);
        let qubits = [(s.f01_q1, s.g_qc1), (s.f01_q2, s.g_qc2)];
        let mut delta = [0.0; 2];
        let mut sigma = [0.0; 2];
        for (i, (f, g)) in qubits.into_iter().enumerate() {
            delta[i] = (f - fc) * 1e3;
            sigma[i] = (f + fc) * 1e3;
            let limit = self.degeneracy_factor * g.abs();
            if g != 0.0 && delta[i].abs() <= limit {
                return Err(Error::Degenerate {
                    qubit: i + 1,
                    qubit_ghz: f,
                    coupler_ghz: fc,
                    detuning_mhz: delta[i],
                    limit_mhz: limit,
                });
            }
        }
        Ok((delta, sigma))
    }
}

impl CouplingCurve for DispersiveCoupler {
    fn kind(&self) -> &'static str {
        "dispersive"
    }

    fn coupling(&self, phi: f64) -> Result<f64> {
        let s = &self.spectral;
        if s.g_qc1 == 0.0 || s.g_qc2 == 0.0 {
            return Ok(s.g_qq);
        }
        let ([d1, d2], [s1, s2]) = self.detunings(phi)?;
        Ok(s.g_qq + 0.5 * s.g_qc1 * s.g_qc2 * (1.0 / d1 + 1.0 / d2 - 1.0 / s1 - 1.0 / s2))
    }

    fn qubit_shifts(&self, phi: f64) -> Option<[f64; 2]> {
        let s = &self.spectral;
        let ([d1, d2], [s1, s2]) = self.detunings(phi).ok()?;
        Some([
            s.g_qc1 * s.g_qc1 * (1.0 / d1 - 1.0 / s1),
            s.g_qc2 * s.g_qc2 * (1.0 / d2 - 1.0 / s2),
        ])
    }
}

/// Free-function form of the dispersive curve.
pub fn effective_coupling(spectral: &SpectralParams, phi: f64) -> Result<f64> {
    DispersiveCoupler::new(spectral.clone()).coupling(phi)
}

/// `g = g0 + slope (phi - phi0)`.
#[derive(Debug, Clone, Copy)]
pub struct AffineCoupling {
    pub g0: f64,
    pub slope: f64,
    pub phi0: f64,
}

impl AffineCoupling {
    pub fn new(g0: f64, slope: f64, phi0: f64) -> Self {
        Self { g0, slope, phi0 }
    }
}

impl CouplingCurve for AffineCoupling {
    fn kind(&self) -> &'static str {
        "affine"
    }

    fn coupling(&self, phi: f64) -> Result<f64> {
        Ok(self.g0 + self.slope * (phi - self.phi0))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantCoupling(f64);

impl ConstantCoupling {
    pub fn new(g: f64) -> Self {
        Self(g)
    }
}

impl CouplingCurve for ConstantCoupling {
    fn kind(&self) -> &'static str {
        "constant"
    }

    fn coupling(&self, _phi: f64) -> Result<f64> {
        Ok(self.0)
    }
}

/// Wraps a closure; handy for synthetic curves.
pub struct ClosureCurve<F>(F);

impl<F: Fn(f64) -> f64 + Send + Sync> ClosureCurve<F> {
    pub fn new(f: F) -> Self {
        Self(f)
    }
}

impl<F> fmt::Debug for ClosureCurve<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ClosureCurve")
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> CouplingCurve for ClosureCurve<F> {
    fn kind(&self) -> &'static str {
        "closure"
    }

    fn coupling(&self, phi: f64) -> Result<f64> {
        Ok((self.0)(phi))
    }
}

fn build_dispersive(s: &SpectralParams, o: &Value) -> Result<Box<dyn CouplingCurve>> {
    let factor = opt_f64(o, "degeneracy_factor", DEFAULT_DEGENERACY_FACTOR)?;
    Ok(Box::new(
        DispersiveCoupler::new(s.clone()).with_degeneracy_factor(factor),
    ))
}

fn build_affine(_: &SpectralParams, o: &Value) -> Result<Box<dyn CouplingCurve>> {
    Ok(Box::new(AffineCoupling::new(
        opt_f64(o, "g0_mhz", 0.0)?,
        opt_f64(o, "slope_mhz", 100.0)?,
        opt_f64(o, "phi0", 0.0)?,
    )))
}

fn build_constant(s: &SpectralParams, o: &Value) -> Result<Box<dyn CouplingCurve>> {
    Ok(Box::new(ConstantCoupling::new(opt_f64(
        o, "g_mhz", s.g_qq,
    )?)))
}

/// Coupling-curve strategies selectable by `kind` in a device file.
pub fn coupling_registry() -> Registry<SpectralParams, dyn CouplingCurve> {
    let mut reg = Registry::new("coupling curve");
    reg.register("dispersive", build_dispersive)
        .register("affine", build_affine)
        .register("constant", build_constant);
    reg
}
