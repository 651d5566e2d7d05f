// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Per-slot noise channels on one or two qutrits.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64 as C;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use crate::error::{invalid, Result};
use crate::registry::{opt_f64, Registry};

pub const LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    Q1,
    Q2,
}

/// Position of a channel application inside one benchmarking cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// After the single-qubit layer.
    Single,
    /// After the two-qubit gate.
    Gate,
    /// Once at the end of every cycle.
    CycleEnd,
}

pub trait CycleNoise: Send + Sync {
    fn kind(&self) -> &'static str;
    /// Applies the channel in place. `qubits[k]` names the qubit held by
    /// qutrit `k` (qutrit 0 is the most significant index).
    fn apply(&self, rho: &mut DMatrix<C>, qubits: &[Qubit], slot: Slot);
    fn validate(&self) -> Result<()> {
        Ok(())
    }
}

fn inf_if_null<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// T1/T2 in microseconds, slot durations in nanoseconds. A `null` time in
/// JSON means no decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseModel {
    #[serde(deserialize_with = "inf_if_null")]
    pub t1_q1: f64,
    #[serde(deserialize_with = "inf_if_null")]
    pub t1_q2: f64,
    #[serde(deserialize_with = "inf_if_null")]
    pub t2_q1: f64,
    #[serde(deserialize_with = "inf_if_null")]
    pub t2_q2: f64,
    pub t_single: f64,
    pub t_cz: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::reference()
    }
}

impl NoiseModel {
    /// Idle T1 and Ramsey T2* of the reference device with 50 ns
    /// single-qubit and 106 ns CZ slots.
    pub fn reference() -> Self {
        Self {
            t1_q1: 32.2,
            t1_q2: 58.5,
            t2_q1: 13.5,
            t2_q2: 13.3,
            t_single: 50.0,
            t_cz: 106.0,
        }
    }

    pub fn noiseless() -> Self {
        Self {
            t1_q1: f64::INFINITY,
            t1_q2: f64::INFINITY,
            t2_q1: f64::INFINITY,
            t2_q2: f64::INFINITY,
            ..Self::reference()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t1_q1", self.t1_q1),
            ("t1_q2", self.t1_q2),
            ("t2_q1", self.t2_q1),
            ("t2_q2", self.t2_q2),
        ] {
            if !(v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        for (name, v) in [("t_single", self.t_single), ("t_cz", self.t_cz)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(
                    name,
                    format!("must be finite and non-negative, got {v}"),
                ));
            }
        }
        for (name, t1, t2) in [
            ("t2_q1", self.t1_q1, self.t2_q1),
            ("t2_q2", self.t1_q2, self.t2_q2),
        ] {
            if t2 > 2.0 * t1 {
                return Err(invalid(
                    name,
                    format!("T2 = {t2} exceeds 2 T1 = {}", 2.0 * t1),
                ));
            }
        }
        Ok(())
    }

    fn times(&self, q: Qubit) -> (f64, f64) {
        match q {
            Qubit::Q1 => (self.t1_q1, self.t2_q1),
            Qubit::Q2 => (self.t1_q2, self.t2_q2),
        }
    }

    /// Pure-dephasing rate `1/T2 - 1/(2 T1)` in 1/µs.
    pub fn dephasing_rate(&self, q: Qubit) -> f64 {
        let (t1, t2) = self.times(q);
        (1.0 / t2 - 0.5 / t1).max(0.0)
    }
}

/// Amplitude-damping Kraus operators for `t_ns`, with the `2 -> 1` decay
/// at twice the `1 -> 0` rate.
fn damping_kraus(t1_us: f64, t_ns: f64) -> [Matrix3<C>; 3] {
    let t = t_ns * 1e-3;
    let g1 = 1.0 - (-t / t1_us).exp();
    let g2 = 1.0 - (-2.0 * t / t1_us).exp();
    let z = C::new(0.0, 0.0);
    let r = |x: f64| C::new(x, 0.0);
    let mut k0 = Matrix3::from_element(z);
    k0[(0, 0)] = r(1.0);
    k0[(1, 1)] = r((1.0 - g1).sqrt());
    k0[(2, 2)] = r((1.0 - g2).sqrt());
    let mut k1 = Matrix3::from_element(z);
    k1[(0, 1)] = r(g1.sqrt());
    let mut k2 = Matrix3::from_element(z);
    k2[(1, 2)] = r(g2.sqrt());
    [k0, k1, k2]
}

fn embed(op: &Matrix3<C>, n: usize, pos: usize) -> DMatrix<C> {
    let op = DMatrix::from_fn(LEVELS, LEVELS, |r, c| op[(r, c)]);
    let id = DMatrix::<C>::identity(LEVELS, LEVELS);
    match (n, pos) {
        (1, _) => op,
        (_, 0) => op.kronecker(&id),
        _ => id.kronecker(&op),
    }
}

/// Level of qutrit `pos` in register index `i`.
pub(crate) fn level(i: usize, n: usize, pos: usize) -> usize {
    (i / LEVELS.pow((n - 1 - pos) as u32)) % LEVELS
}

/// Applies `sum_k K_k rho K_k^dag` with the `K_k` acting on qutrit `pos`.
pub(crate) fn apply_local_kraus(rho: &mut DMatrix<C>, n: usize, pos: usize, kraus: &[Matrix3<C>]) {
    let mut out = DMatrix::<C>::zeros(rho.nrows(), rho.ncols());
    for k in kraus {
        let full = embed(k, n, pos);
        out += &full * &*rho * full.adjoint();
    }
    *rho = out;
}

impl CycleNoise for NoiseModel {
    fn kind(&self) -> &'static str {
        "t1t2"
    }

    fn validate(&self) -> Result<()> {
        NoiseModel::validate(self)
    }

    fn apply(&self, rho: &mut DMatrix<C>, qubits: &[Qubit], slot: Slot) {
        let t_ns = match slot {
            Slot::Single => self.t_single,
            Slot::Gate => self.t_cz,
            Slot::CycleEnd => return,
        };
        if t_ns == 0.0 {
            return;
        }
        let n = qubits.len();
        for (pos, &q) in qubits.iter().enumerate() {
            let (t1, _) = self.times(q);
            if t1.is_finite() {
                apply_local_kraus(rho, n, pos, &damping_kraus(t1, t_ns));
            }
            let rate = self.dephasing_rate(q) * t_ns * 1e-3;
            if rate > 0.0 {
                let dim = rho.nrows();
                for j in 0..dim {
                    for k in 0..dim {
                        let d = level(j, n, pos) as f64 - level(k, n, pos) as f64;
                        if d != 0.0 {
                            rho[(j, k)] *= (-d * d * rate).exp();
                        }
                    }
                }
            }
        }
    }
}

/// Depolarizing channel on the computational block once per cycle.
/// `pauli_error` is the Pauli error `r` it adds per cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Depolarizing {
    pub pauli_error: f64,
}

impl Depolarizing {
    pub fn new(pauli_error: f64) -> Result<Self> {
        if !(0.0..=0.75).contains(&pauli_error) {
            return Err(invalid(
                "pauli_error",
                format!("must lie in [0, 0.75], got {pauli_error}"),
            ));
        }
        Ok(Self { pauli_error })
    }

    /// Depolarizing strength `lambda` for an `n`-qubit register.
    pub fn strength(&self, n: usize) -> f64 {
        let d2 = 4f64.powi(n as i32);
        self.pauli_error * d2 / (d2 - 1.0)
    }
}

impl CycleNoise for Depolarizing {
    fn kind(&self) -> &'static str {
        "depolarizing"
    }

    fn apply(&self, rho: &mut DMatrix<C>, qubits: &[Qubit], slot: Slot) {
        if slot != Slot::CycleEnd || self.pauli_error == 0.0 {
            return;
        }
        let n = qubits.len();
        let lambda = self.strength(n).min(1.0);
        let comp: Vec<usize> = (0..rho.nrows())
            .filter(|&i| (0..n).all(|p| level(i, n, p) < 2))
            .collect();
        let is_comp = |i: usize| comp.contains(&i);
        let tr: f64 = comp.iter().map(|&i| rho[(i, i)].re).sum();
        let d = comp.len() as f64;
        let dim = rho.nrows();
        for j in 0..dim {
            for k in 0..dim {
                if is_comp(j) && is_comp(k) {
                    rho[(j, k)] *= 1.0 - lambda;
                    if j == k {
                        rho[(j, k)] += C::new(lambda * tr / d, 0.0);
                    }
                } else if is_comp(j) != is_comp(k) {
                    rho[(j, k)] *= 1.0 - lambda;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoNoise;

impl CycleNoise for NoNoise {
    fn kind(&self) -> &'static str {
        "none"
    }

    fn apply(&self, _: &mut DMatrix<C>, _: &[Qubit], _: Slot) {}
}

fn build_t1t2(_: &(), o: &Value) -> Result<Box<dyn CycleNoise>> {
    let model: NoiseModel = match o {
        Value::Null => NoiseModel::reference(),
        v => serde_json::from_value(v.clone())?,
    };
    model.validate()?;
    Ok(Box::new(model))
}

fn build_depolarizing(_: &(), o: &Value) -> Result<Box<dyn CycleNoise>> {
    Ok(Box::new(Depolarizing::new(opt_f64(
        o,
        "pauli_error",
        0.0,
    )?)?))
}

fn build_none(_: &(), _: &Value) -> Result<Box<dyn CycleNoise>> {
    Ok(Box::new(NoNoise))
}

/// Noise channels selectable by `noise.kind`.
pub fn noise_registry() -> Registry<(), dyn CycleNoise> {
    let mut reg = Registry::new("noise");
    reg.register("t1t2", build_t1t2)
        .register("depolarizing", build_depolarizing)
        .register("none", build_none);
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn excited(n: usize, i: usize) -> DMatrix<C> {
        let d = LEVELS.pow(n as u32);
        let mut rho = DMatrix::zeros(d, d);
        rho[(i, i)] = C::new(1.0, 0.0);
        rho
    }

    fn trace(rho: &DMatrix<C>) -> f64 {
        (0..rho.nrows()).map(|i| rho[(i, i)].re).sum()
    }

    #[test]
    fn reference_validates_and_bad_models_fail() {
        NoiseModel::reference().validate().unwrap();
        NoiseModel::noiseless().validate().unwrap();
        let bad = NoiseModel {
            t2_q1: 70.0,
            ..NoiseModel::reference()
        };
        assert!(bad.validate().is_err());
        let neg = NoiseModel {
            t1_q2: -1.0,
            ..NoiseModel::reference()
        };
        assert!(neg.validate().is_err());
    }

    #[test]
    fn null_time_means_no_decay() {
        let m: NoiseModel = serde_json::from_value(json!({"t1_q1": null, "t2_q1": null})).unwrap();
        assert!(m.t1_q1.is_infinite() && m.t2_q1.is_infinite());
        assert_eq!(m.t1_q2, 58.5);
    }

    #[test]
    fn amplitude_damping_matches_exponential() {
        let m = NoiseModel {
            t1_q1: 20.0,
            t2_q1: 40.0,
            ..NoiseModel::reference()
        };
        // |1> on Q1 of a two-qutrit register is index 3
        let mut rho = excited(2, 3);
        m.apply(&mut rho, &[Qubit::Q1, Qubit::Q2], Slot::Gate);
        let expect = (-0.106 / 20.0f64).exp();
        assert!((rho[(3, 3)].re - expect).abs() < 1e-12);
        assert!((rho[(0, 0)].re - (1.0 - expect)).abs() < 1e-12);
        assert!((trace(&rho) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn second_level_decays_twice_as_fast() {
        let m = NoiseModel {
            t1_q2: 10.0,
            t2_q2: 20.0,
            ..NoiseModel::reference()
        };
        let mut rho = excited(1, 2);
        m.apply(&mut rho, &[Qubit::Q2], Slot::Single);
        assert!((rho[(2, 2)].re - (-2.0 * 0.05 / 10.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn coherence_decays_at_t2() {
        let m = NoiseModel::reference();
        let d = 2;
        let mut rho = DMatrix::from_element(d + 1, d + 1, C::new(0.0, 0.0));
        rho[(0, 0)] = C::new(0.5, 0.0);
        rho[(1, 1)] = C::new(0.5, 0.0);
        rho[(0, 1)] = C::new(0.5, 0.0);
        rho[(1, 0)] = C::new(0.5, 0.0);
        m.apply(&mut rho, &[Qubit::Q1], Slot::Gate);
        let expect = 0.5 * (-0.106 / m.t2_q1).exp();
        assert!(
            (rho[(0, 1)].re - expect).abs() < 1e-12,
            "{} vs {expect}",
            rho[(0, 1)].re
        );
    }

    #[test]
    fn depolarizing_preserves_trace_and_mixes() {
        let dep = Depolarizing::new(0.03).unwrap();
        let mut rho = excited(2, 0);
        dep.apply(&mut rho, &[Qubit::Q1, Qubit::Q2], Slot::Gate);
        assert_eq!(rho[(0, 0)].re, 1.0);
        dep.apply(&mut rho, &[Qubit::Q1, Qubit::Q2], Slot::CycleEnd);
        let lambda = 0.03 * 16.0 / 15.0;
        assert!((rho[(0, 0)].re - (1.0 - lambda + lambda / 4.0)).abs() < 1e-12);
        assert!((rho[(4, 4)].re - lambda / 4.0).abs() < 1e-12);
        assert!((trace(&rho) - 1.0).abs() < 1e-12);
        assert!(Depolarizing::new(0.9).is_err());
    }

    #[test]
    fn registry_builds_all_kinds() {
        let reg = noise_registry();
        for name in ["t1t2", "depolarizing", "none"] {
            assert_eq!(reg.build(name, &(), &Value::Null).unwrap().kind(), name);
        }
        assert!(reg
            .build("t1t2", &(), &json!({"t1_q1": 1.0, "t2_q1": 5.0}))
            .is_err());
        assert!(reg.build("thermal", &(), &Value::Null).is_err());
    }
}
