// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Pulse optimization: a Nelder-Mead driver over a subset of pulse
//! parameters, seeding from a coarse amplitude-by-detuning scan, and the
//! qubit-detuning sweep.

mod cost;
mod nelder_mead;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::circuit::{working_point_check, CollisionMargin, DeviceModel, Severity};
use crate::dynamics::{evolve, interaction_frame, S11};
use crate::error::{invalid, Error, Result};
use crate::metrics::{gate_metrics, ramsey_control_phase, GateMetrics};
use crate::pulse::PulseParams;

pub use cost::{cost_registry, CoherentCost, CostContext, GateCost, NoisyCost, XebProxyCost};
pub use nelder_mead::{nelder_mead, SimplexResult, TraceEntry};

/// Cost assigned to trial pulses that drive the coupler outside the
/// domain of its coupling curve.
pub const EXCURSION_PENALTY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeParam {
    Lambda1,
    Lambda3,
    Lambda4,
    AmplitudeScale,
    FCarrier,
}

impl FreeParam {
    pub const ALL: [FreeParam; 5] = [
        FreeParam::Lambda1,
        FreeParam::Lambda3,
        FreeParam::Lambda4,
        FreeParam::AmplitudeScale,
        FreeParam::FCarrier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FreeParam::Lambda1 => "lambda1",
            FreeParam::Lambda3 => "lambda3",
            FreeParam::Lambda4 => "lambda4",
            FreeParam::AmplitudeScale => "amplitude_scale",
            FreeParam::FCarrier => "f_carrier",
        }
    }

    pub fn get(self, p: &PulseParams) -> f64 {
        match self {
            FreeParam::Lambda1 => p.lambda[0],
            FreeParam::Lambda3 => p.lambda[2],
            FreeParam::Lambda4 => p.lambda[3],
            FreeParam::AmplitudeScale => p.amplitude_scale,
            FreeParam::FCarrier => p.f_carrier,
        }
    }

    pub fn set(self, p: &mut PulseParams, v: f64) {
        match self {
            FreeParam::Lambda1 => p.lambda[0] = v,
            FreeParam::Lambda3 => p.lambda[2] = v,
            FreeParam::Lambda4 => p.lambda[3] = v,
            FreeParam::AmplitudeScale => p.amplitude_scale = v,
            FreeParam::FCarrier => p.f_carrier = v,
        }
    }

    /// Default simplex displacement: 5% of the value with a floor; the
    /// carrier moves by a fixed 2 MHz.
    pub fn default_step(self, value: f64) -> f64 {
        match self {
            FreeParam::FCarrier => 2e-3,
            FreeParam::AmplitudeScale => (0.05 * value.abs()).max(1e-3),
            _ => (0.05 * value.abs()).max(0.02),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    pub kind: String,
    #[serde(default)]
    pub options: Value,
}

impl Default for CostSpec {
    fn default() -> Self {
        Self {
            kind: "coherent".into(),
            options: Value::Null,
        }
    }
}

/// Coarse scan used to seed amplitude and carrier frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeedScan {
    /// Relative amplitude span around the analytic estimate.
    pub amp_span: f64,
    pub amp_points: usize,
    /// Detuning half-span around the bare target (MHz).
    pub detune_span_mhz: f64,
    pub detune_points: usize,
}

impl Default for SeedScan {
    fn default() -> Self {
        Self {
            amp_span: 0.2,
            amp_points: 9,
            detune_span_mhz: 3.0,
            detune_points: 13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub free_params: Vec<FreeParam>,
    /// Starting pulse; a zero `amplitude_scale` requests scan seeding.
    pub initial: PulseParams,
    pub max_iters: usize,
    /// Per-parameter simplex displacements, in `free_params` order.
    pub simplex_init: Option<Vec<f64>>,
    /// Cost-spread stopping tolerance.
    pub tolerance: f64,
    pub seed: u64,
    pub cost: CostSpec,
    pub include_shift: bool,
    pub seed_scan: SeedScan,
    /// Reject working points with a collision at harmonic 0 or 1.
    pub collision_check: bool,
    /// Highest drive harmonic reported by the working-point check.
    pub collision_k_max: u32,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            free_params: FreeParam::ALL.to_vec(),
            initial: PulseParams::default(),
            max_iters: 200,
            simplex_init: None,
            tolerance: 1e-6,
            seed: 0,
            cost: CostSpec::default(),
            include_shift: false,
            seed_scan: SeedScan::default(),
            collision_check: true,
            collision_k_max: 2,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be at least 1"));
        }
        if self.free_params.is_empty() {
            return Err(invalid("free_params", "select at least one parameter"));
        }
        for (i, a) in self.free_params.iter().enumerate() {
            if self.free_params[..i].contains(a) {
                return Err(invalid(
                    "free_params",
                    format!("`{}` listed twice", a.name()),
                ));
            }
        }
        if let Some(s) = &self.simplex_init {
            if s.len() != self.free_params.len() {
                return Err(invalid(
                    "simplex_init",
                    "one displacement per free parameter",
                ));
            }
            if s.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                return Err(invalid("simplex_init", "displacements must be positive"));
            }
        }
        if !(self.tolerance >= 0.0) {
            return Err(invalid("tolerance", "must be non-negative"));
        }
        self.initial.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub param_names: Vec<String>,
    pub entries: Vec<TraceEntry>,
    pub evaluations: usize,
    pub converged: bool,
    pub final_pulse: PulseParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Optimized {
    pub pulse: PulseParams,
    pub metrics: GateMetrics,
    pub trace: OptimizationTrace,
    /// Cost of the starting pulse after seeding.
    pub initial_cost: f64,
    pub best_cost: f64,
    pub collisions: Vec<CollisionMargin>,
}

/// `d g / d phi` at idle (MHz per flux quantum), central difference.
pub fn idle_slope(model: &DeviceModel) -> Result<f64> {
    model.idle_slope()
}

/// Amplitude scale for one full `|11> <-> |20>` cycle in the linear,
/// rotating-wave limit: `sqrt(2) * slope * scale * integral(shape) = 1`.
pub fn analytic_amplitude(model: &DeviceModel, pulse: &PulseParams) -> Result<f64> {
    let slope = idle_slope(model)?;
    let n = 4000;
    let h = pulse.t_active / n as f64;
    let area: f64 = (0..n)
        .map(|i| pulse.shape((i as f64 + 0.5) * h))
        .sum::<f64>()
        * h;
    let denom = std::f64::consts::SQRT_2 * slope * 1e-3 * area;
    if denom == 0.0 || !denom.is_finite() {
        return Err(invalid(
            "pulse",
            "coupling slope or envelope area vanishes at idle",
        ));
    }
    Ok((1.0 / denom).abs())
}

/// Seeds amplitude and carrier from a coarse scan scored by
/// `(1 - P11) + (1 - cos(theta - pi)) / 2`.
pub fn seed_pulse(
    model: &DeviceModel,
    pulse: &PulseParams,
    scan: &SeedScan,
    include_shift: bool,
) -> Result<PulseParams> {
    let a0 = analytic_amplitude(model, pulse)?;
    let f0 = model.target_frequency();
    let lin = |span: f64, n: usize| -> Vec<f64> {
        if n <= 1 {
            vec![0.0]
        } else {
            (0..n)
                .map(|i| -span + 2.0 * span * i as f64 / (n - 1) as f64)
                .collect()
        }
    };
    let amps = lin(scan.amp_span, scan.amp_points);
    let dets = lin(scan.detune_span_mhz, scan.detune_points);
    let candidates: Vec<PulseParams> = dets
        .iter()
        .flat_map(|&d| {
            amps.iter().map(move |&a| {
                let mut p = pulse.clone();
                p.amplitude_scale = a0 * (1.0 + a);
                p.f_carrier = f0 + d * 1e-3;
                p
            })
        })
        .collect();
    let scores: Vec<f64> = candidates
        .par_iter()
        .map(|p| {
            let u = interaction_frame(&evolve(model, p, include_shift)?, model);
            let theta = ramsey_control_phase(&u);
            Ok((1.0 - u.population(S11, S11)) + 0.5 * (1.0 - (theta - PI).cos()))
        })
        .collect::<Result<_>>()?;
    let best = scores
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(candidates[best].clone())
}

/// Peak `|g(t)|` of the modulated coupling (MHz) on the synthesis grid.
fn drive_peak(model: &DeviceModel, pulse: &PulseParams) -> Result<f64> {
    let n = 2000;
    let mut peak: f64 = 0.0;
    for i in 0..=n {
        let t = pulse.t_pad + pulse.t_active * i as f64 / n as f64;
        let g = model.coupling(model.flux_idle + pulse.flux_at(t))?;
        peak = peak.max(g.abs());
    }
    Ok(peak)
}

/// Runs the working-point check for `pulse`, failing on harmonic-0/1
/// collisions when `hard` is set.
pub fn check_working_point(
    model: &DeviceModel,
    pulse: &PulseParams,
    k_max: u32,
    hard: bool,
) -> Result<Vec<CollisionMargin>> {
    let peak = drive_peak(model, pulse)?;
    let margins = working_point_check(model, pulse.f_carrier, k_max, peak);
    for m in &margins {
        match m.severity {
            Severity::Collision if hard && m.harmonic <= 1 => {
                return Err(Error::Collision(format!(
                    "{}x carrier within {:.3} MHz of {:?} (drive peak {peak:.2} MHz)",
                    m.harmonic, m.margin_mhz, m.transition
                )));
            }
            Severity::Collision => log::warn!(
                "{}x carrier is {:.3} MHz from {:?} (drive peak {peak:.2} MHz)",
                m.harmonic,
                m.margin_mhz,
                m.transition
            ),
            Severity::Warn => log::info!(
                "{}x carrier is {:.3} MHz from {:?} (drive peak {peak:.2} MHz)",
                m.harmonic,
                m.margin_mhz,
                m.transition
            ),
            Severity::Clear => {}
        }
    }
    Ok(margins)
}

fn pulse_from(base: &PulseParams, free: &[FreeParam], x: &[f64]) -> PulseParams {
    let mut p = base.clone();
    for (f, &v) in free.iter().zip(x) {
        f.set(&mut p, v);
    }
    p
}

/// Evaluates `cost`, mapping coupling-domain excursions to
/// [`EXCURSION_PENALTY`] and invalid trial pulses likewise.
fn guarded(cost: &dyn GateCost, p: &PulseParams) -> Result<f64> {
    if p.validate().is_err() || p.f_carrier <= 0.0 {
        return Ok(EXCURSION_PENALTY);
    }
    match cost.evaluate(p) {
        Err(Error::DomainExcursion { .. }) | Err(Error::Degenerate { .. }) => Ok(EXCURSION_PENALTY),
        other => other,
    }
}

/// Optimizes a CZ pulse of active time `t_active` on `model`.
pub fn optimize_cz(
    model: &DeviceModel,
    t_active: f64,
    config: &OptimizerConfig,
) -> Result<Optimized> {
    let mut start = config.initial.clone();
    start.t_active = t_active;
    let config = OptimizerConfig {
        initial: start.clone(),
        ..config.clone()
    };
    config.validate()?;
    if start.amplitude_scale == 0.0 {
        start = seed_pulse(model, &start, &config.seed_scan, config.include_shift)?;
        log::info!(
            "seeded amplitude_scale {:.6}, f_carrier {:.6} GHz",
            start.amplitude_scale,
            start.f_carrier
        );
    }
    let collisions = check_working_point(
        model,
        &start,
        config.collision_k_max,
        config.collision_check,
    )?;

    let ctx = CostContext {
        model: model.clone(),
        include_shift: config.include_shift,
        seed: config.seed,
    };
    let cost = cost_registry().build(&config.cost.kind, &ctx, &config.cost.options)?;
    let free = config.free_params.clone();
    let x0: Vec<f64> = free.iter().map(|f| f.get(&start)).collect();
    let steps: Vec<f64> = match &config.simplex_init {
        Some(s) => s.clone(),
        None => free
            .iter()
            .zip(&x0)
            .map(|(f, &v)| f.default_step(v))
            .collect(),
    };
    let initial_cost = guarded(cost.as_ref(), &start)?;
    let result = nelder_mead(
        |x: &[f64]| guarded(cost.as_ref(), &pulse_from(&start, &free, x)),
        &x0,
        &steps,
        config.max_iters,
        config.tolerance,
    )?;
    let pulse = pulse_from(&start, &free, &result.best);
    let metrics = gate_metrics(model, &pulse, config.include_shift)?;
    log::info!(
        "optimized after {} iterations ({} evaluations): coherent error {:.3e}",
        result.iterations,
        result.evaluations,
        metrics.coherent_error
    );
    Ok(Optimized {
        trace: OptimizationTrace {
            param_names: free.iter().map(|f| f.name().to_string()).collect(),
            entries: result.trace,
            evaluations: result.evaluations + 1,
            converged: result.converged,
            final_pulse: pulse.clone(),
        },
        pulse,
        metrics,
        initial_cost,
        best_cost: result.best_cost,
        collisions,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub delta_mhz: f64,
    pub f_target_ghz: f64,
    pub coherent_error: f64,
    pub metrics: GateMetrics,
    pub pulse: PulseParams,
    /// Smallest harmonic margin to any coupled transition (MHz).
    pub min_margin_mhz: f64,
}

/// Re-optimizes at every qubit detuning in `deltas_mhz`
/// (`f10 = f01 + delta`). Collisions are reported, not rejected.
pub fn delta_sweep(
    model: &DeviceModel,
    deltas_mhz: &[f64],
    t_active: f64,
    config: &OptimizerConfig,
) -> Result<Vec<SweepPoint>> {
    if let Some(d) = deltas_mhz.iter().find(|d| **d == 0.0 || !d.is_finite()) {
        return Err(invalid(
            "deltas",
            format!("qubit detuning {d} MHz is degenerate"),
        ));
    }
    let config = OptimizerConfig {
        collision_check: false,
        ..config.clone()
    };
    deltas_mhz
        .par_iter()
        .map(|&delta| {
            let m = model.with_qubit_detuning(delta);
            let mut cfg = config.clone();
            cfg.initial.amplitude_scale = 0.0;
            let out = optimize_cz(&m, t_active, &cfg)?;
            let min_margin_mhz = out
                .collisions
                .iter()
                .fold(f64::INFINITY, |a, c| a.min(c.margin_mhz));
            Ok(SweepPoint {
                delta_mhz: delta,
                f_target_ghz: m.target_frequency(),
                coherent_error: out.metrics.coherent_error,
                metrics: out.metrics,
                pulse: out.pulse,
                min_margin_mhz,
            })
        })
        .collect()
}

/// Collision positions (MHz) of the detuning family in `[lo, hi]`, found by
/// scanning the working-point margins for sign changes of
/// `k f_target - f_transition`.
pub fn family_collisions(
    model: &DeviceModel,
    k_max: u32,
    lo: f64,
    hi: f64,
) -> Vec<(f64, u32, crate::circuit::Transition)> {
    use crate::circuit::Transition;
    let signed = |delta: f64, k: u32, tr: Transition| {
        let m = model.with_qubit_detuning(delta);
        let f = match tr {
            Transition::Swap => m.qubit_detuning(),
            Transition::Leak02 => m.leak_detuning(),
            Transition::Leak20 => m.target_frequency(),
        };
        k as f64 * m.target_frequency() - f
    };
    let mut out = Vec::new();
    let n = 4000;
    for k in 0..=k_max {
        for tr in [Transition::Swap, Transition::Leak02, Transition::Leak20] {
            if k == 1 && tr == Transition::Leak20 {
                continue;
            }
            let mut prev = signed(lo, k, tr);
            for i in 1..=n {
                let d = lo + (hi - lo) * i as f64 / n as f64;
                let cur = signed(d, k, tr);
                if prev == 0.0 || prev.signum() != cur.signum() {
                    // refine by bisection
                    let (mut a, mut b) = (d - (hi - lo) / n as f64, d);
                    let fa = signed(a, k, tr);
                    for _ in 0..60 {
                        let mid = 0.5 * (a + b);
                        if signed(mid, k, tr).signum() == fa.signum() {
                            a = mid;
                        } else {
                            b = mid;
                        }
                    }
                    out.push((0.5 * (a + b), k, tr));
                }
                prev = cur;
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{AffineCoupling, SpectralParams, Transition};
    use std::sync::Arc;

    fn affine_model() -> DeviceModel {
        DeviceModel::with_curve(
            SpectralParams::reference_uncalibrated(),
            -0.35,
            Arc::new(AffineCoupling::new(0.0, 100.0, -0.35)),
        )
    }

    #[test]
    fn analytic_amplitude_matches_linear_rwa() {
        let p = PulseParams {
            lambda: [0.0, 1.0, 0.0, 0.0],
            ..PulseParams::default()
        };
        let a = analytic_amplitude(&affine_model(), &p).unwrap();
        // sqrt(2) * 100 MHz * a * T = 1 GHz ns
        assert!((a - 1.0 / (2f64.sqrt() * 0.1 * 100.0)).abs() < 1e-6);
    }

    #[test]
    fn free_param_round_trip() {
        let mut p = PulseParams::default();
        for (i, f) in FreeParam::ALL.iter().enumerate() {
            f.set(&mut p, i as f64 + 0.5);
            assert_eq!(f.get(&p), i as f64 + 0.5);
        }
        assert_eq!(p.lambda[1], 1.0);
    }

    #[test]
    fn config_validation() {
        let mut c = OptimizerConfig::default();
        assert!(c.validate().is_ok());
        c.max_iters = 0;
        assert!(c.validate().is_err());
        let c = OptimizerConfig {
            free_params: vec![FreeParam::Lambda1, FreeParam::Lambda1],
            ..OptimizerConfig::default()
        };
        assert!(c.validate().is_err());
        let c = OptimizerConfig {
            simplex_init: Some(vec![0.1]),
            ..OptimizerConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn collisions_of_detuning_family() {
        let hits = family_collisions(&affine_model(), 2, 50.0, 200.0);
        let pos: Vec<(f64, u32, Transition)> = hits;
        let find = |k, tr| pos.iter().find(|h| h.1 == k && h.2 == tr).map(|h| h.0);
        // 2 (232 - d) = d + 230, 232 - d = d, 2 (232 - d) = d
        assert!((find(2, Transition::Leak02).unwrap() - 78.0).abs() < 1e-6);
        assert!((find(1, Transition::Swap).unwrap() - 116.0).abs() < 1e-6);
        assert!((find(2, Transition::Swap).unwrap() - 464.0 / 3.0).abs() < 1e-6);
        assert_eq!(pos.len(), 3);
    }

    #[test]
    fn hard_collision_rejected() {
        let m = affine_model();
        let p = PulseParams {
            amplitude_scale: 0.05,
            f_carrier: m.qubit_detuning(),
            ..PulseParams::default()
        };
        assert!(matches!(
            check_working_point(&m, &p, 2, true),
            Err(Error::Collision(_))
        ));
        assert!(check_working_point(&m, &p, 2, false).is_ok());
    }

    #[test]
    fn sweep_rejects_zero_detuning() {
        let c = OptimizerConfig::default();
        assert!(delta_sweep(&affine_model(), &[0.0], 100.0, &c).is_err());
    }
}
