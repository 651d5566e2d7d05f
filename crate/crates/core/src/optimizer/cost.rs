// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::Value;

use crate::benchmark::{ideal_gate_sequence_fidelity, noise_registry, CycleNoise, NoNoise};
use crate::circuit::DeviceModel;
use crate::dynamics::{evolve, interaction_frame};
use crate::error::{invalid, Error, Result};
use crate::metrics::{extract_metrics, gate_metrics};
use crate::pulse::PulseParams;
use crate::registry::{opt_f64, Registry};

/// Scalar figure of merit minimized by the optimizer.
pub trait GateCost: Send + Sync {
    fn kind(&self) -> &'static str;
    fn evaluate(&self, pulse: &PulseParams) -> Result<f64>;
}

#[derive(Debug, Clone)]
pub struct CostContext {
    pub model: DeviceModel,
    pub include_shift: bool,
    pub seed: u64,
}

/// `1 - F` of the phase-corrected propagator.
#[derive(Debug, Clone)]
pub struct CoherentCost {
    model: DeviceModel,
    include_shift: bool,
}

impl CoherentCost {
    pub fn new(model: DeviceModel, include_shift: bool) -> Self {
        Self {
            model,
            include_shift,
        }
    }
}

impl GateCost for CoherentCost {
    fn kind(&self) -> &'static str {
        "coherent"
    }

    fn evaluate(&self, pulse: &PulseParams) -> Result<f64> {
        Ok(gate_metrics(&self.model, pulse, self.include_shift)?.coherent_error)
    }
}

/// Coherent error plus additive Gaussian readout noise of width `sigma`.
pub struct NoisyCost {
    inner: CoherentCost,
    noise: Normal<f64>,
    rng: Mutex<ChaCha8Rng>,
}

impl NoisyCost {
    pub fn new(inner: CoherentCost, sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(invalid(
                "sigma",
                format!("must be finite and non-negative, got {sigma}"),
            ));
        }
        let noise =
            Normal::new(0.0, sigma).map_err(|e| invalid("sigma", format!("{e} (got {sigma})")))?;
        Ok(Self {
            inner,
            noise,
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(seed)),
        })
    }
}

impl GateCost for NoisyCost {
    fn kind(&self) -> &'static str {
        "noisy"
    }

    fn evaluate(&self, pulse: &PulseParams) -> Result<f64> {
        let c = self.inner.evaluate(pulse)?;
        let mut rng = self.rng.lock().unwrap_or_else(|e| e.into_inner());
        Ok(c + self.noise.sample(&mut *rng))
    }
}

/// One minus the per-cycle XEB decay of a short random-circuit experiment
/// built around the simulated gate.
pub struct XebProxyCost {
    model: DeviceModel,
    include_shift: bool,
    noise: Box<dyn CycleNoise>,
    depth: usize,
    circuits: usize,
    seed: u64,
}

impl GateCost for XebProxyCost {
    fn kind(&self) -> &'static str {
        "xeb-proxy"
    }

    fn evaluate(&self, pulse: &PulseParams) -> Result<f64> {
        let u = interaction_frame(
            &evolve(&self.model, pulse, self.include_shift)?,
            &self.model,
        );
        // reject non-unitary input early with the usual error
        extract_metrics(&u)?;
        let alpha = ideal_gate_sequence_fidelity(
            &u,
            self.noise.as_ref(),
            self.depth,
            self.circuits,
            self.seed,
        )?;
        Ok(1.0 - alpha.max(0.0).powf(1.0 / self.depth as f64))
    }
}

fn opt_usize(o: &Value, key: &str, default: usize) -> Result<usize> {
    match o.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| Error::Config(format!("option `{key}` must be a non-negative integer"))),
    }
}

fn build_coherent(ctx: &CostContext, _: &Value) -> Result<Box<dyn GateCost>> {
    Ok(Box::new(CoherentCost::new(
        ctx.model.clone(),
        ctx.include_shift,
    )))
}

fn build_noisy(ctx: &CostContext, o: &Value) -> Result<Box<dyn GateCost>> {
    let inner = CoherentCost::new(ctx.model.clone(), ctx.include_shift);
    Ok(Box::new(NoisyCost::new(
        inner,
        opt_f64(o, "sigma", 0.0)?,
        ctx.seed,
    )?))
}

fn build_xeb_proxy(ctx: &CostContext, o: &Value) -> Result<Box<dyn GateCost>> {
    // `noise` is `{"kind": ..., <options>}`; absent means noiseless
    let noise: Box<dyn CycleNoise> = match o.get("noise") {
        None | Some(Value::Null) => Box::new(NoNoise),
        Some(v) => {
            let kind = v
                .get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Config("noise block needs a string `kind`".into()))?;
            let mut opts = v.clone();
            if let Some(m) = opts.as_object_mut() {
                m.remove("kind");
            }
            noise_registry().build(kind, &(), &opts)?
        }
    };
    let depth = opt_usize(o, "depth", 4)?;
    if depth == 0 {
        return Err(invalid("depth", "must be at least 1"));
    }
    Ok(Box::new(XebProxyCost {
        model: ctx.model.clone(),
        include_shift: ctx.include_shift,
        noise,
        depth,
        circuits: opt_usize(o, "circuits", 8)?.max(1),
        seed: ctx.seed,
    }))
}

/// Cost strategies selectable by `cost.kind` in an optimizer block.
pub fn cost_registry() -> Registry<CostContext, dyn GateCost> {
    let mut reg = Registry::new("cost");
    reg.register("coherent", build_coherent)
        .register("noisy", build_noisy)
        .register("xeb-proxy", build_xeb_proxy);
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{AffineCoupling, SpectralParams};
    use serde_json::json;
    use std::sync::Arc;

    fn ctx() -> CostContext {
        CostContext {
            model: DeviceModel::with_curve(
                SpectralParams::reference_uncalibrated(),
                -0.35,
                Arc::new(AffineCoupling::new(0.0, 100.0, -0.35)),
            ),
            include_shift: false,
            seed: 7,
        }
    }

    #[test]
    fn zero_amplitude_costs_three_fifths() {
        let reg = cost_registry();
        let c = reg.build("coherent", &ctx(), &Value::Null).unwrap();
        let v = c.evaluate(&PulseParams::default()).unwrap();
        assert!((v - 0.6).abs() < 1e-9);
        assert_eq!(v, c.evaluate(&PulseParams::default()).unwrap());
    }

    #[test]
    fn noisy_cost_varies_only_with_sigma() {
        let reg = cost_registry();
        let p = PulseParams::default();
        let quiet = reg.build("noisy", &ctx(), &json!({"sigma": 0.0})).unwrap();
        assert_eq!(quiet.evaluate(&p).unwrap(), quiet.evaluate(&p).unwrap());
        let loud = reg.build("noisy", &ctx(), &json!({"sigma": 0.01})).unwrap();
        assert_ne!(loud.evaluate(&p).unwrap(), loud.evaluate(&p).unwrap());
        assert!(reg.build("noisy", &ctx(), &json!({"sigma": -1.0})).is_err());
    }

    #[test]
    fn xeb_proxy_of_identity_is_large() {
        let reg = cost_registry();
        let c = reg
            .build("xeb-proxy", &ctx(), &json!({"depth": 3, "circuits": 4}))
            .unwrap();
        let v = c.evaluate(&PulseParams::default()).unwrap();
        assert!(v > 0.05, "{v}");
    }
}
