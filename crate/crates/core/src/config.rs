// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON device files and run configurations.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::benchmark::{noise_registry, CycleNoise, XebConfig};
use crate::circuit::{
    calibrate_g_curve, coupling_registry, find_decoupling_flux, spectral_from_circuit,
    CircuitParams, CouplingCurve, DeviceModel, SpectralParams,
};
use crate::error::{Error, Result};
use crate::optimizer::OptimizerConfig;
use crate::pulse::PulseParams;

/// Calibration anchors of the reference device: `(flux, g in MHz)`.
pub const REFERENCE_ANCHORS: [[f64; 2]; 3] = [[0.0, 11.0], [0.5, -22.0], [-0.35, 0.0]];

/// A strategy name plus its options block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub kind: String,
    #[serde(default)]
    pub options: Value,
}

impl StrategySpec {
    pub fn new(kind: &str) -> Self {
        Self {
            kind: kind.into(),
            options: Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceFile {
    #[serde(default)]
    pub circuit: Option<CircuitParams>,
    #[serde(default)]
    pub spectral: Option<SpectralParams>,
    #[serde(default = "default_coupling")]
    pub coupling: StrategySpec,
    /// `(flux, g in MHz)` pairs fitted before the model is built.
    #[serde(default)]
    pub anchors: Vec<[f64; 2]>,
    /// Fixed idle flux; when absent the decoupling point inside
    /// `idle_bracket` is used.
    #[serde(default)]
    pub flux_idle: Option<f64>,
    #[serde(default = "default_bracket")]
    pub idle_bracket: [f64; 2],
}

fn default_coupling() -> StrategySpec {
    StrategySpec::new("dispersive")
}

fn default_bracket() -> [f64; 2] {
    [-0.45, -0.25]
}

impl Default for DeviceFile {
    fn default() -> Self {
        Self::reference()
    }
}

impl DeviceFile {
    /// Reference spectra calibrated on the three reference anchors, idling
    /// at the decoupling point.
    pub fn reference() -> Self {
        Self {
            circuit: None,
            spectral: Some(SpectralParams::reference_uncalibrated()),
            coupling: default_coupling(),
            anchors: REFERENCE_ANCHORS.to_vec(),
            flux_idle: None,
            idle_bracket: default_bracket(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Spectral parameters after the optional calibration step.
    pub fn spectral(&self) -> Result<SpectralParams> {
        let base = match (&self.circuit, &self.spectral) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "device file has both `circuit` and `spectral` blocks".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "device file needs a `circuit` or `spectral` block".into(),
                ))
            }
            (Some(c), None) => spectral_from_circuit(c)?,
            (None, Some(s)) => s.clone(),
        };
        base.validate()?;
        if self.anchors.is_empty() {
            return Ok(base);
        }
        let anchors: Vec<(f64, f64)> = self.anchors.iter().map(|a| (a[0], a[1])).collect();
        calibrate_g_curve(&anchors, &base)
    }

    pub fn build(&self) -> Result<DeviceModel> {
        let spectral = self.spectral()?;
        let curve: Arc<dyn CouplingCurve> = coupling_registry()
            .build(&self.coupling.kind, &spectral, &self.coupling.options)?
            .into();
        let flux_idle = match self.flux_idle {
            Some(f) => f,
            None => {
                find_decoupling_flux(curve.as_ref(), (self.idle_bracket[0], self.idle_bracket[1]))?
            }
        };
        Ok(DeviceModel::with_curve(spectral, flux_idle, curve))
    }
}

/// A device given inline or as a path relative to the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeviceSource {
    Path(PathBuf),
    Inline(Box<DeviceFile>),
}

impl Default for DeviceSource {
    fn default() -> Self {
        DeviceSource::Inline(Box::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GcurveConfig {
    pub phi_min: f64,
    pub phi_max: f64,
    pub points: usize,
}

impl Default for GcurveConfig {
    fn default() -> Self {
        Self {
            phi_min: -0.5,
            phi_max: 0.5,
            points: 501,
        }
    }
}

impl GcurveConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if self.points < 2 || !(self.phi_max > self.phi_min) {
            return Err(Error::Config(
                "gcurve needs at least two points over a non-empty range".into(),
            ));
        }
        let n = self.points - 1;
        Ok((0..=n)
            .map(|i| self.phi_min + (self.phi_max - self.phi_min) * i as f64 / n as f64)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub t_active: f64,
    /// Average-amplitude range; `amp_max` defaults to 1.5 times the
    /// analytic full-cycle value.
    pub amp_min: f64,
    pub amp_max: Option<f64>,
    pub amp_points: usize,
    /// Carrier detuning from the idle target frequency (MHz), symmetric.
    pub detune_span_mhz: f64,
    pub detune_points: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            t_active: 250.0,
            amp_min: 0.0,
            amp_max: None,
            amp_points: 31,
            detune_span_mhz: 1.5,
            detune_points: 31,
        }
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizeConfig {
    pub t_active: f64,
    #[serde(flatten)]
    pub optimizer: OptimizerConfig,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            t_active: 100.0,
            optimizer: OptimizerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Signed qubit detunings `f10 - f01` (MHz).
    pub deltas_mhz: Vec<f64>,
    pub t_active: f64,
    /// Highest harmonic included in the collision list.
    pub k_max: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            deltas_mhz: linspace(50.0, 200.0, 31),
            t_active: 100.0,
            k_max: 2,
        }
    }
}

/// Two-qubit gate used in the benchmark cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchGate {
    IdealCz,
    /// Optimize a pulse with the `optimize` block first.
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub gate: BenchGate,
    #[serde(flatten)]
    pub xeb: XebConfig,
    /// Slot durations reported in the budget table (ns).
    pub t_single: f64,
    pub t_cz: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            gate: BenchGate::IdealCz,
            xeb: XebConfig::default(),
            t_single: 50.0,
            t_cz: 106.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceSource,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Include flux-dependent dispersive qubit shifts in the dynamics.
    pub include_shift: bool,
    pub gcurve: GcurveConfig,
    pub pulse: PulseParams,
    pub scan: ScanConfig,
    pub optimize: OptimizeConfig,
    pub sweep: SweepConfig,
    pub noise: StrategySpec,
    pub xeb: BenchConfig,
    /// Budget input: decay constants per row instead of a simulation.
    pub budget: Option<BudgetInput>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            device: DeviceSource::default(),
            seed: 0,
            out: None,
            include_shift: false,
            gcurve: GcurveConfig::default(),
            pulse: PulseParams::default(),
            scan: ScanConfig::default(),
            optimize: OptimizeConfig::default(),
            sweep: SweepConfig::default(),
            noise: StrategySpec::new("t1t2"),
            xeb: BenchConfig::default(),
            budget: None,
        }
    }
}

/// Inputs of the `budget` command: either decay constants
/// `[p_xeb, p_spb, r_leak]` per row, or decay CSV files to fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum BudgetInput {
    Decays {
        q1: [f64; 3],
        q2: [f64; 3],
        cycle: [f64; 3],
        #[serde(default = "default_t_single")]
        t_single: f64,
        #[serde(default = "default_t_cz")]
        t_cz: f64,
    },
    Datasets {
        q1_csv: PathBuf,
        q2_csv: PathBuf,
        cycle_csv: PathBuf,
        #[serde(default = "default_t_single")]
        t_single: f64,
        #[serde(default = "default_t_cz")]
        t_cz: f64,
    },
}

fn default_t_single() -> f64 {
    50.0
}

fn default_t_cz() -> f64 {
    106.0
}

impl RunConfig {
    /// Reads a config; a device path is resolved against the config's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if let DeviceSource::Path(p) = &cfg.device {
            if p.is_relative() {
                let base = path.parent().unwrap_or_else(|| Path::new("."));
                cfg.device = DeviceSource::Path(base.join(p));
            }
        }
        if let Some(BudgetInput::Datasets {
            q1_csv,
            q2_csv,
            cycle_csv,
            ..
        }) = &mut cfg.budget
        {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            for p in [q1_csv, q2_csv, cycle_csv] {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn device_model(&self) -> Result<DeviceModel> {
        match &self.device {
            DeviceSource::Path(p) => DeviceFile::load(p)?.build(),
            DeviceSource::Inline(d) => d.build(),
        }
    }

    pub fn noise_channel(&self) -> Result<Box<dyn CycleNoise>> {
        noise_registry().build(&self.noise.kind, &(), &self.noise.options)
    }
}
