// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulator, optimizer and benchmarking routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "coupler frequency {coupler_ghz:.4} GHz too close to qubit {qubit} at {qubit_ghz:.4} GHz \
         (|detuning| {detuning_mhz:.1} MHz <= {limit_mhz:.1} MHz)"
    )]
    Degenerate {
        qubit: usize,
        qubit_ghz: f64,
        coupler_ghz: f64,
        detuning_mhz: f64,
        limit_mhz: f64,
    },

    #[error("coupling evaluation failed at sample {index} (t = {t_ns} ns): {source}")]
    DomainExcursion {
        index: usize,
        t_ns: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no sign change of g on [{lo}, {hi}] (g = {g_lo} MHz, {g_hi} MHz)")]
    NoSignChange {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("calibration did not converge: worst anchor residual {residual_mhz:.4} MHz")]
    CalibrationFailed { residual_mhz: f64 },

    #[error("propagator did not converge: step-halving delta {delta:.3e} after {steps} steps")]
    StepConvergence { delta: f64, steps: usize },

    #[error("matrix is not unitary: max |U^dag U - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("cost is NaN at parameters {params:?}")]
    NanCost { params: Vec<f64> },

    #[error("non-uniform sampling at index {index}")]
    NonUniformSampling { index: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("working point rejected: {0}")]
    Collision(String),

    #[error("unknown {family} strategy `{name}` (known: {known})")]
    UnknownStrategy {
        family: &'static str,
        name: String,
        known: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
