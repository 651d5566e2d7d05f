// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Random-circuit benchmarking: noisy qutrit simulation, decay fits and
//! the Pauli-error budget.

mod fit;
mod noise;
mod xeb;

pub use fit::{
    build_budget, extract_gate_error, fit_decay, fit_decay_or_flat, gate_budget, gate_fidelity,
    leakage_error, pauli_error, BudgetReport, BudgetRow, ErrorBudget, FitResult,
};
pub use noise::{noise_registry, CycleNoise, Depolarizing, NoNoise, NoiseModel, Qubit, Slot};
pub use xeb::{
    ideal_gate_sequence_fidelity, simulate_budget, xeb_simulate, DecayDataset, DecayFits, GateSpec,
    XebConfig, XebTarget,
};
