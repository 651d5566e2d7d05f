// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and pulse optimization for all-microwave parametric CZ gates
//! between two transmons joined by a flux-tunable coupler.
//!
//! The pipeline runs from a [`circuit::DeviceModel`] (qubit spectra and the
//! coupling-vs-flux curve), through [`pulse`] synthesis and the six-level
//! [`dynamics`] propagator, to [`metrics`], the Nelder-Mead [`optimizer`] and
//! the XEB/SPB [`benchmark`] error budget.

pub mod benchmark;
pub mod circuit;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod metrics;
pub mod optimizer;
pub mod pulse;
pub mod registry;

pub use error::{Error, Result};
