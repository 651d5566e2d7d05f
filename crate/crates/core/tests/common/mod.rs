// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::sync::Arc;

use pcz_core::circuit::{AffineCoupling, DeviceModel, SpectralParams};
use pcz_core::config::DeviceFile;

/// Device calibrated on the reference anchors, idling at its decoupling point.
pub fn calibrated() -> DeviceModel {
    DeviceFile::reference().build().expect("reference device")
}

/// Reference qubits with a linear coupling curve through zero at idle.
pub fn affine(slope_mhz: f64) -> DeviceModel {
    let idle = -0.35;
    DeviceModel::with_curve(
        SpectralParams::reference_uncalibrated(),
        idle,
        Arc::new(AffineCoupling::new(0.0, slope_mhz, idle)),
    )
}
