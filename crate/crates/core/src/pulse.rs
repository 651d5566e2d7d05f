// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Flux-pulse synthesis: the four-term envelope, the carrier-modulated flux
//! waveform, its image through the coupling curve, and Fourier spectra.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::circuit::DeviceModel;
use crate::error::{invalid, Error, Result};

/// Envelope coefficient ratio used to seed optimization.
pub const SEED_LAMBDA: [f64; 4] = [-0.0760, 1.0000, 0.4222, -0.1636];

/// Quadrature points used for the mean-|shape| amplitude proxy.
const SHAPE_QUADRATURE_POINTS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PulseParams {
    /// Envelope coefficients (flux quanta) of
    /// `sin(pi t/T)`, `1 - cos(2 pi t/T)`, `sin(3 pi t/T)`, `1 - cos(4 pi t/T)`.
    pub lambda: [f64; 4],
    pub amplitude_scale: f64,
    /// Carrier frequency (GHz).
    pub f_carrier: f64,
    /// Carrier phase (rad).
    pub phase: f64,
    /// Active time (ns).
    pub t_active: f64,
    /// Idle padding before and after the active window (ns).
    pub t_pad: f64,
    /// Synthesis step (ns).
    pub sample_dt: f64,
}

impl Default for PulseParams {
    fn default() -> Self {
        Self {
            lambda: SEED_LAMBDA,
            amplitude_scale: 0.0,
            f_carrier: 0.3,
            phase: 0.0,
            t_active: 100.0,
            t_pad: 3.0,
            sample_dt: 0.01,
        }
    }
}

impl PulseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_active > 0.0 && self.t_active.is_finite()) {
            return Err(invalid(
                "t_active",
                format!("must be positive, got {}", self.t_active),
            ));
        }
        if !(self.t_pad >= 0.0 && self.t_pad.is_finite()) {
            return Err(invalid(
                "t_pad",
                format!("must be non-negative, got {}", self.t_pad),
            ));
        }
        if !(self.sample_dt > 0.0 && self.sample_dt <= self.t_active / 1000.0) {
            return Err(invalid(
                "sample_dt",
                format!(
                    "must lie in (0, t_active/1000 = {}], got {}",
                    self.t_active / 1000.0,
                    self.sample_dt
                ),
            ));
        }
        let finite = self.lambda.iter().all(|l| l.is_finite())
            && self.amplitude_scale.is_finite()
            && self.f_carrier.is_finite()
            && self.phase.is_finite();
        if !finite {
            return Err(invalid("pulse", "non-finite coefficient"));
        }
        Ok(())
    }

    pub fn total_duration(&self) -> f64 {
        self.t_active + 2.0 * self.t_pad
    }

    /// Unscaled envelope shape at active-window time `tau`; zero outside
    /// `(0, t_active)`.
    pub fn shape(&self, tau: f64) -> f64 {
        if tau <= 0.0 || tau >= self.t_active {
            return 0.0;
        }
        let x = PI * tau / self.t_active;
        let [l1, l2, l3, l4] = self.lambda;
        l1 * x.sin()
            + l2 * (1.0 - (2.0 * x).cos())
            + l3 * (3.0 * x).sin()
            + l4 * (1.0 - (4.0 * x).cos())
    }

    /// Envelope `A(tau)` in flux quanta.
    pub fn envelope(&self, tau: f64) -> f64 {
        self.amplitude_scale * self.shape(tau)
    }

    /// Extra coupler flux at absolute time `t` (ns from the start of the
    /// leading pad).
    pub fn flux_at(&self, t: f64) -> f64 {
        let tau = t - self.t_pad;
        let a = self.envelope(tau);
        if a == 0.0 {
            return 0.0;
        }
        a * (2.0 * PI * self.f_carrier * tau + self.phase).cos()
    }

    /// Mean of `|shape|` over the active window.
    pub fn mean_abs_shape(&self) -> f64 {
        let n = SHAPE_QUADRATURE_POINTS;
        let h = self.t_active / n as f64;
        (0..n)
            .map(|i| self.shape((i as f64 + 0.5) * h).abs())
            .sum::<f64>()
            / n as f64
    }

    /// Averaged amplitude proxy `amplitude_scale * mean|shape|`.
    pub fn average_amplitude(&self) -> f64 {
        self.amplitude_scale.abs() * self.mean_abs_shape()
    }

    /// Sets `amplitude_scale` so that [`Self::average_amplitude`] equals `a_bar`.
    pub fn with_average_amplitude(mut self, a_bar: f64) -> Self {
        let m = self.mean_abs_shape();
        self.amplitude_scale = if m > 0.0 { a_bar / m } else { 0.0 };
        self
    }

    /// Largest `|A(tau)|` over a fine grid of the active window.
    pub fn envelope_peak(&self) -> f64 {
        let n = 4000;
        (0..=n)
            .map(|i| self.envelope(self.t_active * i as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Uniformly or non-uniformly sampled real series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.len() != values.len() {
            return Err(invalid(
                "series",
                format!("{} times vs {} values", t.len(), values.len()),
            ));
        }
        if let Some(i) = t.windows(2).position(|w| w[1] <= w[0]) {
            return Err(invalid(
                "series",
                format!("times not increasing at {}", i + 1),
            ));
        }
        Ok(Self { t, values })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// The common step, or the first index where sampling is non-uniform.
    pub fn uniform_step(&self) -> Result<f64> {
        if self.t.len() < 2 {
            return Err(invalid("series", "need at least two samples"));
        }
        let dt = (self.t[self.t.len() - 1] - self.t[0]) / (self.t.len() - 1) as f64;
        for (i, w) in self.t.windows(2).enumerate() {
            if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0) {
                return Err(Error::NonUniformSampling { index: i + 1 });
            }
        }
        Ok(dt)
    }

    /// Trapezoid integral.
    pub fn integral(&self) -> f64 {
        self.t
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum()
    }

    pub fn abs_integral(&self) -> f64 {
        self.t
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].abs() + v[1].abs()))
            .sum()
    }
}

/// Samples `t_j = j * sample_dt` over the padded window, excluding the
/// closing endpoint so that the record length equals the window.
pub fn flux_pulse(params: &PulseParams) -> Result<TimeSeries> {
    params.validate()?;
    let n = (params.total_duration() / params.sample_dt).round() as usize;
    let t: Vec<f64> = (0..n).map(|j| j as f64 * params.sample_dt).collect();
    let values = t.iter().map(|&t| params.flux_at(t)).collect();
    TimeSeries::new(t, values)
}

/// `g(t) = g_curve(flux_idle + flux(t))`, in MHz.
pub fn coupling_series(model: &DeviceModel, flux: &TimeSeries) -> Result<TimeSeries> {
    let values = flux
        .t
        .iter()
        .zip(&flux.values)
        .enumerate()
        .map(|(index, (&t, &v))| {
            model
                .coupling(model.flux_idle + v)
                .map_err(|e| Error::DomainExcursion {
                    index,
                    t_ns: t,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(TimeSeries {
        t: flux.t.clone(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub freq_ghz: f64,
    /// One-sided magnitude under the unitary DFT; the squares sum to the
    /// sum of squared samples.
    pub magnitude: f64,
    /// Physical amplitude: a cosine of amplitude `a` on a bin yields `a`,
    /// independent of the sample count.
    pub amplitude: f64,
}

/// One-sided discrete Fourier spectrum of a uniformly sampled series.
pub fn spectrum(series: &TimeSeries) -> Result<Vec<SpectralLine>> {
    let dt = series.uniform_step()?;
    let n = series.len();
    let mut buf: Vec<Complex64> = series
        .values
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let nf = n as f64;
    let half = n / 2;
    Ok((0..=half)
        .map(|k| {
            let mag = buf[k].norm();
            // bins other than DC and Nyquist carry their mirror image
            let mirrored = k != 0 && !(n.is_multiple_of(2) && k == half);
            let fold: f64 = if mirrored { 2.0 } else { 1.0 };
            SpectralLine {
                freq_ghz: k as f64 / (nf * dt),
                magnitude: mag * fold.sqrt() / nf.sqrt(),
                amplitude: mag * fold / nf,
            }
        })
        .collect())
}

/// Largest line amplitude within `tol_ghz` of `freq_ghz`.
pub fn line_amplitude(lines: &[SpectralLine], freq_ghz: f64, tol_ghz: f64) -> f64 {
    lines
        .iter()
        .filter(|l| (l.freq_ghz - freq_ghz).abs() <= tol_ghz)
        .map(|l| l.amplitude)
        .fold(0.0, f64::max)
}

/// Fourier component of `series` at `freq_ghz` (time-integral, not
/// restricted to FFT bins).
fn fourier_component(t: &[f64], values: &[f64], freq_ghz: f64, dt: f64) -> Complex64 {
    t.iter()
        .zip(values)
        .map(|(&t, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * freq_ghz * t))
        .sum::<Complex64>()
        * dt
}

/// Harmonic content generated by the curvature of the coupling curve:
/// the component at `k * f_carrier` of `g(t) - g_idle - slope * flux(t)`,
/// relative to the component of `g(t) - g_idle` at `f_carrier`.
pub fn nonlinear_harmonic(model: &DeviceModel, params: &PulseParams, k: u32) -> Result<f64> {
    let flux = flux_pulse(params)?;
    let g = coupling_series(model, &flux)?;
    let dt = flux.uniform_step()?;
    let g_idle = model.coupling(model.flux_idle)?;
    let slope = model.idle_slope()?;
    let drive: Vec<f64> = g.values.iter().map(|v| v - g_idle).collect();
    let residual: Vec<f64> = drive
        .iter()
        .zip(&flux.values)
        .map(|(d, f)| d - slope * f)
        .collect();
    let fundamental = fourier_component(&g.t, &drive, params.f_carrier, dt).norm();
    if fundamental == 0.0 {
        return Err(invalid("pulse", "no drive at the carrier frequency"));
    }
    let f = k as f64 * params.f_carrier;
    Ok(fourier_component(&g.t, &residual, f, dt).norm() / fundamental)
}
