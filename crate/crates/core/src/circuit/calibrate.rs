// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Least-squares calibration of the dispersive coupling curve to measured
//! `(flux, g)` anchor points (damped Gauss-Newton / Levenberg-Marquardt).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::coupling::{CouplingCurve, DispersiveCoupler};
use super::SpectralParams;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibParam {
    /// Direct coupling `g_qq`.
    GQq,
    /// Common multiplier on `g_qc1` and `g_qc2`.
    CouplingScale,
    FcMax,
    DCoupler,
}

#[derive(Debug, Clone)]
pub struct Calibration {
    pub params: SpectralParams,
    /// `g(phi_i) - g_i` per anchor (MHz).
    pub residuals_mhz: Vec<f64>,
    pub iterations: usize,
}

impl Calibration {
    pub fn max_residual(&self) -> f64 {
        self.residuals_mhz.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

#[derive(Debug, Clone)]
pub struct Calibrator {
    pub free: Vec<CalibParam>,
    pub max_iters: usize,
    /// Largest acceptable anchor residual (MHz).
    pub tolerance_mhz: f64,
}

impl Calibrator {
    /// Frees as many parameters as there are anchors, in the order
    /// `g_qq`, coupling scale, `fc_max`, `d`.
    pub fn for_anchor_count(n: usize) -> Self {
        let order = [
            CalibParam::GQq,
            CalibParam::CouplingScale,
            CalibParam::FcMax,
            CalibParam::DCoupler,
        ];
        Self {
            free: order[..n.clamp(1, 4)].to_vec(),
            max_iters: 500,
            tolerance_mhz: 1.0,
        }
    }

    pub fn fit(&self, anchors: &[(f64, f64)], initial: &SpectralParams) -> Result<Calibration> {
        if anchors.is_empty() {
            return Err(invalid("anchors", "need at least one (phi, g) anchor"));
        }
        if self.free.is_empty() {
            return Err(invalid("free", "no free parameters"));
        }
        initial.validate()?;
        let problem = Problem {
            anchors,
            initial,
            free: &self.free,
        };
        let mut x = problem.encode(initial);
        let mut r = problem
            .residuals(&x)
            .ok_or_else(|| invalid("initial", "initial parameters are degenerate at an anchor"))?;
        let mut cost = r.norm_squared();
        let mut mu = 1e-3;
        let mut iterations = 0;
        while iterations < self.max_iters && cost.sqrt() > 1e-11 {
            iterations += 1;
            let Some(jac) = problem.jacobian(&x) else {
                break;
            };
            let jtj = jac.transpose() * &jac;
            let jtr = jac.transpose() * &r;
            let mut improved = false;
            for _ in 0..30 {
                let mut a = jtj.clone();
                for i in 0..a.nrows() {
                    a[(i, i)] += mu * jtj[(i, i)].max(1e-12);
                }
                let Some(step) = a.lu().solve(&(-&jtr)) else {
                    mu *= 10.0;
                    continue;
                };
                let trial = &x + &step;
                if let Some(rt) = problem.residuals(&trial) {
                    let ct = rt.norm_squared();
                    if ct < cost {
                        let small_step = step.norm() < 1e-14 * (1.0 + x.norm());
                        x = trial;
                        r = rt;
                        cost = ct;
                        mu = (mu / 3.0).max(1e-12);
                        improved = !small_step;
                        break;
                    }
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        let params = problem.decode(&x);
        let residuals_mhz: Vec<f64> = r.iter().copied().collect();
        let cal = Calibration {
            params,
            residuals_mhz,
            iterations,
        };
        if cal.max_residual() > self.tolerance_mhz {
            return Err(Error::CalibrationFailed {
                residual_mhz: cal.max_residual(),
            });
        }
        Ok(cal)
    }
}

/// Fits the dispersive curve to `anchors` with the default free-parameter
/// selection for the anchor count.
pub fn calibrate_g_curve(
    anchors: &[(f64, f64)],
    initial: &SpectralParams,
) -> Result<SpectralParams> {
    Ok(Calibrator::for_anchor_count(anchors.len())
        .fit(anchors, initial)?
        .params)
}

struct Problem<'a> {
    anchors: &'a [(f64, f64)],
    initial: &'a SpectralParams,
    free: &'a [CalibParam],
}

impl Problem<'_> {
    // Positive quantities are fitted in log space and the asymmetry through
    // a logistic map so that every trial point is admissible.
    fn encode(&self, s: &SpectralParams) -> DVector<f64> {
        DVector::from_iterator(
            self.free.len(),
            self.free.iter().map(|p| match p {
                CalibParam::GQq => s.g_qq,
                CalibParam::CouplingScale => 0.0,
                CalibParam::FcMax => s.fc_max.ln(),
                CalibParam::DCoupler => {
                    let d = s.d_coupler.clamp(1e-6, 1.0 - 1e-6);
                    (d / (1.0 - d)).ln()
                }
            }),
        )
    }

    fn decode(&self, x: &DVector<f64>) -> SpectralParams {
        let mut s = self.initial.clone();
        for (p, &v) in self.free.iter().zip(x.iter()) {
            match p {
                CalibParam::GQq => s.g_qq = v,
                CalibParam::CouplingScale => {
                    s.g_qc1 = self.initial.g_qc1 * v.exp();
                    s.g_qc2 = self.initial.g_qc2 * v.exp();
                }
                CalibParam::FcMax => s.fc_max = v.exp(),
                CalibParam::DCoupler => s.d_coupler = 1.0 / (1.0 + (-v).exp()),
            }
        }
        s
    }

    fn residuals(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let s = self.decode(x);
        if !x.iter().all(|v| v.is_finite()) || s.validate().is_err() {
            return None;
        }
        let curve = DispersiveCoupler::new(s);
        let mut r = DVector::zeros(self.anchors.len());
        for (i, &(phi, g)) in self.anchors.iter().enumerate() {
            r[i] = curve.coupling(phi).ok()? - g;
        }
        Some(r)
    }

    fn jacobian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        let mut jac = DMatrix::zeros(self.anchors.len(), x.len());
        for j in 0..x.len() {
            let h = 1e-6 * (1.0 + x[j].abs());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let col = match (self.residuals(&xp), self.residuals(&xm)) {
                (Some(rp), Some(rm)) => (rp - rm) / (2.0 * h),
                (Some(rp), None) => (rp - self.residuals(x)?) / h,
                (None, Some(rm)) => (self.residuals(x)? - rm) / h,
                (None, None) => return None,
            };
            jac.set_column(j, &col);
        }
        Some(jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::effective_coupling;

    fn truth() -> SpectralParams {
        SpectralParams {
            f01_q1: 4.770,
            f01_q2: 4.839,
            eta_q1: -0.232,
            eta_q2: -0.230,
            fc_max: 11.6,
            d_coupler: 0.336,
            g_qq: 28.0,
            g_qc1: 280.0,
            g_qc2: 290.0,
        }
    }

    #[test]
    fn recovers_self_generated_anchors() {
        let t = truth();
        let anchors: Vec<(f64, f64)> = [0.0, 0.5, -0.35]
            .iter()
            .map(|&phi| (phi, effective_coupling(&t, phi).unwrap()))
            .collect();
        let cal = Calibrator::for_anchor_count(3)
            .fit(&anchors, &SpectralParams::reference_uncalibrated())
            .unwrap();
        assert!(cal.max_residual() < 1e-2, "{:?}", cal.residuals_mhz);
        for &(phi, g) in &anchors {
            assert!((effective_coupling(&cal.params, phi).unwrap() - g).abs() < 1e-2);
        }
    }

    #[test]
    fn single_anchor_sets_direct_coupling() {
        let mut s = SpectralParams::reference_uncalibrated();
        s.g_qc1 = 0.0;
        s.g_qc2 = 0.0;
        let fitted = calibrate_g_curve(&[(0.2, 7.25)], &s).unwrap();
        assert!((fitted.g_qq - 7.25).abs() < 1e-9);
    }

    #[test]
    fn reference_anchors_fit_below_one_mhz() {
        let anchors = [(0.0, 11.0), (0.5, -22.0), (-0.35, 0.0)];
        let cal = Calibrator::for_anchor_count(3)
            .fit(&anchors, &SpectralParams::reference_uncalibrated())
            .unwrap();
        assert!(cal.max_residual() < 1.0);
        assert!(cal.params.fc_min() > cal.params.f01_q2);
    }

    #[test]
    fn unreachable_anchors_report_residual() {
        // direct coupling only: a flux-dependent target cannot be met
        let mut s = SpectralParams::reference_uncalibrated();
        s.g_qc1 = 0.0;
        s.g_qc2 = 0.0;
        let cal = Calibrator {
            free: vec![CalibParam::GQq],
            max_iters: 50,
            tolerance_mhz: 1.0,
        };
        match cal.fit(&[(0.0, 10.0), (0.5, -10.0)], &s) {
            Err(Error::CalibrationFailed { residual_mhz }) => {
                assert!((residual_mhz - 10.0).abs() < 1e-6)
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
