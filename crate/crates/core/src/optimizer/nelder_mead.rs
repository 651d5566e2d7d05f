// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub best_cost: f64,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexResult {
    /// Entry 0 is the initial simplex; one entry per iteration after that.
    pub trace: Vec<TraceEntry>,
    pub best: Vec<f64>,
    pub best_cost: f64,
    pub evaluations: usize,
    pub iterations: usize,
    /// Stopped on the cost-spread tolerance rather than the iteration cap.
    pub converged: bool,
}

fn eval<F>(cost: &F, x: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let c = cost(x)?;
    if c.is_nan() {
        return Err(Error::NanCost { params: x.to_vec() });
    }
    Ok(c)
}

/// Minimizes `cost` from the simplex spanned by `x0` and `x0 + steps[i] e_i`.
/// Stops when `f_worst - f_best < tolerance` or after `max_iters`
/// iterations.
pub fn nelder_mead<F>(
    cost: F,
    x0: &[f64],
    steps: &[f64],
    max_iters: usize,
    tolerance: f64,
) -> Result<SimplexResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = x0.len();
    if n == 0 {
        return Err(invalid("x0", "no free parameters"));
    }
    if steps.len() != n {
        return Err(invalid(
            "steps",
            format!("expected {n} displacements, got {}", steps.len()),
        ));
    }
    if let Some(s) = steps.iter().find(|s| !(s.is_finite() && **s != 0.0)) {
        return Err(invalid(
            "steps",
            format!("displacements must be non-zero, got {s}"),
        ));
    }
    if max_iters == 0 {
        return Err(invalid("max_iters", "must be at least 1"));
    }

    let mut simplex: Vec<Vec<f64>> = std::iter::once(x0.to_vec())
        .chain((0..n).map(|i| {
            let mut v = x0.to_vec();
            v[i] += steps[i];
            v
        }))
        .collect();
    let mut f: Vec<f64> = simplex
        .par_iter()
        .map(|x| eval(&cost, x))
        .collect::<Result<_>>()?;
    let mut evaluations = n + 1;
    let mut trace = Vec::with_capacity(max_iters + 1);
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        f = order.iter().map(|&i| f[i]).collect();
        trace.push(TraceEntry {
            iter: iterations,
            best_cost: f[0],
            params: simplex[0].clone(),
        });
        if f[n] - f[0] < tolerance {
            converged = true;
            break;
        }
        if iterations >= max_iters {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(REFLECT);
        let fr = eval(&cost, &xr)?;
        evaluations += 1;
        if fr < f[0] {
            let xe = along(REFLECT * EXPAND);
            let fe = eval(&cost, &xe)?;
            evaluations += 1;
            if fe < fr {
                simplex[n] = xe;
                f[n] = fe;
            } else {
                simplex[n] = xr;
                f[n] = fr;
            }
            continue;
        }
        if fr < f[n - 1] {
            simplex[n] = xr;
            f[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < f[n] {
            let xc = along(REFLECT * CONTRACT);
            let fc = eval(&cost, &xc)?;
            (xc, fc)
        } else {
            let xc = along(-CONTRACT);
            let fc = eval(&cost, &xc)?;
            (xc, fc)
        };
        evaluations += 1;
        if fc < f[n].min(fr) {
            simplex[n] = xc;
            f[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        let shrunk: Vec<Vec<f64>> = simplex[1..]
            .iter()
            .map(|v| {
                best.iter()
                    .zip(v)
                    .map(|(b, x)| b + SHRINK * (x - b))
                    .collect()
            })
            .collect();
        let fs: Vec<f64> = shrunk
            .par_iter()
            .map(|x| eval(&cost, x))
            .collect::<Result<_>>()?;
        evaluations += n;
        for (i, (x, c)) in shrunk.into_iter().zip(fs).enumerate() {
            simplex[i + 1] = x;
            f[i + 1] = c;
        }
    }

    Ok(SimplexResult {
        best: simplex[0].clone(),
        best_cost: f[0],
        trace,
        evaluations,
        iterations,
        converged,
    })
}
