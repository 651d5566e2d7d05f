// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! `y = A p^m + B` decay fits and the Pauli-error budget algebra.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative spread below which a series counts as flat.
const FLAT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a: f64,
    pub p: f64,
    pub b: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

impl FitResult {
    pub fn eval(&self, m: f64) -> f64 {
        self.a * self.p.powf(m) + self.b
    }

    /// Fit of a series that does not decay: `A = 0`, `p = 1`, `B = mean`.
    pub fn flat(y: &[f64]) -> Self {
        let mean = y.iter().sum::<f64>() / y.len().max(1) as f64;
        let residual =
            (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len().max(1) as f64).sqrt();
        Self {
            a: 0.0,
            p: 1.0,
            b: mean,
            residual,
        }
    }
}

/// Best `(A, B)` and sum of squared residuals at fixed `p`.
fn linear_part(m: &[f64], y: &[f64], p: f64) -> (f64, f64, f64) {
    let n = m.len() as f64;
    let x: Vec<f64> = m.iter().map(|&mi| p.powf(mi)).collect();
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let (a, b) = if det.abs() <= 1e-14 * (n * sxx).max(1e-300) {
        (0.0, sy / n)
    } else {
        let a = (n * sxy - sx * sy) / det;
        (a, (sy - a * sx) / n)
    };
    let ssr = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (a * xi + b - yi).powi(2))
        .sum();
    (a, b, ssr)
}

/// Least-squares fit of `y = A p^m + B` with `0 < p <= 1`, by a grid over
/// `p` followed by golden-section refinement (A, B solved linearly).
pub fn fit_decay(m: &[f64], y: &[f64]) -> Result<FitResult> {
    if m.len() != y.len() {
        return Err(invalid(
            "fit",
            format!("{} depths vs {} values", m.len(), y.len()),
        ));
    }
    if m.len() < 3 {
        return Err(invalid("fit", "need at least three points"));
    }
    if m.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(invalid("fit", "non-finite input"));
    }
    let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= FLAT_TOLERANCE * hi.abs().max(1.0) {
        return Err(Error::DegenerateFit("values are constant".into()));
    }
    let m_max = m.iter().cloned().fold(0.0, f64::max).max(1.0);
    // grid in the decay per point, p = exp(-s / m_max), s in (0, 60]
    let ssr = |p: f64| linear_part(m, y, p).2;
    let grid = 3000;
    let to_p = |u: f64| (-60.0 * u.powi(3) / m_max).exp();
    let mut best_u = 1.0;
    let mut best = f64::INFINITY;
    for i in 1..=grid {
        let u = i as f64 / grid as f64;
        let s = ssr(to_p(u));
        if s < best {
            best = s;
            best_u = u;
        }
    }
    let h = 1.0 / grid as f64;
    let (mut a, mut b) = ((best_u - h).max(0.0), (best_u + h).min(1.0));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (ssr(to_p(c)), ssr(to_p(d)));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = ssr(to_p(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = ssr(to_p(d));
        }
    }
    let u = 0.5 * (a + b);
    let mut p = to_p(u);
    let mut s = ssr(p);
    if best < s {
        p = to_p(best_u);
        s = best;
    }
    let (amp, off, _) = linear_part(m, y, p);
    if p == 1.0 || amp == 0.0 {
        return Err(Error::DegenerateFit("no decay component".into()));
    }
    Ok(FitResult {
        a: amp,
        p,
        b: off,
        residual: (s / m.len() as f64).sqrt(),
    })
}

/// [`fit_decay`] that maps a flat series to [`FitResult::flat`].
pub fn fit_decay_or_flat(m: &[f64], y: &[f64]) -> Result<FitResult> {
    match fit_decay(m, y) {
        Err(Error::DegenerateFit(_)) if m.len() == y.len() && m.len() >= 3 => {
            Ok(FitResult::flat(y))
        }
        other => other,
    }
}

fn check_qubits(n: u32) -> Result<()> {
    if n == 1 || n == 2 {
        Ok(())
    } else {
        Err(invalid("n_qubits", format!("must be 1 or 2, got {n}")))
    }
}

/// `(4^N - 1) / 4^N`.
fn pauli_factor(n: u32) -> f64 {
    let d2 = 4f64.powi(n as i32);
    (d2 - 1.0) / d2
}

/// Pauli error per cycle, `r = (1 - p)(4^N - 1)/4^N`.
pub fn pauli_error(p: f64, n_qubits: u32) -> Result<f64> {
    check_qubits(n_qubits)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p", format!("must lie in (0, 1], got {p}")));
    }
    Ok((1.0 - p) * pauli_factor(n_qubits))
}

/// `r_leak = -A (1 - p_leak)(4^N - 1)/4^N`.
pub fn leakage_error(fit: &FitResult, n_qubits: u32) -> Result<f64> {
    check_qubits(n_qubits)?;
    Ok(-fit.a * (1.0 - fit.p) * pauli_factor(n_qubits) + 0.0)
}

/// Two-qubit gate error from a cycle error with the single-qubit errors
/// divided out: `1 - (1 - r_cycle)/((1 - r_q1)(1 - r_q2))`.
pub fn extract_gate_error(cycle: f64, q1: f64, q2: f64) -> Result<f64> {
    for (name, r) in [("cycle", cycle), ("q1", q1), ("q2", q2)] {
        if !(r < 1.0) || !r.is_finite() {
            return Err(invalid(
                name,
                format!("error rate must be below 1, got {r}"),
            ));
        }
    }
    Ok(1.0 - (1.0 - cycle) / ((1.0 - q1) * (1.0 - q2)))
}

/// `F = 1 - r 2^N / (2^N + 1)`.
pub fn gate_fidelity(r_p: f64, n_qubits: u32) -> Result<f64> {
    check_qubits(n_qubits)?;
    if !(r_p < 1.0) || !r_p.is_finite() {
        return Err(invalid("r_p", format!("must be below 1, got {r_p}")));
    }
    let d = 2f64.powi(n_qubits as i32);
    Ok(1.0 - r_p * d / (d + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub r_p_xeb: f64,
    pub r_p_spb: f64,
    pub r_leak: f64,
    pub r_p_dec: f64,
    pub r_p_ctrl: f64,
    pub fidelity: f64,
    pub n_qubits: u32,
}

impl ErrorBudget {
    /// Builds the row from the three primary rates; `dec` and `ctrl` are
    /// defined by subtraction.
    pub fn from_rates(r_p_xeb: f64, r_p_spb: f64, r_leak: f64, n_qubits: u32) -> Result<Self> {
        Ok(Self {
            r_p_xeb,
            r_p_spb,
            r_leak,
            r_p_dec: r_p_spb - r_leak,
            r_p_ctrl: r_p_xeb - r_p_spb,
            fidelity: gate_fidelity(r_p_xeb, n_qubits)?,
            n_qubits,
        })
    }
}

/// Budget row from XEB, SPB and (optionally) leakage decay fits.
pub fn build_budget(
    xeb: &FitResult,
    spb: &FitResult,
    leak: Option<&FitResult>,
    n_qubits: u32,
) -> Result<ErrorBudget> {
    let r_leak = match leak {
        Some(f) => leakage_error(f, n_qubits)?,
        None => 0.0,
    };
    let budget = ErrorBudget::from_rates(
        pauli_error(xeb.p, n_qubits)?,
        pauli_error(spb.p, n_qubits)?,
        r_leak,
        n_qubits,
    )?;
    for (name, r) in [
        ("r_p_xeb", budget.r_p_xeb),
        ("r_p_spb", budget.r_p_spb),
        ("r_leak", budget.r_leak),
        ("r_p_dec", budget.r_p_dec),
        ("r_p_ctrl", budget.r_p_ctrl),
    ] {
        if r < -1e-6 {
            log::warn!("{name} = {r:.3e} is negative beyond fit noise");
        }
    }
    Ok(budget)
}

/// Two-qubit gate row from the cycle row and the two single-qubit rows.
pub fn gate_budget(cycle: &ErrorBudget, q1: &ErrorBudget, q2: &ErrorBudget) -> Result<ErrorBudget> {
    ErrorBudget::from_rates(
        extract_gate_error(cycle.r_p_xeb, q1.r_p_xeb, q2.r_p_xeb)?,
        extract_gate_error(cycle.r_p_spb, q1.r_p_spb, q2.r_p_spb)?,
        cycle.r_leak - q1.r_leak - q2.r_leak,
        cycle.n_qubits,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub gate: String,
    pub duration_ns: f64,
    pub p_xeb: Option<f64>,
    pub p_spb: Option<f64>,
    pub budget: ErrorBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub rows: Vec<BudgetRow>,
}

impl BudgetReport {
    /// Q1, Q2 and cycle rows from their decay constants and leakage
    /// rates, plus the extracted two-qubit gate row.
    pub fn from_decays(
        q1: (f64, f64, f64),
        q2: (f64, f64, f64),
        cycle: (f64, f64, f64),
        t_single: f64,
        t_cz: f64,
    ) -> Result<Self> {
        let row = |name: &str, t: f64, (px, ps, leak): (f64, f64, f64), n| -> Result<BudgetRow> {
            Ok(BudgetRow {
                gate: name.to_string(),
                duration_ns: t,
                p_xeb: Some(px),
                p_spb: Some(ps),
                budget: ErrorBudget::from_rates(pauli_error(px, n)?, pauli_error(ps, n)?, leak, n)?,
            })
        };
        let r1 = row("Q1", t_single, q1, 1)?;
        let r2 = row("Q2", t_single, q2, 1)?;
        let rc = row("cycle-CZ", t_single + t_cz, cycle, 2)?;
        let cz = BudgetRow {
            gate: "CZ".into(),
            duration_ns: t_cz,
            p_xeb: None,
            p_spb: None,
            budget: gate_budget(&rc.budget, &r1.budget, &r2.budget)?,
        };
        Ok(Self {
            rows: vec![r1, r2, rc, cz],
        })
    }

    /// Aligned text table in percent.
    pub fn to_table(&self) -> String {
        let pct = |v: f64| format!("{:.3}%", 100.0 * v);
        let opt = |v: Option<f64>| v.map(pct).unwrap_or_else(|| "-".into());
        let header = [
            "gate", "T (ns)", "p_xeb", "r_p,xeb", "p_spb", "r_p,spb", "r_leak", "r_p,dec",
            "r_p,ctrl", "fidelity",
        ];
        let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            let b = &r.budget;
            cells.push(vec![
                r.gate.clone(),
                format!("{}", r.duration_ns),
                opt(r.p_xeb),
                pct(b.r_p_xeb),
                opt(r.p_spb),
                pct(b.r_p_spb),
                pct(b.r_leak),
                pct(b.r_p_dec),
                pct(b.r_p_ctrl),
                pct(b.fidelity),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for r in &cells {
            let line: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}
