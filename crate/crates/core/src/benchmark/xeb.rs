// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Random-circuit XEB/SPB simulation on one or two qutrits.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_decay_or_flat, leakage_error, BudgetReport, FitResult};
use super::noise::{level, CycleNoise, Qubit, Slot, LEVELS};
use crate::dynamics::{SubspaceUnitary, DIM, S00, S01, S02, S10, S11, S20};
use crate::error::{invalid, Result};
use crate::metrics::extract_metrics;

/// Two-qutrit register index of each six-level basis state.
const REGISTER_INDEX: [usize; DIM] = {
    let mut idx = [0; DIM];
    idx[S00] = 0;
    idx[S01] = 1;
    idx[S02] = 2;
    idx[S10] = 3;
    idx[S11] = 4;
    idx[S20] = 6;
    idx
};

#[derive(Debug, Clone, Copy)]
pub enum GateSpec<'a> {
    IdealCz,
    /// Interaction-frame propagator; its single-qubit phases are removed
    /// as virtual Z before use.
    Simulated(&'a SubspaceUnitary),
}

#[derive(Debug, Clone, Copy)]
pub enum XebTarget<'a> {
    /// Cycles of two single-qubit gates followed by the two-qubit gate.
    Pair(GateSpec<'a>),
    /// Cycles of one single-qubit gate on the named qubit.
    Single(Qubit),
}

impl XebTarget<'_> {
    fn qubits(&self) -> &'static [Qubit] {
        match self {
            XebTarget::Pair(_) => &[Qubit::Q1, Qubit::Q2],
            XebTarget::Single(Qubit::Q1) => &[Qubit::Q1],
            XebTarget::Single(Qubit::Q2) => &[Qubit::Q2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct XebConfig {
    pub depths: Vec<usize>,
    pub n_circuits: usize,
    pub seed: u64,
    /// Measurement shots per circuit; `None` uses exact probabilities.
    pub shots: Option<u64>,
}

impl Default for XebConfig {
    fn default() -> Self {
        Self {
            depths: vec![1, 2, 4, 8, 12, 16, 24, 32, 48, 64, 96],
            n_circuits: 50,
            seed: 0,
            shots: None,
        }
    }
}

impl XebConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depths.len() < 2 {
            return Err(invalid("depths", "need at least two depths"));
        }
        if self.n_circuits == 0 {
            return Err(invalid("n_circuits", "must be at least 1"));
        }
        if self.shots == Some(0) {
            return Err(invalid("shots", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayDataset {
    pub depths: Vec<usize>,
    pub alpha: Vec<f64>,
    pub sqrt_purity: Vec<f64>,
    pub leak_pop: Vec<f64>,
    pub n_circuits: usize,
    pub seed: u64,
    pub n_qubits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFits {
    pub xeb: FitResult,
    pub spb: FitResult,
    pub leak: FitResult,
}

impl DecayDataset {
    fn m(&self) -> Vec<f64> {
        self.depths.iter().map(|&d| d as f64).collect()
    }

    /// Fits all three series; a series that does not decay fits flat.
    pub fn fits(&self) -> Result<DecayFits> {
        let m = self.m();
        Ok(DecayFits {
            xeb: fit_decay_or_flat(&m, &self.alpha)?,
            spb: fit_decay_or_flat(&m, &self.sqrt_purity)?,
            leak: fit_decay_or_flat(&m, &self.leak_pop)?,
        })
    }

    /// `(p_xeb, p_spb, r_leak)` from the fitted series.
    pub fn decay_rates(&self) -> Result<(f64, f64, f64)> {
        let f = self.fits()?;
        Ok((f.xeb.p, f.spb.p, leakage_error(&f.leak, self.n_qubits)?))
    }

    /// Parses the output of [`DecayDataset::to_csv`].
    pub fn from_csv(text: &str, n_qubits: u32) -> Result<Self> {
        let mut ds = DecayDataset {
            depths: Vec::new(),
            alpha: Vec::new(),
            sqrt_purity: Vec::new(),
            leak_pop: Vec::new(),
            n_circuits: 0,
            seed: 0,
            n_qubits,
        };
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(invalid(
                    "csv",
                    format!("line {}: expected 4 columns", i + 1),
                ));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| invalid("csv", format!("line {}: {e}", i + 1)))
            };
            ds.depths.push(
                cols[0]
                    .parse()
                    .map_err(|e| invalid("csv", format!("line {}: {e}", i + 1)))?,
            );
            ds.alpha.push(num(cols[1])?);
            ds.sqrt_purity.push(num(cols[2])?);
            ds.leak_pop.push(num(cols[3])?);
        }
        if ds.depths.len() < 3 {
            return Err(invalid("csv", "need at least three depths"));
        }
        Ok(ds)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,alpha,sqrt_purity,leak_pop\n");
        for i in 0..self.depths.len() {
            s.push_str(&format!(
                "{},{},{},{}\n",
                self.depths[i], self.alpha[i], self.sqrt_purity[i], self.leak_pop[i]
            ));
        }
        s
    }
}

fn haar_su2(rng: &mut ChaCha8Rng) -> Matrix2<C> {
    let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let a = C::new(g[0], g[1]) / norm;
    let b = C::new(g[2], g[3]) / norm;
    Matrix2::new(a, -b.conj(), b, a.conj())
}

fn qutrit_embed(u: &Matrix2<C>) -> DMatrix<C> {
    let mut m = DMatrix::<C>::identity(LEVELS, LEVELS);
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = u[(r, c)];
        }
    }
    m
}

/// Nine-level gate with the virtual-Z and global phases removed.
fn register_gate(spec: GateSpec) -> Result<DMatrix<C>> {
    let mut g = DMatrix::<C>::identity(LEVELS * LEVELS, LEVELS * LEVELS);
    match spec {
        GateSpec::IdealCz => g[(4, 4)] = C::new(-1.0, 0.0),
        GateSpec::Simulated(u) => {
            let met = extract_metrics(u)?;
            let a0 = u.matrix[(S00, S00)].arg();
            let (z1, z2) = met.single_qubit_phases;
            // excitation numbers (n1, n2) of each six-level state
            let n = [
                (0.0, 0.0),
                (0.0, 1.0),
                (1.0, 0.0),
                (1.0, 1.0),
                (0.0, 2.0),
                (2.0, 0.0),
            ];
            for r in 0..DIM {
                let phase = C::from_polar(1.0, -(a0 + n[r].0 * z1 + n[r].1 * z2));
                for c in 0..DIM {
                    g[(REGISTER_INDEX[r], REGISTER_INDEX[c])] = phase * u.matrix[(r, c)];
                }
            }
        }
    }
    Ok(g)
}

fn ideal_cz() -> DMatrix<C> {
    let mut m = DMatrix::<C>::identity(4, 4);
    m[(3, 3)] = C::new(-1.0, 0.0);
    m
}

struct CircuitOutcome {
    p_noisy: Vec<f64>,
    p_ideal: Vec<f64>,
    /// Same circuit with the actual gate and no noise.
    p_reference: Vec<f64>,
    leak: f64,
}

fn sample_counts(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut left = shots;
    let mut mass = 1.0;
    let mut out = vec![0.0; probs.len()];
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        let k = if i + 1 == probs.len() || mass <= 0.0 {
            left
        } else {
            let q = (p / mass).clamp(0.0, 1.0);
            Binomial::new(left, q).map(|b| b.sample(rng)).unwrap_or(0)
        };
        out[i] = k as f64 / shots as f64;
        left -= k;
        mass -= p;
    }
    out
}

fn run_circuit(
    qubits: &[Qubit],
    gate: Option<&DMatrix<C>>,
    noise: &dyn CycleNoise,
    depth: usize,
    shots: Option<u64>,
    rng: &mut ChaCha8Rng,
) -> CircuitOutcome {
    let n = qubits.len();
    let dim = LEVELS.pow(n as u32);
    let d = 1usize << n;
    let mut rho = DMatrix::<C>::zeros(dim, dim);
    rho[(0, 0)] = C::new(1.0, 0.0);
    let mut psi = DVector::<C>::zeros(d);
    psi[0] = C::new(1.0, 0.0);
    let mut reference = DVector::<C>::zeros(dim);
    reference[0] = C::new(1.0, 0.0);
    let cz = ideal_cz();

    for _ in 0..depth {
        let us: Vec<Matrix2<C>> = (0..n).map(|_| haar_su2(rng)).collect();
        let (layer, ideal) = if n == 1 {
            (
                qutrit_embed(&us[0]),
                DMatrix::from_fn(2, 2, |r, c| us[0][(r, c)]),
            )
        } else {
            let a = DMatrix::from_fn(2, 2, |r, c| us[0][(r, c)]);
            let b = DMatrix::from_fn(2, 2, |r, c| us[1][(r, c)]);
            (
                qutrit_embed(&us[0]).kronecker(&qutrit_embed(&us[1])),
                a.kronecker(&b),
            )
        };
        rho = &layer * &rho * layer.adjoint();
        reference = &layer * &reference;
        psi = &ideal * &psi;
        noise.apply(&mut rho, qubits, Slot::Single);
        if let Some(g) = gate {
            rho = g * &rho * g.adjoint();
            reference = g * &reference;
            psi = &cz * &psi;
            noise.apply(&mut rho, qubits, Slot::Gate);
        }
        noise.apply(&mut rho, qubits, Slot::CycleEnd);
    }

    let mut probs: Vec<f64> = (0..dim).map(|i| rho[(i, i)].re.max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    if let Some(s) = shots {
        probs = sample_counts(&probs, s, rng);
    }
    let comp: Vec<usize> = (0..dim)
        .filter(|&i| (0..n).all(|p| level(i, n, p) < 2))
        .collect();
    let renormalized = |p: &[f64]| -> Vec<f64> {
        let mass: f64 = comp.iter().map(|&i| p[i]).sum();
        comp.iter()
            .map(|&i| {
                if mass > 0.0 {
                    p[i] / mass
                } else {
                    1.0 / d as f64
                }
            })
            .collect()
    };
    let leak = (0..dim)
        .filter(|i| !comp.contains(i))
        .map(|i| probs[i])
        .sum();
    let p_ref: Vec<f64> = reference.iter().map(|a| a.norm_sqr()).collect();
    CircuitOutcome {
        p_noisy: renormalized(&probs),
        p_ideal: psi.iter().map(|a| a.norm_sqr()).collect(),
        p_reference: renormalized(&p_ref),
        leak,
    }
}

fn circuit_rng(seed: u64, depth_index: usize, circuit: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((depth_index as u64) << 32) | circuit as u64);
    rng
}

/// `(alpha, sqrt_purity, mean leakage)` over a set of circuits. Purity
/// is the speckle variance relative to that of the noise-free circuits.
fn estimate(outcomes: &[CircuitOutcome]) -> (f64, f64, f64) {
    let d = outcomes[0].p_ideal.len() as f64;
    let var = |p: &[f64]| p.iter().map(|x| (x - 1.0 / d).powi(2)).sum::<f64>() / d;
    let (mut num, mut den, mut vn, mut vi, mut leak) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for o in outcomes {
        let cross: f64 = o.p_noisy.iter().zip(&o.p_ideal).map(|(a, b)| a * b).sum();
        let ideal: f64 = o.p_ideal.iter().map(|b| b * b).sum();
        num += d * cross - 1.0;
        den += d * ideal - 1.0;
        vn += var(&o.p_noisy);
        vi += var(&o.p_reference);
        leak += o.leak;
    }
    (
        num / den,
        (vn / vi).max(0.0).sqrt(),
        leak / outcomes.len() as f64,
    )
}

/// Simulates the random-circuit experiment at every configured depth.
pub fn xeb_simulate(
    target: XebTarget,
    noise: &dyn CycleNoise,
    config: &XebConfig,
) -> Result<DecayDataset> {
    config.validate()?;
    noise.validate()?;
    let gate = match target {
        XebTarget::Pair(spec) => Some(register_gate(spec)?),
        XebTarget::Single(_) => None,
    };
    let qubits = target.qubits();
    let jobs: Vec<(usize, usize)> = (0..config.depths.len())
        .flat_map(|i| (0..config.n_circuits).map(move |c| (i, c)))
        .collect();
    let outcomes: Vec<CircuitOutcome> = jobs
        .par_iter()
        .map(|&(i, c)| {
            let mut rng = circuit_rng(config.seed, i, c);
            run_circuit(
                qubits,
                gate.as_ref(),
                noise,
                config.depths[i],
                config.shots,
                &mut rng,
            )
        })
        .collect();

    let mut ds = DecayDataset {
        depths: config.depths.clone(),
        alpha: Vec::new(),
        sqrt_purity: Vec::new(),
        leak_pop: Vec::new(),
        n_circuits: config.n_circuits,
        seed: config.seed,
        n_qubits: qubits.len() as u32,
    };
    for chunk in outcomes.chunks(config.n_circuits) {
        let (a, s, l) = estimate(chunk);
        ds.alpha.push(a);
        ds.sqrt_purity.push(s);
        ds.leak_pop.push(l);
    }
    Ok(ds)
}

/// XEB sequence fidelity of the two-qubit cycle at a single depth.
pub fn ideal_gate_sequence_fidelity(
    gate: &SubspaceUnitary,
    noise: &dyn CycleNoise,
    depth: usize,
    circuits: usize,
    seed: u64,
) -> Result<f64> {
    if depth == 0 || circuits == 0 {
        return Err(invalid(
            "depth",
            "depth and circuit count must be at least 1",
        ));
    }
    noise.validate()?;
    let g = register_gate(GateSpec::Simulated(gate))?;
    let outcomes: Vec<CircuitOutcome> = (0..circuits)
        .into_par_iter()
        .map(|c| {
            let mut rng = circuit_rng(seed, 0, c);
            run_circuit(
                &[Qubit::Q1, Qubit::Q2],
                Some(&g),
                noise,
                depth,
                None,
                &mut rng,
            )
        })
        .collect();
    Ok(estimate(&outcomes).0)
}

/// Runs the Q1, Q2 and cycle experiments and assembles the budget table.
pub fn simulate_budget(
    gate: GateSpec,
    noise: &dyn CycleNoise,
    config: &XebConfig,
    t_single: f64,
    t_cz: f64,
) -> Result<(BudgetReport, [DecayDataset; 3])> {
    let q1 = xeb_simulate(XebTarget::Single(Qubit::Q1), noise, config)?;
    let q2 = xeb_simulate(XebTarget::Single(Qubit::Q2), noise, config)?;
    let cycle = xeb_simulate(XebTarget::Pair(gate), noise, config)?;
    let report = BudgetReport::from_decays(
        q1.decay_rates()?,
        q2.decay_rates()?,
        cycle.decay_rates()?,
        t_single,
        t_cz,
    )?;
    Ok((report, [q1, q2, cycle]))
}
