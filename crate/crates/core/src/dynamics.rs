// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Six-level propagator of the two-transmon interaction subspace under a
//! time-dependent coupling.
//!
//! Basis order is `|00>, |01>, |10>, |11>, |02>, |20>` (first digit Q1). The
//! coupling only connects states with equal excitation number, so the
//! propagator is block diagonal with blocks `{|00>}`, `{|01>,|10>}` and
//! `{|11>,|02>,|20>}`; the integrator works on those blocks directly.
//!
//! Integration runs in the frame rotating at the idle diagonal frequencies
//! with fixed-step RK4, doubling the step count until two successive
//! refinements agree entrywise to [`STEP_TOLERANCE`].

use std::f64::consts::{PI, SQRT_2};

use nalgebra::SMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::DeviceModel;
use crate::error::{Error, Result};
use crate::pulse::PulseParams;

pub type Mat6 = SMatrix<Complex64, 6, 6>;

pub const DIM: usize = 6;
pub const S00: usize = 0;
pub const S01: usize = 1;
pub const S10: usize = 2;
pub const S11: usize = 3;
pub const S02: usize = 4;
pub const S20: usize = 5;
pub const COMPUTATIONAL: [usize; 4] = [S00, S01, S10, S11];
pub const BASIS_LABELS: [&str; DIM] = ["00", "01", "10", "11", "02", "20"];

/// Largest entrywise change accepted between step counts `n` and `2n`.
pub const STEP_TOLERANCE: f64 = 1e-7;
/// Target phase advance per step at the fastest frame frequency.
const PHASE_PER_STEP: f64 = 0.25;
const MAX_STEPS: usize = 1 << 23;

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Propagator over the six-state subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceUnitary {
    pub matrix: Mat6,
    /// Evolution time (ns).
    pub t_total: f64,
}

impl SubspaceUnitary {
    pub fn identity(t_total: f64) -> Self {
        Self {
            matrix: Mat6::identity(),
            t_total,
        }
    }

    /// `max |U^dag U - I|` over entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.matrix.adjoint() * self.matrix - Mat6::identity();
        p.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Transition probability `|<row|U|col>|^2`.
    pub fn population(&self, row: usize, col: usize) -> f64 {
        self.matrix[(row, col)].norm_sqr()
    }

    pub fn apply(&self, psi: &[C; DIM]) -> [C; DIM] {
        let mut out = [ZERO; DIM];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..DIM).map(|c| self.matrix[(r, c)] * psi[c]).sum();
        }
        out
    }

    pub fn to_dump(&self) -> UnitaryDump {
        UnitaryDump {
            t_total: self.t_total,
            basis: BASIS_LABELS.iter().map(|s| s.to_string()).collect(),
            matrix: (0..DIM)
                .map(|r| {
                    (0..DIM)
                        .map(|c| {
                            let z = self.matrix[(r, c)];
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_dump(d: &UnitaryDump) -> Result<Self> {
        if d.matrix.len() != DIM || d.matrix.iter().any(|r| r.len() != DIM) {
            return Err(Error::Config("unitary dump must be 6x6".into()));
        }
        let matrix = Mat6::from_fn(|r, c| C::new(d.matrix[r][c][0], d.matrix[r][c][1]));
        Ok(Self {
            matrix,
            t_total: d.t_total,
        })
    }
}

/// Serialized propagator: row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryDump {
    pub t_total: f64,
    pub basis: Vec<String>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// Diagonal frequencies `f00, f01, f10, f11, f02, f20` (GHz) at coupler flux
/// `phi`. With `include_shift` each qubit frequency moves by its dispersive
/// shift relative to idle, and the higher levels by the matching multiple.
pub fn diag_frequencies(model: &DeviceModel, phi: f64, include_shift: bool) -> [f64; DIM] {
    let s = &model.spectral;
    let [d1, d2] = if include_shift {
        model
            .shift_from_idle(phi)
            .map(|[a, b]| [a * 1e-3, b * 1e-3])
            .unwrap_or([0.0, 0.0])
    } else {
        [0.0, 0.0]
    };
    let f10 = s.f01_q1 + d1;
    let f01 = s.f01_q2 + d2;
    [
        0.0,
        f01,
        f10,
        f10 + f01,
        2.0 * f01 + s.eta_q2,
        2.0 * f10 + s.eta_q1,
    ]
}

/// Propagator in the lab frame for the padded pulse.
pub fn evolve(
    model: &DeviceModel,
    pulse: &PulseParams,
    include_shift: bool,
) -> Result<SubspaceUnitary> {
    let sys = System::new(model, pulse, include_shift)?;
    let (n, u) = sys.converged()?;
    log::trace!("evolve converged with {n} steps");
    Ok(lab_frame(
        &SubspaceUnitary {
            matrix: u.to_matrix(),
            t_total: sys.t_total,
        },
        model,
    ))
}

/// Converged propagator together with lab-frame snapshots at `n_points`
/// evenly spaced interior times.
pub fn evolve_trajectory(
    model: &DeviceModel,
    pulse: &PulseParams,
    include_shift: bool,
    n_points: usize,
) -> Result<(SubspaceUnitary, Vec<SubspaceUnitary>)> {
    let sys = System::new(model, pulse, include_shift)?;
    let (n, u) = sys.converged()?;
    let marks: Vec<usize> = (1..=n_points).map(|i| i * n / (n_points + 1)).collect();
    let (_, snaps) = sys.integrate(n, &marks)?;
    let h = sys.t_total / n as f64;
    let snaps = snaps
        .into_iter()
        .zip(&marks)
        .map(|(b, &k)| {
            lab_frame(
                &SubspaceUnitary {
                    matrix: b.to_matrix(),
                    t_total: k as f64 * h,
                },
                model,
            )
        })
        .collect();
    let fin = lab_frame(
        &SubspaceUnitary {
            matrix: u.to_matrix(),
            t_total: sys.t_total,
        },
        model,
    );
    Ok((fin, snaps))
}

fn frame_phases(model: &DeviceModel, t: f64, sign: f64) -> [C; DIM] {
    let f = diag_frequencies(model, model.flux_idle, false);
    f.map(|fk| C::from_polar(1.0, sign * 2.0 * PI * fk * t))
}

/// Removes the idle-frequency phases `exp(-i 2 pi f_k t)` of the lab frame.
pub fn interaction_frame(u: &SubspaceUnitary, model: &DeviceModel) -> SubspaceUnitary {
    let ph = frame_phases(model, u.t_total, 1.0);
    SubspaceUnitary {
        matrix: Mat6::from_fn(|r, c| ph[r] * u.matrix[(r, c)]),
        t_total: u.t_total,
    }
}

/// Inverse of [`interaction_frame`].
pub fn lab_frame(u: &SubspaceUnitary, model: &DeviceModel) -> SubspaceUnitary {
    let ph = frame_phases(model, u.t_total, -1.0);
    SubspaceUnitary {
        matrix: Mat6::from_fn(|r, c| ph[r] * u.matrix[(r, c)]),
        t_total: u.t_total,
    }
}

/// Block-diagonal propagator: `{|00>}`, `{|01>,|10>}`, `{|11>,|02>,|20>}`.
#[derive(Debug, Clone, Copy)]
struct Blocks {
    a: C,
    b: [[C; 2]; 2],
    c: [[C; 3]; 3],
}

impl Blocks {
    fn identity() -> Self {
        Self {
            a: ONE,
            b: [[ONE, ZERO], [ZERO, ONE]],
            c: [[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]],
        }
    }

    fn axpy(&self, h: f64, k: &Blocks) -> Blocks {
        let mut out = *self;
        out.a += k.a * h;
        for r in 0..2 {
            for c in 0..2 {
                out.b[r][c] += k.b[r][c] * h;
            }
        }
        for r in 0..3 {
            for c in 0..3 {
                out.c[r][c] += k.c[r][c] * h;
            }
        }
        out
    }

    fn max_diff(&self, o: &Blocks) -> f64 {
        let mut m = (self.a - o.a).norm();
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((self.b[r][c] - o.b[r][c]).norm());
            }
        }
        for r in 0..3 {
            for c in 0..3 {
                m = m.max((self.c[r][c] - o.c[r][c]).norm());
            }
        }
        m
    }

    fn to_matrix(self) -> Mat6 {
        let mut m = Mat6::zeros();
        m[(S00, S00)] = self.a;
        let ib = [S01, S10];
        let ic = [S11, S02, S20];
        for r in 0..2 {
            for c in 0..2 {
                m[(ib[r], ib[c])] = self.b[r][c];
            }
        }
        for r in 0..3 {
            for c in 0..3 {
                m[(ic[r], ic[c])] = self.c[r][c];
            }
        }
        m
    }
}

/// Interaction-frame Hamiltonian at one instant, times `-i 2 pi`.
#[derive(Clone, Copy)]
struct Generator {
    a: C,
    b: [[C; 2]; 2],
    c: [[C; 3]; 3],
}

impl Generator {
    fn apply(&self, u: &Blocks) -> Blocks {
        let mut out = Blocks {
            a: self.a * u.a,
            b: [[ZERO; 2]; 2],
            c: [[ZERO; 3]; 3],
        };
        for r in 0..2 {
            for c in 0..2 {
                out.b[r][c] = self.b[r][0] * u.b[0][c] + self.b[r][1] * u.b[1][c];
            }
        }
        for r in 0..3 {
            for c in 0..3 {
                out.c[r][c] =
                    self.c[r][0] * u.c[0][c] + self.c[r][1] * u.c[1][c] + self.c[r][2] * u.c[2][c];
            }
        }
        out
    }
}

struct System<'a> {
    model: &'a DeviceModel,
    pulse: &'a PulseParams,
    include_shift: bool,
    f: [f64; DIM],
    t_total: f64,
    initial_steps: usize,
}

impl<'a> System<'a> {
    fn new(model: &'a DeviceModel, pulse: &'a PulseParams, include_shift: bool) -> Result<Self> {
        pulse.validate()?;
        let f = diag_frequencies(model, model.flux_idle, false);
        let t_total = pulse.total_duration();
        let transitions = [f[S10] - f[S01], f[S11] - f[S02], f[S11] - f[S20]];
        let fastest = transitions.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let omega = 2.0 * PI * (fastest + 6.0 * pulse.f_carrier.abs()).max(0.05);
        let initial_steps = ((t_total * omega / PHASE_PER_STEP).ceil() as usize).max(64);
        Ok(Self {
            model,
            pulse,
            include_shift,
            f,
            t_total,
            initial_steps,
        })
    }

    fn generator(&self, t: f64, step: usize) -> Result<Generator> {
        let phi = self.model.flux_idle + self.pulse.flux_at(t);
        let g = self
            .model
            .coupling(phi)
            .map_err(|e| Error::DomainExcursion {
                index: step,
                t_ns: t,
                source: Box::new(e),
            })?
            * 1e-3;
        let [d1, d2] = if self.include_shift {
            self.model
                .shift_from_idle(phi)
                .map(|[a, b]| [a * 1e-3, b * 1e-3])
                .unwrap_or([0.0, 0.0])
        } else {
            [0.0, 0.0]
        };
        let f = &self.f;
        let w = -2.0 * PI;
        // -i 2 pi H: diagonal -> -i 2 pi d, off-diagonal -> -i 2 pi x
        let mi = |x: C| C::new(x.im, -x.re) * (-w);
        let rot = |df: f64| C::from_polar(1.0, 2.0 * PI * df * t);
        let x01 = rot(f[S01] - f[S10]) * g;
        let x02 = rot(f[S11] - f[S02]) * (SQRT_2 * g);
        let x20 = rot(f[S11] - f[S20]) * (SQRT_2 * g);
        let d = |v: f64| mi(C::new(v, 0.0));
        Ok(Generator {
            a: ZERO,
            b: [[d(d2), mi(x01)], [mi(x01.conj()), d(d1)]],
            c: [
                [d(d1 + d2), mi(x02), mi(x20)],
                [mi(x02.conj()), d(2.0 * d2), ZERO],
                [mi(x20.conj()), ZERO, d(2.0 * d1)],
            ],
        })
    }

    /// RK4 with `n` steps; returns the final blocks and snapshots after the
    /// step counts listed in `marks`.
    fn integrate(&self, n: usize, marks: &[usize]) -> Result<(Blocks, Vec<Blocks>)> {
        let h = self.t_total / n as f64;
        let mut u = Blocks::identity();
        let mut snaps = Vec::with_capacity(marks.len());
        let mut next_mark = marks.iter().peekable();
        let mut g0 = self.generator(0.0, 0)?;
        for k in 0..n {
            let t = k as f64 * h;
            let gm = self.generator(t + 0.5 * h, k)?;
            let g1 = self.generator(t + h, k + 1)?;
            let k1 = g0.apply(&u);
            let k2 = gm.apply(&u.axpy(0.5 * h, &k1));
            let k3 = gm.apply(&u.axpy(0.5 * h, &k2));
            let k4 = g1.apply(&u.axpy(h, &k3));
            u = u
                .axpy(h / 6.0, &k1)
                .axpy(h / 3.0, &k2)
                .axpy(h / 3.0, &k3)
                .axpy(h / 6.0, &k4);
            g0 = g1;
            while next_mark.peek().is_some_and(|&&m| m == k + 1) {
                snaps.push(u);
                next_mark.next();
            }
        }
        Ok((u, snaps))
    }

    fn converged(&self) -> Result<(usize, Blocks)> {
        let mut n = self.initial_steps;
        let (mut coarse, _) = self.integrate(n, &[])?;
        let mut delta = f64::INFINITY;
        while 2 * n <= MAX_STEPS {
            let (fine, _) = self.integrate(2 * n, &[])?;
            delta = coarse.max_diff(&fine);
            n *= 2;
            if delta < STEP_TOLERANCE {
                return Ok((n, fine));
            }
            coarse = fine;
        }
        Err(Error::StepConvergence { delta, steps: n })
    }
}
