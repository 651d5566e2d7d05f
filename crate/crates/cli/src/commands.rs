// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use pcz_core::benchmark::{simulate_budget, BudgetReport, DecayDataset, DecayFits, GateSpec};
use pcz_core::circuit::DeviceModel;
use pcz_core::config::{linspace, BenchGate, BudgetInput, RunConfig};
use pcz_core::dynamics::{evolve, interaction_frame};
use pcz_core::metrics::{scan_both, GateMetrics};
use pcz_core::optimizer::{
    analytic_amplitude, delta_sweep, family_collisions, optimize_cz, Optimized,
};
use pcz_core::pulse::{coupling_series, flux_pulse, spectrum};

use crate::output::{csv, OutputDir};

fn model(cfg: &RunConfig) -> Result<DeviceModel> {
    cfg.device_model().context("building device model")
}

pub fn gcurve(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let m = model(cfg)?;
    let rows = m.tabulate(&cfg.gcurve.grid()?)?;
    let mut dir = OutputDir::create(out)?;
    dir.write(
        "gcurve.csv",
        &csv(&["phi", "g_mhz"], rows.iter().map(|&(p, g)| [p, g])),
    )?;
    #[derive(Serialize)]
    struct Device<'a> {
        spectral: &'a pcz_core::circuit::SpectralParams,
        flux_idle: f64,
        coupling_kind: &'a str,
    }
    dir.write_json(
        "device.json",
        &Device {
            spectral: &m.spectral,
            flux_idle: m.flux_idle,
            coupling_kind: m.curve().kind(),
        },
    )?;
    dir.commit()
}

pub fn pulse(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let m = model(cfg)?;
    let flux = flux_pulse(&cfg.pulse)?;
    let g = coupling_series(&m, &flux)?;
    let lines = spectrum(&g)?;
    let mut dir = OutputDir::create(out)?;
    dir.write(
        "flux.csv",
        &csv(
            &["t_ns", "flux"],
            flux.t.iter().zip(&flux.values).map(|(&t, &v)| [t, v]),
        ),
    )?;
    dir.write(
        "coupling.csv",
        &csv(
            &["t_ns", "g_mhz"],
            g.t.iter().zip(&g.values).map(|(&t, &v)| [t, v]),
        ),
    )?;
    dir.write(
        "spectrum.csv",
        &csv(
            &["freq_ghz", "magnitude", "amplitude"],
            lines.iter().map(|l| [l.freq_ghz, l.magnitude, l.amplitude]),
        ),
    )?;
    dir.write_json("pulse.json", &cfg.pulse)?;
    dir.commit()
}

pub fn scan(cfg: &RunConfig, out: &Path, swap: bool) -> Result<Vec<PathBuf>> {
    let m = model(cfg)?;
    let sc = &cfg.scan;
    let mut base = cfg.pulse.clone();
    base.t_active = sc.t_active;
    let amp_max = match sc.amp_max {
        Some(a) => a,
        None => 1.5 * analytic_amplitude(&m, &base)? * base.mean_abs_shape(),
    };
    let amps = linspace(sc.amp_min, amp_max, sc.amp_points);
    let dets = linspace(-sc.detune_span_mhz, sc.detune_span_mhz, sc.detune_points);
    let (swap_map, phase_map) = scan_both(&m, &base, &amps, &dets, cfg.include_shift)?;
    let (map, name) = if swap {
        (swap_map, "scan_swap.csv")
    } else {
        (phase_map, "scan_phase.csv")
    };
    // rows: carrier detuning; columns: average amplitude
    let mut text = String::from("detune_mhz");
    for a in &map.x {
        text.push_str(&format!(",{a}"));
    }
    text.push('\n');
    for (y, row) in map.y.iter().zip(&map.values) {
        text.push_str(&format!("{y}"));
        for v in row {
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
    }
    let mut dir = OutputDir::create(out)?;
    dir.write(name, &text)?;
    dir.commit()
}

fn run_optimizer(cfg: &RunConfig, m: &DeviceModel) -> Result<Optimized> {
    let mut oc = cfg.optimize.optimizer.clone();
    oc.seed = cfg.seed;
    oc.include_shift = cfg.include_shift;
    Ok(optimize_cz(m, cfg.optimize.t_active, &oc)?)
}

#[derive(Serialize)]
struct OptimizeReport<'a> {
    metrics: &'a GateMetrics,
    initial_cost: f64,
    best_cost: f64,
    evaluations: usize,
    iterations: usize,
    converged: bool,
    collisions: &'a [pcz_core::circuit::CollisionMargin],
}

pub fn optimize(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let m = model(cfg)?;
    let r = run_optimizer(cfg, &m)?;
    let u = interaction_frame(&evolve(&m, &r.pulse, cfg.include_shift)?, &m);
    let mut header = vec!["iter", "best_cost"];
    header.extend(r.trace.param_names.iter().map(String::as_str));
    let rows = r.trace.entries.iter().map(|e| {
        let mut row = vec![e.iter as f64, e.best_cost];
        row.extend(&e.params);
        row
    });
    let mut dir = OutputDir::create(out)?;
    dir.write_json("optimized_pulse.json", &r.pulse)?;
    dir.write("trace.csv", &csv(&header, rows))?;
    dir.write_json(
        "metrics.json",
        &OptimizeReport {
            metrics: &r.metrics,
            initial_cost: r.initial_cost,
            best_cost: r.best_cost,
            evaluations: r.trace.evaluations,
            iterations: r.trace.entries.len().saturating_sub(1),
            converged: r.trace.converged,
            collisions: &r.collisions,
        },
    )?;
    dir.write_json("unitary.json", &u.to_dump())?;
    dir.commit()
}

pub fn sweep_delta(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let m = model(cfg)?;
    let sw = &cfg.sweep;
    let mut oc = cfg.optimize.optimizer.clone();
    oc.seed = cfg.seed;
    oc.include_shift = cfg.include_shift;
    let points = delta_sweep(&m, &sw.deltas_mhz, sw.t_active, &oc)?;
    let lo = sw.deltas_mhz.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = sw
        .deltas_mhz
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let collisions = family_collisions(&m, sw.k_max, lo, hi);
    let mut dir = OutputDir::create(out)?;
    dir.write(
        "sweep.csv",
        &csv(
            &[
                "delta_mhz",
                "f_target_ghz",
                "coherent_error",
                "leakage",
                "swap_error",
                "control_phase",
                "min_margin_mhz",
            ],
            points.iter().map(|p| {
                [
                    p.delta_mhz,
                    p.f_target_ghz,
                    p.coherent_error,
                    p.metrics.leakage,
                    p.metrics.swap_error,
                    p.metrics.control_phase,
                    p.min_margin_mhz,
                ]
            }),
        ),
    )?;
    let mut text = String::from("delta_mhz,harmonic,transition\n");
    for (d, k, tr) in &collisions {
        text.push_str(&format!(
            "{d},{k},{}\n",
            serde_json::to_value(tr)?.as_str().unwrap_or("?")
        ));
    }
    dir.write("collisions.csv", &text)?;
    dir.commit()
}

#[derive(Serialize)]
struct Fits {
    q1: DecayFits,
    q2: DecayFits,
    cycle: DecayFits,
}

fn write_budget(dir: &mut OutputDir, report: &BudgetReport) -> Result<()> {
    dir.write_json("budget.json", report)?;
    dir.write("budget.txt", &report.to_table())
}

pub fn xeb(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let noise = cfg.noise_channel()?;
    let bench = &cfg.xeb;
    let mut xc = bench.xeb.clone();
    xc.seed = cfg.seed;
    let gate_u = match bench.gate {
        BenchGate::IdealCz => None,
        BenchGate::Optimized => {
            let m = model(cfg)?;
            let r = run_optimizer(cfg, &m)?;
            Some(interaction_frame(
                &evolve(&m, &r.pulse, cfg.include_shift)?,
                &m,
            ))
        }
    };
    let gate = match &gate_u {
        None => GateSpec::IdealCz,
        Some(u) => GateSpec::Simulated(u),
    };
    let (report, [q1, q2, cycle]) =
        simulate_budget(gate, noise.as_ref(), &xc, bench.t_single, bench.t_cz)?;
    let mut dir = OutputDir::create(out)?;
    dir.write("xeb_q1.csv", &q1.to_csv())?;
    dir.write("xeb_q2.csv", &q2.to_csv())?;
    dir.write("xeb_cycle.csv", &cycle.to_csv())?;
    dir.write_json(
        "fits.json",
        &Fits {
            q1: q1.fits()?,
            q2: q2.fits()?,
            cycle: cycle.fits()?,
        },
    )?;
    write_budget(&mut dir, &report)?;
    dir.commit()
}

pub fn budget(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let report = match &cfg.budget {
        None => bail!("the budget command needs a `budget` block in the config"),
        Some(BudgetInput::Decays {
            q1,
            q2,
            cycle,
            t_single,
            t_cz,
        }) => BudgetReport::from_decays(
            (q1[0], q1[1], q1[2]),
            (q2[0], q2[1], q2[2]),
            (cycle[0], cycle[1], cycle[2]),
            *t_single,
            *t_cz,
        )?,
        Some(BudgetInput::Datasets {
            q1_csv,
            q2_csv,
            cycle_csv,
            t_single,
            t_cz,
        }) => {
            let load = |p: &Path, n| -> Result<DecayDataset> {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading {}", p.display()))?;
                Ok(DecayDataset::from_csv(&text, n)?)
            };
            BudgetReport::from_decays(
                load(q1_csv, 1)?.decay_rates()?,
                load(q2_csv, 1)?.decay_rates()?,
                load(cycle_csv, 2)?.decay_rates()?,
                *t_single,
                *t_cz,
            )?
        }
    };
    let mut dir = OutputDir::create(out)?;
    write_budget(&mut dir, &report)?;
    dir.commit()
}
