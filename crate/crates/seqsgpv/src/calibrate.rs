//! Searching monitoring frequencies for a target Type I error.
//!
//! `find_min_wait` walks an ascending wait-time grid and reports the
//! smallest entry whose estimated Type I error at the judged cap is at or
//! below the target. Estimated alpha is Monte Carlo noisy and not promised
//! to be monotone in the wait, so the search is a full grid evaluation, all
//! cells are reported, and cells where alpha rises against the trend by
//! more than three joint standard errors are flagged as diagnostics.
//!
//! `sweep_frequencies` crosses wait/step/affirmation/cap grids and reports
//! Type I error, power at a reference effect, and average sample sizes per
//! cell. Every cell replays the same replicate streams, so cells differ
//! only by their monitoring frequencies, never by luck of the draw.

use crate::designs::DesignSpec;
use crate::engine::{MonitoringPlan, OutcomeModel, SampleCap};
use crate::error::{Error, Result};
use crate::oc::{simulate_oc, t1e_trajectory, OcConfig, Rate, TrajectoryConfig};

#[derive(Debug, Clone)]
pub struct CalibrationConfig {
    pub design: DesignSpec,
    /// Template plan: step, affirmation, mode, level, and family are used
    /// as-is; the wait is replaced by each grid entry. A finite cap is the
    /// sample size the Type I error is judged at; an unrestricted cap
    /// judges at the simulation ceiling.
    pub plan: MonitoringPlan,
    pub model: OutcomeModel,
    pub alpha_target: f64,
    pub w_grid: Vec<u32>,
    pub replicates: u32,
    pub master_seed: u64,
    pub workers: usize,
    pub ceiling: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCell {
    pub wait: u32,
    /// Sample size the estimate was analyzed at (last look at or before the
    /// judged cap).
    pub analyzed_n: u32,
    pub t1e: f64,
    pub se: f64,
    pub avg_n: f64,
    /// Estimated alpha rose versus the previous cell by more than three
    /// joint standard errors; diagnostic, not an error.
    pub non_monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub alpha_target: f64,
    pub attainable: bool,
    /// Smallest qualifying wait, when any.
    pub chosen: Option<CalibrationCell>,
    pub cells: Vec<CalibrationCell>,
}

fn flag_non_monotone(cells: &mut [CalibrationCell]) {
    for i in 1..cells.len() {
        let prev = &cells[i - 1];
        let cur = &cells[i];
        if prev.t1e.is_nan() || cur.t1e.is_nan() {
            continue;
        }
        let joint_se = (prev.se * prev.se + cur.se * cur.se).sqrt();
        if cur.t1e > prev.t1e + 3.0 * joint_se {
            cells[i].non_monotone = true;
        }
    }
}

/// Smallest wait in the grid whose Type I error meets the target.
pub fn find_min_wait(cfg: &CalibrationConfig) -> Result<CalibrationReport> {
    if !(cfg.alpha_target > 0.0 && cfg.alpha_target <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha target must be in (0, 1], got {}",
            cfg.alpha_target
        )));
    }
    if cfg.w_grid.is_empty() {
        return Err(Error::InvalidConfig("wait grid must be nonempty".into()));
    }
    if cfg.w_grid.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidConfig(
            "wait grid must be strictly ascending".into(),
        ));
    }
    if let Some(&w) = cfg.w_grid.iter().find(|&&w| w < 4) {
        return Err(Error::InvalidConfig(format!(
            "wait grid entry {w} is below the minimum wait of 4"
        )));
    }
    let judged_n = match cfg.plan.cap {
        SampleCap::Limited(n) => n,
        SampleCap::Unrestricted => cfg.ceiling,
    };
    let table = t1e_trajectory(&TrajectoryConfig {
        design: cfg.design.clone(),
        plan: cfg.plan.clone(),
        model: cfg.model.clone(),
        w_grid: cfg.w_grid.clone(),
        n_grid: Some(vec![judged_n]),
        replicates: cfg.replicates,
        master_seed: cfg.master_seed,
        workers: cfg.workers,
        ceiling: cfg.ceiling.max(judged_n),
    })?;

    let mut cells: Vec<CalibrationCell> = table
        .rows
        .iter()
        .map(|row| CalibrationCell {
            wait: row.wait,
            analyzed_n: row.analyzed_n,
            t1e: row.t1e,
            se: row.se,
            avg_n: row.avg_n,
            non_monotone: false,
        })
        .collect();
    flag_non_monotone(&mut cells);

    let chosen = cells
        .iter()
        .find(|c| c.t1e <= cfg.alpha_target)
        .cloned();
    Ok(CalibrationReport {
        alpha_target: cfg.alpha_target,
        attainable: chosen.is_some(),
        chosen,
        cells,
    })
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub design: DesignSpec,
    /// Template for affirmation mode, interval level, and family; the
    /// monitoring frequencies come from the grids.
    pub plan: MonitoringPlan,
    pub model: OutcomeModel,
    pub w_grid: Vec<u32>,
    pub s_grid: Vec<u32>,
    pub a_grid: Vec<u32>,
    pub n_grid: Vec<u32>,
    /// Effect at which power is reported.
    pub reference_effect: f64,
    pub replicates: u32,
    pub master_seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub wait: u32,
    pub step: u32,
    pub affirm: u32,
    pub cap: u32,
    /// False when the cell is impossible (cap below wait); statistics NaN.
    pub valid: bool,
    pub t1e: Rate,
    pub power: Rate,
    pub avg_n_null: f64,
    pub avg_n_reference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Cross product of monitoring frequencies, one row per cell in
/// wait-major, then step, affirmation, cap order. All cells replay the
/// same replicate streams.
pub fn sweep_frequencies(cfg: &SweepConfig) -> Result<SweepTable> {
    for (name, grid) in [
        ("wait", &cfg.w_grid),
        ("step", &cfg.s_grid),
        ("affirmation", &cfg.a_grid),
        ("cap", &cfg.n_grid),
    ] {
        if grid.is_empty() {
            return Err(Error::InvalidConfig(format!("{name} grid must be nonempty")));
        }
    }
    if !cfg.reference_effect.is_finite() {
        return Err(Error::InvalidConfig("reference effect must be finite".into()));
    }
    let mut rows = Vec::new();
    for &wait in &cfg.w_grid {
        for &step in &cfg.s_grid {
            for &affirm in &cfg.a_grid {
                for &cap in &cfg.n_grid {
                    let mut plan = cfg.plan.clone();
                    plan.wait = wait;
                    plan.step = step;
                    plan.affirm = affirm;
                    plan.cap = SampleCap::Limited(cap);
                    if plan.validate().is_err() {
                        rows.push(SweepRow {
                            wait,
                            step,
                            affirm,
                            cap,
                            valid: false,
                            t1e: Rate {
                                value: f64::NAN,
                                se: f64::NAN,
                            },
                            power: Rate {
                                value: f64::NAN,
                                se: f64::NAN,
                            },
                            avg_n_null: f64::NAN,
                            avg_n_reference: f64::NAN,
                        });
                        continue;
                    }
                    let summary = simulate_oc(&OcConfig {
                        design: cfg.design.clone(),
                        plan,
                        model: cfg.model.clone(),
                        effects: vec![0.0, cfg.reference_effect],
                        replicates: cfg.replicates,
                        master_seed: cfg.master_seed,
                        workers: cfg.workers,
                        ceiling: cap,
                    })?;
                    let null = &summary.per_effect[0];
                    let reference = &summary.per_effect[1];
                    rows.push(SweepRow {
                        wait,
                        step,
                        affirm,
                        cap,
                        valid: true,
                        t1e: null.reject_null_rate,
                        power: reference.reject_null_rate,
                        avg_n_null: null.avg_n_observed,
                        avg_n_reference: reference.avg_n_observed,
                    });
                }
            }
        }
    }
    Ok(SweepTable { rows })
}
