//! Operating characteristics by replicated simulation.
//!
//! Replicate `r` under effect index `e` always draws from the ChaCha stream
//! `(e << 32) | r` of the master seed, so results are a pure function of the
//! configuration: worker count and scheduling never change a byte. Replicates
//! are simulated in fixed-size batches farmed out to a thread pool; batch
//! summaries are folded in batch order, and everything foldable is held in
//! integer counters, so the reduction itself is exact.
//!
//! Type I error trajectories reuse one set of uncapped runs per wait time.
//! Each replicate records a reject flag per look; a trial capped at `N`
//! behaves exactly like the uncapped trial up to `N`, so the trajectory at
//! a grid point is the count of replicates that stopped with rejection by
//! `N` plus the still-running replicates whose look at `N` rejects. No
//! re-simulation per grid point, and per-replicate storage is one flag per
//! look.
//!
//! Reversal analysis replays the same replicate streams under each lag.
//! The monitoring path of a trial depends only on the outcome stream, never
//! on the lag, so the comparison across lags is paired: only the pending
//! outcomes at the stop differ.

use rayon::prelude::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::designs::{ConclusionCategory, DesignSpec, Monitor};
use crate::engine::{
    run_trial_monitored, MonitoringPlan, OutcomeModel, RunOptions, SampleCap, StopReason,
    TrialResult,
};
use crate::error::{Error, Result};

/// Replicates per work unit; summaries fold in batch order regardless of
/// which worker finished first.
const BATCH: u32 = 64;

/// RNG stream for one replicate. Counter-based: independent of how work is
/// scheduled.
pub fn replicate_rng(master_seed: u64, effect_index: u32, replicate: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((u64::from(effect_index) << 32) | u64::from(replicate));
    rng
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))
}

#[derive(Debug, Clone)]
pub struct OcConfig {
    pub design: DesignSpec,
    pub plan: MonitoringPlan,
    pub model: OutcomeModel,
    /// Treatment effects to simulate, one summary per entry.
    pub effects: Vec<f64>,
    pub replicates: u32,
    pub master_seed: u64,
    pub workers: usize,
    /// Observed-outcome truncation for uncapped plans.
    pub ceiling: u32,
}

impl OcConfig {
    pub fn validate(&self) -> Result<()> {
        self.plan.validate()?;
        self.model.validate()?;
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be positive".into()));
        }
        if self.effects.is_empty() {
            return Err(Error::InvalidConfig("effects must be nonempty".into()));
        }
        if self.effects.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidConfig("effects must be finite".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be positive".into()));
        }
        if self.ceiling < self.plan.wait {
            return Err(Error::InvalidConfig(format!(
                "ceiling {} is below the wait {}",
                self.ceiling, self.plan.wait
            )));
        }
        Ok(())
    }
}

/// A probability with its Monte Carlo standard error; the error is NaN when
/// fewer than two replicates back it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    pub value: f64,
    pub se: f64,
}

impl Rate {
    fn from_count(count: u64, n: u64) -> Self {
        let p = count as f64 / n as f64;
        let se = if n < 2 {
            f64::NAN
        } else {
            (p * (1.0 - p) / n as f64).sqrt()
        };
        Rate { value: p, se }
    }
}

/// Aggregated outcomes of all replicates under one effect. Conclusion rates
/// are read at the stop; bias and coverage use the final analysis on the
/// complete data.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectSummary {
    pub theta: f64,
    pub replicates: u64,
    pub reject_null_rate: Rate,
    pub inconclusive_rate: Rate,
    pub ruled_out_meaningful_rate: Rate,
    pub ruled_out_null_equiv_rate: Rate,
    pub mild_effect_rate: Rate,
    /// Stopped by an affirmed alert before the cap or ceiling.
    pub stop_early_prob: Rate,
    /// Uncapped runs truncated at the ceiling.
    pub still_running_rate: Rate,
    pub coverage: Rate,
    pub reversal_reject_to_accept: Rate,
    pub reversal_accept_to_reject: Rate,
    pub avg_n_observed: f64,
    pub sd_n_observed: f64,
    pub avg_n_enrolled: f64,
    /// Mean final estimate minus the true effect.
    pub bias: f64,
    pub bias_se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OcSummary {
    pub per_effect: Vec<EffectSummary>,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    n: u64,
    reject: u64,
    inconclusive: u64,
    ruled_out_meaningful: u64,
    ruled_out_null_equiv: u64,
    mild: u64,
    stop_early: u64,
    still_running: u64,
    covered: u64,
    rev_reject_to_accept: u64,
    rev_accept_to_reject: u64,
    sum_n_observed: u64,
    sum_n_observed_sq: u128,
    sum_n_enrolled: u64,
    estimates: u64,
    sum_estimate: f64,
    sum_estimate_sq: f64,
}

impl Tally {
    fn add(&mut self, result: &TrialResult, theta: f64) {
        self.n += 1;
        match &result.conclusion_at_stop {
            None => self.inconclusive += 1,
            Some(c) => {
                if c.reject_null {
                    self.reject += 1;
                }
                match c.category {
                    ConclusionCategory::Inconclusive => self.inconclusive += 1,
                    ConclusionCategory::RuledOutMeaningful => self.ruled_out_meaningful += 1,
                    ConclusionCategory::RuledOutNullEquivalent => self.ruled_out_null_equiv += 1,
                    ConclusionCategory::MildEffect => self.mild += 1,
                }
            }
        }
        match result.stop_reason {
            StopReason::AffirmedAlert(_) => self.stop_early += 1,
            StopReason::NeverStopped => self.still_running += 1,
            StopReason::CapReached => {}
        }
        let reject_at = |c: &Option<crate::designs::Conclusion>| {
            c.as_ref().map_or(false, |c| c.reject_null)
        };
        let at_stop = reject_at(&result.conclusion_at_stop);
        let at_final = reject_at(&result.conclusion_final);
        if at_stop && !at_final {
            self.rev_reject_to_accept += 1;
        }
        if !at_stop && at_final {
            self.rev_accept_to_reject += 1;
        }
        if let Some(interval) = &result.interval_final {
            if interval.contains(theta) {
                self.covered += 1;
            }
        }
        self.sum_n_observed += u64::from(result.n_observed_at_stop);
        self.sum_n_observed_sq += u128::from(result.n_observed_at_stop).pow(2);
        self.sum_n_enrolled += u64::from(result.n_enrolled_final);
        if let Some(e) = result.estimate_final {
            self.estimates += 1;
            self.sum_estimate += e;
            self.sum_estimate_sq += e * e;
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.n += other.n;
        self.reject += other.reject;
        self.inconclusive += other.inconclusive;
        self.ruled_out_meaningful += other.ruled_out_meaningful;
        self.ruled_out_null_equiv += other.ruled_out_null_equiv;
        self.mild += other.mild;
        self.stop_early += other.stop_early;
        self.still_running += other.still_running;
        self.covered += other.covered;
        self.rev_reject_to_accept += other.rev_reject_to_accept;
        self.rev_accept_to_reject += other.rev_accept_to_reject;
        self.sum_n_observed += other.sum_n_observed;
        self.sum_n_observed_sq += other.sum_n_observed_sq;
        self.sum_n_enrolled += other.sum_n_enrolled;
        self.estimates += other.estimates;
        self.sum_estimate += other.sum_estimate;
        self.sum_estimate_sq += other.sum_estimate_sq;
    }

    fn summary(&self, theta: f64) -> EffectSummary {
        let n = self.n;
        let nf = n as f64;
        let mean_n = self.sum_n_observed as f64 / nf;
        let sd_n = if n < 2 {
            f64::NAN
        } else {
            let ss = self.sum_n_observed_sq as f64 - (self.sum_n_observed as f64).powi(2) / nf;
            (ss.max(0.0) / (nf - 1.0)).sqrt()
        };
        let (bias, bias_se) = if self.estimates == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let m = self.estimates as f64;
            let mean = self.sum_estimate / m;
            let se = if self.estimates < 2 {
                f64::NAN
            } else {
                let var = (self.sum_estimate_sq - self.sum_estimate * self.sum_estimate / m)
                    .max(0.0)
                    / (m - 1.0);
                (var / m).sqrt()
            };
            (mean - theta, se)
        };
        EffectSummary {
            theta,
            replicates: n,
            reject_null_rate: Rate::from_count(self.reject, n),
            inconclusive_rate: Rate::from_count(self.inconclusive, n),
            ruled_out_meaningful_rate: Rate::from_count(self.ruled_out_meaningful, n),
            ruled_out_null_equiv_rate: Rate::from_count(self.ruled_out_null_equiv, n),
            mild_effect_rate: Rate::from_count(self.mild, n),
            stop_early_prob: Rate::from_count(self.stop_early, n),
            still_running_rate: Rate::from_count(self.still_running, n),
            coverage: Rate::from_count(self.covered, n),
            reversal_reject_to_accept: Rate::from_count(self.rev_reject_to_accept, n),
            reversal_accept_to_reject: Rate::from_count(self.rev_accept_to_reject, n),
            avg_n_observed: mean_n,
            sd_n_observed: sd_n,
            avg_n_enrolled: self.sum_n_enrolled as f64 / nf,
            bias,
            bias_se,
        }
    }
}

fn batch_bounds(replicates: u32) -> Vec<(u32, u32)> {
    (0..replicates.div_ceil(BATCH))
        .map(|b| (b * BATCH, (b + 1).saturating_mul(BATCH).min(replicates)))
        .collect()
}

/// Replicated trials for every configured effect.
pub fn simulate_oc(cfg: &OcConfig) -> Result<OcSummary> {
    cfg.validate()?;
    let pool = build_pool(cfg.workers)?;
    let monitor = Monitor::new(cfg.design.clone());
    let options = RunOptions {
        ceiling: cfg.ceiling,
        trace_looks: false,
    };
    let per_effect = pool.install(|| {
        cfg.effects
            .iter()
            .enumerate()
            .map(|(e, &theta)| {
                let model = cfg.model.with_theta(theta);
                let batches: Vec<Tally> = batch_bounds(cfg.replicates)
                    .into_par_iter()
                    .map(|(lo, hi)| {
                        let mut tally = Tally::default();
                        for r in lo..hi {
                            let mut rng = replicate_rng(cfg.master_seed, e as u32, r);
                            let result = run_trial_monitored(
                                &monitor, &cfg.plan, &model, &mut rng, &options,
                            );
                            tally.add(&result, theta);
                        }
                        tally
                    })
                    .collect();
                let mut total = Tally::default();
                for b in &batches {
                    total.merge(b);
                }
                total.summary(theta)
            })
            .collect()
    });
    Ok(OcSummary { per_effect })
}

/// Type I error as a function of the enrollment cap.
#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    pub design: DesignSpec,
    /// Template plan; its wait is replaced by each grid entry and its cap is
    /// ignored (trajectory runs are uncapped by construction).
    pub plan: MonitoringPlan,
    /// Lag and randomization come from the model; the effect is pinned to
    /// zero because the trajectory targets Type I error.
    pub model: OutcomeModel,
    pub w_grid: Vec<u32>,
    /// Candidate caps; defaults to every scheduled look position up to the
    /// ceiling, where the accounting is exact. Off-schedule entries are
    /// analyzed at the last look at or before them.
    pub n_grid: Option<Vec<u32>>,
    pub replicates: u32,
    pub master_seed: u64,
    pub workers: usize,
    pub ceiling: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub wait: u32,
    pub step: u32,
    pub affirm: u32,
    /// Cap requested in the grid.
    pub requested_n: u32,
    /// Look position the cap was analyzed at (last look ≤ requested).
    pub analyzed_n: u32,
    /// False when the requested cap precedes the first look.
    pub valid: bool,
    pub t1e: f64,
    pub se: f64,
    pub avg_n: f64,
    pub still_running_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub rows: Vec<TrajectoryRow>,
}

#[derive(Debug, Clone)]
struct TrajTally {
    /// Replicates that stopped at look k.
    stops: Vec<u64>,
    /// Replicates that stopped at look k rejecting the null.
    stop_rejects: Vec<u64>,
    /// Replicates still running past look k whose look-k interval rejects.
    run_rejects: Vec<u64>,
}

impl TrajTally {
    fn new(looks: usize) -> Self {
        Self {
            stops: vec![0; looks],
            stop_rejects: vec![0; looks],
            run_rejects: vec![0; looks],
        }
    }

    fn add(&mut self, result: &TrialResult) {
        let trace = result
            .per_look_reject
            .as_ref()
            .expect("trajectory runs trace looks");
        match result.stop_reason {
            StopReason::AffirmedAlert(_) => {
                let stop_look = trace.len() - 1;
                self.stops[stop_look] += 1;
                if trace[stop_look] {
                    self.stop_rejects[stop_look] += 1;
                }
                for (k, &rejected) in trace[..stop_look].iter().enumerate() {
                    if rejected {
                        self.run_rejects[k] += 1;
                    }
                }
            }
            StopReason::NeverStopped => {
                for (k, &rejected) in trace.iter().enumerate() {
                    if rejected {
                        self.run_rejects[k] += 1;
                    }
                }
            }
            StopReason::CapReached => unreachable!("trajectory runs are uncapped"),
        }
    }

    fn merge(&mut self, other: &TrajTally) {
        for (a, b) in self.stops.iter_mut().zip(&other.stops) {
            *a += b;
        }
        for (a, b) in self.stop_rejects.iter_mut().zip(&other.stop_rejects) {
            *a += b;
        }
        for (a, b) in self.run_rejects.iter_mut().zip(&other.run_rejects) {
            *a += b;
        }
    }
}

impl TrajectoryConfig {
    fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.w_grid.is_empty() {
            return Err(Error::InvalidConfig("wait grid must be nonempty".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be positive".into()));
        }
        for &w in &self.w_grid {
            self.plan_for(w)?;
            if self.ceiling < w {
                return Err(Error::InvalidConfig(format!(
                    "ceiling {} is below wait {}",
                    self.ceiling, w
                )));
            }
        }
        if let Some(grid) = &self.n_grid {
            if grid.is_empty() {
                return Err(Error::InvalidConfig("cap grid must be nonempty".into()));
            }
            if grid.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::InvalidConfig(
                    "cap grid must be strictly ascending".into(),
                ));
            }
        }
        Ok(())
    }

    fn plan_for(&self, wait: u32) -> Result<MonitoringPlan> {
        let mut plan = self.plan.clone();
        plan.wait = wait;
        plan.cap = SampleCap::Unrestricted;
        plan.validate()?;
        Ok(plan)
    }

    fn grid_for(&self, wait: u32) -> Vec<u32> {
        match &self.n_grid {
            Some(grid) => grid.clone(),
            None => {
                let mut n = wait;
                let mut grid = Vec::new();
                while n <= self.ceiling {
                    grid.push(n);
                    n += self.plan.step;
                }
                grid
            }
        }
    }
}

/// Cumulative Type I error over candidate caps, from one uncapped replicate
/// set per wait-grid entry. Effects are pinned to zero.
pub fn t1e_trajectory(cfg: &TrajectoryConfig) -> Result<TrajectoryTable> {
    cfg.validate()?;
    let pool = build_pool(cfg.workers)?;
    let monitor = Monitor::new(cfg.design.clone());
    let model = cfg.model.with_theta(0.0);
    let options = RunOptions {
        ceiling: cfg.ceiling,
        trace_looks: true,
    };
    let replicates = u64::from(cfg.replicates);

    let mut rows = Vec::new();
    for &wait in &cfg.w_grid {
        let plan = cfg.plan_for(wait)?;
        let looks = ((cfg.ceiling - wait) / plan.step + 1) as usize;
        let tally = pool.install(|| {
            let batches: Vec<TrajTally> = batch_bounds(cfg.replicates)
                .into_par_iter()
                .map(|(lo, hi)| {
                    let mut tally = TrajTally::new(looks);
                    for r in lo..hi {
                        // stream index 0: shared outcome streams across the
                        // wait grid, so cells are paired comparisons
                        let mut rng = replicate_rng(cfg.master_seed, 0, r);
                        let result =
                            run_trial_monitored(&monitor, &plan, &model, &mut rng, &options);
                        tally.add(&result);
                    }
                    tally
                })
                .collect();
            let mut total = TrajTally::new(looks);
            for b in &batches {
                total.merge(b);
            }
            total
        });

        // prefix sums over looks: stops, rejecting stops, observed total
        let mut cum_stop = vec![0u64; looks];
        let mut cum_stop_reject = vec![0u64; looks];
        let mut cum_stop_n = vec![0u64; looks];
        let mut s = 0u64;
        let mut sr = 0u64;
        let mut sn = 0u64;
        for k in 0..looks {
            s += tally.stops[k];
            sr += tally.stop_rejects[k];
            sn += tally.stops[k] * u64::from(wait + k as u32 * plan.step);
            cum_stop[k] = s;
            cum_stop_reject[k] = sr;
            cum_stop_n[k] = sn;
        }

        for requested_n in cfg.grid_for(wait) {
            if requested_n < wait {
                rows.push(TrajectoryRow {
                    wait,
                    step: plan.step,
                    affirm: plan.affirm,
                    requested_n,
                    analyzed_n: requested_n,
                    valid: false,
                    t1e: f64::NAN,
                    se: f64::NAN,
                    avg_n: f64::NAN,
                    still_running_rate: f64::NAN,
                });
                continue;
            }
            let k = (((requested_n - wait) / plan.step) as usize).min(looks - 1);
            let analyzed_n = wait + k as u32 * plan.step;
            let rejecting = cum_stop_reject[k] + tally.run_rejects[k];
            let p = rejecting as f64 / replicates as f64;
            let running = replicates - cum_stop[k];
            let avg_n =
                (cum_stop_n[k] + running * u64::from(analyzed_n)) as f64 / replicates as f64;
            rows.push(TrajectoryRow {
                wait,
                step: plan.step,
                affirm: plan.affirm,
                requested_n,
                analyzed_n,
                valid: true,
                t1e: p,
                se: (p * (1.0 - p) / replicates as f64).sqrt(),
                avg_n,
                still_running_rate: running as f64 / replicates as f64,
            });
        }
    }
    Ok(TrajectoryTable { rows })
}

/// Reversal probabilities between the stop and the final analysis, per lag.
#[derive(Debug, Clone)]
pub struct ReversalConfig {
    pub design: DesignSpec,
    pub plan: MonitoringPlan,
    /// Template model; the lag is replaced by each grid entry and the
    /// effect is pinned to zero.
    pub model: OutcomeModel,
    pub lag_grid: Vec<u32>,
    pub replicates: u32,
    pub master_seed: u64,
    pub workers: usize,
    pub ceiling: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReversalRow {
    pub lag: u32,
    pub reject_to_accept: Rate,
    pub accept_to_reject: Rate,
    pub total: Rate,
    pub reject_rate_at_stop: Rate,
    pub avg_n_observed: f64,
    pub avg_n_enrolled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReversalTable {
    pub rows: Vec<ReversalRow>,
}

/// Replays the same replicate streams under each lag; the monitoring path
/// is lag-invariant, so rows differ only in the outcomes pending at the stop.
pub fn reversal_analysis(cfg: &ReversalConfig) -> Result<ReversalTable> {
    if cfg.lag_grid.is_empty() {
        return Err(Error::InvalidConfig("lag grid must be nonempty".into()));
    }
    let mut rows = Vec::new();
    for &lag in &cfg.lag_grid {
        let oc = OcConfig {
            design: cfg.design.clone(),
            plan: cfg.plan.clone(),
            model: cfg.model.with_theta(0.0).with_lag(lag),
            effects: vec![0.0],
            replicates: cfg.replicates,
            master_seed: cfg.master_seed,
            workers: cfg.workers,
            ceiling: cfg.ceiling,
        };
        let summary = simulate_oc(&oc)?;
        let e = &summary.per_effect[0];
        let both = Rate::from_count(
            ((e.reversal_reject_to_accept.value + e.reversal_accept_to_reject.value)
                * e.replicates as f64)
                .round() as u64,
            e.replicates,
        );
        rows.push(ReversalRow {
            lag,
            reject_to_accept: e.reversal_reject_to_accept,
            accept_to_reject: e.reversal_accept_to_reject,
            total: both,
            reject_rate_at_stop: e.reject_null_rate,
            avg_n_observed: e.avg_n_observed,
            avg_n_enrolled: e.avg_n_enrolled,
        });
    }
    Ok(ReversalTable { rows })
}
