//! Single-trial simulation: two-arm enrollment, delayed outcomes, interval
//! estimation on accumulating data, and the monitoring loop that decides
//! when the trial stops.
//!
//! The clock is enrollment. Subject `i`'s outcome becomes observable once
//! enrollment reaches `i + L`, so each enrollment past the lag window
//! reveals exactly one earlier outcome and the observed count rises by one
//! at a time. Looks happen when the observed count first reaches `W` and
//! every `S` observed outcomes after that; each look estimates a pooled
//! interval for the arm difference and evaluates the design's alert.
//!
//! Forward affirmation: an alert raised at observed count `n` arms a target
//! of `n + A`; at the first estimable look at or past the target the trial
//! stops if the alert (or a superset of it) is raised again, re-arms on a
//! different alert, and stands down on none. Backward affirmation instead
//! stops when the look exactly `A` observed outcomes earlier raised the
//! same alert. `A = 0` stops at the first alert in either mode.
//!
//! A finite cap `N` stops enrollment at `N` subjects; outcomes keep
//! arriving, scheduled looks keep running, and a terminal look at all `N`
//! outcomes decides between an affirmed alert and `CapReached`. Without a
//! cap a simulation ceiling truncates the run as `NeverStopped`.
//!
//! After any stop the pending lagged outcomes (at most `L`) are observed
//! and the final interval is computed on the complete data. The monitoring
//! path up to the stop depends only on the outcome stream, never on `L`,
//! which is what makes stop-then-extend comparisons across lags meaningful.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::designs::{AlertStatus, Conclusion, DesignSpec, Monitor};
use crate::error::{Error, Result};
use crate::regions::Interval;

/// Observed-outcome truncation for uncapped simulations.
pub const DEFAULT_CEILING: u32 = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Control,
    Treatment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomizationScheme {
    /// Control, treatment, control, treatment.
    Alternating,
    /// Within each consecutive pair, one of each arm in random order.
    BlockTwo,
}

/// Stateful arm assignment; `next` consumes randomness only at the start of
/// a block-two pair.
#[derive(Debug, Clone)]
pub struct Randomizer {
    scheme: RandomizationScheme,
    index: u64,
    second_of_pair: Option<Arm>,
}

impl Randomizer {
    pub fn new(scheme: RandomizationScheme) -> Self {
        Self {
            scheme,
            index: 0,
            second_of_pair: None,
        }
    }

    pub fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Arm {
        self.index += 1;
        match self.scheme {
            RandomizationScheme::Alternating => {
                if self.index % 2 == 1 {
                    Arm::Control
                } else {
                    Arm::Treatment
                }
            }
            RandomizationScheme::BlockTwo => {
                if let Some(arm) = self.second_of_pair.take() {
                    arm
                } else {
                    let treatment_first: bool = rng.gen();
                    let (first, second) = if treatment_first {
                        (Arm::Treatment, Arm::Control)
                    } else {
                        (Arm::Control, Arm::Treatment)
                    };
                    self.second_of_pair = Some(second);
                    first
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalFamily {
    /// Standard-normal quantile on the pooled standard error.
    ZPooled,
    /// Student-t quantile with `n_c + n_t - 2` degrees of freedom; identical
    /// to the OLS treatment-coefficient interval.
    TPooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AffirmMode {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleCap {
    Limited(u32),
    Unrestricted,
}

/// Monitoring frequencies and the interval used at each look.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitoringPlan {
    /// Total observed outcomes across both arms before the first look.
    pub wait: u32,
    /// Observed outcomes between looks.
    pub step: u32,
    /// Observed outcomes between an alert and its affirmation check.
    pub affirm: u32,
    /// Cap on enrolled subjects.
    pub cap: SampleCap,
    pub affirm_mode: AffirmMode,
    pub interval_level: f64,
    pub interval_family: IntervalFamily,
}

impl MonitoringPlan {
    pub fn new(wait: u32, step: u32, affirm: u32, cap: SampleCap) -> Result<Self> {
        let plan = Self {
            wait,
            step,
            affirm,
            cap,
            affirm_mode: AffirmMode::Forward,
            interval_level: 0.95,
            interval_family: IntervalFamily::ZPooled,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_affirm_mode(mut self, mode: AffirmMode) -> Self {
        self.affirm_mode = mode;
        self
    }

    pub fn with_interval_level(mut self, level: f64) -> Self {
        self.interval_level = level;
        self
    }

    pub fn with_interval_family(mut self, family: IntervalFamily) -> Self {
        self.interval_family = family;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.wait < 4 {
            return Err(Error::InvalidPlan(format!(
                "wait must be at least 4 (two per arm for estimability), got {}",
                self.wait
            )));
        }
        if self.step < 1 {
            return Err(Error::InvalidPlan("step must be at least 1".into()));
        }
        if let SampleCap::Limited(n) = self.cap {
            if n < self.wait {
                return Err(Error::InvalidPlan(format!(
                    "cap {} is below the wait {}",
                    n, self.wait
                )));
            }
        }
        if !(self.interval_level > 0.0 && self.interval_level < 1.0) {
            return Err(Error::InvalidPlan(format!(
                "interval level must be in (0, 1), got {}",
                self.interval_level
            )));
        }
        Ok(())
    }

    /// Two-sided critical quantile for a look with the given per-arm counts.
    fn quantile(&self, n_control: u32, n_treatment: u32) -> f64 {
        let p = 0.5 + self.interval_level / 2.0;
        match self.interval_family {
            IntervalFamily::ZPooled => Normal::new(0.0, 1.0).unwrap().inverse_cdf(p),
            IntervalFamily::TPooled => {
                let df = f64::from(n_control + n_treatment - 2);
                StudentsT::new(0.0, 1.0, df).unwrap().inverse_cdf(p)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutcomeKind {
    /// Independent normal outcomes, treatment shifted by `theta`.
    Normal { theta: f64, sd: f64 },
    /// Resample a control pool with replacement; treatment adds `theta`.
    Bootstrap { pool: Arc<Vec<f64>>, theta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeModel {
    pub kind: OutcomeKind,
    /// Enrollments between a subject's randomization and outcome availability.
    pub lag: u32,
    pub randomization: RandomizationScheme,
}

impl OutcomeModel {
    pub fn normal(theta: f64, sd: f64) -> Self {
        Self {
            kind: OutcomeKind::Normal { theta, sd },
            lag: 0,
            randomization: RandomizationScheme::Alternating,
        }
    }

    pub fn bootstrap(pool: Vec<f64>, theta: f64) -> Self {
        Self {
            kind: OutcomeKind::Bootstrap {
                pool: Arc::new(pool),
                theta,
            },
            lag: 0,
            randomization: RandomizationScheme::Alternating,
        }
    }

    pub fn with_lag(mut self, lag: u32) -> Self {
        self.lag = lag;
        self
    }

    pub fn with_randomization(mut self, scheme: RandomizationScheme) -> Self {
        self.randomization = scheme;
        self
    }

    /// Same model with the treatment effect replaced.
    pub fn with_theta(&self, theta: f64) -> Self {
        let mut model = self.clone();
        match &mut model.kind {
            OutcomeKind::Normal { theta: t, .. } => *t = theta,
            OutcomeKind::Bootstrap { theta: t, .. } => *t = theta,
        }
        model
    }

    pub fn theta(&self) -> f64 {
        match &self.kind {
            OutcomeKind::Normal { theta, .. } => *theta,
            OutcomeKind::Bootstrap { theta, .. } => *theta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            OutcomeKind::Normal { sd, theta } => {
                if !(*sd > 0.0) || !sd.is_finite() {
                    return Err(Error::InvalidModel(format!(
                        "outcome sd must be a positive finite number, got {sd}"
                    )));
                }
                if !theta.is_finite() {
                    return Err(Error::InvalidModel("theta must be finite".into()));
                }
            }
            OutcomeKind::Bootstrap { pool, theta } => {
                if pool.is_empty() {
                    return Err(Error::InvalidModel("bootstrap pool is empty".into()));
                }
                if pool.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidModel(
                        "bootstrap pool contains non-finite values".into(),
                    ));
                }
                if !theta.is_finite() {
                    return Err(Error::InvalidModel("theta must be finite".into()));
                }
            }
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, arm: Arm, rng: &mut R) -> f64 {
        let shift = match arm {
            Arm::Control => 0.0,
            Arm::Treatment => self.theta(),
        };
        match &self.kind {
            OutcomeKind::Normal { sd, .. } => {
                let z: f64 = StandardNormal.sample(rng);
                sd * z + shift
            }
            OutcomeKind::Bootstrap { pool, .. } => {
                pool[rng.gen_range(0..pool.len())] + shift
            }
        }
    }
}

/// Streaming mean and sum of squared deviations for one arm.
#[derive(Debug, Clone, Copy, Default)]
struct ArmStats {
    n: u32,
    mean: f64,
    m2: f64,
}

impl ArmStats {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / f64::from(self.n);
        self.m2 += delta * (x - self.mean);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotEstimable {
    /// Fewer than two outcomes in an arm.
    TooFewOutcomes,
    /// Pooled sample variance is zero.
    ZeroVariance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub interval: Interval,
}

fn pooled_estimate(
    control: &ArmStats,
    treatment: &ArmStats,
    plan: &MonitoringPlan,
) -> std::result::Result<Estimate, NotEstimable> {
    if control.n < 2 || treatment.n < 2 {
        return Err(NotEstimable::TooFewOutcomes);
    }
    let df = f64::from(control.n + treatment.n - 2);
    let pooled_var = (control.m2 + treatment.m2) / df;
    if !(pooled_var > 0.0) {
        return Err(NotEstimable::ZeroVariance);
    }
    let estimate = treatment.mean - control.mean;
    let q = plan.quantile(control.n, treatment.n);
    let half_width = q
        * pooled_var.sqrt()
        * (1.0 / f64::from(control.n) + 1.0 / f64::from(treatment.n)).sqrt();
    let interval =
        Interval::new(estimate - half_width, estimate + half_width).expect("finite endpoints");
    Ok(Estimate { estimate, interval })
}

/// Pooled-variance interval for the treatment-minus-control difference.
pub fn estimate_interval(
    control: &[f64],
    treatment: &[f64],
    plan: &MonitoringPlan,
) -> std::result::Result<Estimate, NotEstimable> {
    let mut c = ArmStats::default();
    let mut t = ArmStats::default();
    for &x in control {
        c.push(x);
    }
    for &x in treatment {
        t.push(x);
    }
    pooled_estimate(&c, &t, plan)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    AffirmedAlert(AlertStatus),
    /// Enrollment cap reached without an affirmed alert.
    CapReached,
    /// Uncapped simulation truncated at the ceiling.
    NeverStopped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub n_observed_at_stop: u32,
    pub n_enrolled_final: u32,
    pub stop_reason: StopReason,
    pub interval_at_stop: Option<Interval>,
    pub interval_final: Option<Interval>,
    pub estimate_final: Option<f64>,
    pub conclusion_at_stop: Option<Conclusion>,
    pub conclusion_final: Option<Conclusion>,
    /// Reject-null flag at each look, in look order (false when the look was
    /// not estimable). Present only when tracing was requested.
    pub per_look_reject: Option<Vec<bool>>,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Observed-outcome truncation when the plan has no cap.
    pub ceiling: u32,
    /// Record the per-look reject flags.
    pub trace_looks: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            ceiling: DEFAULT_CEILING,
            trace_looks: false,
        }
    }
}

// Alert bitset: intersection decides whether one alert affirms another, so
// Both affirms either single alert and vice versa.
const ROPE_OUT: u8 = 1;
const ROME_OUT: u8 = 2;
const SUPPORT: u8 = 4;

fn alert_bits(status: AlertStatus) -> u8 {
    match status {
        AlertStatus::None => 0,
        AlertStatus::NonRope => ROPE_OUT,
        AlertStatus::NonRome => ROME_OUT,
        AlertStatus::Both => ROPE_OUT | ROME_OUT,
        AlertStatus::RopeSupported => SUPPORT,
    }
}

fn bits_alert(bits: u8) -> AlertStatus {
    match bits {
        0 => AlertStatus::None,
        1 => AlertStatus::NonRope,
        2 => AlertStatus::NonRome,
        3 => AlertStatus::Both,
        4 => AlertStatus::RopeSupported,
        _ => unreachable!("unknown alert bits {bits}"),
    }
}

struct TrialState<'a> {
    plan: &'a MonitoringPlan,
    model: &'a OutcomeModel,
    control: ArmStats,
    treatment: ArmStats,
    observed: u32,
    pending: VecDeque<(Arm, f64)>,
    // forward affirmation: armed alert bits and the observed count that
    // makes them eligible for affirmation
    armed: Option<(u8, u32)>,
    // backward affirmation: alert bits per evaluated look, trimmed to the
    // affirmation window
    history: VecDeque<(u32, u8)>,
    trace: Option<Vec<bool>>,
}

enum LookOutcome {
    Continue,
    Stop(AlertStatus),
}

impl TrialState<'_> {
    fn on_schedule(&self) -> bool {
        self.observed >= self.plan.wait && (self.observed - self.plan.wait) % self.plan.step == 0
    }

    /// Runs one look on the current data.
    fn look(&mut self, monitor: &Monitor) -> (LookOutcome, Option<Estimate>) {
        let est = match pooled_estimate(&self.control, &self.treatment, self.plan) {
            Ok(est) => est,
            Err(_) => {
                // skipped look: affirmation state untouched
                if let Some(trace) = &mut self.trace {
                    trace.push(false);
                }
                return (LookOutcome::Continue, None);
            }
        };
        let alert = monitor.alert(&est.interval).expect("validated design");
        if let Some(trace) = &mut self.trace {
            trace.push(monitor.reject_null(&est.interval));
        }
        let cur = alert_bits(alert);

        let stop = match self.plan.affirm_mode {
            AffirmMode::Forward => {
                if self.plan.affirm == 0 {
                    if cur != 0 {
                        Some(alert)
                    } else {
                        None
                    }
                } else {
                    match self.armed {
                        None => {
                            if cur != 0 {
                                self.armed = Some((cur, self.observed + self.plan.affirm));
                            }
                            None
                        }
                        Some((armed_bits, target)) if self.observed >= target => {
                            let both = cur & armed_bits;
                            if both != 0 {
                                Some(bits_alert(both))
                            } else {
                                // different alert re-arms, none stands down
                                self.armed = if cur != 0 {
                                    Some((cur, self.observed + self.plan.affirm))
                                } else {
                                    None
                                };
                                None
                            }
                        }
                        Some(_) => None,
                    }
                }
            }
            AffirmMode::Backward => {
                let mut stop = None;
                if cur != 0 {
                    if self.plan.affirm == 0 {
                        stop = Some(alert);
                    } else if self.observed >= self.plan.affirm {
                        let earlier = self.observed - self.plan.affirm;
                        let prev = self
                            .history
                            .iter()
                            .find(|(o, _)| *o == earlier)
                            .map(|(_, b)| *b)
                            .unwrap_or(0);
                        let both = cur & prev;
                        if both != 0 {
                            stop = Some(bits_alert(both));
                        }
                    }
                }
                while self
                    .history
                    .front()
                    .is_some_and(|(o, _)| *o + self.plan.affirm < self.observed)
                {
                    self.history.pop_front();
                }
                self.history.push_back((self.observed, cur));
                stop
            }
        };

        match stop {
            Some(status) => (LookOutcome::Stop(status), Some(est)),
            None => (LookOutcome::Continue, Some(est)),
        }
    }

    /// Enroll one subject: assign an arm, draw the outcome, queue it behind
    /// the lag window.
    fn enroll<R: Rng + ?Sized>(&mut self, randomizer: &mut Randomizer, rng: &mut R) {
        let arm = randomizer.next(rng);
        let value = self.model.draw(arm, rng);
        self.pending.push_back((arm, value));
    }

    fn observe_one(&mut self) {
        let (arm, value) = self.pending.pop_front().expect("pending outcome");
        match arm {
            Arm::Control => self.control.push(value),
            Arm::Treatment => self.treatment.push(value),
        }
        self.observed += 1;
    }

    /// Observe everything still in the lag window after a stop.
    fn drain(&mut self) {
        while !self.pending.is_empty() {
            self.observe_one();
        }
    }
}

/// Simulates one monitored trial. Validates inputs; see
/// [`run_trial_monitored`] for the hot path with a prebuilt [`Monitor`].
pub fn run_trial<R: Rng + ?Sized>(
    design: &DesignSpec,
    plan: &MonitoringPlan,
    model: &OutcomeModel,
    rng: &mut R,
    options: &RunOptions,
) -> Result<TrialResult> {
    plan.validate()?;
    model.validate()?;
    let monitor = Monitor::new(design.clone());
    Ok(run_trial_monitored(&monitor, plan, model, rng, options))
}

/// Simulates one monitored trial with inputs already validated.
pub fn run_trial_monitored<R: Rng + ?Sized>(
    monitor: &Monitor,
    plan: &MonitoringPlan,
    model: &OutcomeModel,
    rng: &mut R,
    options: &RunOptions,
) -> TrialResult {
    let mut state = TrialState {
        plan,
        model,
        control: ArmStats::default(),
        treatment: ArmStats::default(),
        observed: 0,
        pending: VecDeque::with_capacity(model.lag as usize + 1),
        armed: None,
        history: VecDeque::new(),
        trace: options.trace_looks.then(Vec::new),
    };
    let mut randomizer = Randomizer::new(model.randomization);
    let mut enrolled: u32 = 0;

    let cap = match plan.cap {
        SampleCap::Limited(n) => Some(n),
        SampleCap::Unrestricted => None,
    };

    let mut stopped: Option<(StopReason, Option<Estimate>)> = None;
    let check_look = |state: &mut TrialState| -> Option<(StopReason, Option<Estimate>)> {
        let at_cap = cap == Some(state.observed) && state.pending.is_empty();
        if !state.on_schedule() && !at_cap {
            return None;
        }
        let (outcome, est) = state.look(monitor);
        match outcome {
            LookOutcome::Stop(status) => Some((StopReason::AffirmedAlert(status), est)),
            // the terminal look at the cap ends the trial either way
            LookOutcome::Continue if at_cap => Some((StopReason::CapReached, est)),
            LookOutcome::Continue => None,
        }
    };

    // enrollment phase: each enrollment past the lag window reveals one outcome
    loop {
        let enrolling = match cap {
            Some(n) => enrolled < n,
            None => state.observed < options.ceiling,
        };
        if !enrolling || stopped.is_some() {
            break;
        }
        enrolled += 1;
        state.enroll(&mut randomizer, rng);
        if state.pending.len() > model.lag as usize {
            state.observe_one();
            stopped = check_look(&mut state);
        }
    }
    // capped drain: enrollment is done but outcomes keep arriving, ending
    // with the terminal look on all enrolled outcomes
    if cap.is_some() {
        while stopped.is_none() && !state.pending.is_empty() {
            state.observe_one();
            stopped = check_look(&mut state);
        }
    }

    let (stop_reason, est_at_stop) = stopped.unwrap_or_else(|| {
        // uncapped run truncated at the ceiling
        (
            StopReason::NeverStopped,
            pooled_estimate(&state.control, &state.treatment, plan).ok(),
        )
    });

    let n_observed_at_stop = state.observed;
    state.drain();
    let n_enrolled_final = enrolled;
    debug_assert_eq!(state.observed, enrolled);

    let est_final = pooled_estimate(&state.control, &state.treatment, plan).ok();
    let conclude = |est: &Option<Estimate>| {
        est.as_ref()
            .map(|e| monitor.classify(&e.interval).expect("validated design"))
    };

    TrialResult {
        n_observed_at_stop,
        n_enrolled_final,
        stop_reason,
        interval_at_stop: est_at_stop.as_ref().map(|e| e.interval),
        interval_final: est_final.as_ref().map(|e| e.interval),
        estimate_final: est_final.as_ref().map(|e| e.estimate),
        conclusion_at_stop: conclude(&est_at_stop),
        conclusion_final: conclude(&est_final),
        per_look_reject: state.trace,
    }
}
