//! Sequential monitoring of interval hypotheses with second-generation
//! p-values, plus a Monte Carlo engine for the operating characteristics of
//! the resulting designs.
//!
//! The crate is organised bottom-up:
//!
//! * [`regions`] — intervals, interval unions, and the SGPV overlap measure,
//! * [`designs`] — monitored hypothesis pairs (PRISM, rope-only, null-bound
//!   ROE), alert evaluation and end-of-trial classification,
//! * [`engine`] — a single simulated trial under a monitoring plan
//!   (wait/step/affirmation/cap) with delayed outcomes,
//! * [`oc`] — replicated trials reduced to operating characteristics,
//!   deterministically parallel,
//! * [`calibrate`] — searching monitoring frequencies for a target
//!   type I error.

#![forbid(unsafe_code)]

pub mod calibrate;
pub mod designs;
pub mod engine;
pub mod error;
pub mod oc;
pub mod regions;

pub use calibrate::{
    find_min_wait, sweep_frequencies, CalibrationCell, CalibrationConfig, CalibrationReport,
    SweepConfig, SweepRow, SweepTable,
};
pub use designs::{
    classify_conclusion, evaluate_alert, hypothesis_regions, AlertStatus, Conclusion,
    ConclusionCategory, DesignSpec, Direction, Monitor, PrismSpec,
};
pub use engine::{
    estimate_interval, run_trial, run_trial_monitored, AffirmMode, Arm, Estimate, IntervalFamily,
    MonitoringPlan, NotEstimable, OutcomeKind, OutcomeModel, RandomizationScheme, Randomizer,
    RunOptions, SampleCap, StopReason, TrialResult, DEFAULT_CEILING,
};
pub use error::{Error, Result};
pub use oc::{
    replicate_rng, reversal_analysis, simulate_oc, t1e_trajectory, EffectSummary, OcConfig,
    OcSummary, Rate, ReversalConfig, ReversalRow, ReversalTable, TrajectoryConfig, TrajectoryRow,
    TrajectoryTable,
};
pub use regions::{overlap_length, sgpv, Interval, Region};
