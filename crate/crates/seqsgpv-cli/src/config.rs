//! Config file loading. Keys mirror the library types field for field; every
//! key is optional at the parse layer so that all missing or invalid entries
//! can be reported together, with their paths, in a single error.

use std::path::Path;

use serde::{Deserialize, Serialize};
use seqsgpv::engine::{
    AffirmMode, IntervalFamily, MonitoringPlan, OutcomeModel, RandomizationScheme, SampleCap,
    DEFAULT_CEILING,
};
use seqsgpv::{DesignSpec, Direction, Interval, PrismSpec};

use crate::CliError;

/// Which subcommand the config is being loaded for; decides the required
/// sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Sgpv,
    Simulate,
    Trajectory,
    Reversals,
    Calibrate,
}

/// Enrollment cap as written in the config: a number or `"unrestricted"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum CapField {
    Limit(u32),
    Word(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDesign {
    kind: Option<String>,
    direction: Option<String>,
    equiv_bound: Option<f64>,
    meaningful_bound: Option<f64>,
    lower_meaningful: Option<f64>,
    lower_equiv: Option<f64>,
    upper_equiv: Option<f64>,
    upper_meaningful: Option<f64>,
    rope: Option<[f64; 2]>,
    null: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    wait: Option<u32>,
    step: Option<u32>,
    affirm: Option<u32>,
    cap: Option<CapField>,
    affirm_mode: Option<String>,
    interval_level: Option<f64>,
    interval_family: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    outcome: Option<String>,
    theta: Option<f64>,
    sd: Option<f64>,
    lag: Option<u32>,
    randomization: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    master_seed: Option<u64>,
    replicates: Option<u32>,
    workers: Option<usize>,
    ceiling: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSgpv {
    interval: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulate {
    effects: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrajectory {
    w_grid: Option<Vec<u32>>,
    n_grid: Option<Vec<u32>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReversals {
    lag_grid: Option<Vec<u32>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibrate {
    alpha_target: Option<f64>,
    w_grid: Option<Vec<u32>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    design: Option<RawDesign>,
    plan: Option<RawPlan>,
    model: Option<RawModel>,
    run: Option<RawRun>,
    sgpv: Option<RawSgpv>,
    simulate: Option<RawSimulate>,
    trajectory: Option<RawTrajectory>,
    reversals: Option<RawReversals>,
    calibrate: Option<RawCalibrate>,
}

/// Outcome model minus the bootstrap pool, which arrives separately as a
/// data file.
#[derive(Debug, Clone, PartialEq)]
pub enum OutcomeSpec {
    Normal { theta: f64, sd: f64 },
    Bootstrap { theta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub outcome: OutcomeSpec,
    pub lag: u32,
    pub randomization: RandomizationScheme,
}

impl ModelSpec {
    pub fn build(&self, pool: Option<Vec<f64>>) -> Result<OutcomeModel, CliError> {
        let model = match self.outcome {
            OutcomeSpec::Normal { theta, sd } => {
                if pool.is_some() {
                    return Err(CliError::Config(
                        "--pool was given but model.outcome is \"normal\"".into(),
                    ));
                }
                OutcomeModel::normal(theta, sd)
            }
            OutcomeSpec::Bootstrap { theta } => {
                let pool = pool.ok_or_else(|| {
                    CliError::Config("model.outcome \"bootstrap\" needs --pool <path>".into())
                })?;
                OutcomeModel::bootstrap(pool, theta)
            }
        };
        let model = model
            .with_lag(self.lag)
            .with_randomization(self.randomization);
        model
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(model)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub master_seed: u64,
    pub replicates: Option<u32>,
    pub workers: usize,
    pub ceiling: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySection {
    pub w_grid: Vec<u32>,
    pub n_grid: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrateSection {
    pub alpha_target: f64,
    pub w_grid: Vec<u32>,
}

/// Fully resolved run specification with defaults filled. Sections the
/// subcommand does not need stay `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub design: Option<DesignSpec>,
    pub plan: Option<MonitoringPlan>,
    pub model: Option<ModelSpec>,
    pub run: Option<RunSpec>,
    pub sgpv_interval: Option<Interval>,
    pub effects: Option<Vec<f64>>,
    pub trajectory: Option<TrajectorySection>,
    pub lag_grid: Option<Vec<u32>>,
    pub calibrate: Option<CalibrateSection>,
}

pub struct LoadedConfig {
    /// Raw file bytes, hashed into the run metadata sidecar.
    pub raw_bytes: Vec<u8>,
    pub resolved: Resolved,
}

/// Collects every missing key and invariant violation before failing.
#[derive(Default)]
struct Check {
    missing: Vec<String>,
    faults: Vec<String>,
}

impl Check {
    fn need<T: Clone>(&mut self, path: &str, value: &Option<T>) -> Option<T> {
        if value.is_none() {
            self.missing.push(path.to_string());
        }
        value.clone()
    }

    fn fault(&mut self, msg: String) {
        self.faults.push(msg);
    }

    fn finish(self) -> Result<(), CliError> {
        if self.missing.is_empty() && self.faults.is_empty() {
            return Ok(());
        }
        let mut lines = Vec::new();
        if !self.missing.is_empty() {
            lines.push(format!("missing keys: {}", self.missing.join(", ")));
        }
        lines.extend(self.faults);
        Err(CliError::Config(lines.join("\n")))
    }
}

pub fn load(path: &Path, kind: RunKind) -> Result<LoadedConfig, CliError> {
    let raw_bytes = std::fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&raw_bytes)
        .map_err(|_| CliError::Config(format!("config {} is not UTF-8", path.display())))?;
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| CliError::Config(format!("config parse error: {e}")))?;
    let resolved = resolve(&raw, kind)?;
    Ok(LoadedConfig {
        raw_bytes,
        resolved,
    })
}

#[cfg(test)]
pub fn parse_str(text: &str, kind: RunKind) -> Result<Resolved, CliError> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| CliError::Config(format!("config parse error: {e}")))?;
    resolve(&raw, kind)
}

fn resolve(raw: &RawConfig, kind: RunKind) -> Result<Resolved, CliError> {
    let mut c = Check::default();
    let needs_run = kind != RunKind::Sgpv;

    let design = match &raw.design {
        Some(d) => resolve_design(d, &mut c),
        None => {
            c.missing.push("[design]".into());
            None
        }
    };
    let plan = match &raw.plan {
        Some(p) => resolve_plan(p, &mut c),
        None if needs_run => {
            c.missing.push("[plan]".into());
            None
        }
        None => None,
    };
    let model = match &raw.model {
        Some(m) => resolve_model(m, &mut c),
        None if needs_run => {
            c.missing.push("[model]".into());
            None
        }
        None => None,
    };
    let run = match &raw.run {
        Some(r) => resolve_run(r, needs_run, &mut c),
        None if needs_run => {
            c.missing.push("[run]".into());
            None
        }
        None => None,
    };

    let sgpv_interval = match &raw.sgpv {
        Some(s) => match c.need("sgpv.interval", &s.interval) {
            Some([lo, hi]) => match Interval::new(lo, hi) {
                Ok(iv) => Some(iv),
                Err(e) => {
                    c.fault(format!("sgpv.interval: {e}"));
                    None
                }
            },
            None => None,
        },
        None if kind == RunKind::Sgpv => {
            c.missing.push("[sgpv]".into());
            None
        }
        None => None,
    };

    let effects = match &raw.simulate {
        Some(s) => match c.need("simulate.effects", &s.effects) {
            Some(effects) if effects.is_empty() => {
                c.fault("simulate.effects must be nonempty".into());
                None
            }
            other => other,
        },
        None if kind == RunKind::Simulate => {
            c.missing.push("[simulate]".into());
            None
        }
        None => None,
    };

    let trajectory = match &raw.trajectory {
        Some(t) => {
            let w_grid = match c.need("trajectory.w_grid", &t.w_grid) {
                Some(g) if g.is_empty() => {
                    c.fault("trajectory.w_grid must be nonempty".into());
                    None
                }
                other => other,
            };
            w_grid.map(|w_grid| TrajectorySection {
                w_grid,
                n_grid: t.n_grid.clone(),
            })
        }
        None if kind == RunKind::Trajectory => {
            c.missing.push("[trajectory]".into());
            None
        }
        None => None,
    };

    let lag_grid = match &raw.reversals {
        Some(r) => match c.need("reversals.lag_grid", &r.lag_grid) {
            Some(g) if g.is_empty() => {
                c.fault("reversals.lag_grid must be nonempty".into());
                None
            }
            other => other,
        },
        None if kind == RunKind::Reversals => {
            c.missing.push("[reversals]".into());
            None
        }
        None => None,
    };

    let calibrate = match &raw.calibrate {
        Some(cal) => {
            let alpha_target = c.need("calibrate.alpha_target", &cal.alpha_target);
            let w_grid = match c.need("calibrate.w_grid", &cal.w_grid) {
                Some(g) if g.is_empty() => {
                    c.fault("calibrate.w_grid must be nonempty".into());
                    None
                }
                other => other,
            };
            match (alpha_target, w_grid) {
                (Some(alpha_target), Some(w_grid)) => Some(CalibrateSection {
                    alpha_target,
                    w_grid,
                }),
                _ => None,
            }
        }
        None if kind == RunKind::Calibrate => {
            c.missing.push("[calibrate]".into());
            None
        }
        None => None,
    };

    c.finish()?;
    Ok(Resolved {
        design,
        plan,
        model,
        run,
        sgpv_interval,
        effects,
        trajectory,
        lag_grid,
        calibrate,
    })
}

fn parse_direction(value: &str, c: &mut Check) -> Option<Direction> {
    match value {
        "benefit_positive" => Some(Direction::BenefitPositive),
        "benefit_negative" => Some(Direction::BenefitNegative),
        other => {
            c.fault(format!(
                "design.direction \"{other}\" is not benefit_positive or benefit_negative"
            ));
            None
        }
    }
}

fn forbid(c: &mut Check, kind: &str, keys: &[(&str, bool)]) {
    for (name, set) in keys {
        if *set {
            c.fault(format!("design.{name} does not apply to kind \"{kind}\""));
        }
    }
}

fn resolve_design(d: &RawDesign, c: &mut Check) -> Option<DesignSpec> {
    let kind = c.need("design.kind", &d.kind)?;
    match kind.as_str() {
        "prism_two_sided" => {
            forbid(
                c,
                &kind,
                &[
                    ("direction", d.direction.is_some()),
                    ("equiv_bound", d.equiv_bound.is_some()),
                    ("meaningful_bound", d.meaningful_bound.is_some()),
                    ("rope", d.rope.is_some()),
                    ("null", d.null.is_some()),
                ],
            );
            let lm = c.need("design.lower_meaningful", &d.lower_meaningful);
            let le = c.need("design.lower_equiv", &d.lower_equiv);
            let ue = c.need("design.upper_equiv", &d.upper_equiv);
            let um = c.need("design.upper_meaningful", &d.upper_meaningful);
            let (lm, le, ue, um) = (lm?, le?, ue?, um?);
            match PrismSpec::two_sided(lm, le, ue, um) {
                Ok(spec) => Some(DesignSpec::prism(spec)),
                Err(e) => {
                    c.fault(format!("[design] {e}"));
                    None
                }
            }
        }
        "prism_one_sided" => {
            forbid(
                c,
                &kind,
                &[
                    ("lower_meaningful", d.lower_meaningful.is_some()),
                    ("lower_equiv", d.lower_equiv.is_some()),
                    ("upper_equiv", d.upper_equiv.is_some()),
                    ("upper_meaningful", d.upper_meaningful.is_some()),
                    ("rope", d.rope.is_some()),
                    ("null", d.null.is_some()),
                ],
            );
            let direction = c.need("design.direction", &d.direction);
            let equiv = c.need("design.equiv_bound", &d.equiv_bound);
            let meaningful = c.need("design.meaningful_bound", &d.meaningful_bound);
            let direction = parse_direction(&direction?, c)?;
            match PrismSpec::one_sided(direction, equiv?, meaningful?) {
                Ok(spec) => Some(DesignSpec::prism(spec)),
                Err(e) => {
                    c.fault(format!("[design] {e}"));
                    None
                }
            }
        }
        "rope_only" => {
            forbid(
                c,
                &kind,
                &[
                    ("direction", d.direction.is_some()),
                    ("equiv_bound", d.equiv_bound.is_some()),
                    ("meaningful_bound", d.meaningful_bound.is_some()),
                    ("lower_meaningful", d.lower_meaningful.is_some()),
                    ("lower_equiv", d.lower_equiv.is_some()),
                    ("upper_equiv", d.upper_equiv.is_some()),
                    ("upper_meaningful", d.upper_meaningful.is_some()),
                    ("null", d.null.is_some()),
                ],
            );
            let [lo, hi] = c.need("design.rope", &d.rope)?;
            match DesignSpec::rope_only(lo, hi) {
                Ok(spec) => Some(spec),
                Err(e) => {
                    c.fault(format!("[design] {e}"));
                    None
                }
            }
        }
        "null_bound_roe" => {
            forbid(
                c,
                &kind,
                &[
                    ("equiv_bound", d.equiv_bound.is_some()),
                    ("lower_meaningful", d.lower_meaningful.is_some()),
                    ("lower_equiv", d.lower_equiv.is_some()),
                    ("upper_equiv", d.upper_equiv.is_some()),
                    ("upper_meaningful", d.upper_meaningful.is_some()),
                    ("rope", d.rope.is_some()),
                ],
            );
            let null = c.need("design.null", &d.null);
            let meaningful = c.need("design.meaningful_bound", &d.meaningful_bound);
            let direction = c.need("design.direction", &d.direction);
            let direction = parse_direction(&direction?, c)?;
            match DesignSpec::null_bound_roe(null?, meaningful?, direction) {
                Ok(spec) => Some(spec),
                Err(e) => {
                    c.fault(format!("[design] {e}"));
                    None
                }
            }
        }
        other => {
            c.fault(format!(
                "design.kind \"{other}\" is not one of prism_two_sided, prism_one_sided, \
                 rope_only, null_bound_roe"
            ));
            None
        }
    }
}

fn resolve_plan(p: &RawPlan, c: &mut Check) -> Option<MonitoringPlan> {
    let wait = c.need("plan.wait", &p.wait);
    let step = c.need("plan.step", &p.step);
    let affirm = c.need("plan.affirm", &p.affirm);
    let cap = match c.need("plan.cap", &p.cap) {
        Some(CapField::Limit(n)) => Some(SampleCap::Limited(n)),
        Some(CapField::Word(w)) if w == "unrestricted" => Some(SampleCap::Unrestricted),
        Some(CapField::Word(w)) => {
            c.fault(format!(
                "plan.cap \"{w}\" must be a sample size or \"unrestricted\""
            ));
            None
        }
        None => None,
    };
    let affirm_mode = match p.affirm_mode.as_deref() {
        None | Some("forward") => Some(AffirmMode::Forward),
        Some("backward") => Some(AffirmMode::Backward),
        Some(other) => {
            c.fault(format!(
                "plan.affirm_mode \"{other}\" is not forward or backward"
            ));
            None
        }
    };
    let interval_family = match p.interval_family.as_deref() {
        None | Some("z_pooled") => Some(IntervalFamily::ZPooled),
        Some("t_pooled") => Some(IntervalFamily::TPooled),
        Some(other) => {
            c.fault(format!(
                "plan.interval_family \"{other}\" is not z_pooled or t_pooled"
            ));
            None
        }
    };
    let level = p.interval_level.unwrap_or(0.95);

    let plan = MonitoringPlan::new(wait?, step?, affirm?, cap?);
    match plan {
        Ok(plan) => {
            let plan = plan
                .with_affirm_mode(affirm_mode?)
                .with_interval_level(level)
                .with_interval_family(interval_family?);
            if let Err(e) = plan.validate() {
                c.fault(format!("[plan] {e}"));
                return None;
            }
            Some(plan)
        }
        Err(e) => {
            c.fault(format!("[plan] {e}"));
            None
        }
    }
}

fn resolve_model(m: &RawModel, c: &mut Check) -> Option<ModelSpec> {
    let outcome = c.need("model.outcome", &m.outcome);
    let theta = c.need("model.theta", &m.theta);
    let lag = m.lag.unwrap_or(0);
    let randomization = match m.randomization.as_deref() {
        None | Some("alternating") => Some(RandomizationScheme::Alternating),
        Some("block_two") => Some(RandomizationScheme::BlockTwo),
        Some(other) => {
            c.fault(format!(
                "model.randomization \"{other}\" is not alternating or block_two"
            ));
            None
        }
    };
    let outcome = match outcome?.as_str() {
        "normal" => {
            let sd = c.need("model.sd", &m.sd);
            Some(OutcomeSpec::Normal {
                theta: theta?,
                sd: sd?,
            })
        }
        "bootstrap" => {
            if m.sd.is_some() {
                c.fault("model.sd does not apply to outcome \"bootstrap\"".into());
            }
            Some(OutcomeSpec::Bootstrap { theta: theta? })
        }
        other => {
            c.fault(format!(
                "model.outcome \"{other}\" is not normal or bootstrap"
            ));
            None
        }
    };
    Some(ModelSpec {
        outcome: outcome?,
        lag,
        randomization: randomization?,
    })
}

fn resolve_run(r: &RawRun, needs_replicates: bool, c: &mut Check) -> Option<RunSpec> {
    let master_seed = c.need("run.master_seed", &r.master_seed);
    if needs_replicates && r.replicates.is_none() {
        c.missing.push("run.replicates".into());
    }
    let workers = match r.workers {
        Some(0) => {
            c.fault("run.workers must be at least 1".into());
            None
        }
        Some(w) => Some(w),
        None => Some(default_workers()),
    };
    Some(RunSpec {
        master_seed: master_seed?,
        replicates: r.replicates,
        workers: workers?,
        ceiling: r.ceiling.unwrap_or(DEFAULT_CEILING),
    })
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

// ---------- effective config: the resolved specification re-emitted with
// every default explicit, re-parseable to the identical specification

#[derive(Serialize)]
struct EffDesign {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equiv_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meaningful_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_meaningful: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_equiv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper_equiv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper_meaningful: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rope: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    null: Option<f64>,
}

#[derive(Serialize)]
struct EffPlan {
    wait: u32,
    step: u32,
    affirm: u32,
    cap: CapField,
    affirm_mode: &'static str,
    interval_level: f64,
    interval_family: &'static str,
}

#[derive(Serialize)]
struct EffModel {
    outcome: &'static str,
    theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sd: Option<f64>,
    lag: u32,
    randomization: &'static str,
}

#[derive(Serialize)]
struct EffRun {
    master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    replicates: Option<u32>,
    workers: usize,
    ceiling: u32,
}

#[derive(Serialize)]
struct EffSgpv {
    interval: [f64; 2],
}

#[derive(Serialize)]
struct EffSimulate {
    effects: Vec<f64>,
}

#[derive(Serialize)]
struct EffTrajectory {
    w_grid: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_grid: Option<Vec<u32>>,
}

#[derive(Serialize)]
struct EffReversals {
    lag_grid: Vec<u32>,
}

#[derive(Serialize)]
struct EffCalibrate {
    alpha_target: f64,
    w_grid: Vec<u32>,
}

#[derive(Serialize)]
struct EffConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    design: Option<EffDesign>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<EffPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<EffModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    run: Option<EffRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sgpv: Option<EffSgpv>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulate: Option<EffSimulate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trajectory: Option<EffTrajectory>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reversals: Option<EffReversals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibrate: Option<EffCalibrate>,
}

fn direction_word(d: Direction) -> &'static str {
    match d {
        Direction::BenefitPositive => "benefit_positive",
        Direction::BenefitNegative => "benefit_negative",
    }
}

fn eff_design(design: &DesignSpec) -> EffDesign {
    let mut e = EffDesign {
        kind: "",
        direction: None,
        equiv_bound: None,
        meaningful_bound: None,
        lower_meaningful: None,
        lower_equiv: None,
        upper_equiv: None,
        upper_meaningful: None,
        rope: None,
        null: None,
    };
    match design {
        DesignSpec::Prism(PrismSpec::TwoSided {
            lower_meaningful,
            lower_equiv,
            upper_equiv,
            upper_meaningful,
        }) => {
            e.kind = "prism_two_sided";
            e.lower_meaningful = Some(*lower_meaningful);
            e.lower_equiv = Some(*lower_equiv);
            e.upper_equiv = Some(*upper_equiv);
            e.upper_meaningful = Some(*upper_meaningful);
        }
        DesignSpec::Prism(PrismSpec::OneSided {
            direction,
            equiv_bound,
            meaningful_bound,
        }) => {
            e.kind = "prism_one_sided";
            e.direction = Some(direction_word(*direction));
            e.equiv_bound = Some(*equiv_bound);
            e.meaningful_bound = Some(*meaningful_bound);
        }
        DesignSpec::RopeOnly { rope } => {
            e.kind = "rope_only";
            e.rope = Some([rope.lo(), rope.hi()]);
        }
        DesignSpec::NullBoundRoe {
            null,
            meaningful_bound,
            direction,
        } => {
            e.kind = "null_bound_roe";
            e.null = Some(*null);
            e.meaningful_bound = Some(*meaningful_bound);
            e.direction = Some(direction_word(*direction));
        }
    }
    e
}

/// Serializes the resolved specification back to config text.
pub fn effective_toml(r: &Resolved) -> String {
    let eff = EffConfig {
        design: r.design.as_ref().map(eff_design),
        plan: r.plan.as_ref().map(|p| EffPlan {
            wait: p.wait,
            step: p.step,
            affirm: p.affirm,
            cap: match p.cap {
                SampleCap::Limited(n) => CapField::Limit(n),
                SampleCap::Unrestricted => CapField::Word("unrestricted".into()),
            },
            affirm_mode: match p.affirm_mode {
                AffirmMode::Forward => "forward",
                AffirmMode::Backward => "backward",
            },
            interval_level: p.interval_level,
            interval_family: match p.interval_family {
                IntervalFamily::ZPooled => "z_pooled",
                IntervalFamily::TPooled => "t_pooled",
            },
        }),
        model: r.model.as_ref().map(|m| {
            let (outcome, theta, sd) = match m.outcome {
                OutcomeSpec::Normal { theta, sd } => ("normal", theta, Some(sd)),
                OutcomeSpec::Bootstrap { theta } => ("bootstrap", theta, None),
            };
            EffModel {
                outcome,
                theta,
                sd,
                lag: m.lag,
                randomization: match m.randomization {
                    RandomizationScheme::Alternating => "alternating",
                    RandomizationScheme::BlockTwo => "block_two",
                },
            }
        }),
        run: r.run.map(|run| EffRun {
            master_seed: run.master_seed,
            replicates: run.replicates,
            workers: run.workers,
            ceiling: run.ceiling,
        }),
        sgpv: r.sgpv_interval.map(|iv| EffSgpv {
            interval: [iv.lo(), iv.hi()],
        }),
        simulate: r.effects.clone().map(|effects| EffSimulate { effects }),
        trajectory: r.trajectory.clone().map(|t| EffTrajectory {
            w_grid: t.w_grid,
            n_grid: t.n_grid,
        }),
        reversals: r.lag_grid.clone().map(|lag_grid| EffReversals { lag_grid }),
        calibrate: r.calibrate.clone().map(|cal| EffCalibrate {
            alpha_target: cal.alpha_target,
            w_grid: cal.w_grid,
        }),
    };
    toml::to_string_pretty(&eff).expect("effective config serializes")
}
