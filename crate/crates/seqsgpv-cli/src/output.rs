//! CSV emission with pinned column orders, plus the run metadata sidecar
//! that makes every run reconstructible: config hash, seed, workers, tool
//! version, and schema version.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use seqsgpv::calibrate::CalibrationReport;
use seqsgpv::oc::{OcSummary, ReversalTable, TrajectoryTable};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Version of the CSV column layouts below.
pub const SCHEMA_VERSION: u32 = 1;

/// Creates the output directory and proves it is writable before any
/// simulation starts.
pub fn prepare_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::Runtime(format!("cannot create output dir {}: {e}", dir.display()))
    })?;
    let probe = dir.join(".write_probe");
    std::fs::write(&probe, b"probe").map_err(|e| {
        CliError::Runtime(format!(
            "output dir {} is not writable: {e}",
            dir.display()
        ))
    })?;
    let _ = std::fs::remove_file(&probe);
    Ok(())
}

pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    std::fs::write(&path, content)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub fn sidecar_toml(config_bytes: &[u8], master_seed: u64, workers: usize) -> String {
    let digest = Sha256::digest(config_bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!(
        "schema = {SCHEMA_VERSION}\n\
         tool_version = \"{}\"\n\
         config_sha256 = \"{hex}\"\n\
         master_seed = {master_seed}\n\
         workers = {workers}\n",
        env!("CARGO_PKG_VERSION")
    )
}

// Floats are written with Rust's shortest round-trip formatting, so full
// precision survives and identical runs emit identical bytes.

pub fn simulate_csv(design: &str, summary: &OcSummary) -> String {
    let mut out = String::from(
        "design,theta,replicates,reject_rate,reject_se,inconclusive_rate,inconclusive_se,\
         ruled_out_meaningful_rate,ruled_out_meaningful_se,ruled_out_null_equiv_rate,\
         ruled_out_null_equiv_se,mild_effect_rate,mild_effect_se,stop_early_rate,stop_early_se,\
         still_running_rate,still_running_se,coverage_rate,coverage_se,\
         reversal_reject_to_accept_rate,reversal_reject_to_accept_se,\
         reversal_accept_to_reject_rate,reversal_accept_to_reject_se,\
         avg_n_observed,sd_n_observed,avg_n_enrolled,bias,bias_se\n",
    );
    for e in &summary.per_effect {
        writeln!(
            out,
            "{design},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            e.theta,
            e.replicates,
            e.reject_null_rate.value,
            e.reject_null_rate.se,
            e.inconclusive_rate.value,
            e.inconclusive_rate.se,
            e.ruled_out_meaningful_rate.value,
            e.ruled_out_meaningful_rate.se,
            e.ruled_out_null_equiv_rate.value,
            e.ruled_out_null_equiv_rate.se,
            e.mild_effect_rate.value,
            e.mild_effect_rate.se,
            e.stop_early_prob.value,
            e.stop_early_prob.se,
            e.still_running_rate.value,
            e.still_running_rate.se,
            e.coverage.value,
            e.coverage.se,
            e.reversal_reject_to_accept.value,
            e.reversal_reject_to_accept.se,
            e.reversal_accept_to_reject.value,
            e.reversal_accept_to_reject.se,
            e.avg_n_observed,
            e.sd_n_observed,
            e.avg_n_enrolled,
            e.bias,
            e.bias_se,
        )
        .unwrap();
    }
    out
}

pub fn trajectory_csv(design: &str, table: &TrajectoryTable) -> String {
    let mut out = String::from("design,W,S,A,N,type1_error,mc_se,avg_n\n");
    for r in &table.rows {
        writeln!(
            out,
            "{design},{},{},{},{},{},{},{}",
            r.wait, r.step, r.affirm, r.requested_n, r.t1e, r.se, r.avg_n
        )
        .unwrap();
    }
    out
}

pub fn reversals_csv(design: &str, table: &ReversalTable) -> String {
    let mut out = String::from(
        "design,lag,reject_to_accept,reject_to_accept_se,accept_to_reject,accept_to_reject_se,\
         total,total_se,reject_rate_at_stop,avg_n_observed,avg_n_enrolled\n",
    );
    for r in &table.rows {
        writeln!(
            out,
            "{design},{},{},{},{},{},{},{},{},{},{}",
            r.lag,
            r.reject_to_accept.value,
            r.reject_to_accept.se,
            r.accept_to_reject.value,
            r.accept_to_reject.se,
            r.total.value,
            r.total.se,
            r.reject_rate_at_stop.value,
            r.avg_n_observed,
            r.avg_n_enrolled,
        )
        .unwrap();
    }
    out
}

pub fn calibrate_csv(design: &str, report: &CalibrationReport) -> String {
    let mut out = String::from(
        "design,alpha_target,W,analyzed_n,type1_error,mc_se,avg_n,non_monotone,chosen\n",
    );
    let chosen_wait = report.chosen.as_ref().map(|c| c.wait);
    for c in &report.cells {
        writeln!(
            out,
            "{design},{},{},{},{},{},{},{},{}",
            report.alpha_target,
            c.wait,
            c.analyzed_n,
            c.t1e,
            c.se,
            c.avg_n,
            c.non_monotone,
            chosen_wait == Some(c.wait),
        )
        .unwrap();
    }
    out
}
