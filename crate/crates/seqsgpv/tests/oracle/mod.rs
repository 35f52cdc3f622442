//! Brute-force reference implementation of a monitored trial.
//!
//! Rescans every data prefix from scratch with textbook two-pass statistics,
//! evaluates alerts with plain interval-position predicates, and replays the
//! affirmation rules over the complete list of look results. Quadratic and
//! allocation-happy on purpose: it shares none of the engine's incremental
//! state machinery.

use seqsgpv::{AlertStatus, ConclusionCategory, StopReason};

/// Two-sided 97.5% standard normal quantile, from published tables.
pub const Z_975: f64 = 1.959963984540054;

/// Region layout spelled out as raw bounds, one variant per design shape.
#[derive(Debug, Clone, Copy)]
pub enum OracleDesign {
    /// Rope `[l1, g1]`, rome `(-inf, l2] u [g2, inf)`.
    TwoSidedPrism { l2: f64, l1: f64, g1: f64, g2: f64 },
    /// Rowpe `(-inf, g1]`, rome `[g2, inf)`.
    OneSidedPosPrism { g1: f64, g2: f64 },
    /// Rowpe `[l1, inf)`, rome `(-inf, l2]`.
    OneSidedNegPrism { l1: f64, l2: f64 },
    /// Single rope `[r1, r2]` monitored for exclusion and support.
    RopeOnly { r1: f64, r2: f64 },
    /// Null region `(-inf, null]`, meaningful region `[d1, inf)`.
    RoePos { null: f64, d1: f64 },
}

/// Zero-overlap and containment facts for the two monitored regions.
/// An interval is "out" of a region when they share no interior point and
/// "in" one when fully contained; both give exact sgpv values 0 and 1.
struct RegionFacts {
    out_null: bool,
    in_null: bool,
    out_meaningful: bool,
    in_meaningful: bool,
}

impl OracleDesign {
    fn facts(&self, lo: f64, hi: f64) -> RegionFacts {
        match *self {
            OracleDesign::TwoSidedPrism { l2, l1, g1, g2 } => RegionFacts {
                out_null: hi <= l1 || lo >= g1,
                in_null: l1 <= lo && hi <= g1,
                out_meaningful: lo >= l2 && hi <= g2,
                in_meaningful: hi <= l2 || lo >= g2,
            },
            OracleDesign::OneSidedPosPrism { g1, g2 } => RegionFacts {
                out_null: lo >= g1,
                in_null: hi <= g1,
                out_meaningful: hi <= g2,
                in_meaningful: lo >= g2,
            },
            OracleDesign::OneSidedNegPrism { l1, l2 } => RegionFacts {
                out_null: hi <= l1,
                in_null: lo >= l1,
                out_meaningful: lo >= l2,
                in_meaningful: hi <= l2,
            },
            OracleDesign::RopeOnly { r1, r2 } => {
                let out = hi <= r1 || lo >= r2;
                let contained = r1 <= lo && hi <= r2;
                RegionFacts {
                    out_null: out,
                    in_null: contained,
                    out_meaningful: out,
                    in_meaningful: contained,
                }
            }
            OracleDesign::RoePos { null, d1 } => RegionFacts {
                out_null: lo >= null,
                in_null: hi <= null,
                out_meaningful: hi <= d1,
                in_meaningful: lo >= d1,
            },
        }
    }

    fn alert(&self, lo: f64, hi: f64) -> AlertStatus {
        let f = self.facts(lo, hi);
        if matches!(self, OracleDesign::RopeOnly { .. }) {
            return if f.out_null {
                AlertStatus::NonRope
            } else if f.in_null {
                AlertStatus::RopeSupported
            } else {
                AlertStatus::None
            };
        }
        match (f.out_null, f.out_meaningful) {
            (true, true) => AlertStatus::Both,
            (true, false) => AlertStatus::NonRope,
            (false, true) => AlertStatus::NonRome,
            (false, false) => AlertStatus::None,
        }
    }

    fn category(&self, lo: f64, hi: f64) -> ConclusionCategory {
        let f = self.facts(lo, hi);
        if matches!(self, OracleDesign::RopeOnly { .. }) {
            return if f.out_null {
                ConclusionCategory::RuledOutNullEquivalent
            } else if f.in_null {
                ConclusionCategory::RuledOutMeaningful
            } else {
                ConclusionCategory::Inconclusive
            };
        }
        match (f.out_null, f.out_meaningful) {
            (true, true) => ConclusionCategory::MildEffect,
            (true, false) if f.in_meaningful => ConclusionCategory::RuledOutNullEquivalent,
            (false, true) if f.in_null => ConclusionCategory::RuledOutMeaningful,
            _ => ConclusionCategory::Inconclusive,
        }
    }

    fn reject_null(&self, lo: f64, hi: f64) -> bool {
        match *self {
            OracleDesign::TwoSidedPrism { .. } | OracleDesign::RopeOnly { .. } => {
                lo > 0.0 || hi < 0.0
            }
            OracleDesign::OneSidedPosPrism { .. } => lo > 0.0,
            OracleDesign::OneSidedNegPrism { .. } => hi < 0.0,
            OracleDesign::RoePos { null, .. } => lo > null,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleParams {
    pub wait: u32,
    pub step: u32,
    pub affirm: u32,
    pub cap: u32,
    pub lag: u32,
    pub backward: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCall {
    pub category: ConclusionCategory,
    pub reject_null: bool,
}

#[derive(Debug, Clone)]
pub struct OracleVerdict {
    pub stop_reason: StopReason,
    pub n_observed_at_stop: u32,
    pub n_enrolled_final: u32,
    pub interval_at_stop: Option<(f64, f64)>,
    pub call_at_stop: Option<OracleCall>,
    pub call_final: Option<OracleCall>,
    pub estimate_final: Option<f64>,
}

/// Two-pass pooled interval over the first `o` subjects of the stream.
/// Returns `(estimate, lo, hi)` or `None` when inestimable.
fn interval(stream: &[(bool, f64)], o: usize) -> Option<(f64, f64, f64)> {
    let control: Vec<f64> = stream[..o].iter().filter(|(t, _)| !t).map(|(_, v)| *v).collect();
    let treated: Vec<f64> = stream[..o].iter().filter(|(t, _)| *t).map(|(_, v)| *v).collect();
    if control.len() < 2 || treated.len() < 2 {
        return None;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let ss = |v: &[f64], m: f64| v.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    let (mc, mt) = (mean(&control), mean(&treated));
    let df = (control.len() + treated.len() - 2) as f64;
    let pooled_var = (ss(&control, mc) + ss(&treated, mt)) / df;
    if !(pooled_var > 0.0) {
        return None;
    }
    let est = mt - mc;
    let hw = Z_975
        * pooled_var.sqrt()
        * (1.0 / control.len() as f64 + 1.0 / treated.len() as f64).sqrt();
    Some((est, est - hw, est + hw))
}

fn bits(status: AlertStatus) -> u8 {
    match status {
        AlertStatus::None => 0,
        AlertStatus::NonRope => 1,
        AlertStatus::NonRome => 2,
        AlertStatus::Both => 3,
        AlertStatus::RopeSupported => 4,
    }
}

fn from_bits(b: u8) -> AlertStatus {
    match b {
        1 => AlertStatus::NonRope,
        2 => AlertStatus::NonRome,
        3 => AlertStatus::Both,
        4 => AlertStatus::RopeSupported,
        _ => panic!("not an alert: {b}"),
    }
}

/// Replays a whole trial from a recorded outcome stream. The stream holds
/// one `(treatment, value)` entry per enrollable subject, in subject order;
/// its length is the enrollment cap.
pub fn run_oracle(
    stream: &[(bool, f64)],
    design: &OracleDesign,
    p: &OracleParams,
) -> OracleVerdict {
    let cap = p.cap;
    assert_eq!(stream.len(), cap as usize, "stream must cover the cap");

    // every scheduled look up to the cap, plus the terminal look at the cap
    let mut look_ns: Vec<u32> = (p.wait..=cap).filter(|o| (o - p.wait) % p.step == 0).collect();
    if look_ns.last() != Some(&cap) {
        look_ns.push(cap);
    }
    let looks: Vec<(u32, Option<(f64, f64, f64)>)> = look_ns
        .iter()
        .map(|&o| (o, interval(stream, o as usize)))
        .collect();

    // affirmation replay over the look list; inestimable looks carry no
    // alert and never touch the affirmation state
    let mut stop: Option<(u32, AlertStatus, Option<(f64, f64, f64)>)> = None;
    if p.backward {
        let mut seen: Vec<(u32, u8)> = Vec::new();
        for &(o, eval) in &looks {
            let Some((_, lo, hi)) = eval else { continue };
            let cur = bits(design.alert(lo, hi));
            if cur != 0 {
                if p.affirm == 0 {
                    stop = Some((o, from_bits(cur), eval));
                    break;
                }
                if o >= p.affirm {
                    let prev = seen
                        .iter()
                        .find(|(po, _)| *po == o - p.affirm)
                        .map_or(0, |(_, b)| *b);
                    if cur & prev != 0 {
                        stop = Some((o, from_bits(cur & prev), eval));
                        break;
                    }
                }
            }
            seen.push((o, cur));
        }
    } else {
        let mut armed: Option<(u8, u32)> = None;
        for &(o, eval) in &looks {
            let Some((_, lo, hi)) = eval else { continue };
            let cur = bits(design.alert(lo, hi));
            if p.affirm == 0 {
                if cur != 0 {
                    stop = Some((o, from_bits(cur), eval));
                    break;
                }
                continue;
            }
            match armed {
                None => {
                    if cur != 0 {
                        armed = Some((cur, o + p.affirm));
                    }
                }
                Some((armed_bits, target)) if o >= target => {
                    if cur & armed_bits != 0 {
                        stop = Some((o, from_bits(cur & armed_bits), eval));
                        break;
                    }
                    armed = if cur != 0 { Some((cur, o + p.affirm)) } else { None };
                }
                Some(_) => {}
            }
        }
    }

    let (stop_reason, n_observed_at_stop, eval_at_stop) = match stop {
        Some((o, status, eval)) => (StopReason::AffirmedAlert(status), o, eval),
        None => (StopReason::CapReached, cap, looks.last().unwrap().1),
    };

    let n_enrolled_final = (n_observed_at_stop + p.lag).min(cap);
    let eval_final = interval(stream, n_enrolled_final as usize);
    let call = |eval: Option<(f64, f64, f64)>| {
        eval.map(|(_, lo, hi)| OracleCall {
            category: design.category(lo, hi),
            reject_null: design.reject_null(lo, hi),
        })
    };

    OracleVerdict {
        stop_reason,
        n_observed_at_stop,
        n_enrolled_final,
        interval_at_stop: eval_at_stop.map(|(_, lo, hi)| (lo, hi)),
        call_at_stop: call(eval_at_stop),
        call_final: call(eval_final),
        estimate_final: eval_final.map(|(est, _, _)| est),
    }
}
