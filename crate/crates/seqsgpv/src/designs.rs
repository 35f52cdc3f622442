//! Hypothesis designs: which regions are monitored and what an interval
//! means for them.
//!
//! Every design monitors a pair of regions. The first sits on the null side
//! (practically-equivalent or worse-than-meaningful effects), the second is
//! the meaningful side. An SGPV of zero against a region raises the
//! corresponding alert:
//!
//! * `NonRope`  — null-side region ruled out (evidence of an effect),
//! * `NonRome`  — meaningful-side region ruled out (evidence against a
//!   meaningful effect),
//! * `Both`     — interval sits strictly inside the gap between the regions,
//! * `RopeSupported` — rope-only monitoring saw sgpv = 1.
//!
//! Design variants:
//!
//! * `Prism` two-sided: rope `[δ_L1, δ_G1]` around the null plus meaningful
//!   region `(-inf, δ_L2] ∪ [δ_G2, +inf)`, with `δ_L2 <= δ_L1 < 0 < δ_G1 <= δ_G2`.
//! * `Prism` one-sided: when benefit is positive, worse-or-practically-equal
//!   region `(-inf, δ_G1]` plus meaningful region `[δ_G2, +inf)`; mirrored
//!   when benefit is negative.
//! * `RopeOnly`: a single rope around the null monitored for sgpv hitting 0
//!   (rope ruled out) or 1 (rope supported).
//! * `NullBoundRoe`: the one-sided pair with the equivalence bound placed at
//!   the null itself: `(-inf, null]` and `[δ1, +inf)` for positive benefit.
//!   Ruling out the first establishes efficacy (interval clear of the null),
//!   ruling out the second establishes futility (meaningful effect excluded).

use crate::error::{Error, Result};
use crate::regions::{sgpv, Interval, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    BenefitPositive,
    BenefitNegative,
}

/// Pre-registered effect guideposts for prism-style monitoring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrismSpec {
    TwoSided {
        lower_meaningful: f64,
        lower_equiv: f64,
        upper_equiv: f64,
        upper_meaningful: f64,
    },
    OneSided {
        direction: Direction,
        /// Boundary of the worse-or-practically-equivalent region (δ_G1 or δ_L1).
        equiv_bound: f64,
        /// Boundary of the meaningful region (δ_G2 or δ_L2).
        meaningful_bound: f64,
    },
}

impl PrismSpec {
    pub fn two_sided(
        lower_meaningful: f64,
        lower_equiv: f64,
        upper_equiv: f64,
        upper_meaningful: f64,
    ) -> Result<Self> {
        let vals = [lower_meaningful, lower_equiv, upper_equiv, upper_meaningful];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDesign("prism bounds must be finite".into()));
        }
        if !(lower_meaningful <= lower_equiv
            && lower_equiv < 0.0
            && 0.0 < upper_equiv
            && upper_equiv <= upper_meaningful)
        {
            return Err(Error::InvalidDesign(format!(
                "two-sided prism bounds must satisfy l2 <= l1 < 0 < g1 <= g2, got \
                 ({lower_meaningful}, {lower_equiv}, {upper_equiv}, {upper_meaningful})"
            )));
        }
        Ok(Self::TwoSided {
            lower_meaningful,
            lower_equiv,
            upper_equiv,
            upper_meaningful,
        })
    }

    pub fn one_sided(direction: Direction, equiv_bound: f64, meaningful_bound: f64) -> Result<Self> {
        if !equiv_bound.is_finite() || !meaningful_bound.is_finite() {
            return Err(Error::InvalidDesign("prism bounds must be finite".into()));
        }
        let ok = match direction {
            Direction::BenefitPositive => 0.0 < equiv_bound && equiv_bound <= meaningful_bound,
            Direction::BenefitNegative => meaningful_bound <= equiv_bound && equiv_bound < 0.0,
        };
        if !ok {
            return Err(Error::InvalidDesign(format!(
                "one-sided prism bounds out of order for {direction:?}: \
                 equiv {equiv_bound}, meaningful {meaningful_bound}"
            )));
        }
        Ok(Self::OneSided {
            direction,
            equiv_bound,
            meaningful_bound,
        })
    }
}

/// A monitored hypothesis design.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignSpec {
    Prism(PrismSpec),
    /// Single region of practical equivalence around the null.
    RopeOnly { rope: Interval },
    /// One-sided region of equivalence `[null, δ1]` bound to the null.
    NullBoundRoe {
        null: f64,
        meaningful_bound: f64,
        direction: Direction,
    },
}

impl DesignSpec {
    pub fn prism(spec: PrismSpec) -> Self {
        DesignSpec::Prism(spec)
    }

    pub fn rope_only(lo: f64, hi: f64) -> Result<Self> {
        let rope = Interval::new(lo, hi)?;
        if !(lo.is_finite() && hi.is_finite() && lo < 0.0 && 0.0 < hi) {
            return Err(Error::InvalidDesign(format!(
                "rope must be finite with the null in its interior, got [{lo}, {hi}]"
            )));
        }
        Ok(DesignSpec::RopeOnly { rope })
    }

    pub fn null_bound_roe(null: f64, meaningful_bound: f64, direction: Direction) -> Result<Self> {
        if !null.is_finite() || !meaningful_bound.is_finite() {
            return Err(Error::InvalidDesign("roe bounds must be finite".into()));
        }
        let ok = match direction {
            Direction::BenefitPositive => meaningful_bound > null,
            Direction::BenefitNegative => meaningful_bound < null,
        };
        if !ok {
            return Err(Error::InvalidDesign(format!(
                "roe meaningful bound {meaningful_bound} must lie on the beneficial side of the null {null}"
            )));
        }
        Ok(DesignSpec::NullBoundRoe {
            null,
            meaningful_bound,
            direction,
        })
    }

    /// True when conclusions are judged against both sides of the null.
    pub fn is_two_sided(&self) -> bool {
        matches!(
            self,
            DesignSpec::Prism(PrismSpec::TwoSided { .. }) | DesignSpec::RopeOnly { .. }
        )
    }

    /// Beneficial direction for one-sided designs, `None` for two-sided.
    pub fn direction(&self) -> Option<Direction> {
        match self {
            DesignSpec::Prism(PrismSpec::OneSided { direction, .. }) => Some(*direction),
            DesignSpec::NullBoundRoe { direction, .. } => Some(*direction),
            _ => None,
        }
    }

    /// Point null hypothesis the reject flag is judged against.
    pub fn null_point(&self) -> f64 {
        match self {
            DesignSpec::NullBoundRoe { null, .. } => *null,
            _ => 0.0,
        }
    }

    /// Compact csv-safe description, e.g. `prism1s_pos(0.15;0.5)`.
    pub fn label(&self) -> String {
        match self {
            DesignSpec::Prism(PrismSpec::TwoSided {
                lower_meaningful,
                lower_equiv,
                upper_equiv,
                upper_meaningful,
            }) => format!(
                "prism2s({lower_meaningful};{lower_equiv};{upper_equiv};{upper_meaningful})"
            ),
            DesignSpec::Prism(PrismSpec::OneSided {
                direction,
                equiv_bound,
                meaningful_bound,
            }) => {
                let d = match direction {
                    Direction::BenefitPositive => "pos",
                    Direction::BenefitNegative => "neg",
                };
                format!("prism1s_{d}({equiv_bound};{meaningful_bound})")
            }
            DesignSpec::RopeOnly { rope } => format!("rope({};{})", rope.lo(), rope.hi()),
            DesignSpec::NullBoundRoe {
                null,
                meaningful_bound,
                direction,
            } => {
                let d = match direction {
                    Direction::BenefitPositive => "pos",
                    Direction::BenefitNegative => "neg",
                };
                format!("roe_{d}({null};{meaningful_bound})")
            }
        }
    }
}

/// Alert raised by a monitoring look.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlertStatus {
    None,
    /// Null-side region ruled out.
    NonRope,
    /// Meaningful-side region ruled out.
    NonRome,
    /// Both regions ruled out at once.
    Both,
    /// Rope-only monitoring reached sgpv = 1.
    RopeSupported,
}

impl AlertStatus {
    pub fn is_alert(&self) -> bool {
        !matches!(self, AlertStatus::None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConclusionCategory {
    /// Interval inside the meaningful region: null-equivalent effects excluded.
    RuledOutNullEquivalent,
    /// Interval confined to the null side: meaningful effects excluded.
    RuledOutMeaningful,
    /// Interval inside the gap: both regions ruled out.
    MildEffect,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conclusion {
    pub category: ConclusionCategory,
    /// Two-sided designs: interval excludes the null. One-sided designs:
    /// interval lies strictly on the beneficial side of the null.
    pub reject_null: bool,
}

/// Hypothesis regions monitored by a design: `(null side, meaningful side)`.
/// Rope-only monitoring returns its rope twice.
pub fn hypothesis_regions(design: &DesignSpec) -> (Region, Region) {
    let inf = f64::INFINITY;
    let ninf = f64::NEG_INFINITY;
    let iv = |lo, hi| Interval::new(lo, hi).expect("validated design bounds");
    match design {
        DesignSpec::Prism(PrismSpec::TwoSided {
            lower_meaningful,
            lower_equiv,
            upper_equiv,
            upper_meaningful,
        }) => (
            Region::from(iv(*lower_equiv, *upper_equiv)),
            Region::new(vec![
                iv(ninf, *lower_meaningful),
                iv(*upper_meaningful, inf),
            ]),
        ),
        DesignSpec::Prism(PrismSpec::OneSided {
            direction,
            equiv_bound,
            meaningful_bound,
        }) => match direction {
            Direction::BenefitPositive => (
                Region::from(iv(ninf, *equiv_bound)),
                Region::from(iv(*meaningful_bound, inf)),
            ),
            Direction::BenefitNegative => (
                Region::from(iv(*equiv_bound, inf)),
                Region::from(iv(ninf, *meaningful_bound)),
            ),
        },
        DesignSpec::RopeOnly { rope } => (Region::from(*rope), Region::from(*rope)),
        DesignSpec::NullBoundRoe {
            null,
            meaningful_bound,
            direction,
        } => match direction {
            Direction::BenefitPositive => (
                Region::from(iv(ninf, *null)),
                Region::from(iv(*meaningful_bound, inf)),
            ),
            Direction::BenefitNegative => (
                Region::from(iv(*null, inf)),
                Region::from(iv(ninf, *meaningful_bound)),
            ),
        },
    }
}

/// A design with its regions prebuilt, for tight monitoring loops.
#[derive(Debug, Clone)]
pub struct Monitor {
    design: DesignSpec,
    null_side: Region,
    meaningful_side: Region,
}

impl Monitor {
    pub fn new(design: DesignSpec) -> Self {
        let (null_side, meaningful_side) = hypothesis_regions(&design);
        Self {
            design,
            null_side,
            meaningful_side,
        }
    }

    pub fn design(&self) -> &DesignSpec {
        &self.design
    }

    /// SGPVs against the (null-side, meaningful-side) regions.
    pub fn sgpv_pair(&self, interval: &Interval) -> Result<(f64, f64)> {
        let p1 = sgpv(interval, &self.null_side)?;
        let p2 = if matches!(self.design, DesignSpec::RopeOnly { .. }) {
            p1
        } else {
            sgpv(interval, &self.meaningful_side)?
        };
        Ok((p1, p2))
    }

    pub fn alert(&self, interval: &Interval) -> Result<AlertStatus> {
        let (p1, p2) = self.sgpv_pair(interval)?;
        Ok(match &self.design {
            DesignSpec::RopeOnly { .. } => {
                if p1 == 0.0 {
                    AlertStatus::NonRope
                } else if p1 == 1.0 {
                    AlertStatus::RopeSupported
                } else {
                    AlertStatus::None
                }
            }
            _ => match (p1 == 0.0, p2 == 0.0) {
                (true, true) => AlertStatus::Both,
                (true, false) => AlertStatus::NonRope,
                (false, true) => AlertStatus::NonRome,
                (false, false) => AlertStatus::None,
            },
        })
    }

    /// Interval strictly beyond the null in the reject sense of the design:
    /// excluding the null for two-sided designs, strictly on the beneficial
    /// side for one-sided designs.
    pub fn reject_null(&self, interval: &Interval) -> bool {
        let null = self.design.null_point();
        match self.design.direction() {
            None => interval.lo() > null || interval.hi() < null,
            Some(Direction::BenefitPositive) => interval.lo() > null,
            Some(Direction::BenefitNegative) => interval.hi() < null,
        }
    }

    pub fn classify(&self, interval: &Interval) -> Result<Conclusion> {
        let (p1, p2) = self.sgpv_pair(interval)?;
        let category = match &self.design {
            DesignSpec::RopeOnly { .. } => {
                if p1 == 0.0 {
                    ConclusionCategory::RuledOutNullEquivalent
                } else if p1 == 1.0 {
                    ConclusionCategory::RuledOutMeaningful
                } else {
                    ConclusionCategory::Inconclusive
                }
            }
            _ => match (p1 == 0.0, p2 == 0.0) {
                (true, true) => ConclusionCategory::MildEffect,
                // conclusive only when pinned inside the opposite region
                (true, false) if p2 == 1.0 => ConclusionCategory::RuledOutNullEquivalent,
                (false, true) if p1 == 1.0 => ConclusionCategory::RuledOutMeaningful,
                _ => ConclusionCategory::Inconclusive,
            },
        };
        Ok(Conclusion {
            category,
            reject_null: self.reject_null(interval),
        })
    }
}

/// One-shot alert evaluation; see [`Monitor`] for repeated use.
pub fn evaluate_alert(design: &DesignSpec, interval: &Interval) -> Result<AlertStatus> {
    Monitor::new(design.clone()).alert(interval)
}

/// One-shot conclusion classification; see [`Monitor`] for repeated use.
pub fn classify_conclusion(design: &DesignSpec, interval: &Interval) -> Result<Conclusion> {
    Monitor::new(design.clone()).classify(interval)
}
