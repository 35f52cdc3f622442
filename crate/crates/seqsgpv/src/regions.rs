//! Intervals on the extended real line and the second-generation p-value.
//!
//! The SGPV of an inferential interval `I` against a hypothesis region `H` is
//!
//! ```text
//!   p = (|I ∩ H| / |I|) * max(|I| / (2|H|), 1)
//! ```
//!
//! i.e. the fraction of the interval compatible with the hypothesis, with a
//! small-sample correction that halves the weight of intervals more than
//! twice as long as the region. For regions of infinite length the
//! correction term is exactly 1.
//!
//! `p = 0` means the interval and region share at most a boundary point
//! (evidence against the hypothesis); `p = 1` means the interval sits inside
//! the region and is not too long (evidence for it).
//!
//! Endpoints may be `-inf`/`+inf`; lengths and overlap follow the natural
//! extended-real arithmetic. NaN endpoints are rejected at construction.

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` on the extended real line.
///
/// Invariants enforced by [`Interval::new`]: `lo <= hi`, neither endpoint is
/// NaN, `lo < +inf`, and `hi > -inf` (so "intervals" pinned at a single
/// infinite endpoint cannot be constructed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
        {
            return Err(Error::MalformedInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Length, `+inf` if either endpoint is infinite.
    pub fn length(&self) -> f64 {
        if self.lo == f64::NEG_INFINITY || self.hi == f64::INFINITY {
            f64::INFINITY
        } else {
            self.hi - self.lo
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Length of the overlap with another interval; 0 when disjoint,
    /// and 0 when they share only an endpoint.
    pub fn overlap(&self, other: &Interval) -> f64 {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo >= hi {
            0.0
        } else if lo == f64::NEG_INFINITY || hi == f64::INFINITY {
            f64::INFINITY
        } else {
            hi - lo
        }
    }
}

/// Finite union of intervals, kept normalized: parts sorted by lower
/// endpoint, pairwise disjoint, and with touching parts merged.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    parts: Vec<Interval>,
}

impl Region {
    /// Normalizes an arbitrary list of intervals into a region: sorts,
    /// then merges any pair that overlaps or touches at an endpoint.
    pub fn new(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .unwrap()
                .then(a.hi.partial_cmp(&b.hi).unwrap())
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                    }
                }
                _ => merged.push(p),
            }
        }
        Self { parts: merged }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn length(&self) -> f64 {
        self.parts.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }
}

impl From<Interval> for Region {
    fn from(i: Interval) -> Self {
        Region { parts: vec![i] }
    }
}

/// Total length of `i ∩ r`. Disjoint parts of a normalized region cannot
/// double-count, so a plain sum is exact.
pub fn overlap_length(i: &Interval, r: &Region) -> f64 {
    r.parts.iter().map(|p| i.overlap(p)).sum()
}

/// Second-generation p-value of interval `i` against region `r`.
///
/// Errors: `i` must have positive finite length, `r` positive (possibly
/// infinite) length. The result is clamped to `[0, 1]` only to absorb
/// floating-point rounding; the formula itself cannot exceed those bounds.
pub fn sgpv(i: &Interval, r: &Region) -> Result<f64> {
    let li = i.length();
    if li == 0.0 {
        return Err(Error::DegenerateInterval);
    }
    if li == f64::INFINITY {
        return Err(Error::InfiniteInterval);
    }
    let lr = r.length();
    if lr <= 0.0 {
        return Err(Error::EmptyRegion);
    }
    let overlap = overlap_length(i, r);
    // The correction engages only when the interval is more than twice the
    // region; computing that branch directly keeps the half-overlap identity
    // exact. An infinite region never engages it.
    let p = if li > 2.0 * lr {
        overlap / (2.0 * lr)
    } else {
        overlap / li
    };
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn interval_construction_rejects_bad_endpoints() {
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Interval::new(f64::NAN, 0.0).is_err());
        assert!(Interval::new(0.0, f64::NAN).is_err());
        assert!(Interval::new(f64::INFINITY, f64::INFINITY).is_err());
        assert!(Interval::new(f64::NEG_INFINITY, f64::NEG_INFINITY).is_err());
        assert!(Interval::new(0.0, 0.0).is_ok());
        assert!(Interval::new(f64::NEG_INFINITY, f64::INFINITY).is_ok());
    }

    #[test]
    fn normalization_merges_touching_parts() {
        let r = Region::new(vec![iv(0.0, 1.0), iv(1.0, 2.0)]);
        assert_eq!(r.parts(), &[iv(0.0, 2.0)]);

        let r = Region::new(vec![iv(3.0, 4.0), iv(0.0, 1.0)]);
        assert_eq!(r.parts(), &[iv(0.0, 1.0), iv(3.0, 4.0)]);

        let r = Region::new(vec![iv(0.0, 5.0), iv(1.0, 2.0)]);
        assert_eq!(r.parts(), &[iv(0.0, 5.0)]);
    }

    #[test]
    fn lengths_handle_infinities() {
        assert_eq!(iv(f64::NEG_INFINITY, 0.5).length(), f64::INFINITY);
        assert_eq!(iv(0.5, f64::INFINITY).length(), f64::INFINITY);
        assert_eq!(iv(-1.0, 1.0).length(), 2.0);
        let rome = Region::new(vec![
            iv(f64::NEG_INFINITY, -0.5),
            iv(0.5, f64::INFINITY),
        ]);
        assert_eq!(rome.length(), f64::INFINITY);
    }

    #[test]
    fn overlap_length_examples() {
        let rope = Region::from(iv(-0.15, 0.15));
        assert!((overlap_length(&iv(0.0, 0.3), &rope) - 0.15).abs() < 1e-15);
        assert_eq!(overlap_length(&iv(0.2, 0.6), &rope), 0.0);
        let rome = Region::from(iv(0.5, f64::INFINITY));
        assert!((overlap_length(&iv(0.2, 0.6), &rome) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn tangent_intervals_have_zero_overlap() {
        let rome = Region::from(iv(0.5, f64::INFINITY));
        assert_eq!(overlap_length(&iv(0.2, 0.5), &rome), 0.0);
        assert_eq!(sgpv(&iv(0.2, 0.5), &rome).unwrap(), 0.0);
    }

    #[test]
    fn sgpv_matches_hand_arithmetic() {
        let rope = Region::from(iv(-0.15, 0.15));
        // interval inside the region and not over-long: full support
        assert_eq!(sgpv(&iv(-0.1, 0.1), &rope).unwrap(), 1.0);
        // half the interval overlaps, no correction
        assert!((sgpv(&iv(0.0, 0.3), &rope).unwrap() - 0.5).abs() < 1e-15);
        // long interval: correction kicks in, 0.15/2 * (2/0.3) = 0.5
        assert!((sgpv(&iv(-1.0, 1.0), &rope).unwrap() - 0.5).abs() < 1e-15);
        // infinite region: correction exactly 1, 0.1/0.4 = 0.25
        let rome = Region::from(iv(0.5, f64::INFINITY));
        assert!((sgpv(&iv(0.2, 0.6), &rome).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sgpv_rejects_degenerate_inputs() {
        let rope = Region::from(iv(-0.15, 0.15));
        assert_eq!(
            sgpv(&iv(0.3, 0.3), &rope),
            Err(Error::DegenerateInterval)
        );
        assert_eq!(
            sgpv(&iv(0.0, f64::INFINITY), &rope),
            Err(Error::InfiniteInterval)
        );
        assert_eq!(
            sgpv(&iv(0.0, 1.0), &Region::new(vec![])),
            Err(Error::EmptyRegion)
        );
        assert_eq!(
            sgpv(&iv(0.0, 1.0), &Region::from(iv(2.0, 2.0))),
            Err(Error::EmptyRegion)
        );
    }

    /// Monte Carlo membership check: for a finite interval, the overlap
    /// fraction equals the probability that a uniform draw from the interval
    /// lands in the region.
    #[test]
    fn overlap_agrees_with_monte_carlo_membership() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let region = Region::new(vec![iv(-0.4, -0.1), iv(0.2, 0.7), iv(1.1, 1.3)]);
        let i = iv(-0.6, 1.2);
        let n = 200_000;
        let mut hits = 0u32;
        for _ in 0..n {
            let x = rng.gen_range(i.lo()..i.hi());
            if region.contains(x) {
                hits += 1;
            }
        }
        let p_hat = f64::from(hits) / f64::from(n);
        let p = overlap_length(&i, &region) / i.length();
        let se = (p * (1.0 - p) / f64::from(n)).sqrt();
        assert!(
            (p_hat - p).abs() < 3.0 * se,
            "mc membership {p_hat} vs overlap fraction {p} (3se = {})",
            3.0 * se
        );
    }

    fn finite_interval() -> impl Strategy<Value = Interval> {
        (-50.0f64..50.0, 0.001f64..40.0).prop_map(|(lo, len)| iv(lo, lo + len))
    }

    fn finite_region() -> impl Strategy<Value = Region> {
        proptest::collection::vec((-50.0f64..50.0, 0.001f64..10.0), 1..4)
            .prop_map(|parts| {
                Region::new(parts.into_iter().map(|(lo, len)| iv(lo, lo + len)).collect())
            })
    }

    proptest! {
        #[test]
        fn sgpv_zero_iff_no_interior_overlap(i in finite_interval(), r in finite_region()) {
            let p = sgpv(&i, &r).unwrap();
            let overlap = overlap_length(&i, &r);
            prop_assert_eq!(p == 0.0, overlap == 0.0);
        }

        #[test]
        fn sgpv_one_iff_contained_and_short(i in finite_interval(), r in finite_region()) {
            let p = sgpv(&i, &r).unwrap();
            let contained = r.parts().iter().any(|part| part.lo() <= i.lo() && i.hi() <= part.hi());
            let short = i.length() <= 2.0 * r.length();
            // containment up to the rounding absorbed by the final clamp
            if p == 1.0 {
                prop_assert!(overlap_length(&i, &r) >= i.length() * (1.0 - 1e-12));
                prop_assert!(short);
            }
            if contained && short {
                prop_assert!(p > 1.0 - 1e-9);
            }
        }

        #[test]
        fn sgpv_translation_invariant(i in finite_interval(), r in finite_region(), c in -20.0f64..20.0) {
            let p = sgpv(&i, &r).unwrap();
            let i2 = iv(i.lo() + c, i.hi() + c);
            let r2 = Region::new(r.parts().iter().map(|p| iv(p.lo() + c, p.hi() + c)).collect());
            let p2 = sgpv(&i2, &r2).unwrap();
            prop_assert!((p - p2).abs() < 1e-9, "p={p} p2={p2}");
        }

        #[test]
        fn sgpv_scale_invariant(i in finite_interval(), r in finite_region(), s in 0.1f64..10.0) {
            let p = sgpv(&i, &r).unwrap();
            let i2 = iv(i.lo() * s, i.hi() * s);
            let r2 = Region::new(r.parts().iter().map(|p| iv(p.lo() * s, p.hi() * s)).collect());
            let p2 = sgpv(&i2, &r2).unwrap();
            prop_assert!((p - p2).abs() < 1e-9, "p={p} p2={p2}");
        }

        #[test]
        fn long_interval_sgpv_is_overlap_over_twice_region(i in finite_interval(), r in finite_region()) {
            // when |I| > 2|H| the formula reduces to |I∩H| / (2|H|) exactly
            if i.length() > 2.0 * r.length() {
                let p = sgpv(&i, &r).unwrap();
                let expect = overlap_length(&i, &r) / (2.0 * r.length());
                prop_assert!((p - expect).abs() < 1e-12);
            }
        }
    }
}
