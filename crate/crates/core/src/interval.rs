//! Finite unions of disjoint closed rational intervals.
//!
//! All sets here are closed, so touching components merge on normalization:
//! `[a,b] ∪ [b,c] = [a,c]`. The components of a normalized set are exactly
//! its maximal intervals.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::rational::Rational;

/// Closed interval `[lo, hi]`, `lo <= hi`. Degenerate points are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, Error> {
        if lo > hi {
            return Err(Error::MalformedInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains_point(&self, p: &Rational) -> bool {
        &self.lo <= p && p <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        (&self.lo, &self.hi).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let (lo, hi) = <(Rational, Rational)>::deserialize(de)?;
        Interval::new(lo, hi).map_err(D::Error::custom)
    }
}

/// Normalized finite union of disjoint closed intervals, sorted increasing,
/// with touching components merged. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { intervals: vec![] }
    }

    /// The unit interval `[0, 1]`.
    pub fn unit() -> Self {
        IntervalSet {
            intervals: vec![Interval {
                lo: Rational::zero(),
                hi: Rational::one(),
            }],
        }
    }

    /// Sort, merge overlapping-or-touching intervals. Measure of the union is
    /// preserved; result is canonical.
    pub fn normalize(raw: Vec<Interval>) -> Self {
        let mut v = raw;
        v.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => merged.push(iv),
            }
        }
        IntervalSet { intervals: merged }
    }

    /// Checked constructor from raw `(lo, hi)` pairs.
    pub fn from_pairs(pairs: Vec<(Rational, Rational)>) -> Result<Self, Error> {
        let ivs = pairs
            .into_iter()
            .map(|(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::normalize(ivs))
    }

    /// Union of grid cells `[j*f, (j+1)*f]` for the given sorted unique cell
    /// indices; consecutive indices merge into runs.
    pub fn from_grid_cells(f: &Rational, cells: &[u64]) -> Self {
        debug_assert!(cells.windows(2).all(|w| w[0] < w[1]));
        let mut intervals: Vec<Interval> = Vec::new();
        let mut i = 0;
        while i < cells.len() {
            let start = cells[i];
            let mut end = start;
            while i + 1 < cells.len() && cells[i + 1] == end + 1 {
                end = cells[i + 1];
                i += 1;
            }
            intervals.push(Interval {
                lo: Rational::from(start) * f,
                hi: Rational::from(end + 1) * f,
            });
            i += 1;
        }
        IntervalSet { intervals }
    }

    pub fn components(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Exact Lebesgue measure: sum of component lengths; 0 for the empty set.
    pub fn measure(&self) -> Rational {
        let mut acc = Rational::zero();
        for iv in &self.intervals {
            acc = &acc + &iv.length();
        }
        acc
    }

    /// Image `{x + t*p : p in self}` for `t != 0`, normalized.
    pub fn affine_image(&self, x: &Rational, t: &Rational) -> Result<IntervalSet, Error> {
        if t.is_zero() {
            return Err(Error::DegenerateMap);
        }
        let mut out: Vec<Interval> = self
            .intervals
            .iter()
            .map(|iv| {
                let a = x + &(t * &iv.lo);
                let b = x + &(t * &iv.hi);
                if t.is_positive() {
                    Interval { lo: a, hi: b }
                } else {
                    Interval { lo: b, hi: a }
                }
            })
            .collect();
        if t.is_negative() {
            out.reverse();
        }
        debug_assert!(out.windows(2).all(|w| w[0].hi < w[1].lo));
        Ok(IntervalSet { intervals: out })
    }

    /// True iff `p` lies in some closed component (binary search).
    pub fn contains_point(&self, p: &Rational) -> bool {
        self.component_index_for(p).is_some()
    }

    fn component_index_for(&self, p: &Rational) -> Option<usize> {
        // last component with lo <= p
        let idx = self.intervals.partition_point(|iv| &iv.lo <= p);
        if idx == 0 {
            return None;
        }
        let cand = &self.intervals[idx - 1];
        (&cand.hi >= p).then_some(idx - 1)
    }

    /// The unique component containing `iv` entirely, if any. For a union of
    /// disjoint closed intervals, containing both endpoints of `iv` in one
    /// component is the same as containing all of `iv`.
    pub fn component_containing(&self, iv: &Interval) -> Option<&Interval> {
        let idx = self.component_index_for(&iv.lo)?;
        let cand = &self.intervals[idx];
        cand.contains_interval(iv).then_some(cand)
    }

    /// Interval-set inclusion: every component of `self` lies in a component
    /// of `other`.
    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals
            .iter()
            .all(|iv| other.component_containing(iv).is_some())
    }

    pub fn min(&self) -> Option<&Rational> {
        self.intervals.first().map(|iv| &iv.lo)
    }

    pub fn max(&self) -> Option<&Rational> {
        self.intervals.last().map(|iv| &iv.hi)
    }
}

impl Serialize for IntervalSet {
    /// Array of `[lo, hi]` pairs.
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.intervals.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let ivs = Vec::<Interval>::deserialize(de)?;
        Ok(IntervalSet::normalize(ivs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn set(pairs: &[(i64, i64, i64, i64)]) -> IntervalSet {
        IntervalSet::from_pairs(
            pairs
                .iter()
                .map(|&(a, b, c, d)| (rat(a, b), rat(c, d)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn normalize_examples() {
        // already disjoint
        let s = set(&[(0, 1, 1, 3), (2, 3, 1, 1)]);
        assert_eq!(s.len(), 2);
        // touching intervals merge
        let s = set(&[(0, 1, 1, 2), (1, 2, 1, 1)]);
        assert_eq!(s.components(), &[Interval::new(rat(0, 1), rat(1, 1)).unwrap()]);
        // overlap merges
        let s = set(&[(0, 1, 2, 3), (1, 3, 1, 1)]);
        assert_eq!(s.components(), &[Interval::new(rat(0, 1), rat(1, 1)).unwrap()]);
    }

    #[test]
    fn malformed_interval_rejected() {
        assert!(Interval::new(rat(1, 2), rat(1, 3)).is_err());
        assert!(IntervalSet::from_pairs(vec![(rat(1, 1), rat(0, 1))]).is_err());
    }

    #[test]
    fn measure_examples() {
        assert_eq!(set(&[(0, 1, 1, 3), (2, 3, 1, 1)]).measure(), rat(2, 3));
        assert_eq!(set(&[(0, 1, 1, 1)]).measure(), rat(1, 1));
        assert_eq!(IntervalSet::empty().measure(), Rational::zero());
    }

    #[test]
    fn affine_image_examples() {
        let unit = IntervalSet::unit();
        let img = unit.affine_image(&rat(1, 2), &rat(1, 4)).unwrap();
        assert_eq!(img, set(&[(1, 2, 3, 4)]));

        let thirds = set(&[(0, 1, 1, 3), (2, 3, 1, 1)]);
        let id = thirds.affine_image(&rat(0, 1), &rat(1, 1)).unwrap();
        assert_eq!(id, thirds);

        // reflection symmetry of the symmetric generation
        let refl = thirds.affine_image(&rat(1, 1), &rat(-1, 1)).unwrap();
        assert_eq!(refl, thirds);

        assert!(matches!(
            unit.affine_image(&rat(0, 1), &rat(0, 1)),
            Err(Error::DegenerateMap)
        ));
    }

    #[test]
    fn contains_point_examples() {
        let s = set(&[(0, 1, 1, 3)]);
        assert!(s.contains_point(&rat(1, 3))); // closed endpoint
        assert!(!s.contains_point(&rat(1, 2)));
        assert!(!IntervalSet::empty().contains_point(&rat(0, 1)));
    }

    #[test]
    fn component_containing_examples() {
        let s = set(&[(0, 1, 1, 3), (2, 3, 1, 1)]);
        let q = Interval::new(rat(1, 10), rat(1, 5)).unwrap();
        assert_eq!(s.component_containing(&q).unwrap().hi, rat(1, 3));
        // straddles the gap
        let q = Interval::new(rat(3, 10), rat(7, 10)).unwrap();
        assert!(s.component_containing(&q).is_none());
        let s = set(&[(0, 1, 1, 7)]);
        let q = Interval::new(rat(0, 1), rat(1, 10)).unwrap();
        assert_eq!(s.component_containing(&q).unwrap().hi, rat(1, 7));
    }

    #[test]
    fn grid_cells_runs_merge() {
        let f = rat(1, 20);
        let s = IntervalSet::from_grid_cells(&f, &[0, 1, 2, 5, 7, 8]);
        assert_eq!(
            s,
            set(&[(0, 1, 3, 20), (5, 20, 6, 20), (7, 20, 9, 20)])
        );
        assert_eq!(s.measure(), rat(6, 20));
        assert!(IntervalSet::from_grid_cells(&f, &[]).is_empty());
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((0i64..60, 1i64..20), 0..12).prop_map(|raw| {
            IntervalSet::from_pairs(
                raw.into_iter()
                    .map(|(a, l)| (rat(a, 12), rat(a, 12) + rat(l, 24)))
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalize_idempotent(s in arb_set()) {
            let again = IntervalSet::normalize(s.components().to_vec());
            prop_assert_eq!(&again, &s);
        }

        #[test]
        fn components_disjoint_nontouching(s in arb_set()) {
            for w in s.components().windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
        }

        #[test]
        fn affine_measure_scaling(s in arb_set(), xn in -20i64..20, tn in -9i64..9) {
            prop_assume!(tn != 0);
            let (x, t) = (rat(xn, 7), rat(tn, 5));
            let img = s.affine_image(&x, &t).unwrap();
            prop_assert_eq!(img.measure(), t.abs() * s.measure());
        }

        #[test]
        fn contains_matches_linear_scan(s in arb_set(), pn in -10i64..80) {
            let p = rat(pn, 24);
            let scan = s.components().iter().any(|iv| iv.contains_point(&p));
            prop_assert_eq!(s.contains_point(&p), scan);
        }

        #[test]
        fn component_containing_implies_endpoints(s in arb_set(), a in 0i64..60, l in 1i64..20) {
            let iv = Interval::new(rat(a, 12), rat(a, 12) + rat(l, 48)).unwrap();
            if s.component_containing(&iv).is_some() {
                prop_assert!(s.contains_point(&iv.lo));
                prop_assert!(s.contains_point(&iv.hi));
            }
        }

        #[test]
        fn serde_round_trip(s in arb_set()) {
            let json = serde_json::to_string(&s).unwrap();
            let back: IntervalSet = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
