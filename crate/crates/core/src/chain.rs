//! Chain models over the rationals and their convex subsets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{ExtPoint, Rational};

/// The ambient chain: all rationals in `[a,b]`, `[a,inf)` or `(-inf,b]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainModel {
    MinMax { a: Rational, b: Rational },
    MinOnly { a: Rational },
    MaxOnly { b: Rational },
}

impl ChainModel {
    pub fn min_max(a: Rational, b: Rational) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidMap(format!(
                "MinMax requires a < b, got {a} >= {b}"
            )));
        }
        Ok(ChainModel::MinMax { a, b })
    }

    pub fn validate(&self) -> Result<()> {
        if let ChainModel::MinMax { a, b } = self {
            if a >= b {
                return Err(Error::InvalidMap(format!(
                    "MinMax requires a < b, got {a} >= {b}"
                )));
            }
        }
        Ok(())
    }

    pub fn min(&self) -> Option<&Rational> {
        match self {
            ChainModel::MinMax { a, .. } | ChainModel::MinOnly { a } => Some(a),
            ChainModel::MaxOnly { .. } => None,
        }
    }

    pub fn max(&self) -> Option<&Rational> {
        match self {
            ChainModel::MinMax { b, .. } | ChainModel::MaxOnly { b } => Some(b),
            ChainModel::MinOnly { .. } => None,
        }
    }

    /// The whole carrier as a convex set.
    pub fn carrier(&self) -> ConvexSet {
        let (lo, lo_closed) = match self.min() {
            Some(a) => (ExtPoint::Finite(a.clone()), true),
            None => (ExtPoint::NegInfinity, false),
        };
        let (hi, hi_closed) = match self.max() {
            Some(b) => (ExtPoint::Finite(b.clone()), true),
            None => (ExtPoint::PosInfinity, false),
        };
        ConvexSet {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }
    }

    pub fn in_carrier(&self, x: &Rational) -> bool {
        self.carrier().contains(x)
    }

    /// The image of the model under `x -> -x`.
    pub fn mirrored(&self) -> ChainModel {
        match self {
            ChainModel::MinMax { a, b } => ChainModel::MinMax { a: -b, b: -a },
            ChainModel::MinOnly { a } => ChainModel::MaxOnly { b: -a },
            ChainModel::MaxOnly { b } => ChainModel::MinOnly { a: -b },
        }
    }
}

impl fmt::Display for ChainModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainModel::MinMax { a, b } => write!(f, "[{a},{b}]"),
            ChainModel::MinOnly { a } => write!(f, "[{a},+inf)"),
            ChainModel::MaxOnly { b } => write!(f, "(-inf,{b}]"),
        }
    }
}

/// An interval of the chain. Closed endpoints are always finite.
///
/// The empty set has exactly one representation, see [`ConvexSet::empty`].
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConvexSet {
    pub lo: ExtPoint,
    pub lo_closed: bool,
    pub hi: ExtPoint,
    pub hi_closed: bool,
}

impl ConvexSet {
    /// Builds a set, collapsing every empty description to the canonical empty set.
    pub fn new(lo: ExtPoint, lo_closed: bool, hi: ExtPoint, hi_closed: bool) -> Self {
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        let s = ConvexSet {
            lo,
            lo_closed,
            hi,
            hi_closed,
        };
        if s.is_degenerate_empty() {
            ConvexSet::empty()
        } else {
            s
        }
    }

    pub fn empty() -> Self {
        ConvexSet {
            lo: ExtPoint::PosInfinity,
            lo_closed: false,
            hi: ExtPoint::NegInfinity,
            hi_closed: false,
        }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::new(lo.into(), true, hi.into(), true)
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self::new(lo.into(), false, hi.into(), false)
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: Rational, hi: Rational) -> Self {
        Self::new(lo.into(), true, hi.into(), false)
    }

    /// `(lo, hi]`
    pub fn open_closed(lo: Rational, hi: Rational) -> Self {
        Self::new(lo.into(), false, hi.into(), true)
    }

    pub fn point(x: Rational) -> Self {
        Self::closed(x.clone(), x)
    }

    /// `[lo, +inf)` or `(lo, +inf)`
    pub fn above(lo: Rational, closed: bool) -> Self {
        Self::new(lo.into(), closed, ExtPoint::PosInfinity, false)
    }

    /// `(-inf, hi]` or `(-inf, hi)`
    pub fn below(hi: Rational, closed: bool) -> Self {
        Self::new(ExtPoint::NegInfinity, false, hi.into(), closed)
    }

    fn is_degenerate_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => !(self.lo_closed && self.hi_closed),
            std::cmp::Ordering::Less => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == ConvexSet::empty()
    }

    pub fn is_singleton(&self) -> bool {
        !self.is_empty() && self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        if self.is_empty() {
            return false;
        }
        let lo = self.lo.cmp_finite(x);
        let hi = self.hi.cmp_finite(x);
        let above_lo = if self.lo_closed {
            lo.is_le()
        } else {
            lo.is_lt()
        };
        let below_hi = if self.hi_closed {
            hi.is_ge()
        } else {
            hi.is_gt()
        };
        above_lo && below_hi
    }

    pub fn is_subset_of(&self, other: &ConvexSet) -> bool {
        self.is_empty() || self.intersect(other) == *self
    }

    pub fn intersect(&self, other: &ConvexSet) -> ConvexSet {
        if self.is_empty() || other.is_empty() {
            return ConvexSet::empty();
        }
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_closed),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        ConvexSet::new(lo, lo_closed, hi, hi_closed)
    }

    /// Smallest convex set containing both.
    pub fn hull(&self, other: &ConvexSet) -> ConvexSet {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Less => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Greater => (other.lo.clone(), other.lo_closed),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_closed || other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Greater => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Less => (other.hi.clone(), other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed || other.hi_closed),
        };
        ConvexSet::new(lo, lo_closed, hi, hi_closed)
    }

    /// True when `self` ends exactly where `next` starts, with the shared point
    /// belonging to exactly one of them.
    pub fn abuts(&self, next: &ConvexSet) -> bool {
        !self.is_empty()
            && !next.is_empty()
            && self.hi.is_finite()
            && self.hi == next.lo
            && self.hi_closed != next.lo_closed
    }

    /// Union of two abutting sets.
    pub fn join(&self, next: &ConvexSet) -> ConvexSet {
        debug_assert!(self.abuts(next));
        ConvexSet::new(
            self.lo.clone(),
            self.lo_closed,
            next.hi.clone(),
            next.hi_closed,
        )
    }

    /// The elements of `within` strictly below every element of `self`.
    pub fn below_in(&self, within: &ConvexSet) -> ConvexSet {
        if self.is_empty() {
            return ConvexSet::empty();
        }
        ConvexSet::new(
            within.lo.clone(),
            within.lo_closed,
            self.lo.clone(),
            !self.lo_closed,
        )
        .intersect(within)
    }

    /// The elements of `within` strictly above every element of `self`.
    pub fn above_in(&self, within: &ConvexSet) -> ConvexSet {
        if self.is_empty() {
            return ConvexSet::empty();
        }
        ConvexSet::new(
            self.hi.clone(),
            !self.hi_closed,
            within.hi.clone(),
            within.hi_closed,
        )
        .intersect(within)
    }

    /// Image under `x -> -x`.
    pub fn mirrored(&self) -> ConvexSet {
        if self.is_empty() {
            return ConvexSet::empty();
        }
        ConvexSet::new(self.hi.neg(), self.hi_closed, self.lo.neg(), self.lo_closed)
    }

    pub fn min(&self) -> Option<&Rational> {
        if self.lo_closed {
            self.lo.finite()
        } else {
            None
        }
    }

    pub fn max(&self) -> Option<&Rational> {
        if self.hi_closed {
            self.hi.finite()
        } else {
            None
        }
    }
}

impl fmt::Display for ConvexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl fmt::Debug for ConvexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Every element of `c` is strictly below every element of `d`.
pub fn set_less(c: &ConvexSet, d: &ConvexSet) -> Result<bool> {
    if c.is_empty() || d.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(match c.hi.cmp(&d.lo) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Equal => !(c.hi_closed && d.lo_closed),
        std::cmp::Ordering::Greater => false,
    })
}

/// Whether `s` is downward closed in the carrier of `model`.
pub fn is_order_ideal(s: &ConvexSet, model: &ChainModel) -> bool {
    let carrier = model.carrier();
    if s.is_empty() {
        return true;
    }
    s.lo == carrier.lo && s.lo_closed == carrier.lo_closed
}

/// Attainment of the extrema of a nonempty convex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extrema {
    pub has_min: bool,
    pub has_max: bool,
    pub min: Option<Rational>,
    pub max: Option<Rational>,
}

pub fn min_max_flags(s: &ConvexSet) -> Result<Extrema> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let min = s.min().cloned();
    let max = s.max().cloned();
    Ok(Extrema {
        has_min: min.is_some(),
        has_max: max.is_some(),
        min,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn unit() -> ChainModel {
        ChainModel::min_max(q(0, 1), q(1, 1)).unwrap()
    }

    #[test]
    fn contains_examples() {
        assert!(ConvexSet::closed(q(0, 1), q(1, 1)).contains(&q(0, 1)));
        assert!(!ConvexSet::open(q(0, 1), q(1, 1)).contains(&q(0, 1)));
        assert!(ConvexSet::above(q(0, 1), true).contains(&q(1_000_000, 1)));
    }

    #[test]
    fn set_less_examples() {
        let a = ConvexSet::closed_open(q(0, 1), q(1, 1));
        let b = ConvexSet::closed(q(1, 1), q(2, 1));
        assert!(set_less(&a, &b).unwrap());
        assert!(!set_less(&ConvexSet::closed(q(0, 1), q(1, 1)), &b).unwrap());
        assert!(set_less(
            &ConvexSet::open(q(0, 1), q(1, 1)),
            &ConvexSet::open(q(2, 1), q(3, 1))
        )
        .unwrap());
        assert_eq!(set_less(&ConvexSet::empty(), &b), Err(Error::EmptySet));
    }

    #[test]
    fn order_ideal_examples() {
        assert!(is_order_ideal(
            &ConvexSet::closed_open(q(0, 1), q(1, 3)),
            &unit()
        ));
        assert!(!is_order_ideal(
            &ConvexSet::open_closed(q(1, 3), q(1, 1)),
            &unit()
        ));
        let m = ChainModel::MinOnly { a: q(0, 1) };
        assert!(is_order_ideal(&ConvexSet::above(q(0, 1), true), &m));
    }

    #[test]
    fn min_max_examples() {
        let e = min_max_flags(&ConvexSet::closed(q(0, 1), q(1, 1))).unwrap();
        assert_eq!(
            (e.has_min, e.has_max, e.min, e.max),
            (true, true, Some(q(0, 1)), Some(q(1, 1)))
        );
        let e = min_max_flags(&ConvexSet::open_closed(q(0, 1), q(1, 1))).unwrap();
        assert_eq!((e.has_min, e.has_max, e.max), (false, true, Some(q(1, 1))));
        let e = min_max_flags(&ConvexSet::above(q(0, 1), true)).unwrap();
        assert_eq!((e.has_min, e.has_max, e.min), (true, false, Some(q(0, 1))));
        assert_eq!(min_max_flags(&ConvexSet::empty()), Err(Error::EmptySet));
    }

    #[test]
    fn empty_is_canonical() {
        assert!(ConvexSet::open(q(1, 1), q(1, 1)).is_empty());
        assert!(ConvexSet::closed(q(2, 1), q(1, 1)).is_empty());
        assert_eq!(ConvexSet::closed_open(q(1, 1), q(1, 1)), ConvexSet::empty());
        assert!(ConvexSet::point(q(1, 1)).is_singleton());
    }

    #[test]
    fn serde_shape() {
        let s = ConvexSet::closed_open(q(0, 1), q(1, 3));
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"lo":"0","lo_closed":true,"hi":"1/3","hi_closed":false}"#
        );
        let m: ChainModel = serde_json::from_str(r#"{"kind":"min_only","a":"0"}"#).unwrap();
        assert_eq!(m, ChainModel::MinOnly { a: q(0, 1) });
    }

    #[test]
    fn below_and_above() {
        let carrier = unit().carrier();
        let s = ConvexSet::open_closed(q(1, 3), q(1, 2));
        assert_eq!(s.below_in(&carrier), ConvexSet::closed(q(0, 1), q(1, 3)));
        assert_eq!(
            s.above_in(&carrier),
            ConvexSet::open_closed(q(1, 2), q(1, 1))
        );
        assert!(carrier.above_in(&carrier).is_empty());
    }

    fn arb_set() -> impl Strategy<Value = ConvexSet> {
        (0i64..20, 0i64..20, any::<bool>(), any::<bool>()).prop_map(|(x, y, lc, hc)| {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            ConvexSet::new(q(lo, 4).into(), lc, q(hi, 4).into(), hc)
        })
    }

    proptest! {
        #[test]
        fn set_less_separates_samples(c in arb_set(), d in arb_set(), i in 0i64..=80, j in 0i64..=80) {
            prop_assume!(!c.is_empty() && !d.is_empty());
            let x = q(i, 16);
            let y = q(j, 16);
            if set_less(&c, &d).unwrap() && c.contains(&x) && d.contains(&y) {
                prop_assert!(x < y);
            }
        }

        #[test]
        fn dense_split_never_has_both_extrema(k in 1i64..15, closed in any::<bool>()) {
            // X1 = [0, m] or [0, m), X2 its complement in [0, 4].
            let carrier = ConvexSet::closed(q(0, 1), q(4, 1));
            let m = q(k, 4);
            let x1 = ConvexSet::new(q(0, 1).into(), true, m.into(), closed);
            let x2 = x1.above_in(&carrier);
            let f1 = min_max_flags(&x1).unwrap();
            let f2 = min_max_flags(&x2).unwrap();
            prop_assert!(!(f1.has_max && f2.has_min));
        }

        #[test]
        fn intersection_is_membership_and(c in arb_set(), d in arb_set(), i in 0i64..=80) {
            let x = q(i, 16);
            prop_assert_eq!(c.intersect(&d).contains(&x), c.contains(&x) && d.contains(&x));
        }
    }
}
