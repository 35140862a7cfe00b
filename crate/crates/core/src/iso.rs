//! Order-isomorphisms between intervals of the chain, realized as fractional-linear
//! maps `x -> (p x + q) / (r x + s)` with rational coefficients, plus constant atoms.
//!
//! Every isomorphism built here factors through the open unit interval: the source
//! is sent onto `(0,1)` by a fixed rule depending only on which of its ends are
//! infinite, and then pulled back onto the target. For two bounded intervals this is
//! the affine map; for a bounded source and a target unbounded above it is
//! `lo' + (x - lo) / (hi - x)`; for two intervals unbounded above it is a translation.

use serde::{Deserialize, Serialize};

use crate::chain::ConvexSet;
use crate::error::{Error, Result};
use crate::rational::{ExtPoint, Rational};

/// Coefficients of `x -> (p x + q) / (r x + s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mobius {
    pub p: Rational,
    pub q: Rational,
    pub r: Rational,
    pub s: Rational,
}

impl Mobius {
    pub fn new(p: Rational, q: Rational, r: Rational, s: Rational) -> Self {
        Mobius { p, q, r, s }
    }

    pub fn identity() -> Self {
        Mobius::new(
            Rational::one(),
            Rational::zero(),
            Rational::zero(),
            Rational::one(),
        )
    }

    pub fn translation(by: Rational) -> Self {
        Mobius::new(Rational::one(), by, Rational::zero(), Rational::one())
    }

    pub fn det(&self) -> Rational {
        &self.p * &self.s - &self.q * &self.r
    }

    /// Scales the coefficients so that `r = 1`, or `s = 1` for affine rules.
    pub fn canonical(self) -> Self {
        let k = if !self.r.is_zero() {
            self.r.clone()
        } else {
            self.s.clone()
        };
        if k.is_zero() {
            return self;
        }
        Mobius {
            p: &self.p / &k,
            q: &self.q / &k,
            r: &self.r / &k,
            s: &self.s / &k,
        }
    }

    pub fn pole(&self) -> Option<Rational> {
        if self.r.is_zero() {
            None
        } else {
            Some(-(&self.s / &self.r))
        }
    }

    pub fn apply(&self, x: &Rational) -> Option<Rational> {
        let den = &(&self.r * x) + &self.s;
        if den.is_zero() {
            return None;
        }
        Some(&(&(&self.p * x) + &self.q) / &den)
    }

    /// Value or one-sided limit at an extended point, for an increasing rule.
    /// `from_above` says the point is approached from the right (a lower end).
    pub fn apply_ext(&self, x: &ExtPoint, from_above: bool) -> ExtPoint {
        match x {
            ExtPoint::Finite(v) => match self.apply(v) {
                Some(y) => ExtPoint::Finite(y),
                None if from_above => ExtPoint::NegInfinity,
                None => ExtPoint::PosInfinity,
            },
            ExtPoint::PosInfinity | ExtPoint::NegInfinity => {
                if self.r.is_zero() {
                    x.clone()
                } else {
                    ExtPoint::Finite(&self.p / &self.r)
                }
            }
        }
    }

    /// `self` followed by `next`, i.e. `x -> next(self(x))`.
    pub fn then(&self, next: &Mobius) -> Mobius {
        Mobius {
            p: &next.p * &self.p + &next.q * &self.r,
            q: &next.p * &self.q + &next.q * &self.s,
            r: &next.r * &self.p + &next.s * &self.r,
            s: &next.r * &self.q + &next.s * &self.s,
        }
        .canonical()
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            p: self.s.clone(),
            q: -&self.q,
            r: -&self.r,
            s: self.p.clone(),
        }
        .canonical()
    }

    /// Image of an interval avoiding the pole.
    pub fn image(&self, set: &ConvexSet) -> ConvexSet {
        if set.is_empty() {
            return ConvexSet::empty();
        }
        ConvexSet::new(
            self.apply_ext(&set.lo, true),
            set.lo_closed,
            self.apply_ext(&set.hi, false),
            set.hi_closed,
        )
    }

    /// Conjugate by `x -> -x`.
    pub fn mirrored(&self) -> Mobius {
        Mobius::new(self.p.clone(), -&self.q, -&self.r, self.s.clone()).canonical()
    }
}

/// Map from `set` onto the open unit interval (closed ends go to 0 and 1).
fn to_unit(set: &ConvexSet) -> Result<Mobius> {
    let one = Rational::one;
    let zero = Rational::zero;
    match (&set.lo, &set.hi) {
        (ExtPoint::Finite(lo), ExtPoint::Finite(hi)) => {
            Ok(Mobius::new(one(), -lo, zero(), hi - lo))
        }
        (ExtPoint::Finite(lo), ExtPoint::PosInfinity) => {
            Ok(Mobius::new(one(), -lo, one(), one() - lo))
        }
        (ExtPoint::NegInfinity, ExtPoint::Finite(hi)) => {
            Ok(Mobius::new(zero(), one(), -one(), hi + &one()))
        }
        _ => Err(Error::Unsupported(format!(
            "no fractional-linear chart for {set}"
        ))),
    }
}

/// A constant map or an increasing fractional-linear bijection `src -> dst`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
#[allow(clippy::large_enum_variant)]
pub enum MapAtom {
    #[serde(rename = "const")]
    Constant { value: Rational },
    #[serde(rename = "frac")]
    FracLinear {
        p: Rational,
        q: Rational,
        r: Rational,
        s: Rational,
        src: ConvexSet,
        dst: ConvexSet,
    },
}

impl MapAtom {
    pub fn constant(value: Rational) -> Self {
        MapAtom::Constant { value }
    }

    /// Builds the atom of `rule` on `src`; the target is the exact image.
    pub fn from_rule(rule: Mobius, src: ConvexSet) -> Result<Self> {
        let rule = rule.canonical();
        check_rule_on(&rule, &src)?;
        let dst = rule.image(&src);
        let Mobius { p, q, r, s } = rule;
        Ok(MapAtom::FracLinear {
            p,
            q,
            r,
            s,
            src,
            dst,
        })
    }

    pub fn identity_on(src: ConvexSet) -> Self {
        MapAtom::from_rule(Mobius::identity(), src).expect("identity is valid everywhere")
    }

    pub fn rule(&self) -> Option<Mobius> {
        match self {
            MapAtom::FracLinear { p, q, r, s, .. } => {
                Some(Mobius::new(p.clone(), q.clone(), r.clone(), s.clone()))
            }
            MapAtom::Constant { .. } => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, MapAtom::Constant { .. })
    }

    pub fn src(&self) -> Option<&ConvexSet> {
        match self {
            MapAtom::FracLinear { src, .. } => Some(src),
            MapAtom::Constant { .. } => None,
        }
    }

    /// Image of a subset of the domain.
    pub fn image_of(&self, set: &ConvexSet) -> ConvexSet {
        if set.is_empty() {
            return ConvexSet::empty();
        }
        match self {
            MapAtom::Constant { value } => ConvexSet::point(value.clone()),
            MapAtom::FracLinear { .. } => self.rule().unwrap().image(set),
        }
    }

    /// The same rule on a smaller domain.
    pub fn restrict(&self, sub: &ConvexSet) -> Result<MapAtom> {
        match self {
            MapAtom::Constant { .. } => Ok(self.clone()),
            MapAtom::FracLinear { src, .. } => {
                if !sub.is_subset_of(src) {
                    return Err(Error::DomainMismatch(format!("{sub} is not inside {src}")));
                }
                if sub.is_empty() {
                    return Err(Error::EmptySet);
                }
                MapAtom::from_rule(self.rule().unwrap(), sub.clone())
            }
        }
    }

    /// Structural validity: positive determinant, pole off the domain, target equal to
    /// the exact image.
    pub fn validate(&self) -> Result<()> {
        match self {
            MapAtom::Constant { .. } => Ok(()),
            MapAtom::FracLinear { src, dst, .. } => {
                let rule = self.rule().unwrap();
                check_rule_on(&rule, src)?;
                if rule.image(src) != *dst {
                    return Err(Error::InvalidMap(format!(
                        "atom target {dst} differs from the image {} of {src}",
                        rule.image(src)
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        match self {
            MapAtom::Constant { value } => Ok(value.clone()),
            MapAtom::FracLinear { src, .. } => {
                if !src.contains(x) {
                    return Err(Error::OutOfDomain(x.to_string()));
                }
                self.rule()
                    .unwrap()
                    .apply(x)
                    .ok_or_else(|| Error::OutOfDomain(x.to_string()))
            }
        }
    }

    /// Conjugate by `x -> -x`.
    pub fn mirrored(&self) -> MapAtom {
        match self {
            MapAtom::Constant { value } => MapAtom::constant(-value),
            MapAtom::FracLinear { src, .. } => {
                MapAtom::from_rule(self.rule().unwrap().mirrored(), src.mirrored())
                    .expect("mirroring preserves validity")
            }
        }
    }
}

fn check_rule_on(rule: &Mobius, src: &ConvexSet) -> Result<()> {
    if !rule.det().is_positive() {
        return Err(Error::InvalidMap(format!("non-increasing rule {rule:?}")));
    }
    if src.is_empty() {
        return Err(Error::EmptySet);
    }
    // A pole sitting at an open end is allowed: the image is then unbounded on that side.
    match rule.pole() {
        Some(pole) if src.contains(&pole) => {
            Err(Error::InvalidMap(format!("pole {pole} lies inside {src}")))
        }
        _ => Ok(()),
    }
}

/// The canonical increasing bijection `src -> dst`.
pub fn make_iso(src: &ConvexSet, dst: &ConvexSet) -> Result<MapAtom> {
    if src.is_empty() || dst.is_empty() {
        return Err(Error::EmptySet);
    }
    if src.min().is_some() != dst.min().is_some() || src.max().is_some() != dst.max().is_some() {
        return Err(Error::BoundaryMismatch(format!("{src} vs {dst}")));
    }
    if src.is_singleton() != dst.is_singleton() {
        return Err(Error::BoundaryMismatch(format!("{src} vs {dst}")));
    }
    let rule = if src.is_singleton() {
        Mobius::translation(dst.lo.finite().unwrap() - src.lo.finite().unwrap())
    } else if src.lo == ExtPoint::NegInfinity && src.hi == ExtPoint::PosInfinity {
        if dst != src {
            return Err(Error::BoundaryMismatch(format!("{src} vs {dst}")));
        }
        Mobius::identity()
    } else {
        to_unit(src)?.then(&to_unit(dst)?.inverse())
    };
    let atom = MapAtom::from_rule(rule, src.clone())?;
    debug_assert_eq!(atom.image_of(src), *dst);
    Ok(atom)
}

pub fn invert_atom(f: &MapAtom) -> Result<MapAtom> {
    match f {
        MapAtom::Constant { .. } => Err(Error::NotInvertible),
        MapAtom::FracLinear { dst, .. } => {
            MapAtom::from_rule(f.rule().unwrap().inverse(), dst.clone())
        }
    }
}

/// `x -> g(f(x))` as a single atom.
pub fn compose_atoms(f: &MapAtom, g: &MapAtom) -> Result<MapAtom> {
    match (f, g) {
        (MapAtom::Constant { value }, _) => Ok(MapAtom::constant(g.eval(value)?)),
        (MapAtom::FracLinear { .. }, MapAtom::Constant { value }) => {
            Ok(MapAtom::constant(value.clone()))
        }
        (MapAtom::FracLinear { src, dst, .. }, MapAtom::FracLinear { src: g_src, .. }) => {
            if !dst.is_subset_of(g_src) {
                return Err(Error::DomainMismatch(format!(
                    "{dst} is not inside {g_src}"
                )));
            }
            MapAtom::from_rule(f.rule().unwrap().then(&g.rule().unwrap()), src.clone())
        }
    }
}

pub fn eval_atom(f: &MapAtom, x: &Rational) -> Result<Rational> {
    f.eval(x)
}
