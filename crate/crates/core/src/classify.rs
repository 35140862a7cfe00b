//! Membership in O(X) and OP(X), the ideal of an orientation-preserving map, and
//! executable checks of the structural facts every such map satisfies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainModel, ConvexSet};
use crate::error::{Error, Result};
use crate::ptrans::{restrict_pieces, Piece, PiecewiseMap};
use crate::rational::Rational;

/// Split of the carrier into the ideal `x1` and its complement `x2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealDecomposition {
    pub x1: ConvexSet,
    pub x2: ConvexSet,
}

impl IdealDecomposition {
    pub fn is_whole_carrier(&self) -> bool {
        self.x2.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum IdealOutcome {
    Ideal(IdealDecomposition),
    NotOp,
    /// Constant maps admit many ideals; none is singled out.
    ConstantMap,
}

fn images_ordered(pieces: &[Piece]) -> bool {
    pieces
        .windows(2)
        .all(|w| w[0].image().hi <= w[1].image().lo)
}

/// Nondecreasing on the union of `pieces`, which must be sorted.
pub(crate) fn pieces_order_preserving(pieces: &[Piece]) -> bool {
    pieces
        .iter()
        .all(|p| p.atom.rule().is_none_or(|r| r.det().is_positive()))
        && images_ordered(pieces)
}

pub fn is_order_preserving(f: &PiecewiseMap) -> bool {
    pieces_order_preserving(&f.pieces)
}

/// Hull of the image of a piece list.
pub(crate) fn image_hull_of(pieces: &[Piece]) -> ConvexSet {
    pieces
        .iter()
        .fold(ConvexSet::empty(), |acc, p| acc.hull(&p.image()))
}

/// Does `x1` (an order ideal) satisfy both conditions of the definition for `f`?
fn is_valid_ideal(f: &PiecewiseMap, x1: &ConvexSet) -> bool {
    let carrier = f.model.carrier();
    let x2 = x1.above_in(&carrier);
    let p1 = restrict_pieces(&f.pieces, x1);
    let p2 = restrict_pieces(&f.pieces, &x2);
    if !pieces_order_preserving(&p1) || !pieces_order_preserving(&p2) {
        return false;
    }
    if x2.is_empty() {
        return true;
    }
    // Every value on x2 is at most every value on x1.
    image_hull_of(&p2).hi <= image_hull_of(&p1).lo
}

/// All order ideals passing the definition among the finitely many candidates: the
/// whole carrier, and each piece boundary taken on either side.
pub fn ideal_candidates(f: &PiecewiseMap) -> Vec<IdealDecomposition> {
    let f = f.normalize();
    let carrier = f.model.carrier();
    let mut candidates = vec![carrier.clone()];
    for w in f.pieces.windows(2) {
        let cut = w[0].domain.hi.clone();
        for closed in [false, true] {
            let x1 = ConvexSet::new(carrier.lo.clone(), carrier.lo_closed, cut.clone(), closed);
            if !x1.is_empty() && !candidates.contains(&x1) {
                candidates.push(x1);
            }
        }
    }
    candidates
        .into_iter()
        .filter(|x1| is_valid_ideal(&f, x1))
        .map(|x1| IdealDecomposition {
            x2: x1.above_in(&carrier),
            x1,
        })
        .collect()
}

pub fn find_ideal(f: &PiecewiseMap) -> IdealOutcome {
    if f.is_constant() {
        return IdealOutcome::ConstantMap;
    }
    match ideal_candidates(f).into_iter().next() {
        Some(dec) => IdealOutcome::Ideal(dec),
        None => IdealOutcome::NotOp,
    }
}

pub fn is_orientation_preserving(f: &PiecewiseMap) -> bool {
    !matches!(find_ideal(f), IdealOutcome::NotOp)
}

/// Coarse membership class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    #[serde(rename = "O")]
    OrderPreserving,
    #[serde(rename = "OP\\O")]
    OrientationOnly,
    #[serde(rename = "neither")]
    Neither,
}

pub fn membership(f: &PiecewiseMap) -> Membership {
    if is_order_preserving(f) {
        Membership::OrderPreserving
    } else if is_orientation_preserving(f) {
        Membership::OrientationOnly
    } else {
        Membership::Neither
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementCheck {
    pub name: String,
    pub applicable: bool,
    pub pass: bool,
    pub witness: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub statements: Vec<StatementCheck>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.statements.iter().all(|s| !s.applicable || s.pass)
    }

    pub fn get(&self, name: &str) -> Option<&StatementCheck> {
        self.statements.iter().find(|s| s.name == name)
    }
}

/// Pairwise intersection of two sorted unions of convex sets.
fn intersect_unions(a: &[ConvexSet], b: &[ConvexSet]) -> Vec<ConvexSet> {
    let mut out = Vec::new();
    for s in a {
        for t in b {
            let i = s.intersect(t);
            if !i.is_empty() {
                out.push(i);
            }
        }
    }
    out
}

fn image_union_of(pieces: &[Piece]) -> Vec<ConvexSet> {
    let mut sets: Vec<ConvexSet> = pieces.iter().map(Piece::image).collect();
    sets.sort_by(|x, y| x.lo.cmp(&y.lo));
    sets
}

fn show(v: Option<&Rational>) -> String {
    v.map_or_else(|| "none".to_string(), Rational::to_string)
}

fn check(name: &str, applicable: bool, pass: bool, witness: &[(&str, String)]) -> StatementCheck {
    StatementCheck {
        name: name.to_string(),
        applicable,
        pass: applicable && pass,
        witness: witness
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
    }
}

/// Evaluates the extremum, overlap and coincidence statements for a map in OP \ O.
pub fn check_lemma_predicates(f: &PiecewiseMap) -> Result<LemmaReport> {
    let dec = match find_ideal(f) {
        IdealOutcome::Ideal(dec) if !dec.is_whole_carrier() => dec,
        _ => return Err(Error::PreconditionViolated("map is not in OP \\ O".into())),
    };
    let p1 = restrict_pieces(&f.pieces, &dec.x1);
    let p2 = restrict_pieces(&f.pieces, &dec.x2);
    let hull1 = image_hull_of(&p1);
    let hull2 = image_hull_of(&p2);
    let hull_all = f.image_hull().hull;
    let overlap = intersect_unions(&image_union_of(&p1), &image_union_of(&p2));
    let overlap_hull = overlap
        .iter()
        .fold(ConvexSet::empty(), |acc, s| acc.hull(s));
    let overlap_point = overlap_hull
        .is_singleton()
        .then(|| overlap_hull.lo.finite().cloned())
        .flatten();
    let overlap_desc = overlap_hull.to_string();
    let eval = |x: &Rational| f.evaluate(x).expect("carrier point");

    let mut statements = Vec::new();

    let a = f.model.min();
    let fa = a.map(eval);
    statements.push(check(
        "x1_image_min",
        a.is_some(),
        fa.is_some() && hull1.min() == fa.as_ref(),
        &[
            ("a_alpha", show(fa.as_ref())),
            ("min_x1_image", show(hull1.min())),
        ],
    ));

    let b = f.model.max();
    let fb = b.map(eval);
    statements.push(check(
        "x2_image_max",
        b.is_some(),
        fb.is_some() && hull2.max() == fb.as_ref(),
        &[
            ("b_alpha", show(fb.as_ref())),
            ("max_x2_image", show(hull2.max())),
        ],
    ));

    let x1_max = dec.x1.max().cloned();
    let x2_min = dec.x2.min().cloned();
    let cut = match (&x1_max, &x2_min) {
        (Some(c), _) => {
            let fc = eval(c);
            let ok = hull_all.max() == Some(&fc);
            (
                true,
                ok,
                vec![
                    ("c", c.to_string()),
                    ("c_alpha", fc.to_string()),
                    ("max_image", show(hull_all.max())),
                ],
            )
        }
        (None, Some(c)) => {
            let fc = eval(c);
            let ok = hull_all.min() == Some(&fc);
            (
                true,
                ok,
                vec![
                    ("c", c.to_string()),
                    ("c_alpha", fc.to_string()),
                    ("min_image", show(hull_all.min())),
                ],
            )
        }
        (None, None) => (false, false, vec![]),
    };
    statements.push(check("cut_extremum", cut.0, cut.1, &cut.2));

    let overlap_ok = overlap.is_empty()
        || overlap_point
            .as_ref()
            .is_some_and(|c| hull1.min() == Some(c) && hull2.max() == Some(c));
    statements.push(check(
        "overlap_at_most_point",
        true,
        overlap_ok,
        &[
            ("overlap", overlap_desc.clone()),
            ("min_x1_image", show(hull1.min())),
            ("max_x2_image", show(hull2.max())),
        ],
    ));

    let overlap_is = |v: Option<&Rational>| {
        overlap.is_empty() || (overlap_point.is_some() && overlap_point.as_ref() == v)
    };
    statements.push(check(
        "ray_min_overlap",
        matches!(f.model, ChainModel::MinOnly { .. }),
        overlap_is(fa.as_ref()),
        &[
            ("overlap", overlap_desc.clone()),
            ("a_alpha", show(fa.as_ref())),
        ],
    ));
    statements.push(check(
        "ray_max_overlap",
        matches!(f.model, ChainModel::MaxOnly { .. }),
        overlap_is(fb.as_ref()),
        &[
            ("overlap", overlap_desc.clone()),
            ("b_alpha", show(fb.as_ref())),
        ],
    ));
    statements.push(check(
        "bounded_overlap",
        matches!(f.model, ChainModel::MinMax { .. }),
        overlap.is_empty() || (fa == fb && overlap_is(fa.as_ref())),
        &[
            ("overlap", overlap_desc),
            ("a_alpha", show(fa.as_ref())),
            ("b_alpha", show(fb.as_ref())),
        ],
    ));

    Ok(LemmaReport { statements })
}
