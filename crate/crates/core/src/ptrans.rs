//! Total transformations of a chain, stored as an ordered partition of the carrier
//! into convex pieces, each carrying a constant or fractional-linear atom.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainModel, ConvexSet};
use crate::error::{Error, Result};
use crate::iso::{MapAtom, Mobius};
use crate::rational::{ExtPoint, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub domain: ConvexSet,
    pub atom: MapAtom,
}

impl Piece {
    pub fn constant(domain: ConvexSet, value: Rational) -> Self {
        Piece {
            domain,
            atom: MapAtom::constant(value),
        }
    }

    pub fn rule(domain: ConvexSet, rule: Mobius) -> Result<Self> {
        let atom = MapAtom::from_rule(rule, domain.clone())?;
        Ok(Piece { domain, atom })
    }

    /// `atom` restricted to `domain`.
    pub fn atom(domain: ConvexSet, atom: &MapAtom) -> Result<Self> {
        let atom = atom.restrict(&domain)?;
        Ok(Piece { domain, atom })
    }

    pub fn identity(domain: ConvexSet) -> Self {
        Piece {
            atom: MapAtom::identity_on(domain.clone()),
            domain,
        }
    }

    pub fn image(&self) -> ConvexSet {
        self.atom.image_of(&self.domain)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        self.atom.eval(x)
    }

    fn restrict(&self, sub: &ConvexSet) -> Option<Piece> {
        let domain = self.domain.intersect(sub);
        if domain.is_empty() {
            return None;
        }
        let atom = self
            .atom
            .restrict(&domain)
            .expect("subset of the piece domain");
        Some(Piece { domain, atom })
    }

    fn mirrored(&self) -> Piece {
        Piece {
            domain: self.domain.mirrored(),
            atom: self.atom.mirrored(),
        }
    }
}

/// A full transformation of the chain given by finitely many pieces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMap")]
pub struct PiecewiseMap {
    pub model: ChainModel,
    pub pieces: Vec<Piece>,
}

#[derive(Deserialize)]
struct RawMap {
    model: ChainModel,
    pieces: Vec<Piece>,
}

impl TryFrom<RawMap> for PiecewiseMap {
    type Error = Error;

    fn try_from(raw: RawMap) -> Result<Self> {
        PiecewiseMap::new(raw.model, raw.pieces)
    }
}

/// The smallest convex set containing the image, with attainment of its ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageHull {
    pub hull: ConvexSet,
    pub min_attained: bool,
    pub max_attained: bool,
}

impl PiecewiseMap {
    pub fn new(model: ChainModel, pieces: Vec<Piece>) -> Result<Self> {
        let map = PiecewiseMap { model, pieces };
        map.validate()?;
        Ok(map)
    }

    pub fn identity(model: &ChainModel) -> Self {
        PiecewiseMap {
            model: model.clone(),
            pieces: vec![Piece::identity(model.carrier())],
        }
    }

    pub fn constant(model: &ChainModel, value: Rational) -> Result<Self> {
        PiecewiseMap::new(model.clone(), vec![Piece::constant(model.carrier(), value)])
    }

    /// Checks the partition, atom and image invariants.
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let carrier = self.model.carrier();
        let first = self
            .pieces
            .first()
            .ok_or_else(|| Error::InvalidMap("no pieces".into()))?;
        let last = self.pieces.last().unwrap();
        if first.domain.lo != carrier.lo || first.domain.lo_closed != carrier.lo_closed {
            return Err(Error::InvalidMap(format!(
                "first piece {} does not start the carrier",
                first.domain
            )));
        }
        if last.domain.hi != carrier.hi || last.domain.hi_closed != carrier.hi_closed {
            return Err(Error::InvalidMap(format!(
                "last piece {} does not end the carrier",
                last.domain
            )));
        }
        for w in self.pieces.windows(2) {
            if !w[0].domain.abuts(&w[1].domain) {
                return Err(Error::InvalidMap(format!(
                    "{} and {} do not abut",
                    w[0].domain, w[1].domain
                )));
            }
        }
        for piece in &self.pieces {
            if piece.domain.is_empty() {
                return Err(Error::InvalidMap("empty piece".into()));
            }
            piece.atom.validate()?;
            if let Some(src) = piece.atom.src() {
                if *src != piece.domain {
                    return Err(Error::InvalidMap(format!(
                        "atom source {src} differs from {}",
                        piece.domain
                    )));
                }
            }
            if !piece.image().is_subset_of(&carrier) {
                return Err(Error::InvalidMap(format!(
                    "image {} leaves the carrier",
                    piece.image()
                )));
            }
        }
        Ok(())
    }

    fn piece_index(&self, x: &Rational) -> Option<usize> {
        // Pieces are sorted; find the first whose upper end admits x.
        let idx = self.pieces.partition_point(|p| {
            let hi = p.domain.hi.cmp_finite(x);
            if p.domain.hi_closed {
                hi.is_lt()
            } else {
                hi.is_le()
            }
        });
        (idx < self.pieces.len() && self.pieces[idx].domain.contains(x)).then_some(idx)
    }

    pub fn evaluate(&self, x: &Rational) -> Result<Rational> {
        let idx = self
            .piece_index(x)
            .ok_or_else(|| Error::OutOfDomain(x.to_string()))?;
        // The partition is validated, so the piece's own domain check can be skipped.
        Ok(match &self.pieces[idx].atom {
            MapAtom::Constant { value } => value.clone(),
            MapAtom::FracLinear { p, q, r, s, .. } => {
                if r.is_zero() {
                    &(p * x) + q
                } else {
                    &(&(p * x) + q) / &(&(r * x) + s)
                }
            }
        })
    }

    /// `x -> other(self(x))`, normalized.
    pub fn compose(&self, other: &PiecewiseMap) -> Result<PiecewiseMap> {
        if self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        let pieces = compose_pieces(&self.pieces, &other.pieces)?;
        Ok(PiecewiseMap {
            model: self.model.clone(),
            pieces,
        }
        .normalize())
    }

    /// Composes a word left to right.
    pub fn compose_all<'a>(
        maps: impl IntoIterator<Item = &'a PiecewiseMap>,
    ) -> Result<PiecewiseMap> {
        let mut iter = maps.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidMap("empty word".into()))?;
        iter.try_fold(first.clone(), |acc, m| acc.compose(m))
    }

    /// Canonical form: singleton pieces become constants and adjacent pieces that share
    /// a rule are merged (an isolated point joins the left neighbour when both fit).
    pub fn normalize(&self) -> PiecewiseMap {
        PiecewiseMap {
            model: self.model.clone(),
            pieces: normalize_pieces(&self.pieces),
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.normalize() == *self
    }

    /// Pieces of `self` cut down to `set`.
    pub fn restrict(&self, set: &ConvexSet) -> Vec<Piece> {
        restrict_pieces(&self.pieces, set)
    }

    pub fn image_hull(&self) -> ImageHull {
        let hull = image_union(&self.pieces)
            .iter()
            .fold(ConvexSet::empty(), |acc, s| acc.hull(s));
        ImageHull {
            min_attained: hull.min().is_some(),
            max_attained: hull.max().is_some(),
            hull,
        }
    }

    /// The exact image as a sorted union of disjoint convex sets.
    pub fn image_set(&self) -> Vec<ConvexSet> {
        image_union(&self.pieces)
    }

    pub fn is_constant(&self) -> bool {
        let n = self.normalize();
        n.pieces.len() == 1 && n.pieces[0].atom.is_constant()
    }

    /// Finite piece endpoints, in increasing order.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut pts = BTreeSet::new();
        for p in &self.pieces {
            for end in [&p.domain.lo, &p.domain.hi] {
                if let ExtPoint::Finite(v) = end {
                    pts.insert(v.clone());
                }
            }
        }
        pts.into_iter().collect()
    }

    /// Conjugate by the order-reversing involution `x -> -x`.
    pub fn mirrored(&self) -> PiecewiseMap {
        PiecewiseMap {
            model: self.model.mirrored(),
            pieces: self.pieces.iter().rev().map(Piece::mirrored).collect(),
        }
    }

    /// Exact equality of the canonical forms.
    pub fn equal_structural(&self, other: &PiecewiseMap) -> bool {
        self.normalize() == other.normalize()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("maps always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub(crate) fn restrict_pieces(pieces: &[Piece], set: &ConvexSet) -> Vec<Piece> {
    pieces.iter().filter_map(|p| p.restrict(set)).collect()
}

fn image_union(pieces: &[Piece]) -> Vec<ConvexSet> {
    let mut images: Vec<ConvexSet> = pieces.iter().map(Piece::image).collect();
    images.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
    let mut out: Vec<ConvexSet> = Vec::new();
    for s in images {
        if let Some(last) = out.last_mut() {
            if !last.intersect(&s).is_empty() || last.abuts(&s) {
                *last = last.hull(&s);
                continue;
            }
        }
        out.push(s);
    }
    out
}

/// Exact preimage of `target` (a subset of the atom's image) under a fractional-linear piece.
fn preimage(piece: &Piece, target: &ConvexSet) -> ConvexSet {
    let image = piece.image();
    let rule = piece.atom.rule().expect("fractional-linear piece");
    let inv = rule.inverse();
    let lo = if target.lo == image.lo {
        piece.domain.lo.clone()
    } else {
        inv.apply_ext(&target.lo, true)
    };
    let hi = if target.hi == image.hi {
        piece.domain.hi.clone()
    } else {
        inv.apply_ext(&target.hi, false)
    };
    ConvexSet::new(lo, target.lo_closed, hi, target.hi_closed)
}

/// Composition of partial maps given as sorted piece lists; every image point of
/// `first` must lie in the domain of `second`.
pub(crate) fn compose_pieces(first: &[Piece], second: &[Piece]) -> Result<Vec<Piece>> {
    let mut out = Vec::new();
    for f in first {
        match &f.atom {
            MapAtom::Constant { value } => {
                let g = second
                    .iter()
                    .find(|g| g.domain.contains(value))
                    .ok_or_else(|| Error::DomainMismatch(format!("{value} has no image")))?;
                out.push(Piece::constant(f.domain.clone(), g.eval(value)?));
            }
            MapAtom::FracLinear { .. } => {
                let image = f.image();
                let mut covered = ConvexSet::empty();
                for g in second {
                    let part = image.intersect(&g.domain);
                    if part.is_empty() {
                        continue;
                    }
                    covered = covered.hull(&part);
                    let domain = preimage(f, &part);
                    let atom = match &g.atom {
                        MapAtom::Constant { value } => MapAtom::constant(value.clone()),
                        MapAtom::FracLinear { .. } => MapAtom::from_rule(
                            f.atom.rule().unwrap().then(&g.atom.rule().unwrap()),
                            domain.clone(),
                        )?,
                    };
                    out.push(Piece { domain, atom });
                }
                if covered != image {
                    return Err(Error::DomainMismatch(format!(
                        "image {image} is not covered"
                    )));
                }
            }
        }
    }
    Ok(out)
}

fn rule_fits_at(atom: &MapAtom, x: &Rational, value: &Rational) -> bool {
    match atom {
        MapAtom::Constant { value: v } => v == value,
        MapAtom::FracLinear { .. } => atom.rule().unwrap().apply(x).as_ref() == Some(value),
    }
}

fn try_merge(left: &Piece, right: &Piece) -> Option<Piece> {
    if !left.domain.abuts(&right.domain) {
        return None;
    }
    let domain = left.domain.join(&right.domain);
    match (&left.atom, &right.atom) {
        (MapAtom::Constant { value: a }, MapAtom::Constant { value: b }) if a == b => {
            Some(Piece::constant(domain, a.clone()))
        }
        (MapAtom::FracLinear { .. }, MapAtom::FracLinear { .. }) => {
            let rule = left.atom.rule().unwrap();
            (rule == right.atom.rule().unwrap())
                .then(|| Piece::rule(domain, rule).ok())
                .flatten()
        }
        (MapAtom::FracLinear { .. }, MapAtom::Constant { value })
            if right.domain.is_singleton() =>
        {
            let x = right.domain.lo.finite().unwrap();
            rule_fits_at(&left.atom, x, value)
                .then(|| Piece::rule(domain, left.atom.rule().unwrap()).ok())
                .flatten()
        }
        (MapAtom::Constant { value }, MapAtom::FracLinear { .. }) if left.domain.is_singleton() => {
            let x = left.domain.lo.finite().unwrap();
            rule_fits_at(&right.atom, x, value)
                .then(|| Piece::rule(domain, right.atom.rule().unwrap()).ok())
                .flatten()
        }
        _ => None,
    }
}

pub(crate) fn normalize_pieces(pieces: &[Piece]) -> Vec<Piece> {
    let mut stack: Vec<Piece> = Vec::with_capacity(pieces.len());
    for piece in pieces {
        let mut current = if piece.domain.is_singleton() && !piece.atom.is_constant() {
            let x = piece.domain.lo.finite().unwrap();
            Piece::constant(
                piece.domain.clone(),
                piece.eval(x).expect("point of the domain"),
            )
        } else {
            piece.clone()
        };
        while let Some(top) = stack.last() {
            match try_merge(top, &current) {
                Some(merged) => {
                    current = merged;
                    stack.pop();
                }
                None => break,
            }
        }
        stack.push(current);
    }
    stack
}

fn random_in_cell(rng: &mut ChaCha8Rng, lo: &ExtPoint, hi: &ExtPoint) -> Rational {
    let den: i64 = rng.gen_range(2..=64);
    let k: i64 = rng.gen_range(1..den);
    let frac = Rational::new(k, den);
    match (lo, hi) {
        (ExtPoint::Finite(l), ExtPoint::Finite(h)) => l + &(&(h - l) * &frac),
        (ExtPoint::Finite(l), ExtPoint::PosInfinity) => {
            l + &(frac + Rational::from_int(rng.gen_range(0..1000)))
        }
        (ExtPoint::NegInfinity, ExtPoint::Finite(h)) => {
            h - &(frac + Rational::from_int(rng.gen_range(0..1000)))
        }
        _ => frac + Rational::from_int(rng.gen_range(-1000..1000)),
    }
}

/// Deterministic test points for a set of maps on one model: every breakpoint of every
/// map and the carrier ends, plus `samples` seeded points spread round-robin over the
/// open cells between consecutive breakpoints.
pub fn sample_points(maps: &[&PiecewiseMap], samples: usize, seed: u64) -> Result<Vec<Rational>> {
    let model = &maps.first().ok_or(Error::ModelMismatch)?.model;
    if maps.iter().any(|m| m.model != *model) {
        return Err(Error::ModelMismatch);
    }
    let carrier = model.carrier();
    let mut points: BTreeSet<Rational> = maps.iter().flat_map(|m| m.breakpoints()).collect();
    points.extend(model.min().cloned());
    points.extend(model.max().cloned());
    let mut ends: Vec<ExtPoint> = Vec::with_capacity(points.len() + 2);
    if carrier.lo == ExtPoint::NegInfinity {
        ends.push(ExtPoint::NegInfinity);
    }
    ends.extend(points.iter().cloned().map(ExtPoint::Finite));
    if carrier.hi == ExtPoint::PosInfinity {
        ends.push(ExtPoint::PosInfinity);
    }
    let cells: Vec<(ExtPoint, ExtPoint)> = ends
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Rational> = points.into_iter().filter(|x| carrier.contains(x)).collect();
    if !cells.is_empty() {
        for i in 0..samples {
            let (lo, hi) = &cells[i % cells.len()];
            out.push(random_in_cell(&mut rng, lo, hi));
        }
    }
    Ok(out)
}

/// Agreement of `f` and `g` on the deterministic sample set of [`sample_points`].
pub fn equal_pointwise(
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    if f.model != g.model {
        return Err(Error::ModelMismatch);
    }
    for x in sample_points(&[f, g], samples, seed)? {
        if f.evaluate(&x)? != g.evaluate(&x)? {
            return Ok(false);
        }
    }
    Ok(true)
}
