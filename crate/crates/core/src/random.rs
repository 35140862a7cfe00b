//! Seeded random maps.
//!
//! An orientation-preserving map is drawn as follows: pick a piece budget `k` in
//! `[2,8]`, a cut point `m` and a cut shape, and a split value `v`. The part below the
//! cut gets a random order-preserving fill with values in `[v, top]`, the part above it
//! a fill with values in `[a, v]`. A fill places sorted breakpoints and sorted values on
//! a small-denominator grid, sends each breakpoint to its value and each open cell
//! between breakpoints either onto the open interval of its neighbours' values or to
//! one of those values.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{ChainModel, ConvexSet};
use crate::classify::{membership, Membership};
use crate::error::{Error, Result};
use crate::factorize::{route_of, Route};
use crate::iso::make_iso;
use crate::ptrans::{Piece, PiecewiseMap};
use crate::rational::{ExtPoint, Rational};

const GRID: [i64; 4] = [6, 8, 12, 24];
const MAX_TRIES: usize = 10_000;

/// Which side of the cut owns the cut point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutShape {
    /// `X1 = [a,m)`, `X2 = [m, ...]`.
    HalfOpen,
    /// `X1 = [a,m]`, `X2 = (m, ...]`.
    Closed,
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` distinct grid points strictly between `lo` and `hi`, sorted.
fn interior_points<R: Rng + ?Sized>(
    rng: &mut R,
    lo: &Rational,
    hi: &Rational,
    count: usize,
) -> Vec<Rational> {
    if count == 0 {
        return Vec::new();
    }
    let mut n = GRID[rng.gen_range(0..GRID.len())];
    while ((n - 1) as usize) < count {
        n *= 2;
    }
    let mut picks = sample(rng, (n - 1) as usize, count).into_vec();
    picks.sort_unstable();
    let span = hi - lo;
    picks
        .into_iter()
        .map(|k| lo + &(&span * &Rational::new(k as i64 + 1, n)))
        .collect()
}

/// `count` grid values in `[lo, hi]`, sorted, repeats allowed.
fn grid_values<R: Rng + ?Sized>(
    rng: &mut R,
    lo: &Rational,
    hi: &Rational,
    count: usize,
) -> Vec<Rational> {
    let n = GRID[rng.gen_range(0..GRID.len())];
    let span = hi - lo;
    let mut ks: Vec<i64> = (0..count).map(|_| rng.gen_range(0..=n)).collect();
    ks.sort_unstable();
    ks.into_iter()
        .map(|k| lo + &(&span * &Rational::new(k, n)))
        .collect()
}

/// Random order-preserving pieces on `dom` (finite left end) with values in `[lo, hi]`.
/// With `unbounded_top` the last open cell runs onto `(y, inf)`; `dom` must then be
/// open on the right.
fn fill<R: Rng + ?Sized>(
    rng: &mut R,
    dom: &ConvexSet,
    lo: &Rational,
    hi: &Rational,
    cells: usize,
    unbounded_top: bool,
) -> Result<Vec<Piece>> {
    if dom.is_empty() {
        return Ok(Vec::new());
    }
    if dom.is_singleton() {
        let y = grid_values(rng, lo, hi, 1).remove(0);
        return Ok(vec![Piece::constant(dom.clone(), y)]);
    }
    let start = dom.lo.finite().expect("finite left end").clone();
    let end = dom.hi.finite().cloned();
    let interior_top = end
        .clone()
        .unwrap_or_else(|| &start + &Rational::from_int(4));
    let mut pts = vec![start.clone()];
    pts.extend(interior_points(
        rng,
        &start,
        &interior_top,
        cells.max(1) - 1,
    ));
    pts.extend(end.clone());
    let n_values = pts.len() + usize::from(end.is_none());
    let ys = grid_values(rng, lo, hi, n_values);

    let mut pieces = Vec::new();
    for i in 0..pts.len() {
        if dom.contains(&pts[i]) {
            pieces.push(Piece::constant(
                ConvexSet::point(pts[i].clone()),
                ys[i].clone(),
            ));
        }
        let next = match pts.get(i + 1) {
            Some(p) => ExtPoint::Finite(p.clone()),
            None if end.is_none() => ExtPoint::PosInfinity,
            None => break,
        };
        let is_last = i + 2 >= pts.len() + usize::from(end.is_none());
        let cell = ConvexSet::new(ExtPoint::Finite(pts[i].clone()), false, next, false);
        let (y0, y1) = (&ys[i], &ys[i + 1]);
        if is_last && unbounded_top {
            let iso = make_iso(&cell, &ConvexSet::above(y0.clone(), false))?;
            pieces.push(Piece::atom(cell, &iso)?);
        } else if y0 < y1 && rng.gen_bool(0.6) {
            let iso = make_iso(&cell, &ConvexSet::open(y0.clone(), y1.clone()))?;
            pieces.push(Piece::atom(cell, &iso)?);
        } else {
            let y = if rng.gen_bool(0.5) { y0 } else { y1 };
            pieces.push(Piece::constant(cell, y.clone()));
        }
    }
    Ok(pieces)
}

/// Bounded stand-in for the carrier: `[a,b]`, or `[a, a+4]` on a ray.
fn working_range(model: &ChainModel) -> Result<(Rational, Rational)> {
    match model {
        ChainModel::MinMax { a, b } => Ok((a.clone(), b.clone())),
        ChainModel::MinOnly { a } => Ok((a.clone(), a + &Rational::from_int(4))),
        ChainModel::MaxOnly { .. } => Err(Error::Unsupported("draw on the mirrored chain".into())),
    }
}

/// One draw of the documented procedure. On `(-inf,b]` the draw is made on the mirrored
/// chain and mirrored back.
pub fn random_op_map<R: Rng + ?Sized>(
    rng: &mut R,
    model: &ChainModel,
    shape: Option<CutShape>,
    unbounded_image: Option<bool>,
) -> Result<PiecewiseMap> {
    model.validate()?;
    if let ChainModel::MaxOnly { .. } = model {
        return Ok(random_op_map(rng, &model.mirrored(), shape, unbounded_image)?.mirrored());
    }
    let (a, top) = working_range(model)?;
    let carrier = model.carrier();
    let shape = shape.unwrap_or(if rng.gen_bool(0.5) {
        CutShape::HalfOpen
    } else {
        CutShape::Closed
    });
    let k = rng.gen_range(2..=8usize);
    let edge = rng.gen_bool(0.125);
    let m = match (shape, edge, model) {
        (CutShape::Closed, true, _) => a.clone(),
        (CutShape::HalfOpen, true, ChainModel::MinMax { b, .. }) => b.clone(),
        _ => interior_points(rng, &a, &top, 1).remove(0),
    };
    let x1 = ConvexSet::new(
        carrier.lo.clone(),
        carrier.lo_closed,
        ExtPoint::Finite(m.clone()),
        shape == CutShape::Closed,
    );
    let x2 = x1.above_in(&carrier);
    let v = grid_values(rng, &a, &top, 1).remove(0);
    let x1_top = match model {
        ChainModel::MinMax { b, .. } => b.clone(),
        _ => &v + &Rational::from_int(4),
    };
    let unbounded = matches!(model, ChainModel::MinOnly { .. })
        && !x1.hi_closed
        && unbounded_image.unwrap_or_else(|| rng.gen_bool(0.3));
    let k1 = rng.gen_range(1..k);
    let mut pieces = fill(rng, &x1, &v, &x1_top, k1, unbounded)?;
    pieces.extend(fill(rng, &x2, &a, &v, k - k1, false)?);
    Ok(PiecewiseMap::new(model.clone(), pieces)?.normalize())
}

/// Draws until the map is orientation-preserving but not order-preserving and, when
/// asked, takes the given factorization route.
pub fn random_op_not_o<R: Rng + ?Sized>(
    rng: &mut R,
    model: &ChainModel,
    route: Option<Route>,
) -> Result<PiecewiseMap> {
    let (shape, unbounded) = match route {
        Some(Route::HalfOpenIdeal) => (Some(CutShape::HalfOpen), None),
        Some(Route::ClosedIdeal) => (Some(CutShape::Closed), None),
        Some(Route::RayBoundedImage) => (None, Some(false)),
        Some(Route::RayUnboundedImage) => (Some(CutShape::HalfOpen), Some(true)),
        _ => (None, None),
    };
    for _ in 0..MAX_TRIES {
        let f = random_op_map(rng, model, shape, unbounded)?;
        if membership(&f) != Membership::OrientationOnly {
            continue;
        }
        if route.is_none_or(|r| route_of(&f).ok() == Some(r)) {
            return Ok(f);
        }
    }
    Err(Error::Unsupported(format!(
        "no draw on {model} took route {route:?}"
    )))
}

/// A random order-preserving map.
pub fn random_o_map<R: Rng + ?Sized>(rng: &mut R, model: &ChainModel) -> Result<PiecewiseMap> {
    model.validate()?;
    if let ChainModel::MaxOnly { .. } = model {
        return Ok(random_o_map(rng, &model.mirrored())?.mirrored());
    }
    let (a, top) = working_range(model)?;
    let carrier = model.carrier();
    let k = rng.gen_range(1..=6usize);
    let unbounded = carrier.hi == ExtPoint::PosInfinity && rng.gen_bool(0.3);
    let pieces = fill(rng, &carrier, &a, &top, k, unbounded)?;
    Ok(PiecewiseMap::new(model.clone(), pieces)?.normalize())
}

/// A random orientation-preserving map: the raw draw, which may be order-preserving.
pub fn random_op_seeded(model: &ChainModel, seed: u64) -> Result<PiecewiseMap> {
    random_op_map(&mut seeded_rng(seed), model, None, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{is_order_preserving, is_orientation_preserving};
    use crate::rational::q;

    fn models() -> Vec<ChainModel> {
        vec![
            ChainModel::min_max(q(0, 1), q(1, 1)).unwrap(),
            ChainModel::min_max(q(-2, 1), q(5, 3)).unwrap(),
            ChainModel::MinOnly { a: q(0, 1) },
            ChainModel::MaxOnly { b: q(1, 2) },
        ]
    }

    #[test]
    fn draws_are_orientation_preserving() {
        for model in models() {
            for seed in 0..200 {
                let f = random_op_seeded(&model, seed).unwrap();
                assert!(
                    is_orientation_preserving(&f),
                    "{model} seed {seed}: {}",
                    f.to_json()
                );
            }
        }
    }

    #[test]
    fn o_draws_are_order_preserving() {
        let mut rng = seeded_rng(9);
        for model in models() {
            for _ in 0..100 {
                assert!(is_order_preserving(
                    &random_o_map(&mut rng, &model).unwrap()
                ));
            }
        }
    }

    #[test]
    fn same_seed_same_map() {
        let model = ChainModel::min_max(q(0, 1), q(1, 1)).unwrap();
        assert_eq!(
            random_op_seeded(&model, 1).unwrap().to_json(),
            random_op_seeded(&model, 1).unwrap().to_json()
        );
    }

    #[test]
    fn every_route_is_reachable() {
        let mut rng = seeded_rng(5);
        let unit = ChainModel::min_max(q(0, 1), q(1, 1)).unwrap();
        let ray = ChainModel::MinOnly { a: q(0, 1) };
        for (model, route) in [
            (&unit, Route::HalfOpenIdeal),
            (&unit, Route::ClosedIdeal),
            (&ray, Route::RayBoundedImage),
            (&ray, Route::RayUnboundedImage),
        ] {
            let f = random_op_not_o(&mut rng, model, Some(route)).unwrap();
            assert_eq!(route_of(&f).unwrap(), route);
        }
    }
}
