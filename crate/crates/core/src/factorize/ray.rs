//! The chain `[a,inf)`: its generator, the transport `h` from `[a,b]`, and the
//! factorization routed through the bounded chain.

use crate::chain::{ChainModel, ConvexSet};
use crate::classify::{membership, Membership};
use crate::error::{Error, Result};
use crate::iso::{invert_atom, make_iso, MapAtom};
use crate::ptrans::{compose_pieces, Piece, PiecewiseMap};
use crate::rational::{ExtPoint, Rational};

use super::bounded::{assemble, chain_pieces, cst};
use super::{require_order_preserving, Factor, FactorizationWitness, GeneratorParams, Tag};

fn bottom(model: &ChainModel) -> Result<Rational> {
    match model {
        ChainModel::MinOnly { a } => Ok(a.clone()),
        _ => Err(Error::PreconditionViolated(format!(
            "expected a chain [a,inf), got {model}"
        ))),
    }
}

fn nu(a: &Rational, c: &Rational) -> Result<MapAtom> {
    make_iso(
        &ConvexSet::open(a.clone(), c.clone()),
        &ConvexSet::above(c.clone(), false),
    )
}

/// `a -> c`, `(a,c)` onto `(c,inf)`, `c -> a`, `(c,inf)` back onto `(a,c)`.
pub fn build_gamma_star(model: &ChainModel, params: &GeneratorParams) -> Result<PiecewiseMap> {
    let a = bottom(model)?;
    let c = &params.c;
    if a >= *c {
        return Err(Error::BadParams(format!("need a < c, got a={a}, c={c}")));
    }
    let nu = nu(&a, c)?;
    assemble(
        model,
        vec![
            cst(ConvexSet::point(a.clone()), c),
            vec![Piece::atom(ConvexSet::open(a.clone(), c.clone()), &nu)?],
            cst(ConvexSet::point(c.clone()), &a),
            vec![Piece::atom(
                ConvexSet::above(c.clone(), false),
                &invert_atom(&nu)?,
            )?],
        ],
    )
}

/// `h`: agrees with `alpha` on `[a,b)` and is constant `alpha(b)` on `[b,inf)`.
pub fn transport_h(alpha: &PiecewiseMap, model: &ChainModel) -> Result<PiecewiseMap> {
    let a = bottom(model)?;
    let (ya, b) = match &alpha.model {
        ChainModel::MinMax { a, b } => (a.clone(), b.clone()),
        _ => return Err(Error::ModelMismatch),
    };
    if ya != a {
        return Err(Error::ModelMismatch);
    }
    let mut pieces = alpha.restrict(&ConvexSet::closed_open(a, b.clone()));
    pieces.push(Piece::constant(
        ConvexSet::above(b.clone(), true),
        alpha.evaluate(&b)?,
    ));
    Ok(PiecewiseMap::new(model.clone(), pieces)?.normalize())
}

/// Inverse of `h` on its image: restriction to `[a,b]`.
pub fn restrict_to_y(beta: &PiecewiseMap, y: &ChainModel) -> Result<PiecewiseMap> {
    let (a, b) = match y {
        ChainModel::MinMax { a, b } => (a.clone(), b.clone()),
        _ => return Err(Error::ModelMismatch),
    };
    if bottom(&beta.model)? != a {
        return Err(Error::ModelMismatch);
    }
    let y_set = y.carrier();
    let tail_value = beta.evaluate(&b)?;
    let tail_constant = beta
        .restrict(&ConvexSet::above(b.clone(), true))
        .iter()
        .all(|p| p.atom == MapAtom::constant(tail_value.clone()));
    if !tail_constant {
        return Err(Error::PreconditionViolated(format!(
            "not constant on [{b},inf)"
        )));
    }
    let pieces = beta.restrict(&y_set);
    if pieces.iter().any(|p| !p.image().is_subset_of(&y_set)) {
        return Err(Error::PreconditionViolated(format!("image leaves {y_set}")));
    }
    Ok(PiecewiseMap::new(y.clone(), pieces)?.normalize())
}

/// `h(gamma_Y) = gamma* delta`; returns `(gamma*, delta)`.
pub fn expand_h_gamma(
    model: &ChainModel,
    params: &GeneratorParams,
) -> Result<(PiecewiseMap, PiecewiseMap)> {
    let a = bottom(model)?;
    let y = params.y_model(model)?;
    let b = y.max().unwrap().clone();
    let (c, d) = (&params.c, &params.d);
    if !(a < *c && c < d && *d < b) {
        return Err(Error::BadParams(format!(
            "need a < c < d < y_max, got c={c}, d={d}, y_max={b}"
        )));
    }
    let gamma_star = build_gamma_star(model, params)?;
    let nu = nu(&a, c)?;
    let mu1 = make_iso(
        &ConvexSet::open(a.clone(), c.clone()),
        &ConvexSet::open(d.clone(), b.clone()),
    )?;
    let mu2 = make_iso(
        &ConvexSet::open(c.clone(), b.clone()),
        &ConvexSet::open(a.clone(), c.clone()),
    )?;
    let split = invert_atom(&nu)?.eval(&b)?;
    let delta = assemble(
        model,
        vec![
            cst(ConvexSet::point(a.clone()), &a),
            chain_pieces(
                &ConvexSet::open(a.clone(), split.clone()),
                &[&nu],
                &[Piece::atom(ConvexSet::open(c.clone(), b.clone()), &mu2)?],
            )?,
            cst(ConvexSet::closed_open(split, c.clone()), c),
            cst(ConvexSet::point(c.clone()), d),
            chain_pieces(
                &ConvexSet::above(c.clone(), false),
                &[&invert_atom(&nu)?],
                &[Piece::atom(ConvexSet::open(a.clone(), c.clone()), &mu1)?],
            )?,
        ],
    )?;
    Ok((gamma_star, delta))
}

/// Factors an orientation-preserving, non-order-preserving map of `[a,inf)` by moving it
/// into `[a,y_max]`, factoring there, and carrying the word back through `h`.
pub fn factor_minonly(
    beta: &PiecewiseMap,
    generator: &PiecewiseMap,
    params: &GeneratorParams,
) -> Result<FactorizationWitness> {
    let model = &beta.model;
    let a = bottom(model)?;
    params.validate(model)?;
    let gamma_star = build_gamma_star(model, params)?;
    if !generator.equal_structural(&gamma_star) {
        return Err(Error::PreconditionViolated(
            "generator does not match the parameters".into(),
        ));
    }
    match membership(beta) {
        Membership::OrientationOnly => {}
        Membership::Neither => return Err(Error::NotOp),
        Membership::OrderPreserving => {
            return Err(Error::PreconditionViolated(
                "input is already order-preserving".into(),
            ))
        }
    }
    let y = params.y_model(model)?;
    let b = y.max().unwrap().clone();
    let carrier = model.carrier();

    let ab = ConvexSet::open(a.clone(), b.clone());
    let tau1 = make_iso(&ab, &ConvexSet::above(a.clone(), false))?;
    let eta1 = assemble(
        model,
        vec![
            cst(ConvexSet::point(a.clone()), &a),
            vec![Piece::atom(ab, &tau1)?],
            cst(ConvexSet::above(b.clone(), true), &a),
        ],
    )?;

    let hull = beta.image_hull();
    let image = hull.hull.clone();
    let y_prime = ConvexSet::new(
        ExtPoint::Finite(a.clone()),
        hull.min_attained,
        ExtPoint::Finite(b.clone()),
        hull.max_attained,
    );
    let tau2 = make_iso(&image, &y_prime)?;
    let eta2 = assemble(
        model,
        vec![
            cst(image.below_in(&carrier), &a),
            vec![Piece::atom(image.clone(), &tau2)?],
            cst(image.above_in(&carrier), &b),
        ],
    )?;

    let beta_star = eta1.compose(beta)?.compose(&eta2)?;
    let alpha_y = restrict_to_y(&beta_star, &y)?;
    let y_params = GeneratorParams {
        y_max: None,
        p_fallback: None,
        ..params.clone()
    };
    let inner = super::factor(&alpha_y, &y_params)?;
    if !inner.factors.iter().any(|f| f.tag == Tag::Generator)
        && !crate::classify::is_order_preserving(&alpha_y)
    {
        return Err(Error::VerificationFailed(
            "bounded word lacks a generator".into(),
        ));
    }
    let (_, delta) = expand_h_gamma(model, params)?;

    let theta1 = assemble(
        model,
        vec![
            cst(ConvexSet::point(a.clone()), &a),
            vec![Piece::atom(
                ConvexSet::above(a.clone(), false),
                &invert_atom(&tau1)?,
            )?],
        ],
    )?;
    let mut factors = vec![Factor::o(theta1)];
    for f in inner.factors {
        match f.tag {
            Tag::OrderPreserving => factors.push(Factor::o(transport_h(&f.map, model)?)),
            Tag::Generator => {
                factors.push(Factor::g(gamma_star.clone()));
                factors.push(Factor::o(delta.clone()));
            }
        }
    }

    let tau2_inv = invert_atom(&tau2)?;
    match image.hi.finite() {
        Some(top) => {
            let p = params
                .p_fallback
                .clone()
                .unwrap_or_else(|| top + &Rational::one());
            if p < *top {
                return Err(Error::BadParams(format!(
                    "p_fallback {p} lies below the image {image}"
                )));
            }
            let theta2 = assemble(
                model,
                vec![
                    cst(y_prime.below_in(&carrier), &a),
                    vec![Piece::atom(y_prime.clone(), &tau2_inv)?],
                    cst(y_prime.above_in(&carrier), &p),
                ],
            )?;
            require_order_preserving("theta2", &theta2)?;
            factors.push(Factor::o(theta2));
        }
        None => {
            let c = &params.c;
            let z = ConvexSet::new(
                ExtPoint::Finite(a.clone()),
                hull.min_attained,
                ExtPoint::Finite(c.clone()),
                false,
            );
            let eta3 = make_iso(&y_prime, &z)?;
            let theta21 = assemble(
                model,
                vec![
                    cst(y_prime.below_in(&carrier), &a),
                    vec![Piece::atom(y_prime.clone(), &eta3)?],
                    cst(y_prime.above_in(&carrier), c),
                ],
            )?;
            // gamma* is injective on z; invert it there, then undo eta3 and tau2.
            let nu_inv = invert_atom(&nu(&a, c)?)?;
            let mut back = Vec::new();
            if hull.min_attained {
                back.push(Piece::constant(ConvexSet::point(c.clone()), a.clone()));
            }
            back.push(Piece::atom(ConvexSet::above(c.clone(), false), &nu_inv)?);
            let w = ConvexSet::new(
                ExtPoint::Finite(c.clone()),
                hull.min_attained,
                ExtPoint::PosInfinity,
                false,
            );
            let back = compose_pieces(&back, &[Piece::atom(z.clone(), &invert_atom(&eta3)?)?])?;
            let back = compose_pieces(&back, &[Piece::atom(y_prime.clone(), &tau2_inv)?])?;
            let theta22 = assemble(model, vec![cst(w.below_in(&carrier), &a), back])?;
            require_order_preserving("theta21", &theta21)?;
            require_order_preserving("theta22", &theta22)?;
            factors.push(Factor::o(theta21));
            factors.push(Factor::g(gamma_star));
            factors.push(Factor::o(theta22));
        }
    }
    for f in &factors {
        if f.tag == Tag::OrderPreserving {
            require_order_preserving("transported factor", &f.map)?;
        }
    }
    FactorizationWitness {
        input: beta.clone(),
        factors,
        params: params.clone(),
        verified: false,
    }
    .sealed()
}
