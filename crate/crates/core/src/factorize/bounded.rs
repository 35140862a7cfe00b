//! The generator of `[a,b]` and the factorizations through it.

use crate::chain::{ChainModel, ConvexSet};
use crate::classify::{find_ideal, IdealDecomposition, IdealOutcome};
use crate::error::{Error, Result};
use crate::iso::{invert_atom, make_iso, MapAtom};
use crate::ptrans::{compose_pieces, Piece, PiecewiseMap};
use crate::rational::Rational;

use super::{require_order_preserving, Factor, FactorizationWitness, GeneratorParams};

/// `domain` pushed through `atoms` in order and then through the map given by `tail`.
pub(super) fn chain_pieces(
    domain: &ConvexSet,
    atoms: &[&MapAtom],
    tail: &[Piece],
) -> Result<Vec<Piece>> {
    let (first, rest) = atoms.split_first().expect("at least one atom");
    let mut pieces = vec![Piece::atom(domain.clone(), first)?];
    for atom in rest {
        let src = atom.src().expect("fractional-linear atom").clone();
        pieces = compose_pieces(
            &pieces,
            &[Piece {
                domain: src,
                atom: (*atom).clone(),
            }],
        )?;
    }
    compose_pieces(&pieces, tail)
}

pub(super) fn assemble(model: &ChainModel, parts: Vec<Vec<Piece>>) -> Result<PiecewiseMap> {
    let pieces = parts
        .into_iter()
        .flatten()
        .filter(|p| !p.domain.is_empty())
        .collect();
    Ok(PiecewiseMap::new(model.clone(), pieces)?.normalize())
}

pub(super) fn cst(domain: ConvexSet, value: &Rational) -> Vec<Piece> {
    if domain.is_empty() {
        Vec::new()
    } else {
        vec![Piece::constant(domain, value.clone())]
    }
}

fn ends(model: &ChainModel) -> Result<(Rational, Rational)> {
    match model {
        ChainModel::MinMax { a, b } => Ok((a.clone(), b.clone())),
        _ => Err(Error::PreconditionViolated(format!(
            "expected a chain [a,b], got {model}"
        ))),
    }
}

struct Gamma {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
    mu1: MapAtom,
    mu2: MapAtom,
}

impl Gamma {
    fn new(model: &ChainModel, params: &GeneratorParams) -> Result<Gamma> {
        let (a, b) = ends(model)?;
        let (c, d) = (params.c.clone(), params.d.clone());
        if !(a < c && c < d && d < b) {
            return Err(Error::BadParams(format!(
                "need a < c < d < b, got c={c}, d={d} on {model}"
            )));
        }
        let mu1 = make_iso(
            &ConvexSet::open(a.clone(), c.clone()),
            &ConvexSet::open(d.clone(), b.clone()),
        )?;
        let mu2 = make_iso(
            &ConvexSet::open(c.clone(), b.clone()),
            &ConvexSet::open(a.clone(), c.clone()),
        )?;
        Ok(Gamma {
            a,
            b,
            c,
            d,
            mu1,
            mu2,
        })
    }

    fn map(&self, model: &ChainModel) -> Result<PiecewiseMap> {
        let Gamma {
            a,
            b,
            c,
            d,
            mu1,
            mu2,
        } = self;
        assemble(
            model,
            vec![
                cst(ConvexSet::point(a.clone()), d),
                vec![Piece::atom(ConvexSet::open(a.clone(), c.clone()), mu1)?],
                cst(ConvexSet::point(c.clone()), a),
                vec![Piece::atom(ConvexSet::open(c.clone(), b.clone()), mu2)?],
                cst(ConvexSet::point(b.clone()), c),
            ],
        )
    }
}

/// `a -> d`, `(a,c)` onto `(d,b)`, `c -> a`, `(c,b)` onto `(a,c)`, `b -> c`.
pub fn build_gamma(model: &ChainModel, params: &GeneratorParams) -> Result<PiecewiseMap> {
    Gamma::new(model, params)?.map(model)
}

fn check_generator(generator: &PiecewiseMap, expected: &PiecewiseMap) -> Result<()> {
    if generator.equal_structural(expected) {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(
            "generator does not match the parameters".into(),
        ))
    }
}

fn check_decomposition(alpha: &PiecewiseMap, dec: &IdealDecomposition) -> Result<()> {
    match find_ideal(alpha) {
        IdealOutcome::Ideal(found) if found == *dec => Ok(()),
        IdealOutcome::NotOp => Err(Error::NotOp),
        _ => Err(Error::PreconditionViolated(format!(
            "{} / {} is not the ideal decomposition of the input",
            dec.x1, dec.x2
        ))),
    }
}

fn value_at(alpha: &PiecewiseMap, x: &Rational) -> Result<Rational> {
    alpha.evaluate(x)
}

/// `(a,m) -> (a,c)` and `(m,b) -> (c,b)` glued with `m -> c`; the common first factor of
/// both cut shapes.
fn beta(
    model: &ChainModel,
    g: &Gamma,
    m: &Rational,
) -> Result<(PiecewiseMap, Option<MapAtom>, Option<MapAtom>)> {
    let (a, b, c) = (&g.a, &g.b, &g.c);
    let lambda1 = if m > a {
        Some(make_iso(
            &ConvexSet::open(a.clone(), m.clone()),
            &ConvexSet::open(a.clone(), c.clone()),
        )?)
    } else {
        None
    };
    let lambda2 = if m < b {
        Some(make_iso(
            &ConvexSet::open(m.clone(), b.clone()),
            &ConvexSet::open(c.clone(), b.clone()),
        )?)
    } else {
        None
    };
    let mut parts = Vec::new();
    if let Some(l1) = &lambda1 {
        parts.push(cst(ConvexSet::point(a.clone()), a));
        parts.push(vec![Piece::atom(
            ConvexSet::open(a.clone(), m.clone()),
            l1,
        )?]);
    }
    parts.push(cst(ConvexSet::point(m.clone()), c));
    if let Some(l2) = &lambda2 {
        parts.push(vec![Piece::atom(
            ConvexSet::open(m.clone(), b.clone()),
            l2,
        )?]);
        parts.push(cst(ConvexSet::point(b.clone()), b));
    }
    Ok((assemble(model, parts)?, lambda1, lambda2))
}

/// Factors `alpha` whose ideal is `X1 = [a,m)`, `X2 = [m,b]` as `beta gamma delta`.
pub fn factor_minmax_halfopen(
    alpha: &PiecewiseMap,
    dec: &IdealDecomposition,
    generator: &PiecewiseMap,
    params: &GeneratorParams,
) -> Result<FactorizationWitness> {
    let model = &alpha.model;
    let g = Gamma::new(model, params)?;
    check_generator(generator, &g.map(model)?)?;
    check_decomposition(alpha, dec)?;
    if dec.x1.max().is_some() || dec.x2.min().is_none() {
        return Err(Error::PreconditionViolated(format!(
            "{} / {} is not a half-open cut",
            dec.x1, dec.x2
        )));
    }
    let m = dec.x2.min().unwrap().clone();
    let (a, b, c, d) = (&g.a, &g.b, &g.c, &g.d);
    let (beta, lambda1, lambda2) = beta(model, &g, &m)?;

    let mu1_inv = invert_atom(&g.mu1)?;
    let mu2_inv = invert_atom(&g.mu2)?;
    let ac = ConvexSet::open(a.clone(), c.clone());
    let on_ac = match &lambda2 {
        Some(l2) => chain_pieces(&ac, &[&mu2_inv, &invert_atom(l2)?], &alpha.pieces)?,
        None => cst(ac, &value_at(alpha, b)?),
    };
    let lambda1 = lambda1.expect("m > a for a half-open cut");
    let delta = assemble(
        model,
        vec![
            cst(ConvexSet::point(a.clone()), &value_at(alpha, &m)?),
            on_ac,
            cst(ConvexSet::point(c.clone()), &value_at(alpha, b)?),
            cst(
                ConvexSet::open_closed(c.clone(), d.clone()),
                &value_at(alpha, a)?,
            ),
            chain_pieces(
                &ConvexSet::open(d.clone(), b.clone()),
                &[&mu1_inv, &invert_atom(&lambda1)?],
                &alpha.pieces,
            )?,
            cst(ConvexSet::point(b.clone()), b),
        ],
    )?;
    require_order_preserving("beta", &beta)?;
    require_order_preserving("delta", &delta)?;
    FactorizationWitness {
        input: alpha.clone(),
        factors: vec![
            Factor::o(beta),
            Factor::g(generator.clone()),
            Factor::o(delta),
        ],
        params: params.clone(),
        verified: false,
    }
    .sealed()
}

/// Factors `alpha` whose ideal is `X1 = [a,m]`, `X2 = (m,b]` as `beta eta1 gamma eta2 delta1`.
pub fn factor_minmax_closed(
    alpha: &PiecewiseMap,
    dec: &IdealDecomposition,
    generator: &PiecewiseMap,
    params: &GeneratorParams,
) -> Result<FactorizationWitness> {
    let model = &alpha.model;
    let g = Gamma::new(model, params)?;
    check_generator(generator, &g.map(model)?)?;
    check_decomposition(alpha, dec)?;
    let Some(m) = dec.x1.max().cloned() else {
        return Err(Error::PreconditionViolated(format!(
            "{} has no maximum",
            dec.x1
        )));
    };
    let (a, b, c, d) = (&g.a, &g.b, &g.c, &g.d);
    let c_prime = &params.c_prime;
    if !(a < c_prime && c_prime < c) {
        return Err(Error::BadParams(format!(
            "need a < c' < c, got c'={c_prime}"
        )));
    }
    let (beta, lambda1, lambda2) = beta(model, &g, &m)?;
    let lambda2 = lambda2.expect("m < b when X2 is nonempty");

    let ac = ConvexSet::open(a.clone(), c.clone());
    let tau1 = make_iso(&ac, &ConvexSet::open(a.clone(), c_prime.clone()))?;
    let eta1 = assemble(
        model,
        vec![
            cst(ConvexSet::point(a.clone()), a),
            vec![Piece::atom(ac.clone(), &tau1)?],
            cst(ConvexSet::point(c.clone()), c_prime),
            vec![Piece::identity(ConvexSet::open_closed(
                c.clone(),
                b.clone(),
            ))],
        ],
    )?;

    let e = g.mu1.eval(c_prime)?;
    let tau2 = make_iso(
        &ConvexSet::open(d.clone(), e.clone()),
        &ConvexSet::open(d.clone(), b.clone()),
    )?;
    let eta2 = assemble(
        model,
        vec![
            vec![Piece::identity(ConvexSet::closed(a.clone(), c.clone()))],
            cst(ConvexSet::open_closed(c.clone(), d.clone()), d),
            vec![Piece::atom(ConvexSet::open(d.clone(), e.clone()), &tau2)?],
            cst(ConvexSet::closed(e, b.clone()), b),
        ],
    )?;

    let mu1_inv = invert_atom(&g.mu1)?;
    let mu2_inv = invert_atom(&g.mu2)?;
    let db = ConvexSet::open(d.clone(), b.clone());
    let on_db = match &lambda1 {
        Some(l1) => chain_pieces(
            &db,
            &[
                &invert_atom(&tau2)?,
                &mu1_inv,
                &invert_atom(&tau1)?,
                &invert_atom(l1)?,
            ],
            &alpha.pieces,
        )?,
        None => cst(db, &value_at(alpha, a)?),
    };
    // Nothing in the word reaches a, so any value below the rest will do.
    let delta1 = assemble(
        model,
        vec![
            cst(ConvexSet::point(a.clone()), a),
            chain_pieces(&ac, &[&mu2_inv, &invert_atom(&lambda2)?], &alpha.pieces)?,
            cst(ConvexSet::point(c.clone()), &value_at(alpha, b)?),
            cst(
                ConvexSet::open_closed(c.clone(), d.clone()),
                &value_at(alpha, a)?,
            ),
            on_db,
            cst(ConvexSet::point(b.clone()), &value_at(alpha, &m)?),
        ],
    )?;
    for (label, f) in [
        ("beta", &beta),
        ("eta1", &eta1),
        ("eta2", &eta2),
        ("delta1", &delta1),
    ] {
        require_order_preserving(label, f)?;
    }
    FactorizationWitness {
        input: alpha.clone(),
        factors: vec![
            Factor::o(beta),
            Factor::o(eta1),
            Factor::g(generator.clone()),
            Factor::o(eta2),
            Factor::o(delta1),
        ],
        params: params.clone(),
        verified: false,
    }
    .sealed()
}

/// The cut where `X1` has no maximum and `X2` no minimum.
///
/// Over a rational carrier every split of `[a,b]` into an initial and a final segment
/// hands the cut point to one side, so this shape only arises at an irrational cut.
/// A finite piecewise fractional-linear map with rational coefficients cannot carry
/// an interval with an irrational end onto one with a rational end, so the
/// construction has no representable input and always reports the violated precondition.
pub fn factor_minmax_gap(
    alpha: &PiecewiseMap,
    dec: &IdealDecomposition,
    generator: &PiecewiseMap,
    params: &GeneratorParams,
) -> Result<FactorizationWitness> {
    let model = &alpha.model;
    let g = Gamma::new(model, params)?;
    check_generator(generator, &g.map(model)?)?;
    if dec.x1.max().is_some() || dec.x2.min().is_some() {
        return Err(Error::PreconditionViolated(format!(
            "{} / {} is not a gap cut: one side owns the cut point",
            dec.x1, dec.x2
        )));
    }
    Err(Error::PreconditionViolated(format!(
        "{} / {} does not partition {}: an irrational cut has no rational representation",
        dec.x1,
        dec.x2,
        model.carrier()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::is_order_preserving;
    use crate::factorize::{factor, verify_witness};
    use crate::ptrans::tests::unit;
    use crate::rational::q;

    fn params() -> GeneratorParams {
        GeneratorParams::default_for(&unit())
    }

    #[test]
    fn gamma_values() {
        let g = build_gamma(&unit(), &params()).unwrap();
        for (x, y) in [
            (q(0, 1), q(2, 3)),
            (q(1, 6), q(5, 6)),
            (q(1, 3), q(0, 1)),
            (q(2, 3), q(1, 6)),
            (q(1, 1), q(1, 3)),
        ] {
            assert_eq!(g.evaluate(&x).unwrap(), y, "gamma({x})");
        }
        assert!(!is_order_preserving(&g));
        assert!(crate::classify::is_orientation_preserving(&g));
    }

    #[test]
    fn gamma_rejects_unordered_params() {
        let mut p = params();
        p.c = q(3, 4);
        assert!(matches!(build_gamma(&unit(), &p), Err(Error::BadParams(_))));
    }

    /// Rotation by 1/2 on [0,1] with the top point sent to the bottom piece's start:
    /// X1 = [0,1/2), X2 = [1/2,1].
    fn halfopen_input() -> PiecewiseMap {
        PiecewiseMap::new(
            unit(),
            vec![
                Piece::rule(
                    ConvexSet::closed_open(q(0, 1), q(1, 2)),
                    crate::iso::Mobius::translation(q(1, 2)),
                )
                .unwrap(),
                Piece::rule(
                    ConvexSet::closed(q(1, 2), q(1, 1)),
                    crate::iso::Mobius::translation(q(-1, 2)),
                )
                .unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn halfopen_witness_composes() {
        let alpha = halfopen_input();
        let w = factor(&alpha, &params()).unwrap();
        assert_eq!(w.factors.len(), 3);
        assert_eq!(w.generator_count(), 1);
        assert!(w.composition().unwrap().equal_structural(&alpha));
        assert!(verify_witness(&w, 2000, 7).all_pass());
    }

    #[test]
    fn closed_witness_composes() {
        // X1 = [0,1/2] -> [1/2,1], X2 = (1/2,1] -> (0,1/4]
        let alpha = PiecewiseMap::new(
            unit(),
            vec![
                Piece::rule(
                    ConvexSet::closed(q(0, 1), q(1, 2)),
                    crate::iso::Mobius::translation(q(1, 2)),
                )
                .unwrap(),
                Piece::rule(
                    ConvexSet::open_closed(q(1, 2), q(1, 1)),
                    crate::iso::Mobius::new(q(1, 2), q(-1, 4), q(0, 1), q(1, 1)),
                )
                .unwrap(),
            ],
        )
        .unwrap();
        let w = factor(&alpha, &params()).unwrap();
        assert_eq!(w.factors.len(), 5);
        assert_eq!(w.generator_count(), 1);
        assert!(w.composition().unwrap().equal_structural(&alpha));
    }

    #[test]
    fn closed_cut_at_the_bottom() {
        // X1 = {0}, X2 = (0,1]: 0 -> 1, everything else to 0
        let alpha = PiecewiseMap::new(
            unit(),
            vec![
                Piece::constant(ConvexSet::point(q(0, 1)), q(1, 1)),
                Piece::constant(ConvexSet::open_closed(q(0, 1), q(1, 1)), q(0, 1)),
            ],
        )
        .unwrap();
        let w = factor(&alpha, &params()).unwrap();
        assert!(w.composition().unwrap().equal_structural(&alpha));
    }

    #[test]
    fn halfopen_cut_at_the_top() {
        // X1 = [0,1), X2 = {1}
        let alpha = PiecewiseMap::new(
            unit(),
            vec![
                Piece::constant(ConvexSet::closed_open(q(0, 1), q(1, 1)), q(1, 2)),
                Piece::constant(ConvexSet::point(q(1, 1)), q(1, 4)),
            ],
        )
        .unwrap();
        let w = factor(&alpha, &params()).unwrap();
        assert_eq!(w.factors.len(), 3);
        assert!(w.composition().unwrap().equal_structural(&alpha));
    }

    #[test]
    fn wrong_generator_rejected() {
        let alpha = halfopen_input();
        let dec = match find_ideal(&alpha) {
            IdealOutcome::Ideal(d) => d,
            _ => unreachable!(),
        };
        let wrong = PiecewiseMap::identity(&unit());
        assert!(matches!(
            factor_minmax_halfopen(&alpha, &dec, &wrong, &params()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn gap_has_no_rational_instance() {
        let alpha = halfopen_input();
        let dec = match find_ideal(&alpha) {
            IdealOutcome::Ideal(d) => d,
            _ => unreachable!(),
        };
        let gamma = build_gamma(&unit(), &params()).unwrap();
        assert!(matches!(
            factor_minmax_gap(&alpha, &dec, &gamma, &params()),
            Err(Error::PreconditionViolated(_))
        ));
        let punctured = IdealDecomposition {
            x1: ConvexSet::closed_open(q(0, 1), q(1, 2)),
            x2: ConvexSet::open_closed(q(1, 2), q(1, 1)),
        };
        assert!(matches!(
            factor_minmax_gap(&alpha, &punctured, &gamma, &params()),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
