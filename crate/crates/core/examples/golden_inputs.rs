//! Writes the generator maps used as golden inputs.
use opchain::factorize::{build_gamma, build_gamma_star, GeneratorParams};
use opchain::{q, ChainModel, ConvexSet, Piece, PiecewiseMap};

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| ".".into());
    let unit = ChainModel::min_max(q(0, 1), q(1, 1)).unwrap();
    let ray = ChainModel::MinOnly { a: q(0, 1) };
    let write = |name: &str, f: &PiecewiseMap| {
        std::fs::write(format!("{dir}/{name}"), f.to_json() + "\n").unwrap()
    };
    write(
        "gamma.json",
        &build_gamma(&unit, &GeneratorParams::default_for(&unit)).unwrap(),
    );
    write(
        "gamma_star.json",
        &build_gamma_star(&ray, &GeneratorParams::default_for(&ray)).unwrap(),
    );
    write("identity.json", &PiecewiseMap::identity(&unit));
    let stairs = PiecewiseMap::new(
        unit.clone(),
        vec![
            Piece::constant(ConvexSet::closed_open(q(0, 1), q(1, 3)), q(1, 1)),
            Piece::constant(ConvexSet::closed_open(q(1, 3), q(2, 3)), q(1, 2)),
            Piece::constant(ConvexSet::closed(q(2, 3), q(1, 1)), q(0, 1)),
        ],
    )
    .unwrap();
    write("staircase.json", &stairs);
}
