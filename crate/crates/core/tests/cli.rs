use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opchain::classify::is_orientation_preserving;
use opchain::factorize::FactorizationWitness;
use opchain::PiecewiseMap;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn opchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opchain"))
        .args(args)
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("opchain-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_gamma() {
    let o = opchain(&["classify", "--in", golden("gamma.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("OP, not O; ideal [0,1/3)"));
}

#[test]
fn classify_identity() {
    let o = opchain(&[
        "classify",
        "--in",
        golden("identity.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "O; ideal = X");
}

#[test]
fn classify_malformed_json() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, "{\"model\": [").unwrap();
    assert_eq!(
        opchain(&["classify", "--in", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn factorize_matches_golden_witnesses() {
    for name in ["gamma", "gamma_star"] {
        let out = scratch(&format!("{name}.witness.json"));
        let o = opchain(&[
            "factorize",
            "--in",
            golden(&format!("{name}.json")).to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let written = std::fs::read_to_string(&out).unwrap();
        let expected = std::fs::read_to_string(golden(&format!("{name}.witness.json"))).unwrap();
        assert_eq!(written, expected, "{name}");
    }
}

#[test]
fn gamma_witness_has_three_factors() {
    let w = FactorizationWitness::from_json(
        &std::fs::read_to_string(golden("gamma.witness.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(w.factors.len(), 3);
    assert_eq!(w.generator_count(), 1);
    assert!(w.verified);
    let w = FactorizationWitness::from_json(
        &std::fs::read_to_string(golden("gamma_star.witness.json")).unwrap(),
    )
    .unwrap();
    assert!(w.generator_count() >= 1);
}

#[test]
fn factorize_reversing_map_exits_3() {
    let o = opchain(&[
        "factorize",
        "--in",
        golden("staircase.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn factorize_then_verify() {
    let map = scratch("r.json");
    let witness = scratch("r.witness.json");
    for seed in 0..10 {
        let seed = seed.to_string();
        for model in ["min_max", "min_only", "max_only"] {
            let o = opchain(&[
                "random",
                "--model",
                model,
                "--seed",
                &seed,
                "--out",
                map.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0));
            let o = opchain(&[
                "factorize",
                "--in",
                map.to_str().unwrap(),
                "--out",
                witness.to_str().unwrap(),
            ]);
            assert_eq!(
                o.status.code(),
                Some(0),
                "{}",
                String::from_utf8_lossy(&o.stderr)
            );
            let o = opchain(&[
                "verify",
                "--in",
                witness.to_str().unwrap(),
                "--samples",
                "500",
                "--seed",
                &seed,
            ]);
            assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        }
    }
}

#[test]
fn verify_rejects_tampered_witness() {
    let text = std::fs::read_to_string(golden("gamma.witness.json")).unwrap();
    let mut w = FactorizationWitness::from_json(&text).unwrap();
    w.factors.swap(0, 2);
    let path = scratch("tampered.json");
    std::fs::write(&path, w.to_json()).unwrap();
    let o = opchain(&["verify", "--in", path.to_str().unwrap(), "--samples", "200"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("composition: FAIL"));
}

#[test]
fn random_golden_and_replay() {
    let o1 = opchain(&[
        "random", "--model", "min_max", "--a", "0", "--b", "1", "--seed", "1",
    ]);
    let o2 = opchain(&[
        "random", "--model", "min_max", "--a", "0", "--b", "1", "--seed", "1",
    ]);
    assert_eq!(o1.stdout, o2.stdout);
    assert_eq!(
        stdout(&o1),
        std::fs::read_to_string(golden("random_min_max_seed1.json")).unwrap()
    );
}

#[test]
fn random_maps_are_orientation_preserving() {
    let model = opchain::ChainModel::min_max(opchain::q(0, 1), opchain::q(1, 1)).unwrap();
    for seed in 0..1000 {
        let f = opchain::random::random_op_seeded(&model, seed).unwrap();
        assert!(is_orientation_preserving(&f), "seed {seed}");
    }
    let o = opchain(&["random", "--seed", "77"]);
    assert!(is_orientation_preserving(
        &PiecewiseMap::from_json(&stdout(&o)).unwrap()
    ));
}

#[test]
fn oracle_csv() {
    let out = scratch("oracle.csv");
    let o = opchain(&["oracle", "--n-max", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    assert_ne!(opchain(&["oracle", "--n-max", "9"]).status.code(), Some(0));
}
