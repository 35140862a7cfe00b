use std::ffi::{CStr, CString};
use std::ptr;

use opchain::PiecewiseMap;
use opchain_ffi::*;

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/golden");

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{GOLDEN}/{name}")).unwrap()
}

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    opchain_string_free(s);
    out
}

unsafe fn load(name: &str) -> *mut OpMap {
    let mut map = ptr::null_mut();
    assert_eq!(
        opchain_map_from_json(cstr(&golden(name)).as_ptr(), &mut map),
        OpchainStatus::Ok
    );
    map
}

unsafe fn last_error() -> String {
    let p = opchain_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn map_json_round_trip_and_evaluate() {
    unsafe {
        let map = load("gamma.json");
        let mut json = ptr::null_mut();
        assert_eq!(opchain_map_to_json(map, &mut json), OpchainStatus::Ok);
        let json = take(json);
        let direct = PiecewiseMap::from_json(&golden("gamma.json")).unwrap();
        assert!(PiecewiseMap::from_json(&json)
            .unwrap()
            .equal_structural(&direct));

        for x in ["0", "1/5", "1/3", "1/2", "9/10", "1"] {
            let mut y = ptr::null_mut();
            assert_eq!(
                opchain_map_evaluate(map, cstr(x).as_ptr(), &mut y),
                OpchainStatus::Ok
            );
            let expect = direct.evaluate(&x.parse().unwrap()).unwrap();
            assert_eq!(take(y), expect.to_string());
        }
        opchain_map_free(map);
    }
}

#[test]
fn classify_reports_each_class() {
    unsafe {
        for (name, want) in [
            ("identity.json", OpchainMembership::OrderPreserving),
            ("gamma.json", OpchainMembership::OrientationOnly),
            ("staircase.json", OpchainMembership::Neither),
        ] {
            let map = load(name);
            let mut m = OpchainMembership::Neither;
            assert_eq!(opchain_map_classify(map, &mut m), OpchainStatus::Ok);
            assert_eq!(m, want, "{name}");
            opchain_map_free(map);
        }
    }
}

#[test]
fn compose_with_identity_is_unchanged() {
    unsafe {
        let g = load("gamma.json");
        let id = load("identity.json");
        let mut h = ptr::null_mut();
        assert_eq!(opchain_map_compose(id, g, &mut h), OpchainStatus::Ok);
        let mut y = ptr::null_mut();
        assert_eq!(
            opchain_map_evaluate(h, cstr("1/2").as_ptr(), &mut y),
            OpchainStatus::Ok
        );
        let mut z = ptr::null_mut();
        assert_eq!(
            opchain_map_evaluate(g, cstr("1/2").as_ptr(), &mut z),
            OpchainStatus::Ok
        );
        assert_eq!(take(y), take(z));
        for m in [g, id, h] {
            opchain_map_free(m);
        }
    }
}

#[test]
fn generator_matches_core() {
    unsafe {
        let model = r#"{"kind":"min_max","a":"0","b":"1"}"#;
        let mut g = ptr::null_mut();
        assert_eq!(
            opchain_generator(cstr(model).as_ptr(), ptr::null(), &mut g),
            OpchainStatus::Ok
        );
        let mut json = ptr::null_mut();
        assert_eq!(opchain_map_to_json(g, &mut json), OpchainStatus::Ok);
        let got = PiecewiseMap::from_json(&take(json)).unwrap();
        assert!(got.equal_structural(&PiecewiseMap::from_json(&golden("gamma.json")).unwrap()));
        opchain_map_free(g);
    }
}

#[test]
fn factorize_verify_and_round_trip() {
    unsafe {
        for (name, gens) in [
            ("random_min_max_seed1.json", None),
            ("gamma_star.json", Some(2)),
        ] {
            let map = load(name);
            let mut w = ptr::null_mut();
            assert_eq!(
                opchain_factorize(map, ptr::null(), &mut w),
                OpchainStatus::Ok,
                "{name}"
            );
            let (mut nf, mut ng) = (0usize, 0usize);
            assert_eq!(opchain_witness_factor_count(w, &mut nf), OpchainStatus::Ok);
            assert_eq!(
                opchain_witness_generator_count(w, &mut ng),
                OpchainStatus::Ok
            );
            assert!(ng >= 1 && nf > ng);
            if let Some(k) = gens {
                assert_eq!(ng, k);
            }
            let mut ok = false;
            assert_eq!(
                opchain_witness_verify(w, 200, 7, &mut ok),
                OpchainStatus::Ok
            );
            assert!(ok);

            let mut json = ptr::null_mut();
            assert_eq!(opchain_witness_to_json(w, &mut json), OpchainStatus::Ok);
            let json = cstr(&take(json));
            let mut back = ptr::null_mut();
            assert_eq!(
                opchain_witness_from_json(json.as_ptr(), &mut back),
                OpchainStatus::Ok
            );
            let mut nf2 = 0usize;
            assert_eq!(
                opchain_witness_factor_count(back, &mut nf2),
                OpchainStatus::Ok
            );
            assert_eq!(nf, nf2);
            opchain_witness_free(back);
            opchain_witness_free(w);
            opchain_map_free(map);
        }
    }
}

#[test]
fn tampered_witness_fails_verification() {
    unsafe {
        let text = golden("gamma.witness.json").replacen("\"G\"", "\"O\"", 1);
        let mut w = ptr::null_mut();
        assert_eq!(
            opchain_witness_from_json(cstr(&text).as_ptr(), &mut w),
            OpchainStatus::Ok
        );
        let mut ok = true;
        assert_eq!(
            opchain_witness_verify(w, 64, 0, &mut ok),
            OpchainStatus::Verification
        );
        assert!(!ok);
        assert!(!last_error().is_empty());
        opchain_witness_free(w);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut map = ptr::null_mut();
        assert_eq!(
            opchain_map_from_json(ptr::null(), &mut map),
            OpchainStatus::Null
        );
        assert_eq!(
            opchain_map_from_json(cstr("{nope").as_ptr(), &mut map),
            OpchainStatus::Parse
        );
        assert!(map.is_null());
        assert!(!last_error().is_empty());

        let stair = load("staircase.json");
        let mut w = ptr::null_mut();
        assert_eq!(
            opchain_factorize(stair, ptr::null(), &mut w),
            OpchainStatus::NotOp
        );
        assert!(w.is_null());

        let mut y = ptr::null_mut();
        assert_eq!(
            opchain_map_evaluate(stair, cstr("abc").as_ptr(), &mut y),
            OpchainStatus::Parse
        );
        assert_eq!(
            opchain_map_evaluate(stair, cstr("7").as_ptr(), &mut y),
            OpchainStatus::Invalid
        );
        opchain_map_free(stair);

        let bad = r#"{"c":"1/2","d":"1/3","c_prime":"1/4"}"#;
        let model = r#"{"kind":"min_max","a":"0","b":"1"}"#;
        let mut g = ptr::null_mut();
        assert_eq!(
            opchain_generator(cstr(model).as_ptr(), cstr(bad).as_ptr(), &mut g),
            OpchainStatus::Invalid
        );

        assert_eq!(
            opchain_witness_verify(ptr::null(), 1, 0, &mut false),
            OpchainStatus::Null
        );
        opchain_map_free(ptr::null_mut());
        opchain_witness_free(ptr::null_mut());
        opchain_string_free(ptr::null_mut());
    }
}

#[test]
fn success_clears_last_error() {
    unsafe {
        let mut map = ptr::null_mut();
        opchain_map_from_json(cstr("[").as_ptr(), &mut map);
        assert!(!opchain_last_error_message().is_null());
        let id = load("identity.json");
        assert!(opchain_last_error_message().is_null());
        opchain_map_free(id);
    }
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/opchain.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = std::env::temp_dir().join(format!("opchain_hdr_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("t.c");
    std::fs::write(
        &file,
        "#include \"opchain.h\"\nint main(void) { return OPCHAIN_STATUS_OK; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&file)
        .status()
        .unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    std::process::Command::new("cc")
        .arg("--version")
        .output()
        .map(|_| "cc")
        .map_err(|_| ())
}
