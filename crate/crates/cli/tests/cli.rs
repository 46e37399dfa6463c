use std::process::{Command, Output};

fn halfmass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfmass")).args(args).output().unwrap()
}

fn reports(out: &Output) -> Vec<serde_json::Value> {
    serde_json::from_slice(&out.stdout).unwrap()
}

const FAST: &[&str] = &["--quad", "16,32,8"];

#[test]
fn schwarzschild_mass_matches_half_the_parameter() {
    let out = halfmass(&[&["mass", "--metric", "schwarzschild_half", "--param", "m=1", "--n", "3"], FAST].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = reports(&out);
    let adm = r.iter().find(|r| r["functional"] == "mass_adm").unwrap();
    assert!((adm["limit"].as_f64().unwrap() - 0.5).abs() < 5e-4);
    for key in ["functional", "metric", "params", "samples", "limit", "error", "rate", "conventions", "seed", "version"] {
        assert!(adm.get(key).is_some(), "missing {key}");
    }
    assert_eq!(adm["conventions"]["rule"]["polar"], 16);
}

#[test]
fn euclidean_mass_is_zero() {
    let out = halfmass(&[&["mass", "--metric", "euclidean_half", "--n", "3"], FAST].concat());
    assert_eq!(out.status.code(), Some(0));
    for r in reports(&out) {
        assert_eq!(r["limit"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn configuration_errors_exit_with_two_and_one_line() {
    for args in [
        vec!["mass", "--metric", "schwarzschild_half", "--param", "m=-1"],
        vec!["mass", "--metric", "no_such_metric"],
        vec!["mass", "--metric", "generic_perturbation", "--param", "tau=0.4"],
        vec!["mass", "--metric", "schwarzschild_half", "--param", "a3=1"],
        vec!["mass", "--metric", "schwarzschild_half", "--radii", "4,2"],
        vec!["mass", "--metric", "hyperbolic_half"],
        vec!["mass", "--frobnicate"],
    ] {
        let out = halfmass(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn config_file_with_flag_override_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"metric": {"name": "schwarzschild_half", "n": 3, "params": {"m": 2}},
            "quad": {"polar": 16, "azimuth": 32, "radial": 8}, "seed": 5}"#,
    )
    .unwrap();
    let out = halfmass(&["mass", "--config", cfg.to_str().unwrap(), "--param", "m=1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = reports(&out);
    assert_eq!(r[0]["params"]["m"], 1.0);
    assert_eq!(r[0]["seed"], 5);

    std::fs::write(&cfg, r#"{"metric": {"name": "schwarzschild_half", "n": 3}, "extra": 1}"#).unwrap();
    let out = halfmass(&["mass", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_directory_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let p = dir.path().join(sub);
        let args = [&["center", "--metric", "schwarzschild_half", "--param", "a1=0.7", "--format", "both", "--out"], &[p.to_str().unwrap()][..], FAST].concat();
        assert_eq!(halfmass(&args).status.code(), Some(0));
        p
    };
    let (a, b) = (run("a"), run("b"));
    for name in ["mass_adm.json", "center_adm_1.json", "center_geometric_2.csv"] {
        let x = std::fs::read(a.join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let csv = std::fs::read_to_string(a.join("center_adm_1.csv")).unwrap();
    assert!(csv.starts_with("r,value,running_extrapolant,abs_delta\n"));
}

#[test]
fn catalog_identities_and_decay() {
    let out = halfmass(&["catalog", "list"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 7);

    let out = halfmass(&["identities", "--metric", "schwarzschild_half", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.iter().all(|r| r["pass"] == true));

    let out = halfmass(&["decay", "--metric", "ads_schwarzschild_half"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["admitted"], true);
}
