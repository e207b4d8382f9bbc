use std::fs;
use std::path::Path;

use bergman::cli::main_with_args;

fn run(args: &[&str]) -> u8 {
    main_with_args(std::iter::once("bergman").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const TWO_HOLES: &str = r#"{"holes": [
  {"center": [0.4, 0.1], "log_r": -4.0, "log_s": -3.5, "log_t": -3.0},
  {"center": [-0.3, -0.3], "log_r": -5.0, "log_s": -4.0, "log_t": -3.2}
], "punctured": false}"#;

const HANDCRAFTED: &str = r#"{"holes": [
  {"center": [0.5, 0.0], "log_r": -5000.0, "log_s": -50.0, "log_t": -5.0},
  {"center": [-0.5, 0.0], "log_r": -5000.0, "log_s": -50.0, "log_t": -5.0}
], "punctured": true}"#;

#[test]
fn verify_conditions_paper_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let code = run(&["verify-conditions", "--paper-mode", "--n-max", "2000", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["n_max"], 2000);
}

#[test]
fn sandwich_lower_column_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    assert_eq!(run(&["sandwich", "--paper-mode", "--rings", "2..64", "--c", "1", "--out", out.to_str().unwrap()]), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    let lows: Vec<f64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["kind"] == "x")
        .map(|r| r["value_log"].as_f64().unwrap())
        .collect();
    assert_eq!(lows.len(), 63);
    assert!(lows.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn validate_flags_overlap_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"holes": [
          {"center": [0.3, 0.0], "log_r": -4.0, "log_s": -3.0, "log_t": -2.0},
          {"center": [0.4, 0.0], "log_r": -4.0, "log_s": -3.0, "log_t": -2.0}
        ]}"#,
    );
    let out = dir.path().join("v.json");
    assert_eq!(run(&["validate", "--config", &bad, "--out", out.to_str().unwrap()]), 2);
    let text = fs::read_to_string(out).unwrap();
    assert!(text.contains("violations"));
    let good = write(dir.path(), "good.json", HANDCRAFTED);
    assert_eq!(run(&["validate", "--config", &good, "--out", dir.path().join("g.json").to_str().unwrap()]), 0);
}

#[test]
fn usage_and_schema_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["no-such-command"]), 1);
    assert_eq!(run(&["validate", "--config", dir.path().join("missing.json").to_str().unwrap()]), 1);
    let extra = write(dir.path(), "extra.json", r#"{"holes": [], "punctured": false, "colour": 1}"#);
    assert_eq!(run(&["validate", "--config", &extra]), 1);
    assert_eq!(run(&["verify-conditions"]), 1);
}

#[test]
fn scans_are_deterministic_with_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d.json", TWO_HOLES);
    for (cmd, header) in [
        ("kernel-scan", "re,im,kernel,log_hessian"),
        ("metric-scan", "re,im,basis_metric"),
    ] {
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        for p in [&a, &b] {
            let code = run(&[cmd, "--config", &cfg, "--grid", "9", "--degree", "4", "--out", p.to_str().unwrap()]);
            assert_eq!(code, 0);
        }
        let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert_eq!(ta, tb);
        assert!(String::from_utf8(ta).unwrap().starts_with(&format!("{header}\n")));
    }
    let m = dir.path().join("m.csv");
    assert_eq!(run(&["majorant-scan", "--tame", "--out", m.to_str().unwrap()]), 0);
    assert!(fs::read_to_string(m).unwrap().starts_with("m,y,log_majorant\n"));
}

#[test]
fn seeded_suite_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "h.json", HANDCRAFTED);
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let p = dir.path().join(format!("s{i}.json"));
            let code = run(&[
                "inequality-suite", "--config", &cfg, "--samples", "3", "--seed", "11", "--out", p.to_str().unwrap(),
            ]);
            assert_eq!(code, 0);
            fs::read(p).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let d = dir.path().join("dec.json");
    assert_eq!(run(&["decompose", "--config", &cfg, "--samples", "2", "--out", d.to_str().unwrap()]), 0);
    // conditions fail on the moderate domain, so the suite refuses it
    let moderate = write(dir.path(), "m.json", TWO_HOLES);
    assert_eq!(run(&["inequality-suite", "--config", &moderate, "--samples", "1"]), 1);
}

#[test]
fn construct_gram_distance_report_probe() {
    let dir = tempfile::tempdir().unwrap();
    let dom = dir.path().join("tame.json");
    assert_eq!(run(&["construct", "--tame", "--out", dom.to_str().unwrap()]), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&dom).unwrap()).unwrap();
    assert_eq!(v["holes"], 9);
    let cfg = write(dir.path(), "d.json", TWO_HOLES);
    let g = dir.path().join("g.json");
    assert_eq!(run(&["gram", "--config", &cfg, "--degree", "3", "--order", "1", "--out", g.to_str().unwrap()]), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(v["dimension"], 6);
    let dist = dir.path().join("dist.json");
    let code = run(&[
        "distance", "--config", &cfg, "--from", "0,0", "--to", "-0.1,0.5", "--level", "0", "--out",
        dist.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r = dir.path().join("r.json");
    assert_eq!(run(&["report", "--paper-mode", "--n-max", "300", "--out", r.to_str().unwrap()]), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&r).unwrap()).unwrap();
    for key in ["conditions", "spacing", "sandwich"] {
        assert!(v.get(key).is_some());
    }
    let p = dir.path().join("p.csv");
    assert_eq!(run(&["probe", "--tame", "--out", p.to_str().unwrap()]), 0);
    assert!(fs::read_to_string(p).unwrap().starts_with("t,re,im,K_lower,beta,cumulative_length\n"));
}
