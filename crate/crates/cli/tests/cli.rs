use std::path::Path;
use std::process::{Command, Output};

use lie_integrate::catalog;
use lie_integrate::io::{AlgebraFile, RepresentationFile};
use lie_integrate::VerificationReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lie-integrate"))
        .args(args)
        .output()
        .expect("spawn lie-integrate")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn parse_coords(line: &str) -> Vec<f64> {
    line.trim().split(',').map(|s| s.parse().unwrap()).collect()
}

#[test]
fn quick_verify_passes() {
    let o = run(&["verify", "--entry", "so3", "--level", "quick", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn broken_fixture_exits_one() {
    let o = run(&["verify", "--entry", "so3-broken", "--samples", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL rep.homomorphism/perturbed"));
}

#[test]
fn bch_with_zero_echoes_y() {
    for entry in ["so3", "sl2", "heisenberg3"] {
        let o = run(&["bch", entry, "--x", "0,0,0", "--y", "0.125,-0.25,0.0625"]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(parse_coords(&stdout(&o)), vec![0.125, -0.25, 0.0625]);
    }
}

#[test]
fn bch_on_heisenberg_adds_half_commutator() {
    let o = run(&["bch", "heisenberg3", "--x", "0.5,0,0", "--y", "0,0.25,0"]);
    let z = parse_coords(&stdout(&o));
    assert!((z[2] - 0.0625).abs() < 1e-15, "{z:?}");
}

#[test]
fn bch_order_one_is_the_sum() {
    let o = run(&["bch", "so3", "--x", "0.1,0,0", "--y", "0,0.2,0", "--order", "1"]);
    assert_eq!(parse_coords(&stdout(&o)), vec![0.1, 0.2, 0.0]);
}

#[test]
fn factorize_prints_one_component_per_block() {
    let o = run(&["factorize", "sl2", "--z", "0.2,0,0.1", "--decomposition", "iwasawa"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("x1: "));
    let a = parse_coords(lines[1].trim_start_matches("x2: "));
    // A block is span(h): only the third coordinate may be nonzero.
    assert_eq!((a[0], a[1]), (0.0, 0.0));
}

#[test]
fn factorize_outside_chart_is_an_input_error() {
    let o = run(&["factorize", "so3", "--z", "5,5,5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("chart out of range"), "{}", stderr(&o));
}

#[test]
fn logderiv_of_straight_line_is_its_direction() {
    let o = run(&["logderiv", "so3", "--path-spec", "0,0,0;0.3,-0.1,0.2", "--t", "0.7"]);
    let d = parse_coords(&stdout(&o));
    for (got, want) in d.iter().zip([0.3, -0.1, 0.2]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn bad_numbers_and_dimensions_exit_two() {
    let o = run(&["bch", "so3", "--x", "1,a,0", "--y", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("entry 1"));
    let o = run(&["bch", "so3", "--x", "1,0", "--y", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bch", "no-such-algebra", "--x", "0", "--y", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_errors_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\n \"dim\": 2,\n \"basis\": [\"a\", \"b\"],\n \"brackets\": [[0, 1, 1, x]]\n}\n");
    let o = run(&["validate", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
    let f = write(dir.path(), "extra.json", "{\"dim\": 1, \"basis\": [\"a\"], \"brackets\": [], \"colour\": 1}");
    assert_eq!(run(&["validate", &f]).status.code(), Some(2));
}

#[test]
fn broken_jacobi_names_the_triple() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "jac.json",
        r#"{"dim": 3, "basis": ["a", "b", "c"], "brackets": [[0, 1, 1, 1.0], [0, 2, 2, 1.0], [1, 2, 0, 1.0]]}"#,
    );
    let o = run(&["validate", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("triple (a, b, c)"), "{}", stdout(&o));
}

#[test]
fn validate_checks_representation_files() {
    let dir = tempfile::tempdir().unwrap();
    let alg = write(dir.path(), "so3.json", &stdout(&run(&["export", "so3"])));
    let good = write(dir.path(), "rep.json", &stdout(&run(&["export", "so3", "--rep", "spin2"])));
    let o = run(&["validate", &alg, "--rep", &good]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));

    let mut bad = RepresentationFile::parse(&std::fs::read_to_string(&good).unwrap()).unwrap();
    bad.matrices[1][3] += 1e-4;
    let bad = write(dir.path(), "bad.json", &bad.to_json());
    let o = run(&["validate", &alg, "--rep", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL rep.homomorphism"));
}

#[test]
fn export_round_trips_every_algebra() {
    let dir = tempfile::tempdir().unwrap();
    for e in catalog::load_catalog().unwrap() {
        for d in &e.decompositions {
            let out = dir.path().join(format!("{}-{}.json", e.name, d.name()));
            let o = Command::new(env!("CARGO_BIN_EXE_lie-integrate"))
                .args(["export", &e.name, "--decomposition", d.name(), "--out"])
                .arg(&out)
                .output()
                .unwrap();
            assert!(o.status.success());
            let (alg, dec) = AlgebraFile::parse(&std::fs::read_to_string(&out).unwrap()).unwrap().build().unwrap();
            assert_eq!(alg, e.algebra);
            assert_eq!(dec.name(), d.name());
            assert_eq!(dec.blocks(), d.blocks());
        }
    }
}

#[test]
fn verify_from_files_and_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let alg = write(dir.path(), "h.json", &stdout(&run(&["export", "heisenberg3"])));
    let rep = write(dir.path(), "r.json", &stdout(&run(&["export", "heisenberg3", "--rep", "upper-triangular"])));
    let json = dir.path().join("report.json");
    let o = Command::new(env!("CARGO_BIN_EXE_lie-integrate"))
        .args(["verify", "--file", &alg, "--rep", &rep, "--samples", "3", "--seed", "1", "--json"])
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: VerificationReport = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(report.all_pass());
    assert_eq!(report.config["seed"], 1);
    assert!(report.record("pi.multiplicativity/p-qz/upper-triangular").is_some());
    let names: Vec<&str> = report.records.iter().map(|r| r.check_name.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn tolerance_overrides() {
    let o = run(&["verify", "--entry", "abelian-4", "--samples", "2", "--tol", "rep.commutation=0", "--json", "-"]);
    let report: VerificationReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.tolerances["rep.commutation"], 0.0);
    assert_eq!(run(&["verify", "--entry", "so3", "--tol", "bogus=1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--entry", "so3", "--tol", "rep.skew"]).status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_the_report() {
    let mut texts = Vec::new();
    for threads in ["1", "3"] {
        let o = Command::new(env!("CARGO_BIN_EXE_lie-integrate"))
            .env("LIE_INTEGRATE_THREADS", threads)
            .args(["verify", "--entry", "sl2", "--samples", "4", "--json", "-"])
            .output()
            .unwrap();
        let r: VerificationReport = serde_json::from_str(&stdout(&o)).unwrap();
        texts.push(r.without_timing().to_json_pretty());
    }
    assert_eq!(texts[0], texts[1]);
    let o = Command::new(env!("CARGO_BIN_EXE_lie-integrate"))
        .env("LIE_INTEGRATE_THREADS", "0")
        .args(["catalog", "list"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn catalog_lists_every_fixture() {
    let text = stdout(&run(&["catalog", "list"]));
    for name in ["so3", "su2-realified", "heisenberg3", "sl2", "upper-triangular-3", "abelian-4", "so3-broken"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn missing_source_is_an_input_error() {
    assert_eq!(run(&["verify"]).status.code(), Some(2));
}

#[test]
fn report_keys_match_the_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json")).unwrap()).unwrap();
    let report: serde_json::Value = serde_json::from_str(&stdout(&run(&["verify", "--entry", "so3-broken", "--samples", "2", "--json", "-"]))).unwrap();
    let keys = |v: &serde_json::Value| v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
    let names = |v: &serde_json::Value| v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect::<Vec<_>>();

    let mut top = keys(&report);
    let mut want = names(&schema["required"]);
    top.sort();
    want.sort();
    assert_eq!(top, want);

    let allowed = keys(&schema["$defs"]["record"]["properties"]);
    let required = names(&schema["$defs"]["record"]["required"]);
    for rec in report["records"].as_array().unwrap() {
        let k = keys(rec);
        assert!(required.iter().all(|r| k.contains(r)));
        assert!(k.iter().all(|r| allowed.contains(r)), "{k:?}");
    }
}
