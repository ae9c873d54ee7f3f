//! End-to-end tests of the `maxab` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use maxab_core::classify::{canonicalize, AbelianFieldDesc, ClassificationReport};

fn maxab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn classify_text_examples() {
    let o = maxab(&["classify", "--a", "-35", "--b", "98", "--p", "5", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "M = K(zeta_5), K = Q(sqrt(-7)), degree 8");
    let o = maxab(&["classify", "--a", "0", "--b", "-6", "--p", "3", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "M = Q(zeta_3, sqrt(2)), degree 4");
}

#[test]
fn classify_rejects_non_cm_curve_with_exit_2() {
    let o = maxab(&["classify", "--a", "1", "--b", "1", "--p", "5", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not a CM curve"));
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        vec!["classify", "--a", "-35", "--b", "98", "--p", "6", "--n", "1"],
        vec!["classify", "--a", "x", "--b", "98", "--p", "5", "--n", "1"],
        vec!["classify", "--a", "-35", "--b", "98", "--p", "5"],
        vec!["group", "--deltaK", "-28", "--f", "1", "--p", "3", "--n", "1", "--what", "order"],
        vec!["verify", "--suite", "nope"],
        vec!["frobnicate"],
    ] {
        assert_eq!(maxab(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn classify_json_round_trips() {
    let o = maxab(&["classify", "--a", "-140", "--b", "-784", "--p", "7", "--n", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let report: ClassificationReport = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(serde_json::to_string(&report).unwrap(), text.trim());
    assert_eq!(report.alpha, Some(-14));
    assert_eq!(report.degree, 84);
}

#[test]
fn alpha_examples() {
    let cases = [
        (["-140", "-784"], "alpha -14, kind quadratic, d -14, base (-7,1)"),
        (["9", "0"], "alpha 3, kind quartic, d 9, base (-4,1)"),
        (["0", "16"], "alpha 1, kind sextic, d 1, base (-3,1)"),
    ];
    for ([a, b], expected) in cases {
        let o = maxab(&["alpha", "--a", a, "--b", b]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), expected);
    }
}

#[test]
fn group_examples() {
    let run = |args: &[&str]| stdout(&maxab(args)).trim().to_string();
    assert_eq!(run(&["group", "--deltaK", "-7", "--f", "1", "--p", "7", "--n", "1", "--what", "order"]), "84");
    assert_eq!(run(&["group", "--deltaK", "-7", "--f", "1", "--p", "7", "--n", "1", "--what", "commutator"]), "7");
    assert_eq!(run(&["group", "--deltaK", "-7", "--f", "1", "--p", "7", "--n", "1", "--what", "abelianization"]), "12");
    assert_eq!(run(&["group", "--deltaK", "-3", "--f", "2", "--p", "2", "--n", "1", "--what", "order"]), "2");
    assert_eq!(run(&["group", "--disc", "-12", "--p", "2", "--n", "1", "--what", "order"]), "2");
    let kernel = run(&["group", "--disc", "-7", "--p", "5", "--n", "1", "--what", "kernel"]);
    assert_eq!(kernel.lines().count(), 25);
    assert!(kernel.lines().next().unwrap() == "[[1,0],[0,1]]");
}

#[test]
fn verify_conjugacy_writes_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conj.jsonl");
    let o = maxab(&["verify", "--suite", "conjugacy", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<serde_json::Value> =
        fs::read_to_string(&out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let pairs: Vec<_> = lines.iter().filter(|v| v["check"] == "conjugate").collect();
    assert_eq!(pairs.len(), 15);
    assert!(lines.iter().all(|v| v["pass"] == true && v["suite"] == "conjugacy"));
}

#[test]
fn verify_theorems_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let o = maxab(&["--jobs", "1", "verify", "--suite", "theorems", "--max-n", "2", "--out", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = maxab(&["--jobs", "4", "verify", "--suite", "theorems", "--max-n", "2", "--out", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

type Example = (&'static str, &'static str, u64, u32, u64, &'static [i64]);

const EXAMPLES: [Example; 6] = [
    ("-35", "98", 5, 1, 5, &[-7]),
    ("-140", "-784", 7, 1, 7, &[-56]),
    ("0", "-6", 3, 1, 3, &[8]),
    ("-9504", "365904", 2, 3, 8, &[-11]),
    ("-15", "22", 2, 2, 8, &[-3]),
    ("9", "0", 2, 2, 8, &[12]),
];

fn check_example_reports(path: &Path) {
    let reports: Vec<ClassificationReport> =
        fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), EXAMPLES.len());
    for (r, (a, b, p, n, m, d)) in reports.iter().zip(EXAMPLES) {
        assert_eq!((r.curve.a.as_str(), r.curve.b.as_str(), r.p, r.n), (a, b, p, n));
        assert_eq!(r.field, canonicalize(&AbelianFieldDesc::new(m, d.to_vec())).unwrap(), "{a},{b}");
    }
}

#[test]
fn batch_csv_and_json_agree_on_worked_examples() {
    let dir = tempfile::tempdir().unwrap();
    let csv_in = dir.path().join("in.csv");
    let json_in = dir.path().join("in.json");
    let mut csv = String::from("A,B,p,n\n");
    let mut rows = Vec::new();
    for (a, b, p, n, _, _) in EXAMPLES {
        csv.push_str(&format!("{a},{b},{p},{n}\n"));
        rows.push(serde_json::json!({"A": a, "B": b, "p": p, "n": n}));
    }
    fs::write(&csv_in, csv).unwrap();
    fs::write(&json_in, serde_json::to_string_pretty(&rows).unwrap()).unwrap();
    let csv_out = dir.path().join("csv.jsonl");
    let json_out = dir.path().join("json.jsonl");
    for (i, o) in [(&csv_in, &csv_out), (&json_in, &json_out)] {
        let r = maxab(&["batch", "--in", i.to_str().unwrap(), "--out", o.to_str().unwrap()]);
        assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
        check_example_reports(o);
    }
    assert_eq!(fs::read(&csv_out).unwrap(), fs::read(&json_out).unwrap());
}

#[test]
fn batch_empty_file_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["empty.csv", "empty.json"] {
        let input = dir.path().join(name);
        fs::write(&input, "").unwrap();
        let out = dir.path().join(format!("{name}.jsonl"));
        let r = maxab(&["batch", "--in", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(r.status.code(), Some(0));
        assert_eq!(fs::read_to_string(&out).unwrap(), "");
    }
}

#[test]
fn batch_malformed_row_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "A,B,p,n\n-35,98,5,1\n-35,abc,5,1\n").unwrap();
    let r = maxab(&["batch", "--in", input.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).contains("line 3"), "{}", stderr(&r));

    let input = dir.path().join("bad.json");
    fs::write(&input, "[\n  {\"A\": \"-35\", \"B\": \"98\", \"p\": 5, \"n\": 1},\n  {\"A\": \"1.5\", \"B\": \"98\", \"p\": 5, \"n\": 1}\n]\n").unwrap();
    let r = maxab(&["batch", "--in", input.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).contains("line 3"), "{}", stderr(&r));
}

#[test]
fn batch_domain_errors_exit_2_after_writing_everything() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("mixed.csv");
    fs::write(&input, "A,B,p,n\n1,1,5,1\n-35,98,5,1\n").unwrap();
    let out = dir.path().join("out.jsonl");
    let r = maxab(&["batch", "--in", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    let lines: Vec<serde_json::Value> =
        fs::read_to_string(&out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["error"], "not a CM curve");
    assert_eq!(lines[1]["degree"], 8);
}
