use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/corpus/walk2.bundle")
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibsite")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> String {
    let p = std::env::temp_dir().join(format!("fibsite-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn validate_lists_the_corpus() {
    let o = run(&["validate", &corpus()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("category total: 3 objects, 5 arrows"), "{out}");
    assert!(out.contains("topology trivial: trivial, 2 objects"), "{out}");
    assert!(out.ends_with("ok\n"));
}

#[test]
fn canonical_form_is_the_corpus_file() {
    let o = run(&["validate", "--canonical", &corpus()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), std::fs::read_to_string(corpus()).unwrap());
}

#[test]
fn giraud_of_the_trivial_topology_is_trivial() {
    let o = run(&["giraud", &corpus(), "twopoint", "trivial"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("total objects [(y,a) (x0,b) (x1,b)]"), "{out}");
    assert!(out.contains("trivial: true\n"), "{out}");
    let o = run(&["giraud", &corpus(), "twopoint", "sier"]);
    let out = stdout(&o);
    assert!(out.contains("trivial: false\n"), "{out}");
    assert!(out.contains("(x0,b): minimal cover {(id_y,u)->(x0,b)}"), "{out}");
}

#[test]
fn projection_is_a_comorphism() {
    let o = run(&["check", "comorphism", &corpus(), "p", "gir", "sier"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("true\ncomorphism: holds"));
    let o = run(&["check", "continuous", &corpus(), "p", "gir", "sier"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn refuted_check_exits_one_with_a_witness() {
    let o = run(&["check", "comorphism", &corpus(), "id", "trivial", "sier"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("false\n"), "{out}");
    assert!(out.contains("witness: comorphism fails at `b`"), "{out}");
}

#[test]
fn input_errors_exit_two() {
    let cases: [&[&str]; 5] = [
        &["check", "comorphism", &corpus(), "p", "trivial", "sier"],
        &["check", "bogus", &corpus(), "p", "gir", "sier"],
        &["giraud", &corpus(), "twopoint", "nowhere"],
        &["prop", "no-such-experiment"],
        &["fuzz"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).starts_with("error: "), "{args:?}");
    }
}

#[test]
fn broken_bundles_are_located() {
    let text = std::fs::read_to_string(corpus())
        .unwrap()
        .replace(r#""category": "total""#, r#""category": "totl""#);
    let o = run(&["validate", &scratch("dangling.bundle", &text)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/topologies/gir/category: unknown category `totl`"), "{}", stderr(&o));

    let missing = r#"{"categories": {"c": {"objects": ["a", "b", "c"], "arrows": [
        {"name": "f", "src": "a", "tgt": "b"}, {"name": "g", "src": "b", "tgt": "c"}]}}}"#;
    let o = run(&["validate", &scratch("missing.bundle", missing)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/categories/c: composable pair (g after f) has no declared composite"));

    let o = run(&["validate", &scratch("syntax.bundle", "{\n  \"categories\": {\n")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("parse error at line 3"), "{}", stderr(&o));
}

#[test]
fn constant_presheaf_sheafifies_to_itself() {
    let o = run(&["sheafify", &corpus(), "pt", "sier"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("sizes [1, 1] -> [1, 1]\n"), "{out}");
    assert!(out.ends_with("is sheaf: true\n"));
    let o = run(&["sheafify", &corpus(), "split", "sier"]);
    assert!(stdout(&o).starts_with("sizes [1, 2] -> [1, 1]\n"));
}

#[test]
fn pullback_along_the_projection() {
    let o = run(&["pullback", &corpus(), "twopoint", "p"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("  fiber (x0,b): objects [x0 x1]"), "{out}");
    assert!(out.ends_with("total: 5 objects, 9 arrows\n"), "{out}");
}

#[test]
fn prop_reports_are_reproducible() {
    let a = run(&["prop", "prop-4.6", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    let out = stdout(&a);
    assert!(out.contains("--- trailer\nid=prop-4.6\nseed=7\ncaps=base=4,fiber=4,n=500\n"), "{out}");
    assert!(out.ends_with("status=pass\n"));
    let b = run(&["prop", "prop-4.6", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn fuzz_runs_selected_experiments_sorted() {
    let o = run(&["fuzz", "prop-4.6", "prop-2.5", "--caps", "n=20"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let summary = out.split("--- summary\n").nth(1).unwrap();
    let ids: Vec<&str> = summary.lines().map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(ids, ["prop-2.5", "prop-4.6"]);
}

#[test]
fn generated_bundles_validate() {
    for kind in ["site", "fibration", "comorphism", "adjoint-pair", "prop33-square"] {
        let o = run(&["generate", kind, "--seed", "3"]);
        assert_eq!(o.status.code(), Some(0), "{kind}");
        let text = stdout(&o);
        let ws = fibsite::bundle::load_str(&text).unwrap();
        assert_eq!(ws.to_json().unwrap(), text);
        let again = run(&["generate", kind, "--seed", "3"]);
        assert_eq!(again.stdout, o.stdout);
    }
    let o = run(&["generate", "comorphism", "--seed", "1"]);
    let path = scratch("comorphism.bundle", &stdout(&o));
    let o = run(&["check", "comorphism", &path, "A", "J", "K"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn list_is_sorted() {
    let out = stdout(&run(&["list"]));
    let lines: Vec<&str> = out.lines().collect();
    let mut sorted = lines.clone();
    sorted.sort();
    assert_eq!(lines, sorted);
    assert!(lines.contains(&"experiment prop-4.2"));
    assert!(lines.contains(&"check dense"));
}
