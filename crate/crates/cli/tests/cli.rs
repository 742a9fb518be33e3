use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbifold-ht")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn kummer_product_is_the_top_class() {
    let out = run(&["product", "kummer", "t:5:|", "t:5:|"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("t:5:| * t:5:| = -e:0:1,2|1,2"), "{text}");
    assert!(text.contains("bidegree (2, 2)"), "{text}");
    let out = run(&["product", "kummer", "t:5:|", "t:6:|"]);
    assert!(stdout(&out).contains("= 0"));
}

#[test]
fn ht_table_reports_kummer_diamond() {
    let text = stdout(&run(&["ht-table", "kummer"]));
    assert!(text.lines().any(|l| l.split_whitespace().eq(["1", "1", "20"])), "{text}");
    assert!(text.lines().any(|l| l.split_whitespace().eq(["2", "22"])), "{text}");
}

#[test]
fn sector_filter() {
    let text = stdout(&run(&["ht-table", "kummer", "--sector", "t"]));
    assert!(text.lines().any(|l| l.split_whitespace().eq(["1", "1", "16"])), "{text}");
    let text = stdout(&run(&["cr-table", "e-z3", "--sector", "w"]));
    assert!(text.lines().any(|l| l.split_whitespace().eq(["1/3", "1/3", "3"])), "{text}");
}

#[test]
fn errors_exit_nonzero() {
    let out = run(&["frobnicate", "kummer"]);
    assert!(!out.status.success());
    let out = run(&["ht-table", "no-such-scenario"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-scenario"));
    let out = run(&["product", "kummer", "q:0:|", "t:0:|"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot parse class"));
    let out = run(&["product", "kummer", "t:0:|"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_file_names_the_field() {
    let path = std::env::temp_dir().join(format!("orbifold-ht-bad-{}.scenario", std::process::id()));
    std::fs::write(&path, "name = \"bad\"\nn = 1\ncomplex_structure = [[\"0\", \"-1\"], [\"1\", \"0\"]]\n[[generators]]\nname = \"t\"\nmatrix = [[-1, 0, 0], [0, -1]]\n").unwrap();
    let out = run(&["sectors", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("generators[0].matrix[0]"));
}

#[test]
fn timing_only_when_requested() {
    let plain = stdout(&run(&["ht-table", "e-pm1", "--output", "structured"]));
    assert!(!plain.contains("elapsed_ms"));
    let timed = stdout(&run(&["ht-table", "e-pm1", "--output", "structured", "--timing"]));
    assert!(timed.contains("elapsed_ms"));
    let table = stdout(&run(&["ht-table", "e-pm1", "--timing"]));
    assert!(!table.contains("elapsed"));
}

#[test]
fn omega_sign_is_echoed() {
    let text = stdout(&run(&["verify", "e-z3", "--omega-sign", "+1"]));
    assert!(text.starts_with("# verify e-z3 [mode=exhaustive-deg2, omega_sign=+1"), "{text}");
    assert!(!run(&["verify", "e-z3", "--omega-sign", "2"]).status.success());
}

#[test]
fn sampled_verify_is_reproducible() {
    let args = ["verify", "e-z3", "--mode", "sampled", "--seed", "1", "--count", "200", "--output", "structured"];
    let a = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, run(&args).stdout);
}

#[test]
fn lemmas_and_compare() {
    let out = run(&["lemmas", "kummer"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("tangent-complex         pass"));
    let out = run(&["compare", "kummer", "--output", "structured"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"structure-constants\""));
}

#[test]
fn middle_term_tables() {
    let text = stdout(&run(&["middle-term", "kummer", "t", "t", "2", "0", "2", "0"]));
    assert_eq!(text.lines().skip(1).collect::<Vec<_>>(), ["i  dim", "0  0", "1  0", "2  16"]);
    let text = stdout(&run(&["middle-term", "e-z3"]));
    assert!(text.lines().any(|l| l.split_whitespace().eq(["w", "w", "w^2", "1", "0", "0", "3"])), "{text}");
}
