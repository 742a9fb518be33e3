use std::path::PathBuf;
use std::process::Command;

use orbifold_ht::scenario::bundled_names;

const COMMANDS: &[&str] = &["ht-table", "cr-table", "verify"];

fn run(command: &str, scenario: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_orbifold-ht"))
        .args([command, scenario, "--output", "structured"])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{command} {scenario}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn golden_path(command: &str, scenario: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{command}-{scenario}.json"))
}

#[test]
fn structured_outputs_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for scenario in bundled_names() {
        for command in COMMANDS {
            let first = run(command, scenario);
            let second = run(command, scenario);
            assert_eq!(first, second, "{command} {scenario} differs between runs");
            let path = golden_path(command, scenario);
            if update {
                std::fs::write(&path, &first).unwrap();
                continue;
            }
            let expected = std::fs::read(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
            assert_eq!(first, expected, "{command} {scenario} differs from {}", path.display());
        }
    }
}
