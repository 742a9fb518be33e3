//! Fixed-width tables and the structured envelope.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use orbifold_core::report::VerificationReport;

pub const SCHEMA_VERSION: u32 = 1;

/// Left-aligned columns separated by two spaces, without trailing blanks.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(cell);
            s.extend(std::iter::repeat_n(' ', w - cell.chars().count()));
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn header(command: &str, scenario: &str, options: &BTreeMap<String, String>) -> String {
    let opts: Vec<String> = options.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {command} {scenario} [{}]\n", opts.join(", "))
}

pub fn report_table(report: &VerificationReport) -> String {
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| vec![c.id.clone(), if c.passed() { "pass" } else { "fail" }.to_string(), c.detail.clone()])
        .collect();
    let mut out = table(&["check", "status", "detail"], &rows);
    for c in &report.checks {
        for w in &c.witnesses {
            out.push_str(&format!("{}: {w}\n", c.id));
        }
    }
    out
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    tool: &'static str,
    tool_version: &'static str,
    command: &'a str,
    scenario: &'a str,
    options: &'a BTreeMap<String, String>,
    result: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Value>,
}

pub fn structured(
    command: &str,
    scenario: &str,
    options: &BTreeMap<String, String>,
    result: &Value,
    elapsed_ms: Option<u128>,
) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        tool: "orbifold-ht",
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        scenario,
        options,
        result,
        timing: elapsed_ms.map(|ms| json!({ "elapsed_ms": ms })),
    };
    serde_json::to_string_pretty(&env).expect("serializable") + "\n"
}
