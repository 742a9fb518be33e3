//! Scenario files: TOML with `name`, `n`, `complex_structure`, `generators`
//! and an optional `[options]` table.

use std::path::Path;

use serde::Deserialize;

use orbifold_core::htspace::{Settings, SignConvention};
use orbifold_core::torusaction::{validate_scenario, OrbifoldScenario, RawGenerator, RawScenario, DEFAULT_CLOSURE_BOUND};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    n: usize,
    complex_structure: Vec<Vec<String>>,
    #[serde(default)]
    generators: Vec<GeneratorEntry>,
    #[serde(default)]
    options: OptionsEntry,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorEntry {
    name: String,
    order: Option<u32>,
    matrix: Vec<Vec<i64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionsEntry {
    omega_character_sign: Option<i32>,
    sign_convention: Option<String>,
    closure_bound: Option<usize>,
}

/// A parsed scenario file before validation.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedScenario {
    pub raw: RawScenario,
    pub settings: Settings,
}

const BUNDLED: &[(&str, &str)] = &[
    ("kummer", include_str!("../scenarios/kummer.scenario")),
    ("e-pm1", include_str!("../scenarios/e-pm1.scenario")),
    ("e-z3", include_str!("../scenarios/e-z3.scenario")),
    ("e-i-z4", include_str!("../scenarios/e-i-z4.scenario")),
    ("torus-e", include_str!("../scenarios/torus-e.scenario")),
    ("abelian-surface", include_str!("../scenarios/abelian-surface.scenario")),
    ("ee-z2xz2", include_str!("../scenarios/ee-z2xz2.scenario")),
];

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn bundled(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".scenario").unwrap_or(name);
    BUNDLED.iter().find(|(n, _)| *n == stem).map(|(_, text)| *text)
}

fn field(source: &str, path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Field { file: source.into(), path: path.into(), message: message.into() }
}

fn check_square<T>(source: &str, path: &str, rows: &[Vec<T>], size: usize) -> Result<(), CliError> {
    if rows.len() != size {
        return Err(field(source, path, format!("expected {size} rows, found {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != size {
            return Err(field(source, format!("{path}[{i}]"), format!("expected {size} entries, found {}", row.len())));
        }
    }
    Ok(())
}

/// Parses scenario text; `source` names the file in diagnostics.
pub fn parse_scenario(source: &str, text: &str) -> Result<LoadedScenario, CliError> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| CliError::Parse { file: source.into(), message: e.to_string() })?;
    if file.n == 0 {
        return Err(field(source, "n", "must be at least 1"));
    }
    let size = 2 * file.n;
    check_square(source, "complex_structure", &file.complex_structure, size)?;
    for (i, g) in file.generators.iter().enumerate() {
        check_square(source, &format!("generators[{i}].matrix"), &g.matrix, size)?;
    }
    let mut settings = Settings::default();
    if let Some(s) = file.options.omega_character_sign {
        if s != 1 && s != -1 {
            return Err(field(source, "options.omega_character_sign", "must be +1 or -1"));
        }
        settings.omega_sign = s;
    }
    if let Some(c) = &file.options.sign_convention {
        settings.sign_convention = c
            .parse::<SignConvention>()
            .map_err(|_| field(source, "options.sign_convention", format!("unknown profile {c:?}")))?;
    }
    let raw = RawScenario {
        name: file.name,
        n: file.n,
        complex_structure: file.complex_structure,
        generators: file
            .generators
            .into_iter()
            .map(|g| RawGenerator { name: g.name, order: g.order, matrix: g.matrix })
            .collect(),
        closure_bound: file.options.closure_bound.unwrap_or(DEFAULT_CLOSURE_BOUND),
    };
    Ok(LoadedScenario { raw, settings })
}

/// Reads a scenario from `arg`, a file path or the name of a bundled scenario.
pub fn load(arg: &str) -> Result<LoadedScenario, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: arg.into(), message: e.to_string() })?;
        return parse_scenario(arg, &text);
    }
    match bundled(arg) {
        Some(text) => parse_scenario(arg, text),
        None => Err(CliError::Io { path: arg.into(), message: "no such file or bundled scenario".into() }),
    }
}

pub fn validate(loaded: &LoadedScenario) -> Result<OrbifoldScenario, CliError> {
    Ok(validate_scenario(&loaded.raw)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use orbifold_core::catalog;

    #[test]
    fn bundled_files_match_catalog() {
        for raw in catalog::all() {
            let loaded = load(&raw.name).unwrap();
            assert_eq!(loaded.raw, raw);
            assert_eq!(loaded.settings, Settings::default());
        }
    }

    #[test]
    fn short_row_reports_field_path() {
        let text = "name = \"x\"\nn = 1\ncomplex_structure = [[\"0\", \"-1\"], [\"1\"]]\n";
        let err = parse_scenario("x.scenario", text).unwrap_err();
        assert_eq!(err.to_string(), "x.scenario: complex_structure[1]: expected 2 entries, found 1");
        let text = "name = \"x\"\nn = 1\ncomplex_structure = [[\"0\", \"-1\"], [\"1\", \"0\"]]\n\
                    [[generators]]\nname = \"t\"\nmatrix = [[-1, 0], [0]]\n";
        let err = parse_scenario("x.scenario", text).unwrap_err();
        assert!(err.to_string().contains("generators[0].matrix[1]"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_location() {
        let err = parse_scenario("y.scenario", "name = \"x\"\nn = \n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_scenario("y.scenario", "name = \"x\"\ncomplex_structure = []\n").unwrap_err();
        assert!(err.to_string().contains("missing field `n`"), "{err}");
    }

    #[test]
    fn options_are_checked() {
        let base = "name = \"x\"\nn = 1\ncomplex_structure = [[\"0\", \"-1\"], [\"1\", \"0\"]]\n[options]\n";
        let err = parse_scenario("z", &format!("{base}omega_character_sign = 2\n")).unwrap_err();
        assert!(err.to_string().contains("options.omega_character_sign"));
        let ok = parse_scenario("z", &format!("{base}omega_character_sign = 1\n")).unwrap();
        assert_eq!(ok.settings.omega_sign, 1);
    }
}
