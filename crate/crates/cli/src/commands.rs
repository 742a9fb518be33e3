use std::collections::BTreeMap;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use orbifold_core::chenruan::{compare_sides, CrSpace};
use orbifold_core::exactfield::{fmt_rational, Rational};
use orbifold_core::fixedloci::{lemma_suite, FixedLoci};
use orbifold_core::htspace::{Convention, HTClass, HtSpace};
use orbifold_core::product::{middle_term_table, multiply, verify_ring_axioms, VerifyMode};
use orbifold_core::report::{fmt_bidegree, BigradedTable, VerificationReport};
use orbifold_core::torusaction::eigen_data;

use crate::emit;
use crate::error::CliError;
use crate::scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Sectors,
    Ages,
    FixedLoci,
    HtTable,
    CrTable,
    Product,
    MiddleTerm,
    Verify,
    Compare,
    Lemmas,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Sectors => "sectors",
            Command::Ages => "ages",
            Command::FixedLoci => "fixed-loci",
            Command::HtTable => "ht-table",
            Command::CrTable => "cr-table",
            Command::Product => "product",
            Command::MiddleTerm => "middle-term",
            Command::Verify => "verify",
            Command::Compare => "compare",
            Command::Lemmas => "lemmas",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    ExhaustiveDeg2,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    New,
    Parenthesized,
}

fn parse_sign(s: &str) -> Result<i32, String> {
    match s {
        "+1" | "1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err("expected +1 or -1".into()),
    }
}

/// Orbifold polyvector fields and Chen-Ruan cohomology of torus quotients.
#[derive(Debug, Parser)]
#[command(name = "orbifold-ht", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Scenario file, or the name of a bundled scenario.
    pub scenario: String,
    /// Class expressions for `product`; `g h p q p' q'` for `middle-term`.
    pub args: Vec<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub output: OutputFormat,
    /// Restrict per-sector output to one group element.
    #[arg(long)]
    pub sector: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    pub omega_sign: Option<i32>,
    #[arg(long, value_enum, default_value_t = ModeArg::ExhaustiveDeg2)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = ConventionArg::New)]
    pub convention: ConventionArg,
    /// Include elapsed time in structured output.
    #[arg(long)]
    pub timing: bool,
}

/// Rendered output and whether every reported check passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

struct Body {
    table: String,
    value: Value,
    passed: bool,
}

impl Body {
    fn ok(table: String, value: Value) -> Self {
        Body { table, value, passed: true }
    }

    fn report(report: &VerificationReport, extra_table: String, extra: Option<Value>) -> Self {
        let mut value = json!({ "report": report });
        if let Some(e) = extra {
            value["rows"] = e;
        }
        Body { table: extra_table + &emit::report_table(report), value, passed: report.all_passed() }
    }
}

fn q(x: &Rational) -> String {
    fmt_rational(x)
}

#[derive(Serialize)]
struct TableEntry {
    p: String,
    q: String,
    dim: usize,
}

#[derive(Serialize)]
struct DegreeEntry {
    degree: String,
    dim: usize,
}

fn bigraded_body(t: &BigradedTable, convention: &str) -> Body {
    let rows: Vec<Vec<String>> = t.entries.iter().map(|((p, qq), n)| vec![q(p), q(qq), n.to_string()]).collect();
    let degrees: Vec<Vec<String>> = t.by_degree().iter().map(|(d, n)| vec![q(d), n.to_string()]).collect();
    let mut text = emit::table(&["p", "q", "dim"], &rows);
    text.push('\n');
    text.push_str(&emit::table(&["degree", "dim"], &degrees));
    text.push_str(&format!("total {}\n", t.total()));
    let value = json!({
        "convention": convention,
        "entries": t.entries.iter().map(|((p, qq), n)| TableEntry { p: q(p), q: q(qq), dim: *n }).collect::<Vec<_>>(),
        "by_degree": t.by_degree().iter().map(|(d, n)| DegreeEntry { degree: q(d), dim: *n }).collect::<Vec<_>>(),
        "total": t.total(),
    });
    Body::ok(text, value)
}

fn sectors_of(cli: &Cli, loci: &FixedLoci) -> Result<Vec<usize>, CliError> {
    let s = loci.scenario();
    match &cli.sector {
        Some(label) => Ok(vec![s.element_index(label)?]),
        None => Ok((0..s.order()).collect()),
    }
}

fn usize_arg(text: &str) -> Result<usize, CliError> {
    text.parse().map_err(|_| CliError::Usage(format!("expected a nonnegative integer, found {text:?}")))
}

fn run_body(cli: &Cli, loci: &FixedLoci, settings: orbifold_core::htspace::Settings) -> Result<Body, CliError> {
    let s = loci.scenario();
    let space = HtSpace::new(loci, settings);
    match cli.command {
        Command::Sectors => {
            let mut rows = Vec::new();
            let mut values = Vec::new();
            for g in sectors_of(cli, loci)? {
                let sec = loci.sector(g);
                let row = vec![
                    s.label(g).to_string(),
                    s.element(g).order.to_string(),
                    q(&sec.age),
                    sec.codim.to_string(),
                    sec.dim().to_string(),
                    sec.components.order().to_string(),
                    space.sector_basis(g).len().to_string(),
                ];
                values.push(json!({
                    "element": row[0], "order": s.element(g).order, "age": row[2], "codim": sec.codim,
                    "dim": sec.dim(), "components": sec.components.order(), "labels": space.sector_basis(g).len(),
                }));
                rows.push(row);
            }
            let text = emit::table(&["element", "order", "age", "codim", "dim", "components", "labels"], &rows);
            Ok(Body::ok(text, json!({ "sectors": values })))
        }
        Command::Ages => {
            let mut rows = Vec::new();
            let mut values = Vec::new();
            for g in sectors_of(cli, loci)? {
                let e = eigen_data(s, g);
                let exps: Vec<String> = e.exponents.iter().map(q).collect();
                let age = q(&loci.sector(g).age);
                values.push(json!({ "element": s.label(g), "exponents": exps, "age": age }));
                rows.push(vec![s.label(g).to_string(), exps.join(","), age]);
            }
            Ok(Body::ok(emit::table(&["element", "exponents", "age"], &rows), json!({ "ages": values })))
        }
        Command::FixedLoci => {
            let mut rows = Vec::new();
            let mut values = Vec::new();
            for g in sectors_of(cli, loci)? {
                let comps = &loci.sector(g).components;
                let reps: Vec<String> = comps
                    .representatives
                    .iter()
                    .map(|r| format!("({})", r.iter().map(q).collect::<Vec<_>>().join(", ")))
                    .collect();
                for (k, rep) in reps.iter().enumerate() {
                    rows.push(vec![s.label(g).to_string(), k.to_string(), rep.clone()]);
                }
                values.push(json!({
                    "element": s.label(g),
                    "components": comps.order(),
                    "invariant_factors": comps.factors,
                    "fixed_coordinates": loci.sector(g).fixed,
                    "representatives": reps,
                }));
            }
            Ok(Body::ok(emit::table(&["element", "component", "representative"], &rows), json!({ "fixed_loci": values })))
        }
        Command::HtTable => {
            let (conv, name) = match cli.convention {
                ConventionArg::New => (Convention::New, "new"),
                ConventionArg::Parenthesized => (Convention::Parenthesized, "parenthesized"),
            };
            let keep = sectors_of(cli, loci)?;
            let mut t = BigradedTable::default();
            for x in space.invariant_basis() {
                if keep.contains(&space.sector_of(&x)?) {
                    let (p, qq) = space.bigrade(&x, conv)?;
                    t.add(p, qq, 1);
                }
            }
            Ok(bigraded_body(&t, name))
        }
        Command::CrTable => {
            let cr = CrSpace::new(loci);
            let keep = sectors_of(cli, loci)?;
            let mut t = BigradedTable::default();
            for x in cr.invariant_basis() {
                let (l, _) = x.terms().next().expect("nonzero");
                if keep.contains(&l.sector) {
                    let (p, qq) = cr.bidegree(l);
                    t.add(p, qq, 1);
                }
            }
            Ok(bigraded_body(&t, "orbifold-hodge"))
        }
        Command::Product => {
            let [a, b] = cli.args.as_slice() else {
                return Err(CliError::Usage("product takes two class expressions".into()));
            };
            let parse = |text: &String| {
                space.parse(text).map_err(|e| CliError::ClassParse { text: text.clone(), message: e.to_string() })
            };
            let (x, y) = (parse(a)?, parse(b)?);
            let p = multiply(&space, &x, &y)?;
            let bideg = space.bigrade(&p, Convention::New).ok().map(|(u, v)| fmt_bidegree(&u, &v));
            let rendered = space.render(&p);
            let factor = |c: &HTClass| match c.len() {
                1 => space.render(c),
                _ => format!("({})", space.render(c)),
            };
            let mut text = format!("{} * {} = {}\n", factor(&x), factor(&y), rendered);
            if let Some(bd) = &bideg {
                text.push_str(&format!("bidegree {bd}\n"));
            }
            let value = json!({ "a": space.render(&x), "b": space.render(&y), "product": rendered, "bidegree": bideg });
            Ok(Body::ok(text, value))
        }
        Command::MiddleTerm => {
            if cli.args.is_empty() {
                let mut rows = Vec::new();
                let mut values = Vec::new();
                for g in 0..s.order() {
                    for h in 0..s.order() {
                        let pair = loci.pair(g, h)?;
                        let row = vec![
                            s.label(g).to_string(),
                            s.label(h).to_string(),
                            s.label(pair.gh).to_string(),
                            pair.r.to_string(),
                            pair.k.to_string(),
                            pair.normal_in_gh.len().to_string(),
                            pair.components.order().to_string(),
                        ];
                        values.push(json!({
                            "g": row[0], "h": row[1], "gh": row[2], "r": pair.r, "k": pair.k,
                            "normal_codim": pair.normal_in_gh.len(), "components": pair.components.order(),
                            "i_range": (0..=pair.r).collect::<Vec<_>>(),
                        }));
                        rows.push(row);
                    }
                }
                let text = emit::table(&["g", "h", "gh", "r", "k", "normal_codim", "components"], &rows);
                return Ok(Body::ok(text, json!({ "pairs": values })));
            }
            let [g, h, rest @ ..] = cli.args.as_slice() else {
                return Err(CliError::Usage("middle-term takes g h p q p' q'".into()));
            };
            let [p, qq, p2, q2] = rest else {
                return Err(CliError::Usage("middle-term takes g h p q p' q'".into()));
            };
            let (g, h) = (s.element_index(g)?, s.element_index(h)?);
            let dims = middle_term_table(&space, g, h, usize_arg(p)?, usize_arg(qq)?, usize_arg(p2)?, usize_arg(q2)?)?;
            let rows: Vec<Vec<String>> = dims.iter().enumerate().map(|(i, d)| vec![i.to_string(), d.to_string()]).collect();
            let value = json!({
                "g": s.label(g), "h": s.label(h),
                "entries": dims.iter().enumerate().map(|(i, d)| json!({ "i": i, "dim": d })).collect::<Vec<_>>(),
            });
            Ok(Body::ok(emit::table(&["i", "dim"], &rows), value))
        }
        Command::Verify => {
            let mode = match cli.mode {
                ModeArg::Exhaustive => VerifyMode::Exhaustive,
                ModeArg::ExhaustiveDeg2 => VerifyMode::ExhaustiveDeg2,
                ModeArg::Sampled => VerifyMode::Sampled { seed: cli.seed, count: cli.count },
            };
            Ok(Body::report(&verify_ring_axioms(&space, mode)?, String::new(), None))
        }
        Command::Compare => {
            let c = compare_sides(&space)?;
            let rows: Vec<Vec<String>> =
                c.rows.iter().map(|r| vec![r.p.clone(), r.q.clone(), r.ht.to_string(), r.cr.to_string()]).collect();
            let text = emit::table(&["p", "q", "ht", "cr(q,p)"], &rows) + "\n";
            Ok(Body::report(&c.to_report(), text, Some(serde_json::to_value(&c.rows).expect("serializable"))))
        }
        Command::Lemmas => {
            let (rows, report) = lemma_suite(s)?;
            let table_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.g.clone(),
                        r.h.clone(),
                        r.dim_vg.to_string(),
                        r.dim_vh.to_string(),
                        r.r.to_string(),
                        r.dim_quotient.to_string(),
                        r.h0.to_string(),
                        r.h1.to_string(),
                    ]
                })
                .collect();
            let text = emit::table(&["g", "h", "dim_vg", "dim_vh", "r", "quotient", "h0", "h1"], &table_rows) + "\n";
            Ok(Body::report(&report, text, Some(serde_json::to_value(&rows).expect("serializable"))))
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let loaded = scenario::load(&cli.scenario)?;
    let mut settings = loaded.settings;
    if let Some(s) = cli.omega_sign {
        settings.omega_sign = s;
    }
    let loci = FixedLoci::new(scenario::validate(&loaded)?);
    let body = run_body(cli, &loci, settings)?;

    let mut options = BTreeMap::new();
    options.insert("omega_sign".to_string(), format!("{:+}", settings.omega_sign));
    options.insert("sign_convention".to_string(), settings.sign_convention.to_string());
    if let Some(sec) = &cli.sector {
        options.insert("sector".to_string(), sec.clone());
    }
    match cli.command {
        Command::HtTable => {
            let c = match cli.convention {
                ConventionArg::New => "new",
                ConventionArg::Parenthesized => "parenthesized",
            };
            options.insert("convention".to_string(), c.to_string());
        }
        Command::Verify => {
            let m = match cli.mode {
                ModeArg::Exhaustive => "exhaustive",
                ModeArg::ExhaustiveDeg2 => "exhaustive-deg2",
                ModeArg::Sampled => "sampled",
            };
            options.insert("mode".to_string(), m.to_string());
            if cli.mode == ModeArg::Sampled {
                options.insert("seed".to_string(), cli.seed.to_string());
                options.insert("count".to_string(), cli.count.to_string());
            }
        }
        _ => {}
    }

    let name = loaded.raw.name.as_str();
    let text = match cli.output {
        OutputFormat::Table => emit::header(cli.command.name(), name, &options) + &body.table,
        OutputFormat::Structured => {
            let elapsed = cli.timing.then(|| start.elapsed().as_millis());
            emit::structured(cli.command.name(), name, &options, &body.value, elapsed)
        }
    };
    Ok(Outcome { text, passed: body.passed })
}
