use serde::Serialize;

use super::{averaging_split_check, quotient_decomposition, tangent_complex_cohomology};
use crate::error::Result;
use crate::report::{Check, VerificationReport};
use crate::torusaction::OrbifoldScenario;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaRow {
    pub g: String,
    pub h: String,
    pub dim_v: usize,
    pub dim_vg: usize,
    pub dim_vh: usize,
    pub r: usize,
    pub dim_quotient: usize,
    pub quotient_iso: bool,
    pub averaging_split: bool,
    pub h0: usize,
    pub h1: usize,
    pub dim_vgh: usize,
}

/// Runs the three linear-algebra lemmas on `V` for every ordered pair of
/// group elements.
pub fn lemma_suite(s: &OrbifoldScenario) -> Result<(Vec<LemmaRow>, VerificationReport)> {
    let mut rows = Vec::new();
    let mut bad = [Vec::new(), Vec::new(), Vec::new()];
    for g in 0..s.order() {
        let mg = s.action_on_v(g);
        for h in 0..s.order() {
            let mh = s.action_on_v(h);
            let q = quotient_decomposition(&mg, &mh)?;
            let a = averaging_split_check(&mg, &mh)?;
            let t = tangent_complex_cohomology(&mg, &mh)?;
            let pair = format!("({}, {})", s.label(g), s.label(h));
            if !q.is_isomorphism() {
                bad[0].push(format!("{pair}: quotient {} expected {}", q.dim_quotient, q.expected_dim()));
            }
            if !a.passed {
                bad[1].push(format!("{pair}: {}", a.witness.clone().unwrap_or_default()));
            }
            if !t.matches() {
                bad[2].push(format!("{pair}: H0 {} H1 {}", t.h0, t.h1));
            }
            rows.push(LemmaRow {
                g: s.label(g).to_string(),
                h: s.label(h).to_string(),
                dim_v: q.dim_v,
                dim_vg: q.dim_vg,
                dim_vh: q.dim_vh,
                r: q.r,
                dim_quotient: q.dim_quotient,
                quotient_iso: q.is_isomorphism(),
                averaging_split: a.passed,
                h0: t.h0,
                h1: t.h1,
                dim_vgh: t.dim_vgh,
            });
        }
    }
    let n = rows.len();
    let mut report = VerificationReport::new(s.name(), "lemmas");
    let ids = ["quotient-decomposition", "averaging-split", "tangent-complex"];
    for (id, witnesses) in ids.into_iter().zip(bad) {
        let detail = format!("{n} pairs checked, {} failed", witnesses.len());
        report.push(Check::new(id, witnesses.is_empty(), detail).with_witnesses(witnesses));
    }
    Ok((rows, report))
}
