//! Dimension tables and verification reports.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::exactfield::{fmt_rational, Rational};

/// Dimensions indexed by a rational bidegree `(p, q)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigradedTable {
    pub entries: BTreeMap<(Rational, Rational), usize>,
}

impl BigradedTable {
    pub fn add(&mut self, p: Rational, q: Rational, count: usize) {
        if count > 0 {
            *self.entries.entry((p, q)).or_insert(0) += count;
        }
    }

    pub fn get(&self, p: &Rational, q: &Rational) -> usize {
        self.entries.get(&(p.clone(), q.clone())).copied().unwrap_or(0)
    }

    /// Totals by `p + q`.
    pub fn by_degree(&self) -> BTreeMap<Rational, usize> {
        let mut out = BTreeMap::new();
        for ((p, q), &n) in &self.entries {
            *out.entry(p + q).or_insert(0) += n;
        }
        out
    }

    pub fn degree(&self, d: &Rational) -> usize {
        self.by_degree().get(d).copied().unwrap_or(0)
    }

    /// The table with `p` and `q` exchanged.
    pub fn reflected(&self) -> Self {
        BigradedTable { entries: self.entries.iter().map(|((p, q), &n)| ((q.clone(), p.clone()), n)).collect() }
    }

    pub fn total(&self) -> usize {
        self.entries.values().sum()
    }

    /// Every bidegree with a nonzero entry in either table.
    pub fn union_keys(&self, other: &Self) -> Vec<(Rational, Rational)> {
        let mut keys: Vec<_> = self.entries.keys().chain(other.entries.keys()).cloned().collect();
        keys.sort();
        keys.dedup();
        keys
    }

    pub fn is_empty(&self) -> bool {
        self.entries.values().all(Zero::is_zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub detail: String,
    pub witnesses: Vec<String>,
}

impl Check {
    pub fn new(id: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            id: id.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            detail: detail.into(),
            witnesses: Vec::new(),
        }
    }

    pub fn with_witnesses(mut self, witnesses: Vec<String>) -> Self {
        self.witnesses = witnesses;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub suite: String,
    pub options: BTreeMap<String, String>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(scenario: &str, suite: &str) -> Self {
        VerificationReport { scenario: scenario.into(), suite: suite.into(), ..Default::default() }
    }

    pub fn option(mut self, key: &str, value: impl ToString) -> Self {
        self.options.insert(key.into(), value.to_string());
        self
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// `(p,q)` rendered as `(a/b, c/d)`.
pub fn fmt_bidegree(p: &Rational, q: &Rational) -> String {
    format!("({}, {})", fmt_rational(p), fmt_rational(q))
}
