//! Formal linear combinations and exterior-algebra bookkeeping.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactfield::{fmt_rational, parse_rational, Cyc, CycMatrix, Field, Rational};

/// A finite linear combination of labels with cyclotomic coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class<L: Ord> {
    conductor: u32,
    terms: BTreeMap<L, Cyc>,
}

impl<L: Ord + Clone> Class<L> {
    pub fn zero(conductor: u32) -> Self {
        Class { conductor, terms: BTreeMap::new() }
    }

    pub fn basis(conductor: u32, label: L) -> Self {
        let mut c = Self::zero(conductor);
        c.add_term(label, Cyc::one(conductor));
        c
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn add_term(&mut self, label: L, coeff: Cyc) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&label) {
            Some(c) => {
                let sum = c.plus(&coeff);
                if sum.is_zero() {
                    self.terms.remove(&label);
                } else {
                    *c = sum;
                }
            }
            None => {
                self.terms.insert(label, coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Cyc::from_int(self.conductor, -1)))
    }

    pub fn scale(&self, s: &Cyc) -> Self {
        let mut out = Self::zero(self.conductor);
        for (l, c) in &self.terms {
            out.add_term(l.clone(), c.times(s));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&L, &Cyc)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, label: &L) -> Cyc {
        self.terms.get(label).cloned().unwrap_or_else(|| Cyc::zero(self.conductor))
    }

    /// Applies a linear map given on labels.
    pub fn map_linear<M: Ord + Clone>(&self, mut f: impl FnMut(&L) -> Class<M>) -> Class<M> {
        let mut out = Class::zero(self.conductor);
        for (l, c) in &self.terms {
            for (m, d) in f(l).terms {
                out.add_term(m, d.times(c));
            }
        }
        out
    }
}

impl<L: Ord + Clone> FromIterator<(L, Cyc)> for Class<L> {
    /// Panics on an empty iterator, which carries no conductor.
    fn from_iter<I: IntoIterator<Item = (L, Cyc)>>(iter: I) -> Self {
        let mut it = iter.into_iter().peekable();
        let conductor = it.peek().expect("nonempty").1.conductor();
        let mut c = Class::zero(conductor);
        for (l, x) in it {
            c.add_term(l, x);
        }
        c
    }
}

/// Sorts a product of odd generators, returning the Koszul sign, or 0 when a
/// generator repeats.
pub fn sort_sign<K: Ord>(seq: &mut [K]) -> i32 {
    let mut sign = 1;
    for i in 1..seq.len() {
        let mut j = i;
        while j > 0 && seq[j - 1] > seq[j] {
            seq.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if seq.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// All subsets of `0..n`, by size and then lexicographically.
pub fn power_set(n: usize) -> Vec<Vec<usize>> {
    (0..=n).flat_map(|k| subsets(n, k)).collect()
}

/// Image of `e_{s_1} ∧ … ∧ e_{s_k}` under the linear map `m`:
/// `Σ_T det(m[T, S]) e_T`.
pub fn wedge_image(m: &CycMatrix, set: &[usize]) -> Vec<(Vec<usize>, Cyc)> {
    let conductor = *m.ctx();
    let mut out = Vec::new();
    for t in subsets(m.rows(), set.len()) {
        let minor = if set.is_empty() {
            Cyc::one(conductor)
        } else {
            let rows: Vec<Vec<Cyc>> = t.iter().map(|&i| set.iter().map(|&j| m.get(i, j).clone()).collect()).collect();
            CycMatrix::from_rows(&conductor, rows).expect("square minor").determinant()
        };
        if !minor.is_zero() {
            out.push((t, minor));
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// Splits `g:κ:A|B` into its parts, with the sets converted to 0-based
/// indices.
pub fn parse_label_parts(text: &str) -> Result<(String, usize, Vec<usize>, Vec<usize>)> {
    let bad = |why: &str| Error::InvalidLabel(format!("{text:?}: {why}"));
    let mut parts = text.trim().splitn(3, ':');
    let sector = parts.next().filter(|s| !s.is_empty()).ok_or_else(|| bad("missing sector"))?;
    let comp = parts.next().ok_or_else(|| bad("missing component"))?;
    let sets = parts.next().ok_or_else(|| bad("missing sets"))?;
    let comp: usize = comp.trim().parse().map_err(|_| bad("bad component index"))?;
    let (a, b) = sets.split_once('|').ok_or_else(|| bad("sets must be separated by '|'"))?;
    let parse_set = |s: &str| -> Result<Vec<usize>> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Vec::new());
        }
        let mut v = s
            .split(',')
            .map(|x| match x.trim().parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i - 1),
                _ => Err(bad("set entries are 1-based integers")),
            })
            .collect::<Result<Vec<_>>>()?;
        let len = v.len();
        v.sort_unstable();
        v.dedup();
        if v.len() != len {
            return Err(bad("repeated index"));
        }
        Ok(v)
    };
    Ok((sector.trim().to_string(), comp, parse_set(a)?, parse_set(b)?))
}

/// Renders `g:κ:A|B` with 1-based sets.
pub fn render_label_parts(sector: &str, comp: usize, a: &[usize], b: &[usize]) -> String {
    let set = |s: &[usize]| s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
    format!("{sector}:{comp}:{}|{}", set(a), set(b))
}

/// Parses `label`, `2*label`, `-1/3*label`, `(z3 + 1)*label` and sums of
/// such terms joined by `+` or `-`.
pub fn parse_class_expr<L: Ord + Clone>(
    text: &str,
    conductor: u32,
    mut parse_label: impl FnMut(&str) -> Result<L>,
) -> Result<Class<L>> {
    let mut out = Class::zero(conductor);
    if text.trim() == "0" {
        return Ok(out);
    }
    let mut depth = 0i32;
    let mut pieces = Vec::new();
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' if depth == 0 => {
                pieces.push(&text[start..i]);
                start = i + 1;
            }
            '-' if depth == 0 && !text[start..i].trim_start_matches(['-', ' ']).trim().is_empty() => {
                pieces.push(&text[start..i]);
                start = i;
            }
            _ => {}
        }
    }
    pieces.push(&text[start..]);
    for piece in pieces {
        let mut term = piece.trim();
        if term.is_empty() {
            return Err(Error::InvalidLabel(format!("{text:?}: empty term")));
        }
        let mut coeff = Cyc::one(conductor);
        if let Some(rest) = term.strip_prefix('-') {
            coeff = coeff.negated();
            term = rest.trim_start();
        }
        if let Some(rest) = term.strip_prefix('(') {
            let close = rest.find(')').ok_or_else(|| Error::InvalidLabel(format!("{text:?}: unbalanced parenthesis")))?;
            let c = Cyc::parse(&rest[..close])?.lift(conductor)?;
            coeff = coeff.times(&c);
            term = rest[close + 1..].trim_start().strip_prefix('*').unwrap_or(&rest[close + 1..]).trim();
        } else if term.starts_with(|c: char| c.is_ascii_digit()) {
            let (num, rest) = term
                .split_once('*')
                .ok_or_else(|| Error::InvalidLabel(format!("{text:?}: coefficient must be followed by '*'")))?;
            let q = parse_rational(num.trim()).ok_or_else(|| Error::InvalidLabel(format!("{text:?}: bad coefficient")))?;
            coeff = coeff.times(&Cyc::from_rational(conductor, &q));
            term = rest.trim();
        }
        out.add_term(parse_label(term)?, coeff);
    }
    Ok(out)
}

/// Inverse of [`parse_class_expr`]; the zero class renders as `0`.
pub fn render_class_expr<L: Ord + Clone>(class: &Class<L>, mut render: impl FnMut(&L) -> String) -> String {
    if class.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (label, c)) in class.terms().enumerate() {
        let body = render(label);
        let (neg, mag) = match c.as_rational() {
            Some(q) if q < Rational::from_integer(0.into()) => (true, Cyc::from_rational(c.conductor(), &-q)),
            _ => (false, c.clone()),
        };
        if i > 0 {
            out.push_str(if neg { " + -" } else { " + " });
        } else if neg {
            out.push('-');
        }
        match mag.as_rational() {
            Some(q) if q == Rational::from_integer(1.into()) => out.push_str(&body),
            Some(q) => out.push_str(&format!("{}*{body}", fmt_rational(&q))),
            None => out.push_str(&format!("({mag})*{body}")),
        }
    }
    out
}
