//! Orbifold polyvector fields `HT*(X;G) = ⊕_g ⊕_κ H^{*}(X^g_κ, ∧^* T ⊗ ω_g)`.
//!
//! On a torus component the cohomology is an exterior algebra: a basis label
//! `(g, κ, B, Q)` stands for `b̄_B ⊗ q_Q` where `b̄_j` are antiholomorphic
//! covectors and `q_j` holomorphic vectors of `V^g`, indexed by the fixed
//! coordinates of `g`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{parse_class_expr, parse_label_parts, power_set, render_class_expr, render_label_parts, Class};
use crate::error::{Error, Result};
use crate::exactfield::{Cyc, Field, Rational};
use crate::fixedloci::FixedLoci;
use crate::report::BigradedTable;
use crate::torusaction::OrbifoldScenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `(|B| + ι(g), |Q| + c_g - ι(g))`
    New,
    /// `(|B| + c_g, |Q|)`
    Parenthesized,
}

/// Named sign profile for the product pipeline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    /// Koszul signs for odd covectors and polyvectors, with the determinant
    /// line identification contributing `(-1)^{r(|Q_g|+|Q_h|)}`.
    #[default]
    Standard,
}

impl FromStr for SignConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(SignConvention::Standard),
            other => Err(Error::InvalidLabel(format!("unknown sign convention {other:?}"))),
        }
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("standard")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    /// Exponent σ in the character `det(h | V/V^g)^σ` on `ω_g`.
    pub omega_sign: i32,
    pub sign_convention: SignConvention,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { omega_sign: -1, sign_convention: SignConvention::Standard }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HTLabel {
    pub sector: usize,
    pub component: usize,
    /// Antiholomorphic form indices, 0-based positions among the fixed coordinates.
    pub forms: Vec<usize>,
    /// Polyvector indices, 0-based positions among the fixed coordinates.
    pub polys: Vec<usize>,
}

pub type HTClass = Class<HTLabel>;

/// The polyvector-field space of one scenario.
#[derive(Clone, Copy, Debug)]
pub struct HtSpace<'a> {
    loci: &'a FixedLoci,
    settings: Settings,
}

impl<'a> HtSpace<'a> {
    pub fn new(loci: &'a FixedLoci, settings: Settings) -> Self {
        HtSpace { loci, settings }
    }

    pub fn loci(&self) -> &'a FixedLoci {
        self.loci
    }

    pub fn scenario(&self) -> &'a OrbifoldScenario {
        self.loci.scenario()
    }

    pub fn settings(&self) -> Settings {
        self.settings
    }

    pub fn conductor(&self) -> u32 {
        self.scenario().conductor()
    }

    pub fn sector_basis(&self, g: usize) -> Vec<HTLabel> {
        let sec = self.loci.sector(g);
        let sets = power_set(sec.dim());
        let mut out = Vec::new();
        for component in 0..sec.components.order() {
            for forms in &sets {
                for polys in &sets {
                    out.push(HTLabel { sector: g, component, forms: forms.clone(), polys: polys.clone() });
                }
            }
        }
        out
    }

    pub fn basis(&self) -> Vec<HTLabel> {
        (0..self.scenario().order()).flat_map(|g| self.sector_basis(g)).collect()
    }

    pub fn degree(&self, l: &HTLabel) -> usize {
        l.forms.len() + l.polys.len() + self.loci.sector(l.sector).codim
    }

    /// Parity used for the sign rule of the product: `|B| + |Q|`.
    pub fn parity(&self, l: &HTLabel) -> usize {
        (l.forms.len() + l.polys.len()) % 2
    }

    pub fn bidegree(&self, l: &HTLabel, conv: Convention) -> (Rational, Rational) {
        let sec = self.loci.sector(l.sector);
        let b = Rational::from_integer(l.forms.len().into());
        let q = Rational::from_integer(l.polys.len().into());
        let c = Rational::from_integer(sec.codim.into());
        match conv {
            Convention::New => (b + &sec.age, q + c - &sec.age),
            Convention::Parenthesized => (b + c, q),
        }
    }

    pub fn bigrade(&self, x: &HTClass, conv: Convention) -> Result<(Rational, Rational)> {
        let mut degrees = x.terms().map(|(l, _)| self.bidegree(l, conv));
        let first = degrees.next().ok_or(Error::NotHomogeneous)?;
        if degrees.all(|d| d == first) {
            Ok(first)
        } else {
            Err(Error::NotHomogeneous)
        }
    }

    /// `h · label = c · label'`.
    pub fn act_label(&self, h: usize, l: &HTLabel) -> (HTLabel, Cyc) {
        let s = self.scenario();
        let sec = self.loci.sector(l.sector);
        let n = s.conductor() as i64;
        let mut e: i64 = l.forms.iter().chain(&l.polys).map(|&i| i64::from(s.char_exponent(h, sec.fixed[i]))).sum();
        e += i64::from(self.settings.omega_sign) * i64::from(sec.omega_exp[h]);
        let label = HTLabel { component: sec.component_action[h][l.component], ..l.clone() };
        (label, Cyc::zeta_pow(s.conductor(), e.rem_euclid(n)))
    }

    pub fn act(&self, h: usize, x: &HTClass) -> HTClass {
        x.map_linear(|l| {
            let (m, c) = self.act_label(h, l);
            let mut out = HTClass::zero(self.conductor());
            out.add_term(m, c);
            out
        })
    }

    pub fn is_invariant(&self, x: &HTClass) -> bool {
        (0..self.scenario().order()).all(|h| self.act(h, x) == *x)
    }

    /// `(1/|G|) Σ_h h · x`.
    pub fn reynolds(&self, x: &HTClass) -> HTClass {
        let order = self.scenario().order();
        let mut acc = HTClass::zero(self.conductor());
        for h in 0..order {
            acc = acc.add(&self.act(h, x));
        }
        acc.scale(&Cyc::from_rational(self.conductor(), &Rational::new(1.into(), (order as i64).into())))
    }

    /// Basis of the invariants, one averaged orbit per nonzero average.
    pub fn invariant_basis(&self) -> Vec<HTClass> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for l in self.basis() {
            if seen.contains(&l) {
                continue;
            }
            for h in 0..self.scenario().order() {
                seen.insert(self.act_label(h, &l).0);
            }
            let avg = self.reynolds(&HTClass::basis(self.conductor(), l));
            if !avg.is_zero() {
                out.push(avg);
            }
        }
        out
    }

    pub fn dimension_table(&self, conv: Convention) -> BigradedTable {
        let mut t = BigradedTable::default();
        for x in self.invariant_basis() {
            let (p, q) = self.bigrade(&x, conv).expect("orbit averages are homogeneous");
            t.add(p, q, 1);
        }
        t
    }

    /// Invariant dimensions by total degree.
    pub fn degree_table(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for x in self.invariant_basis() {
            let (l, _) = x.terms().next().expect("nonzero");
            *out.entry(self.degree(l)).or_insert(0) += 1;
        }
        out
    }

    pub fn render_label(&self, l: &HTLabel) -> String {
        render_label_parts(self.scenario().label(l.sector), l.component, &l.forms, &l.polys)
    }

    pub fn render(&self, x: &HTClass) -> String {
        render_class_expr(x, |l| self.render_label(l))
    }

    pub fn parse_label(&self, text: &str) -> Result<HTLabel> {
        let (sector, component, forms, polys) = parse_label_parts(text)?;
        let g = self.scenario().element_index(&sector)?;
        let sec = self.loci.sector(g);
        if component >= sec.components.order() {
            return Err(Error::InvalidLabel(format!(
                "{text:?}: sector {} has {} components",
                self.scenario().label(g),
                sec.components.order()
            )));
        }
        if forms.iter().chain(&polys).any(|&i| i >= sec.dim()) {
            return Err(Error::InvalidLabel(format!("{text:?}: fixed locus has dimension {}", sec.dim())));
        }
        Ok(HTLabel { sector: g, component, forms, polys })
    }

    pub fn parse(&self, text: &str) -> Result<HTClass> {
        parse_class_expr(text, self.conductor(), |t| self.parse_label(t))
    }

    /// The single sector carrying `x`.
    pub fn sector_of(&self, x: &HTClass) -> Result<usize> {
        let mut sectors = x.terms().map(|(l, _)| l.sector);
        let first = sectors.next().ok_or(Error::SectorMismatch)?;
        if sectors.all(|s| s == first) {
            Ok(first)
        } else {
            Err(Error::SectorMismatch)
        }
    }

    /// The unit `e:0:|`.
    pub fn unit(&self) -> HTClass {
        HTClass::basis(self.conductor(), HTLabel { sector: self.scenario().identity(), component: 0, forms: vec![], polys: vec![] })
    }

    pub fn one(&self) -> Cyc {
        Cyc::one(self.conductor())
    }

    pub fn minus_one(&self) -> Cyc {
        self.one().negated()
    }
}
