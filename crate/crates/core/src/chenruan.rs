//! Chen-Ruan orbifold cohomology `H*_CR([X/G]) = (⊕_g H*(X^g))^G` with the
//! Fantechi-Göttsche product, and its comparison with polyvector fields in the
//! holomorphic symplectic case.
//!
//! A basis label `(g, κ, H, B)` stands for `h_H ∧ b̄_B` on `X^g_κ`, with `h_j`
//! holomorphic and `b̄_j` antiholomorphic covectors indexed by the fixed
//! coordinates of `g`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::{parse_class_expr, parse_label_parts, power_set, render_class_expr, render_label_parts, sort_sign, Class};
use crate::error::{Error, Result};
use crate::exactfield::{fmt_rational, Cyc, Field, Rational};
use crate::fixedloci::FixedLoci;
use crate::htspace::{Convention, HTClass, HTLabel, HtSpace};
use crate::product;
use crate::report::{BigradedTable, Check, VerificationReport};
use crate::torusaction::OrbifoldScenario;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CRLabel {
    pub sector: usize,
    pub component: usize,
    /// Holomorphic covectors, positions among the fixed coordinates.
    pub hol: Vec<usize>,
    /// Antiholomorphic covectors, positions among the fixed coordinates.
    pub antihol: Vec<usize>,
}

pub type CRClass = Class<CRLabel>;

fn sign(conductor: u32, odd: bool) -> Cyc {
    Cyc::from_int(conductor, if odd { -1 } else { 1 })
}

#[derive(Clone, Copy, Debug)]
pub struct CrSpace<'a> {
    loci: &'a FixedLoci,
}

impl<'a> CrSpace<'a> {
    pub fn new(loci: &'a FixedLoci) -> Self {
        CrSpace { loci }
    }

    pub fn loci(&self) -> &'a FixedLoci {
        self.loci
    }

    pub fn scenario(&self) -> &'a OrbifoldScenario {
        self.loci.scenario()
    }

    pub fn conductor(&self) -> u32 {
        self.scenario().conductor()
    }

    pub fn sector_basis(&self, g: usize) -> Vec<CRLabel> {
        let sec = self.loci.sector(g);
        let sets = power_set(sec.dim());
        let mut out = Vec::new();
        for component in 0..sec.components.order() {
            for hol in &sets {
                for antihol in &sets {
                    out.push(CRLabel { sector: g, component, hol: hol.clone(), antihol: antihol.clone() });
                }
            }
        }
        out
    }

    pub fn basis(&self) -> Vec<CRLabel> {
        (0..self.scenario().order()).flat_map(|g| self.sector_basis(g)).collect()
    }

    /// `|H| + |B| + 2ι(g)`.
    pub fn degree(&self, l: &CRLabel) -> Rational {
        let age = &self.loci.sector(l.sector).age;
        Rational::from_integer((l.hol.len() + l.antihol.len()).into()) + age + age
    }

    /// `(|H| + ι(g), |B| + ι(g))`.
    pub fn bidegree(&self, l: &CRLabel) -> (Rational, Rational) {
        let age = &self.loci.sector(l.sector).age;
        (
            Rational::from_integer(l.hol.len().into()) + age,
            Rational::from_integer(l.antihol.len().into()) + age,
        )
    }

    pub fn act_label(&self, h: usize, l: &CRLabel) -> (CRLabel, Cyc) {
        let s = self.scenario();
        let sec = self.loci.sector(l.sector);
        let n = i64::from(s.conductor());
        let e: i64 = l.antihol.iter().map(|&i| i64::from(s.char_exponent(h, sec.fixed[i]))).sum::<i64>()
            - l.hol.iter().map(|&i| i64::from(s.char_exponent(h, sec.fixed[i]))).sum::<i64>();
        let label = CRLabel { component: sec.component_action[h][l.component], ..l.clone() };
        (label, Cyc::zeta_pow(s.conductor(), e.rem_euclid(n)))
    }

    pub fn act(&self, h: usize, x: &CRClass) -> CRClass {
        x.map_linear(|l| {
            let (m, c) = self.act_label(h, l);
            let mut out = CRClass::zero(self.conductor());
            out.add_term(m, c);
            out
        })
    }

    pub fn is_invariant(&self, x: &CRClass) -> bool {
        (0..self.scenario().order()).all(|h| self.act(h, x) == *x)
    }

    pub fn reynolds(&self, x: &CRClass) -> CRClass {
        let order = self.scenario().order();
        let mut acc = CRClass::zero(self.conductor());
        for h in 0..order {
            acc = acc.add(&self.act(h, x));
        }
        acc.scale(&Cyc::from_rational(self.conductor(), &Rational::new(1.into(), (order as i64).into())))
    }

    pub fn invariant_basis(&self) -> Vec<CRClass> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for l in self.basis() {
            if seen.contains(&l) {
                continue;
            }
            for h in 0..self.scenario().order() {
                seen.insert(self.act_label(h, &l).0);
            }
            let avg = self.reynolds(&CRClass::basis(self.conductor(), l));
            if !avg.is_zero() {
                out.push(avg);
            }
        }
        out
    }

    /// Orbifold Hodge numbers `h^{p,q}_CR`.
    pub fn hodge_table(&self) -> BigradedTable {
        let mut t = BigradedTable::default();
        for x in self.invariant_basis() {
            let (l, _) = x.terms().next().expect("nonzero");
            let (p, q) = self.bidegree(l);
            t.add(p, q, 1);
        }
        t
    }

    pub fn render_label(&self, l: &CRLabel) -> String {
        render_label_parts(self.scenario().label(l.sector), l.component, &l.hol, &l.antihol)
    }

    pub fn render(&self, x: &CRClass) -> String {
        render_class_expr(x, |l| self.render_label(l))
    }

    pub fn parse_label(&self, text: &str) -> Result<CRLabel> {
        let (sector, component, hol, antihol) = parse_label_parts(text)?;
        let g = self.scenario().element_index(&sector)?;
        let sec = self.loci.sector(g);
        if component >= sec.components.order() {
            return Err(Error::InvalidLabel(format!("{text:?}: sector has {} components", sec.components.order())));
        }
        if hol.iter().chain(&antihol).any(|&i| i >= sec.dim()) {
            return Err(Error::InvalidLabel(format!("{text:?}: fixed locus has dimension {}", sec.dim())));
        }
        Ok(CRLabel { sector: g, component, hol, antihol })
    }

    pub fn parse(&self, text: &str) -> Result<CRClass> {
        parse_class_expr(text, self.conductor(), |t| self.parse_label(t))
    }

    /// Fantechi-Göttsche product of two basis labels.
    pub fn fg_product_labels(&self, a: &CRLabel, b: &CRLabel) -> Result<CRClass> {
        let n = self.conductor();
        let pair = self.loci.pair(a.sector, b.sector)?;
        let mut out = CRClass::zero(n);
        if pair.k > 0 {
            return Ok(out);
        }
        let sa = self.loci.sector(a.sector);
        let sb = self.loci.sector(b.sector);
        let target = self.loci.sector(pair.gh);
        // Restriction keeps only covectors on coordinates of V^{g,h}.
        let global = |sec: &crate::fixedloci::SectorData, set: &[usize]| -> Option<Vec<usize>> {
            set.iter().map(|&i| Some(sec.fixed[i]).filter(|j| pair.fixed.contains(j))).collect()
        };
        let (Some(ha), Some(ba), Some(hb), Some(bb)) =
            (global(sa, &a.hol), global(sa, &a.antihol), global(sb, &b.hol), global(sb, &b.antihol))
        else {
            return Ok(out);
        };
        let normal = &pair.normal_in_gh;
        let c = normal.len();
        let mut hol: Vec<usize> = ha.iter().chain(&hb).chain(normal).copied().collect();
        let mut anti: Vec<usize> = ba.iter().chain(&bb).chain(normal).copied().collect();
        let mid = ba.len() + bb.len();
        let s1 = sort_sign(&mut hol);
        let s2 = sort_sign(&mut anti);
        if s1 == 0 || s2 == 0 {
            return Ok(out);
        }
        let odd = (ba.len() * hb.len() + c * mid + c * c.saturating_sub(1) / 2) % 2 == 1;
        let coeff = sign(n, odd).times(&Cyc::from_int(n, i64::from(s1 * s2)));
        let local = |set: Vec<usize>| -> Vec<usize> {
            set.into_iter().map(|j| target.local_index(j).expect("lies in V^{gh}")).collect()
        };
        let hol = local(hol);
        let anti = local(anti);
        for mu in 0..pair.components.order() {
            if pair.to_g[mu] == a.component && pair.to_h[mu] == b.component {
                let label = CRLabel { sector: pair.gh, component: pair.to_gh[mu], hol: hol.clone(), antihol: anti.clone() };
                out.add_term(label, coeff.clone());
            }
        }
        Ok(out)
    }

    pub fn fg_product(&self, a: &CRClass, b: &CRClass) -> Result<CRClass> {
        let mut out = CRClass::zero(self.conductor());
        for (la, ca) in a.terms() {
            for (lb, cb) in b.terms() {
                out = out.add(&self.fg_product_labels(la, lb)?.scale(&ca.times(cb)));
            }
        }
        Ok(out)
    }
}

/// A holomorphic symplectic structure in eigen-coordinates: each coordinate
/// `j` paired with `j'` where `χ_j χ_{j'} = 1` for every group element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymplecticPairing {
    pub pairs: Vec<(usize, usize)>,
}

impl SymplecticPairing {
    fn partner(&self, j: usize) -> (usize, bool) {
        for &(a, b) in &self.pairs {
            if a == j {
                return (b, false);
            }
            if b == j {
                return (a, true);
            }
        }
        unreachable!("every coordinate is paired")
    }
}

/// Finds a symplectic pairing preserved by the group, provided every element
/// acts with determinant 1.
pub fn symplectic_pairing(s: &OrbifoldScenario) -> Option<SymplecticPairing> {
    let n = s.n();
    if n % 2 == 1 {
        return None;
    }
    let order = s.order();
    let cond = s.conductor();
    let det_one = (0..order).all(|g| (0..n).map(|j| s.char_exponent(g, j)).sum::<u32>() % cond == 0);
    if !det_one {
        return None;
    }
    let mut free: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::new();
    while let Some(j) = free.first().copied() {
        free.remove(0);
        let pos = free
            .iter()
            .position(|&k| (0..order).all(|g| (s.char_exponent(g, j) + s.char_exponent(g, k)).is_multiple_of(cond)))?;
        pairs.push((j, free.remove(pos)));
    }
    Some(SymplecticPairing { pairs })
}

/// Contraction with the symplectic form: `q_j ↦ h_{j'}`, `q_{j'} ↦ -h_j` for
/// each pair `(j, j')`.
pub fn contract_label(space: &HtSpace<'_>, pairing: &SymplecticPairing, l: &HTLabel) -> CRClass {
    let n = space.conductor();
    let sec = space.loci().sector(l.sector);
    let mut odd = false;
    let mut hol = Vec::new();
    for &i in &l.polys {
        let (partner, negate) = pairing.partner(sec.fixed[i]);
        odd ^= negate;
        hol.push(sec.local_index(partner).expect("partner is fixed"));
    }
    let s = sort_sign(&mut hol);
    // b̄_B h_H = ± h_H b̄_B
    odd ^= (l.forms.len() * l.polys.len()) % 2 == 1;
    let label = CRLabel { sector: l.sector, component: l.component, hol, antihol: l.forms.clone() };
    CRClass::basis(n, label).scale(&sign(n, odd).times(&Cyc::from_int(n, i64::from(s))))
}

pub fn contract(space: &HtSpace<'_>, pairing: &SymplecticPairing, x: &HTClass) -> CRClass {
    x.map_linear(|l| contract_label(space, pairing, l))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionRow {
    pub p: String,
    pub q: String,
    pub ht: usize,
    /// `h^{q,p}_CR`.
    pub cr: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub scenario: String,
    pub holomorphic_symplectic: bool,
    pub rows: Vec<DimensionRow>,
    pub dimensions_agree: bool,
    /// Scalar `λ` with `Φ(x·y) = λ Φ(x)·Φ(y)`, when structure constants were compared.
    pub lambda: Option<String>,
    pub structure_agrees: Option<bool>,
    pub pairs_checked: usize,
    pub mismatches: Vec<String>,
}

impl Comparison {
    pub fn to_report(&self) -> VerificationReport {
        let mut report = VerificationReport::new(&self.scenario, "compare")
            .option("holomorphic_symplectic", self.holomorphic_symplectic);
        let bad: Vec<String> = self
            .rows
            .iter()
            .filter(|r| r.ht != r.cr)
            .map(|r| format!("({}, {}): HT {} CR {}", r.p, r.q, r.ht, r.cr))
            .collect();
        let detail = format!("{} bidegrees compared, {} differ", self.rows.len(), bad.len());
        report.push(Check::new("dimensions", bad.is_empty(), detail).with_witnesses(bad));
        if let Some(ok) = self.structure_agrees {
            let detail = format!(
                "{} invariant pairs compared, scalar {}",
                self.pairs_checked,
                self.lambda.as_deref().unwrap_or("undetermined")
            );
            report.push(Check::new("structure-constants", ok, detail).with_witnesses(self.mismatches.clone()));
        }
        report
    }
}

const MAX_MISMATCHES: usize = 20;

/// Compares `HT^{p,q}` with `H_CR^{q,p}` and, for holomorphic symplectic
/// scenarios, the products through the contraction map.
pub fn compare_sides(space: &HtSpace<'_>) -> Result<Comparison> {
    let loci = space.loci();
    loci.check_pairs()?;
    let cr = CrSpace::new(loci);
    let ht_table = space.dimension_table(Convention::New);
    let cr_table = cr.hodge_table().reflected();
    let rows: Vec<DimensionRow> = ht_table
        .union_keys(&cr_table)
        .into_iter()
        .map(|(p, q)| DimensionRow {
            p: fmt_rational(&p),
            q: fmt_rational(&q),
            ht: ht_table.get(&p, &q),
            cr: cr_table.get(&p, &q),
        })
        .collect();
    let dimensions_agree = rows.iter().all(|r| r.ht == r.cr);
    let mut out = Comparison {
        scenario: space.scenario().name().to_string(),
        holomorphic_symplectic: false,
        rows,
        dimensions_agree,
        lambda: None,
        structure_agrees: None,
        pairs_checked: 0,
        mismatches: Vec::new(),
    };
    let Some(pairing) = symplectic_pairing(space.scenario()) else {
        return Ok(out);
    };
    out.holomorphic_symplectic = true;
    let inv = space.invariant_basis();
    let mut lambda: Option<Cyc> = None;
    let mut agrees = true;
    for x in &inv {
        for y in &inv {
            out.pairs_checked += 1;
            let lhs = contract(space, &pairing, &product::multiply(space, x, y)?);
            let rhs = cr.fg_product(&contract(space, &pairing, x), &contract(space, &pairing, y))?;
            let ok = match (&lambda, lhs.terms().next()) {
                (None, Some((l, c))) => {
                    let r = rhs.coefficient(l);
                    match r.inverse() {
                        Some(ri) => {
                            let lam = c.times(&ri);
                            let ok = rhs.scale(&lam) == lhs;
                            lambda = Some(lam);
                            ok
                        }
                        None => false,
                    }
                }
                (None, None) => rhs.is_zero(),
                (Some(lam), _) => rhs.scale(lam) == lhs,
            };
            if !ok {
                agrees = false;
                if out.mismatches.len() < MAX_MISMATCHES {
                    out.mismatches.push(format!(
                        "x={} y={} Φ(xy)={} Φx·Φy={}",
                        space.render(x),
                        space.render(y),
                        cr.render(&lhs),
                        cr.render(&rhs)
                    ));
                }
            }
        }
    }
    out.lambda = lambda.map(|l| l.to_string());
    out.structure_agrees = Some(agrees);
    Ok(out)
}
