//! Fixed subspaces, component groups of fixed loci, and excess data for pairs
//! of group elements.

mod lemmas;
mod suite;

pub use lemmas::{
    averaging_split_check, quotient_decomposition, tangent_complex_cohomology, AveragingSplit,
    QuotientDecomposition, TangentCohomology,
};
pub use suite::{lemma_suite, LemmaRow};

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactfield::{hermite_solve_congruence, fmt_rational, Cyc, CycMatrix, IntMatrix, Matrix, Rational, SuperLattice};
use crate::torusaction::{age, OrbifoldScenario};

/// Basis of `V^S` (columns in `Λ ⊗ Q(ζ_N)`), with the coordinates it spans.
pub fn fixed_subspace(s: &OrbifoldScenario, elems: &[usize]) -> (Vec<usize>, CycMatrix) {
    let coords = s.fixed_coords(elems);
    let cols: Vec<Vec<Cyc>> = coords.iter().map(|&j| s.eigenvectors().column(j)).collect();
    (coords, Matrix::from_columns(&s.conductor(), 2 * s.n(), &cols))
}

/// `π₀(X^S) = L_S / (Λ + L_S ∩ (Λ⊗Q)^S)` with explicit coset representatives.
#[derive(Clone, Debug)]
pub struct ComponentGroup {
    pub elements: Vec<usize>,
    lattice: SuperLattice,
    /// Invariant factors greater than one, in Smith order.
    pub factors: Vec<u64>,
    /// Positions of those factors among the rank directions.
    positions: Vec<usize>,
    /// Coset representatives in `[0,1)^{2n}`, indexed in mixed radix.
    pub representatives: Vec<Vec<Rational>>,
}

impl ComponentGroup {
    pub fn order(&self) -> usize {
        self.representatives.len()
    }

    pub fn lattice(&self) -> &SuperLattice {
        &self.lattice
    }

    /// Component index of a point `x ∈ L_S`.
    pub fn classify(&self, x: &[Rational]) -> usize {
        let vinv = self.lattice.v_inv.to_rational();
        let y = vinv.mul_vec(x);
        let mut index = 0usize;
        for (&pos, &d) in self.positions.iter().zip(&self.factors) {
            let scaled = &y[pos] * Rational::from_integer(BigInt::from(d));
            assert!(scaled.is_integer(), "point does not lie in L_S");
            let t = scaled.to_integer().mod_floor(&BigInt::from(d));
            index = index * d as usize + t.to_usize().expect("small index");
        }
        index
    }
}

fn reduce_mod_one(x: Vec<Rational>) -> Vec<Rational> {
    x.into_iter().map(|q| &q - q.floor()).collect()
}

pub fn component_group(s: &OrbifoldScenario, elems: &[usize]) -> ComponentGroup {
    let dim = 2 * s.n();
    let id = IntMatrix::identity(dim);
    let stacked = elems
        .iter()
        .map(|&g| s.element(g).matrix.sub(&id))
        .reduce(|a, b| a.vstack(&b))
        .unwrap_or_else(|| IntMatrix::zeros(1, dim));
    let lattice = hermite_solve_congruence(&stacked);
    let mut factors = Vec::new();
    let mut positions = Vec::new();
    for (i, d) in lattice.factors.iter().enumerate() {
        if !d.is_one() {
            factors.push(d.to_u64().expect("component count fits in u64"));
            positions.push(i);
        }
    }
    let total: usize = factors.iter().map(|&d| d as usize).product();
    let v = lattice.v.to_rational();
    let representatives = (0..total)
        .map(|mut index| {
            let mut y = vec![Rational::zero(); dim];
            for (&pos, &d) in positions.iter().zip(&factors).rev() {
                let t = index % d as usize;
                index /= d as usize;
                y[pos] = Rational::new(BigInt::from(t), BigInt::from(d));
            }
            reduce_mod_one(v.mul_vec(&y))
        })
        .collect();
    ComponentGroup { elements: elems.to_vec(), lattice, factors, positions, representatives }
}

fn subgroup(s: &OrbifoldScenario, gens: &[usize]) -> BTreeSet<usize> {
    let mut set = BTreeSet::from([s.identity()]);
    loop {
        let next: BTreeSet<usize> = set.iter().flat_map(|&a| gens.iter().map(move |&g| (a, g))).map(|(a, g)| s.mul(a, g)).collect();
        let before = set.len();
        set.extend(next);
        if set.len() == before {
            return set;
        }
    }
}

/// The map `π₀(X^{S'}) → π₀(X^S)` induced by `X^{S'} ⊆ X^S`.
pub fn component_map(s: &OrbifoldScenario, large: &ComponentGroup, small: &ComponentGroup) -> Result<Vec<usize>> {
    let generated = subgroup(s, &large.elements);
    if let Some(&bad) = small.elements.iter().find(|g| !generated.contains(g)) {
        let names: Vec<&str> = large.elements.iter().map(|&g| s.label(g)).collect();
        return Err(Error::NotASubgroupRelation { small: s.label(bad).to_string(), large: names.join(",") });
    }
    Ok(large.representatives.iter().map(|x| small.classify(x)).collect())
}

/// Permutation of `π₀(X^S)` induced by the action of `h`.
pub fn component_action(s: &OrbifoldScenario, comps: &ComponentGroup, h: usize) -> Vec<usize> {
    let m = s.element(h).matrix.to_rational();
    comps.representatives.iter().map(|x| comps.classify(&m.mul_vec(x))).collect()
}

#[derive(Clone, Debug)]
pub struct SectorData {
    pub element: usize,
    /// Coordinates of `V` spanning `V^g`, ascending.
    pub fixed: Vec<usize>,
    /// Coordinates normal to `V^g`, ascending.
    pub normal: Vec<usize>,
    pub fixed_basis: CycMatrix,
    pub codim: usize,
    pub age: Rational,
    pub components: ComponentGroup,
    /// `component_action[h]` permutes `π₀(X^g)`.
    pub component_action: Vec<Vec<usize>>,
    /// Exponent of `det(h | V/V^g) = ζ_N^{omega_exp[h]}`.
    pub omega_exp: Vec<u32>,
}

impl SectorData {
    pub fn dim(&self) -> usize {
        self.fixed.len()
    }

    /// Position of coordinate `j` among the fixed coordinates.
    pub fn local_index(&self, j: usize) -> Option<usize> {
        self.fixed.iter().position(|&x| x == j)
    }
}

pub fn sector_data(s: &OrbifoldScenario, g: usize) -> SectorData {
    let (fixed, fixed_basis) = fixed_subspace(s, &[g]);
    let normal: Vec<usize> = (0..s.n()).filter(|j| !fixed.contains(j)).collect();
    let components = component_group(s, &[g]);
    let component_action = (0..s.order()).map(|h| component_action(s, &components, h)).collect();
    let omega_exp = (0..s.order())
        .map(|h| {
            let total: u64 = normal.iter().map(|&j| u64::from(s.char_exponent(h, j))).sum();
            (total % u64::from(s.conductor())) as u32
        })
        .collect();
    SectorData {
        element: g,
        codim: normal.len(),
        fixed,
        normal,
        fixed_basis,
        age: age(s, g),
        components,
        component_action,
        omega_exp,
    }
}

#[derive(Clone, Debug)]
pub struct PairData {
    pub g: usize,
    pub h: usize,
    pub gh: usize,
    /// Coordinates spanning `V^{g,h}`.
    pub fixed: Vec<usize>,
    /// Coordinates whose lifts give a basis of `E = V/(V^g+V^h)`.
    pub excess: Vec<usize>,
    /// Coordinates of `V^{gh}` normal to `V^{g,h}`.
    pub normal_in_gh: Vec<usize>,
    pub r: usize,
    pub k: usize,
    pub components: ComponentGroup,
    pub to_g: Vec<usize>,
    pub to_h: Vec<usize>,
    pub to_gh: Vec<usize>,
    pub avg_g: CycMatrix,
    pub avg_h: CycMatrix,
    pub avg_gh: CycMatrix,
}

/// `(1/ord g) Σ gⁱ` on `V` in eigen-coordinates.
pub fn averaging_projection(s: &OrbifoldScenario, g: usize) -> CycMatrix {
    let d = s.diagonal_action(g);
    let m = s.element(g).order;
    let mut acc = Matrix::zeros(&s.conductor(), s.n(), s.n());
    let mut p = Matrix::identity(&s.conductor(), s.n());
    for _ in 0..m {
        acc = acc.add(&p);
        p = p.mul(&d);
    }
    acc.scale(&Cyc::from_rational(s.conductor(), &Rational::new(BigInt::one(), BigInt::from(m))))
}

/// Lift of a basis of `V/(V^g + V^h)`: the coordinates moved by both.
pub fn excess_bundle(s: &OrbifoldScenario, g: usize, h: usize) -> Vec<usize> {
    let fg = s.fixed_coords(&[g]);
    let fh = s.fixed_coords(&[h]);
    (0..s.n()).filter(|j| !fg.contains(j) && !fh.contains(j)).collect()
}

pub fn pair_data(s: &OrbifoldScenario, sectors: &[SectorData], g: usize, h: usize) -> Result<PairData> {
    let gh = s.mul(g, h);
    let fixed = s.fixed_coords(&[g, h]);
    let excess = excess_bundle(s, g, h);
    let fixed_gh = &sectors[gh].fixed;
    let normal_in_gh: Vec<usize> = fixed_gh.iter().copied().filter(|j| !fixed.contains(j)).collect();
    let k = &sectors[g].age + &sectors[h].age - &sectors[gh].age - Rational::from_integer(normal_in_gh.len().into());
    if !k.is_integer() || k < Rational::zero() {
        return Err(Error::NegativeK {
            g: s.label(g).to_string(),
            h: s.label(h).to_string(),
            k: fmt_rational(&k),
        });
    }
    let components = component_group(s, &[g, h]);
    let to_g = component_map(s, &components, &sectors[g].components)?;
    let to_h = component_map(s, &components, &sectors[h].components)?;
    let to_gh = component_map(s, &components, &sectors[gh].components)?;
    Ok(PairData {
        g,
        h,
        gh,
        r: excess.len(),
        k: k.to_integer().to_usize().expect("small"),
        fixed,
        excess,
        normal_in_gh,
        components,
        to_g,
        to_h,
        to_gh,
        avg_g: averaging_projection(s, g),
        avg_h: averaging_projection(s, h),
        avg_gh: averaging_projection(s, gh),
    })
}

/// Scenario together with all sector data and lazily computed pair data.
#[derive(Debug)]
pub struct FixedLoci {
    scenario: OrbifoldScenario,
    sectors: Vec<SectorData>,
    pairs: Vec<OnceLock<Result<PairData>>>,
}

impl FixedLoci {
    pub fn new(scenario: OrbifoldScenario) -> Self {
        let sectors = (0..scenario.order()).map(|g| sector_data(&scenario, g)).collect();
        let pairs = (0..scenario.order() * scenario.order()).map(|_| OnceLock::new()).collect();
        FixedLoci { scenario, sectors, pairs }
    }

    pub fn scenario(&self) -> &OrbifoldScenario {
        &self.scenario
    }

    pub fn sector(&self, g: usize) -> &SectorData {
        &self.sectors[g]
    }

    pub fn sectors(&self) -> &[SectorData] {
        &self.sectors
    }

    pub fn pair(&self, g: usize, h: usize) -> Result<&PairData> {
        let idx = g * self.scenario.order() + h;
        self.pairs[idx]
            .get_or_init(|| pair_data(&self.scenario, &self.sectors, g, h))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Checks every pair, surfacing the first inconsistent one.
    pub fn check_pairs(&self) -> Result<()> {
        for g in 0..self.scenario.order() {
            for h in 0..self.scenario.order() {
                self.pair(g, h)?;
            }
        }
        Ok(())
    }
}
