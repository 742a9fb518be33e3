//! Complex tori `V/Λ` with a finite abelian group of linear automorphisms.
//!
//! The lattice is `Z^{2n}`, the complex structure `J` is a real matrix with
//! `J² = -1`, and `V` is realized as the `+i` eigenspace of `J` inside
//! `Λ ⊗ Q(ζ_N)`. All group elements are diagonalized simultaneously, so each
//! coordinate `j` of `V` carries a character `χ_j(g) = ζ_N^{e_j(g)}`.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::{rat, Cyc, CycMatrix, IntMatrix, Matrix, Rational};

pub const DEFAULT_CLOSURE_BOUND: usize = 1024;

/// Unvalidated generator as read from a scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawGenerator {
    pub name: String,
    pub order: Option<u32>,
    pub matrix: Vec<Vec<i64>>,
}

/// Unvalidated scenario as read from a scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawScenario {
    pub name: String,
    pub n: usize,
    /// Row-major entries of `J`, each a rational or cyclotomic expression.
    pub complex_structure: Vec<Vec<String>>,
    pub generators: Vec<RawGenerator>,
    pub closure_bound: usize,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub matrix: IntMatrix,
    pub order: u32,
}

#[derive(Clone, Debug)]
pub struct Element {
    /// Word label such as `e`, `t`, `s^2` or `a*b^2`.
    pub label: String,
    /// Exponent of each generator in the label.
    pub word: Vec<u32>,
    pub matrix: IntMatrix,
    pub order: u32,
}

/// A validated orbifold `[X/G]`.
#[derive(Clone, Debug)]
pub struct OrbifoldScenario {
    name: String,
    n: usize,
    conductor: u32,
    j: CycMatrix,
    generators: Vec<Generator>,
    elements: Vec<Element>,
    mult: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    /// Basis of `V` (columns), each column a joint eigenvector.
    eigenvectors: CycMatrix,
    /// Basis of `V` from the kernel of `J - i`, before diagonalization.
    plain_basis: CycMatrix,
    /// `char_exp[g][j]` with `g v_j = ζ_N^{char_exp[g][j]} v_j`.
    char_exp: Vec<Vec<u32>>,
}

/// Eigen-data of one element on `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenData {
    pub element: usize,
    /// Rotation exponents in `[0,1)`, sorted ascending.
    pub exponents: Vec<Rational>,
    /// Rotation exponents in coordinate order.
    pub coordinate_exponents: Vec<Rational>,
    /// Eigenvectors in `Λ ⊗ Q(ζ_N)`, one column per coordinate.
    pub eigenvectors: CycMatrix,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != "e"
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !name.starts_with(|c: char| c.is_ascii_digit())
}

fn to_cyc(m: &IntMatrix, conductor: u32) -> CycMatrix {
    let r = m.to_rational();
    r.map(&conductor, |q| Cyc::from_rational(conductor, q))
}

fn word_label(names: &[String], word: &[u32]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(word)
        .filter(|(_, &k)| k > 0)
        .map(|(name, &k)| if k == 1 { name.clone() } else { format!("{name}^{k}") })
        .collect();
    if parts.is_empty() {
        "e".to_string()
    } else {
        parts.join("*")
    }
}

/// Checks a raw scenario and enumerates its group.
pub fn validate_scenario(raw: &RawScenario) -> Result<OrbifoldScenario> {
    let n = raw.n;
    let dim = 2 * n;
    if n == 0 {
        return Err(Error::DimensionMismatch("n must be positive".into()));
    }
    let bound = raw.closure_bound.max(1);

    if raw.complex_structure.len() != dim || raw.complex_structure.iter().any(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch(format!("complex structure must be {dim}x{dim}")));
    }
    let j_entries: Vec<Vec<Cyc>> = raw
        .complex_structure
        .iter()
        .map(|row| row.iter().map(|s| Cyc::parse(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let mut seen = Vec::new();
    let mut generators = Vec::new();
    for g in &raw.generators {
        if !valid_name(&g.name) {
            return Err(Error::InvalidLabel(format!("generator name {:?}", g.name)));
        }
        if seen.contains(&g.name) {
            return Err(Error::DuplicateGenerator(g.name.clone()));
        }
        seen.push(g.name.clone());
        if g.matrix.len() != dim || g.matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(format!("generator {} must be {dim}x{dim}", g.name)));
        }
        let m = IntMatrix::from_rows(&g.matrix)?;
        if m.determinant().abs() != BigInt::one() {
            return Err(Error::NonUnimodular(g.name.clone()));
        }
        let order = m.order(bound).ok_or(Error::InfiniteClosure(bound))? as u32;
        if let Some(declared) = g.order {
            if declared != order {
                return Err(Error::OrderMismatch { name: g.name.clone(), declared, actual: order });
            }
        }
        generators.push(Generator { name: g.name.clone(), matrix: m, order });
    }
    for (a, ga) in generators.iter().enumerate() {
        for gb in &generators[a + 1..] {
            if ga.matrix.mul(&gb.matrix) != gb.matrix.mul(&ga.matrix) {
                return Err(Error::NonCommuting(ga.name.clone(), gb.name.clone()));
            }
        }
    }

    let names: Vec<String> = generators.iter().map(|g| g.name.clone()).collect();
    let (elements, mult, inverse) = enumerate_group(&generators, &names, bound, dim)?;

    let exponent = elements.iter().fold(1u32, |acc, e| acc.lcm(&e.order));
    let conductor = j_entries.iter().flatten().fold(4u32.lcm(&exponent), |acc, c| acc.lcm(&c.conductor()));
    let j_rows: Vec<Vec<Cyc>> = j_entries
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.lift(conductor)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let j = Matrix::from_rows(&conductor, j_rows)?;
    if j.map(&conductor, Cyc::conj) != j {
        return Err(Error::BadComplexStructure("J is not real".into()));
    }
    let minus_one = Matrix::identity(&conductor, dim).scale(&Cyc::from_int(conductor, -1));
    if j.mul(&j) != minus_one {
        return Err(Error::BadComplexStructure("J^2 is not -1".into()));
    }
    for g in &generators {
        let gc = to_cyc(&g.matrix, conductor);
        if gc.mul(&j) != j.mul(&gc) {
            return Err(Error::NotComplexLinear(g.name.clone()));
        }
    }

    let i_unit = Cyc::zeta_pow(conductor, i64::from(conductor / 4));
    let shifted = j.sub(&Matrix::identity(&conductor, dim).scale(&i_unit));
    let plain_basis = Matrix::from_columns(&conductor, dim, &shifted.kernel_basis());
    if plain_basis.cols() != n {
        return Err(Error::BadComplexStructure("the +i eigenspace has the wrong dimension".into()));
    }

    let (eigenvectors, gen_exp) = diagonalize(&plain_basis, &generators, conductor)?;
    let char_exp = elements
        .iter()
        .map(|el| {
            (0..n)
                .map(|c| {
                    let total: u64 =
                        el.word.iter().zip(&gen_exp).map(|(&w, ex)| u64::from(w) * u64::from(ex[c])).sum();
                    (total % u64::from(conductor)) as u32
                })
                .collect()
        })
        .collect();

    Ok(OrbifoldScenario {
        name: raw.name.clone(),
        n,
        conductor,
        j,
        generators,
        elements,
        mult,
        inverse,
        eigenvectors,
        plain_basis,
        char_exp,
    })
}

type GroupTables = (Vec<Element>, Vec<Vec<usize>>, Vec<usize>);

fn enumerate_group(generators: &[Generator], names: &[String], bound: usize, dim: usize) -> Result<GroupTables> {
    let identity = Element {
        label: "e".into(),
        word: vec![0; generators.len()],
        matrix: IntMatrix::identity(dim),
        order: 1,
    };
    let mut elements = vec![identity];
    let mut index: HashMap<IntMatrix, usize> = HashMap::new();
    index.insert(elements[0].matrix.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        for (gi, g) in generators.iter().enumerate() {
            let m = elements[cur].matrix.mul(&g.matrix);
            if index.contains_key(&m) {
                continue;
            }
            if elements.len() >= bound {
                return Err(Error::InfiniteClosure(bound));
            }
            let mut word = elements[cur].word.clone();
            word[gi] = (word[gi] + 1) % g.order;
            let order = m.order(bound).ok_or(Error::InfiniteClosure(bound))? as u32;
            index.insert(m.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(Element { label: word_label(names, &word), word, matrix: m, order });
        }
    }
    let mult: Vec<Vec<usize>> = elements
        .iter()
        .map(|a| elements.iter().map(|b| index[&a.matrix.mul(&b.matrix)]).collect())
        .collect();
    let inverse = (0..elements.len()).map(|a| mult[a].iter().position(|&p| p == 0).expect("group")).collect();
    Ok((elements, mult, inverse))
}

/// Joint eigenbasis of the generators on `V`, with the exponent of each
/// generator on each basis vector.
fn diagonalize(basis: &CycMatrix, generators: &[Generator], conductor: u32) -> Result<(CycMatrix, Vec<Vec<u32>>)> {
    let n = basis.cols();
    let restricted: Vec<CycMatrix> = generators
        .iter()
        .map(|g| {
            basis
                .solve_matrix(&to_cyc(&g.matrix, conductor).mul(basis))
                .ok_or_else(|| Error::NotComplexLinear(g.name.clone()))
        })
        .collect::<Result<_>>()?;

    let mut blocks: Vec<(Vec<u32>, CycMatrix)> = vec![(Vec::new(), Matrix::identity(&conductor, n))];
    for (g, a) in generators.iter().zip(&restricted) {
        let step = conductor / g.order;
        let mut next = Vec::new();
        for (exps, w) in blocks {
            let local = w.solve_matrix(&a.mul(&w)).expect("invariant block");
            let k = w.cols();
            let mut found = 0;
            for e in (0..conductor).step_by(step as usize) {
                let shifted = local.sub(&Matrix::identity(&conductor, k).scale(&Cyc::zeta_pow(conductor, i64::from(e))));
                let ker = shifted.kernel_basis();
                if ker.is_empty() {
                    continue;
                }
                found += ker.len();
                let mut ex = exps.clone();
                ex.push(e);
                next.push((ex, w.mul(&Matrix::from_columns(&conductor, k, &ker))));
            }
            assert_eq!(found, k, "finite-order action is diagonalizable");
        }
        blocks = next;
    }

    let mut columns = Vec::new();
    let mut gen_exp = vec![Vec::new(); generators.len()];
    for (exps, w) in &blocks {
        for col in w.columns() {
            columns.push(basis.mul_vec(&col));
            for (gi, &e) in exps.iter().enumerate() {
                gen_exp[gi].push(e);
            }
        }
    }
    Ok((Matrix::from_columns(&conductor, basis.rows(), &columns), gen_exp))
}

impl OrbifoldScenario {
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn conductor(&self) -> u32 {
        self.conductor
    }
    pub fn complex_structure(&self) -> &CycMatrix {
        &self.j
    }
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    pub fn element(&self, g: usize) -> &Element {
        &self.elements[g]
    }
    pub fn label(&self, g: usize) -> &str {
        &self.elements[g].label
    }
    pub fn identity(&self) -> usize {
        0
    }
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult[g][h]
    }
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// Looks up an element by word label, accepting any product of
    /// generator powers such as `a*b^2` or `b^2*a`.
    pub fn element_index(&self, label: &str) -> Result<usize> {
        if let Some(i) = self.elements.iter().position(|e| e.label == label) {
            return Ok(i);
        }
        let unknown = || Error::UnknownElement(label.to_string());
        let mut acc = self.identity();
        for part in label.split('*') {
            let (name, power) = match part.split_once('^') {
                Some((name, p)) => (name.trim(), p.trim().parse::<u32>().map_err(|_| unknown())?),
                None => (part.trim(), 1),
            };
            if name == "e" {
                continue;
            }
            let gi = self.generators.iter().position(|g| g.name == name).ok_or_else(unknown)?;
            let gen_el = self.elements.iter().position(|e| e.matrix == self.generators[gi].matrix).ok_or_else(unknown)?;
            for _ in 0..power {
                acc = self.mul(acc, gen_el);
            }
        }
        Ok(acc)
    }

    /// Joint eigenvectors of `G` spanning `V`, as columns.
    pub fn eigenvectors(&self) -> &CycMatrix {
        &self.eigenvectors
    }

    /// `e_j(g)` with `χ_j(g) = ζ_N^{e_j(g)}`.
    pub fn char_exponent(&self, g: usize, j: usize) -> u32 {
        self.char_exp[g][j]
    }

    pub fn character(&self, g: usize, j: usize) -> Cyc {
        Cyc::zeta_pow(self.conductor, i64::from(self.char_exp[g][j]))
    }

    /// Rotation exponent `a_j(g) = e_j(g)/N` in `[0,1)`.
    pub fn exponent(&self, g: usize, j: usize) -> Rational {
        rat(i64::from(self.char_exp[g][j]), i64::from(self.conductor))
    }

    /// Coordinates of `V` fixed by every element of `set`.
    pub fn fixed_coords(&self, set: &[usize]) -> Vec<usize> {
        (0..self.n).filter(|&j| set.iter().all(|&g| self.char_exp[g][j] == 0)).collect()
    }

    /// Matrix of `g` on `V` in the basis coming from the kernel of `J - i`
    /// (not diagonal in general).
    pub fn action_on_v(&self, g: usize) -> CycMatrix {
        let gm = to_cyc(&self.elements[g].matrix, self.conductor);
        self.plain_basis.solve_matrix(&gm.mul(&self.plain_basis)).expect("V is invariant")
    }

    /// Matrix of `g` on `V` in the joint eigenbasis (diagonal).
    pub fn diagonal_action(&self, g: usize) -> CycMatrix {
        let diag: Vec<Cyc> = (0..self.n).map(|j| self.character(g, j)).collect();
        Matrix::diagonal(&self.conductor, &diag)
    }
}

pub fn eigen_data(s: &OrbifoldScenario, g: usize) -> EigenData {
    let coordinate_exponents: Vec<Rational> = (0..s.n()).map(|j| s.exponent(g, j)).collect();
    let mut exponents = coordinate_exponents.clone();
    exponents.sort();
    EigenData { element: g, exponents, coordinate_exponents, eigenvectors: s.eigenvectors().clone() }
}

/// `ι(g) = Σ_j a_j(g)`.
pub fn age(s: &OrbifoldScenario, g: usize) -> Rational {
    (0..s.n()).map(|j| s.exponent(g, j)).sum()
}

/// Determinant of `g` on `V`.
pub fn det_on_v(s: &OrbifoldScenario, g: usize) -> Cyc {
    s.action_on_v(g).determinant()
}
