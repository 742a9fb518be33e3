//! Standard example orbifolds.

use crate::torusaction::{RawGenerator, RawScenario, DEFAULT_CLOSURE_BOUND};

const ROOT3_THIRD: &str = "1/3*z12 + 1/3*z12^11";
const MINUS_ROOT3_THIRD: &str = "-1/3*z12 - 1/3*z12^11";
const TWO_ROOT3_THIRD: &str = "2/3*z12 + 2/3*z12^11";
const MINUS_TWO_ROOT3_THIRD: &str = "-2/3*z12 - 2/3*z12^11";

fn strings(rows: &[&[&str]]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()
}

type Gen<'a> = (&'a str, Option<u32>, Vec<Vec<i64>>);

fn scenario(name: &str, n: usize, j: Vec<Vec<String>>, gens: &[Gen<'_>]) -> RawScenario {
    RawScenario {
        name: name.into(),
        n,
        complex_structure: j,
        generators: gens
            .iter()
            .map(|(g, order, m)| RawGenerator { name: g.to_string(), order: *order, matrix: m.clone() })
            .collect(),
        closure_bound: DEFAULT_CLOSURE_BOUND,
    }
}

/// `J` of `E_i = C/Z[i]`.
pub fn j_gaussian() -> Vec<Vec<String>> {
    strings(&[&["0", "-1"], &["1", "0"]])
}

/// `J` of `E_ζ3 = C/Z[ζ3]`, in the lattice basis `1, ζ3`.
pub fn j_eisenstein() -> Vec<Vec<String>> {
    strings(&[&[ROOT3_THIRD, MINUS_TWO_ROOT3_THIRD], &[TWO_ROOT3_THIRD, MINUS_ROOT3_THIRD]])
}

fn block_diag(blocks: &[Vec<Vec<String>>]) -> Vec<Vec<String>> {
    let size: usize = blocks.iter().map(Vec::len).sum();
    let mut out = vec![vec!["0".to_string(); size]; size];
    let mut at = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                out[at + i][at + j] = x.clone();
            }
        }
        at += b.len();
    }
    out
}

fn scalar(dim: usize, c: i64) -> Vec<Vec<i64>> {
    (0..dim).map(|i| (0..dim).map(|j| if i == j { c } else { 0 }).collect()).collect()
}

/// `[E_i × E_i / ±1]`.
pub fn kummer() -> RawScenario {
    scenario("kummer", 2, block_diag(&[j_gaussian(), j_gaussian()]), &[("t", Some(2), scalar(4, -1))])
}

/// `[E_i / ±1]`.
pub fn e_pm1() -> RawScenario {
    scenario("e-pm1", 1, j_gaussian(), &[("t", Some(2), scalar(2, -1))])
}

/// `[E_ζ3 / Z3]`.
pub fn e_z3() -> RawScenario {
    scenario("e-z3", 1, j_eisenstein(), &[("w", Some(3), vec![vec![0, -1], vec![1, -1]])])
}

/// `[E_i / Z4]`, generated by multiplication by `i`.
pub fn e_i_z4() -> RawScenario {
    scenario("e-i-z4", 1, j_gaussian(), &[("s", Some(4), vec![vec![0, -1], vec![1, 0]])])
}

/// `E_i` with the trivial group.
pub fn torus_e() -> RawScenario {
    scenario("torus-e", 1, j_gaussian(), &[])
}

/// `E_i × E_i` with the trivial group.
pub fn abelian_surface() -> RawScenario {
    scenario("abelian-surface", 2, block_diag(&[j_gaussian(), j_gaussian()]), &[])
}

/// `[E_i × E_i / Z2 × Z2]` with the two factorwise negations.
pub fn ee_z2xz2() -> RawScenario {
    let a = vec![vec![-1, 0, 0, 0], vec![0, -1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]];
    let b = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, -1, 0], vec![0, 0, 0, -1]];
    scenario("ee-z2xz2", 2, block_diag(&[j_gaussian(), j_gaussian()]), &[("a", Some(2), a), ("b", Some(2), b)])
}

pub fn all() -> Vec<RawScenario> {
    vec![kummer(), e_pm1(), e_z3(), e_i_z4(), torus_e(), abelian_surface(), ee_z2xz2()]
}
