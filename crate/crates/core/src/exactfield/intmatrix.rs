use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Matrix, RatMatrix, Rational};
use crate::error::{Error, Result};

/// Dense integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols: c,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        })
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix { rows: rows.len(), cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, BigInt::from(x));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product dimensions");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> RatMatrix {
        let mut m = Matrix::zeros(&(), self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, Rational::from_integer(self.get(i, j).clone()));
            }
        }
        m
    }

    /// The integer matrix with the same entries, if every entry is integral.
    pub fn from_rational(m: &RatMatrix) -> Option<Self> {
        let mut out = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let q = m.get(i, j);
                if !q.is_integer() {
                    return None;
                }
                out.set(i, j, q.to_integer());
            }
        }
        Some(out)
    }

    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        self.to_rational().determinant().to_integer()
    }

    /// Order of a square matrix, searched up to `bound`.
    pub fn order(&self, bound: usize) -> Option<usize> {
        let id = Self::identity(self.rows);
        let mut p = self.clone();
        for k in 1..=bound {
            if p == id {
                return Some(k);
            }
            p = p.mul(self);
        }
        None
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] += factor * row[source]
    fn add_row(&mut self, target: usize, source: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(target, j) + factor * self.get(source, j);
            self.set(target, j, v);
        }
    }

    /// col[target] += factor * col[source]
    fn add_col(&mut self, target: usize, source: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, target) + factor * self.get(i, source);
            self.set(i, target, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    /// Smith normal form `U * self * V = D`.
    ///
    /// Pivots are chosen by minimal absolute value, ties broken by lowest row
    /// and then lowest column.
    pub fn smith_normal_form(&self) -> SmithForm {
        let mut d = self.clone();
        let mut u = Self::identity(self.rows);
        let mut v = Self::identity(self.cols);
        let n = self.rows.min(self.cols);
        let mut t = 0;
        while t < n {
            let Some((pi, pj)) = d.min_pivot(t) else { break };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..d.rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -d.get(i, t).div_floor(d.get(t, t));
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                dirty |= !d.get(i, t).is_zero();
            }
            for j in t + 1..d.cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(d.get(t, t));
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                dirty |= !d.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            let pivot = d.get(t, t).clone();
            let offender = (t + 1..d.rows)
                .find(|&i| (t + 1..d.cols).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            if let Some(i) = offender {
                let one = BigInt::one();
                d.add_row(t, i, &one);
                u.add_row(t, i, &one);
                continue;
            }
            if pivot.is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            t += 1;
        }
        SmithForm { u, d, v }
    }

    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = self.get(i, j);
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.get(bi, bj).abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    /// Row-style Hermite normal form: nonzero rows in echelon form with
    /// positive pivots and entries above each pivot reduced into [0, pivot).
    pub fn hermite_rows(&self) -> Self {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            while let Some(p) = (r..m.rows)
                .filter(|&i| !m.get(i, c).is_zero())
                .min_by(|&a, &b| m.get(a, c).abs().cmp(&m.get(b, c).abs()).then(a.cmp(&b)))
            {
                m.swap_rows(r, p);
                let mut clean = true;
                for i in r + 1..m.rows {
                    if m.get(i, c).is_zero() {
                        continue;
                    }
                    let q = -m.get(i, c).div_floor(m.get(r, c));
                    m.add_row(i, r, &q);
                    clean &= m.get(i, c).is_zero();
                }
                if clean {
                    break;
                }
            }
            if m.get(r, c).is_zero() {
                continue;
            }
            if m.get(r, c).is_negative() {
                m.negate_row(r);
            }
            for i in 0..r {
                let q = -m.get(i, c).div_floor(m.get(r, c));
                m.add_row(i, r, &q);
            }
            r += 1;
        }
        IntMatrix { rows: r, cols: m.cols, data: m.data[..r * m.cols].to_vec() }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix [")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries of `D`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }
}

/// The rational vectors `x` with `A x` integral, split as a lattice part and a
/// rational kernel.
#[derive(Clone, Debug)]
pub struct SuperLattice {
    /// Canonical basis (rows) of `V · (⊕ (1/d_i)Z ⊕ Z^free)`, a lattice containing `Z^n`.
    pub basis: RatMatrix,
    /// Basis of the rational kernel of `A`.
    pub kernel: Vec<Vec<Rational>>,
    /// Invariant factors of `A`, one per rank direction.
    pub factors: Vec<BigInt>,
    /// Unimodular change of coordinates from the Smith form of `A`.
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SuperLattice {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// `[L' : Z^n]` for the lattice part `L'`.
    pub fn index(&self) -> BigInt {
        self.factors.iter().product()
    }
}

/// Solves `A x ≡ 0 mod Z` over the rationals.
pub fn hermite_solve_congruence(a: &IntMatrix) -> SuperLattice {
    let n = a.cols();
    let snf = a.smith_normal_form();
    let factors = snf.invariant_factors();
    let v = snf.v;
    let v_inv = IntMatrix::from_rational(&v.to_rational().inverse().expect("unimodular"))
        .expect("unimodular inverse is integral");

    let vr = v.to_rational();
    let mut scaled = vr.clone();
    for (i, d) in factors.iter().enumerate() {
        let s = Rational::new(BigInt::one(), d.clone());
        for r in 0..n {
            let x = scaled.get(r, i) * &s;
            scaled.set(r, i, x);
        }
    }
    let kernel = (factors.len()..n).map(|j| vr.column(j)).collect();
    SuperLattice { basis: canonical_lattice_rows(&scaled.transpose()), kernel, factors, v, v_inv }
}

/// Hermite-canonical row basis of the lattice spanned by the rows of `m`.
pub fn canonical_lattice_rows(m: &RatMatrix) -> RatMatrix {
    let den = (0..m.rows())
        .flat_map(|i| m.row(i))
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut int = IntMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            int.set(i, j, (m.get(i, j) * Rational::from_integer(den.clone())).to_integer());
        }
    }
    let h = int.hermite_rows();
    let scale = Rational::new(BigInt::one(), den);
    h.to_rational().map(&(), |q| q * &scale)
}
