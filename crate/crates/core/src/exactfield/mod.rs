//! Exact arithmetic: rationals, cyclotomic fields, integer lattices and the
//! matrix algorithms the rest of the crate is built on.

mod cyclotomic;
mod intmatrix;
mod matrix;

pub use cyclotomic::{cyclotomic_polynomial, fmt_rational, rational_signum, totient, Cyc};
pub(crate) use cyclotomic::parse_rational;
pub use intmatrix::{hermite_solve_congruence, IntMatrix, SmithForm, SuperLattice};
pub use matrix::{in_span, Matrix};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

pub type RatMatrix = Matrix<Rational>;
pub type CycMatrix = Matrix<Cyc>;

/// A commutative field with exact, canonical elements.
///
/// The context carries whatever is needed to build constants (the conductor
/// for cyclotomic fields, nothing for Q).
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    type Ctx: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn zero_in(ctx: &Self::Ctx) -> Self;
    fn one_in(ctx: &Self::Ctx) -> Self;
    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self;
    fn is_null(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn inverse(&self) -> Option<Self>;

    fn is_one_in(&self) -> bool {
        *self == Self::one_in(&self.ctx())
    }
}

impl Field for Rational {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero_in(_: &()) -> Self {
        Zero::zero()
    }
    fn one_in(_: &()) -> Self {
        One::one()
    }
    fn from_rational(_: &(), q: &Rational) -> Self {
        q.clone()
    }
    fn is_null(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Shorthand for building rationals in code and tests.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Cyclotomic matrix from a rational one.
pub fn rat_to_cyc(m: &RatMatrix, conductor: u32) -> CycMatrix {
    m.map(&conductor, |q| Cyc::from_rational(conductor, q))
}
