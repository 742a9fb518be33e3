//! Elements of the cyclotomic field Q(ζ_N).
//!
//! Elements are stored in the power basis 1, ζ, …, ζ^{φ(N)-1} modulo the
//! cyclotomic polynomial Φ_N, so two values are equal exactly when their
//! coefficient vectors are.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Field, Rational};
use crate::error::{Error, Result};

/// Integer coefficients of Φ_n, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    assert!(n > 0, "cyclotomic polynomial of order 0");
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return Arc::clone(p);
    }
    // x^n - 1 = prod_{d | n} Φ_d
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_polynomial(d);
            poly = exact_div_monic(&poly, &phi_d);
        }
    }
    let poly = Arc::new(poly);
    cache.lock().unwrap().insert(n, Arc::clone(&poly));
    poly
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Euler's totient, i.e. the degree of Q(ζ_n).
pub fn totient(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

/// An exact element of Q(ζ_N).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyc {
    conductor: u32,
    coeffs: Vec<Rational>,
}

impl Cyc {
    /// Builds an element from an arbitrary-length coefficient vector in ζ_N.
    pub fn from_coeffs(conductor: u32, coeffs: Vec<Rational>) -> Self {
        let mut c = Cyc { conductor, coeffs };
        c.reduce();
        c
    }

    pub fn zero(conductor: u32) -> Self {
        Cyc { conductor, coeffs: vec![Rational::zero(); totient(conductor)] }
    }

    pub fn one(conductor: u32) -> Self {
        Self::from_rational(conductor, &Rational::one())
    }

    pub fn from_rational(conductor: u32, q: &Rational) -> Self {
        let mut c = Self::zero(conductor);
        c.coeffs[0] = q.clone();
        c
    }

    pub fn from_int(conductor: u32, v: i64) -> Self {
        Self::from_rational(conductor, &Rational::from_integer(BigInt::from(v)))
    }

    /// ζ_N^k for any integer k.
    pub fn zeta_pow(conductor: u32, k: i64) -> Self {
        let e = k.rem_euclid(conductor as i64) as usize;
        let mut coeffs = vec![Rational::zero(); e + 1];
        coeffs[e] = Rational::one();
        Self::from_coeffs(conductor, coeffs)
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn reduce(&mut self) {
        let phi = cyclotomic_polynomial(self.conductor);
        let d = phi.len() - 1;
        let coeffs = &mut self.coeffs;
        if coeffs.len() > d {
            for i in (d..coeffs.len()).rev() {
                let c = std::mem::take(&mut coeffs[i]);
                if c.is_zero() {
                    continue;
                }
                for (j, pj) in phi.iter().enumerate().take(d) {
                    if !pj.is_zero() {
                        coeffs[i - d + j] -= &c * Rational::from_integer(pj.clone());
                    }
                }
            }
        }
        coeffs.resize(d, Rational::zero());
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.conductor != other.conductor {
            return Err(Error::ConductorMismatch { left: self.conductor, right: other.conductor });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Cyc { conductor: self.conductor, coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Cyc { conductor: self.conductor, coeffs })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len();
        let mut prod = vec![Rational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(Cyc::from_coeffs(self.conductor, prod))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let inv = other.checked_inv()?;
        self.checked_mul(&inv)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Φ_N.
    pub fn checked_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let phi: Vec<Rational> = cyclotomic_polynomial(self.conductor)
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        let (mut r0, mut r1) = (phi, trim(self.coeffs.clone()));
        let (mut s0, mut s1) = (Vec::new(), vec![Rational::one()]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let next = poly_sub(&s0, &poly_mul(&q, &s1));
            s0 = std::mem::replace(&mut s1, next);
        }
        // r0 is a nonzero constant because Φ_N is irreducible
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].clone();
        let coeffs = s0.into_iter().map(|x| x / &c).collect();
        Ok(Cyc::from_coeffs(self.conductor, coeffs))
    }

    /// Re-expresses the element in Q(ζ_M) using ζ_N = ζ_M^{M/N}.
    pub fn lift(&self, target: u32) -> Result<Self> {
        if target == 0 || !target.is_multiple_of(self.conductor) {
            return Err(Error::ConductorNotDivisor { from: self.conductor, to: target });
        }
        let step = (target / self.conductor) as usize;
        let mut coeffs = vec![Rational::zero(); step * self.coeffs.len().max(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * step] = c.clone();
        }
        Ok(Cyc::from_coeffs(target, coeffs))
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let n = self.conductor as usize;
        let mut coeffs = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(n - i) % n] += c;
        }
        Cyc::from_coeffs(self.conductor, coeffs)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Cyc::one(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            base = base.times(&base);
            e >>= 1;
        }
        acc
    }

    /// Exponent k with self = ζ_N^k, if self is an N-th root of unity.
    pub fn root_of_unity_exponent(&self) -> Option<u32> {
        (0..self.conductor).find(|&k| Cyc::zeta_pow(self.conductor, k as i64) == *self)
    }

    /// Parses expressions such as `1/3*z12 - 2/3*z12^11 + 1`.
    ///
    /// `zM^k` denotes ζ_M^k. The result has the least common multiple of all
    /// mentioned M as conductor (1 when no root of unity appears).
    pub fn parse(input: &str) -> Result<Self> {
        let err = |reason: &str| Error::CycParse { input: input.to_string(), reason: reason.to_string() };
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty expression"));
        }
        let mut terms: Vec<(Rational, u32, i64)> = Vec::new();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (negative, body) = match rest.as_bytes()[0] {
                b'+' => (false, &rest[1..]),
                b'-' => (true, &rest[1..]),
                _ if terms.is_empty() => (false, rest),
                _ => return Err(err("expected '+' or '-' between terms")),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let (coef_str, root_str) = match term.find('z') {
                Some(pos) => {
                    let coef = term[..pos].strip_suffix('*').unwrap_or(&term[..pos]);
                    (coef, Some(&term[pos + 1..]))
                }
                None => (term, None),
            };
            let mut coef = if coef_str.is_empty() {
                Rational::one()
            } else {
                parse_rational(coef_str).ok_or_else(|| err("bad rational coefficient"))?
            };
            if negative {
                coef = -coef;
            }
            let (order, power) = match root_str {
                None => (1, 0),
                Some(r) => {
                    let (m, k) = match r.split_once('^') {
                        Some((m, k)) => (m, k.parse::<i64>().map_err(|_| err("bad exponent"))?),
                        None => (r, 1),
                    };
                    let m: u32 = m.parse().map_err(|_| err("bad root order"))?;
                    if m == 0 {
                        return Err(err("root order must be positive"));
                    }
                    (m, k)
                }
            };
            terms.push((coef, order, power));
        }
        let conductor = terms.iter().fold(1u32, |acc, t| acc.lcm(&t.1));
        let mut total = Cyc::zero(conductor);
        for (coef, order, power) in terms {
            let root = Cyc::zeta_pow(order, power).lift(conductor)?;
            total = total.plus(&root.times(&Cyc::from_rational(conductor, &coef)));
        }
        Ok(total)
    }
}

pub(crate) fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = trim(a.to_vec());
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead = b[db].clone();
    let mut quot = vec![Rational::zero(); rem.len() - db];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() / &lead;
        for (j, bj) in b.iter().enumerate() {
            rem[shift + j] -= &c * bj;
        }
        quot[shift] = c;
        rem.pop();
        rem = trim(rem);
    }
    (trim(quot), rem)
}

impl Field for Cyc {
    type Ctx = u32;

    fn ctx(&self) -> u32 {
        self.conductor
    }
    fn zero_in(ctx: &u32) -> Self {
        Cyc::zero(*ctx)
    }
    fn one_in(ctx: &u32) -> Self {
        Cyc::one(*ctx)
    }
    fn from_rational(ctx: &u32, q: &Rational) -> Self {
        Cyc::from_rational(*ctx, q)
    }
    fn is_null(&self) -> bool {
        Cyc::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.checked_add(rhs).expect("cyclotomic addition")
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.checked_sub(rhs).expect("cyclotomic subtraction")
    }
    fn times(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs).expect("cyclotomic multiplication")
    }
    fn negated(&self) -> Self {
        Cyc { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
    fn inverse(&self) -> Option<Self> {
        self.checked_inv().ok()
    }
}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = if i == 0 {
                fmt_rational(c)
            } else {
                let root = if i == 1 {
                    format!("z{}", self.conductor)
                } else {
                    format!("z{}^{}", self.conductor, i)
                };
                if c.is_one() {
                    root
                } else if (-c).is_one() {
                    format!("-{root}")
                } else {
                    format!("{}*{root}", fmt_rational(c))
                }
            };
            if out.is_empty() {
                out = term;
            } else if let Some(stripped) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc[{}]({})", self.conductor, self)
    }
}

impl PartialOrd for Cyc {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural order on canonical forms; only used for deterministic sorting.
impl Ord for Cyc {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.conductor.cmp(&other.conductor).then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn rational_signum(q: &Rational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |n| cyclotomic_polynomial(n).iter().map(|c| c.try_into().unwrap()).collect::<Vec<i64>>();
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(3), vec![1, 1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(24), 8);
    }

    #[test]
    fn defining_relations() {
        let i = Cyc::zeta_pow(4, 1);
        assert_eq!(i.times(&i), Cyc::from_int(4, -1));
        let w = Cyc::zeta_pow(3, 1);
        let s = Cyc::one(3).plus(&w).plus(&w.times(&w));
        assert!(s.is_zero());
        assert_eq!(Cyc::zeta_pow(12, 12), Cyc::one(12));
    }

    #[test]
    fn inverse_of_one_minus_zeta3() {
        let w = Cyc::zeta_pow(3, 1);
        let x = Cyc::one(3).minus(&w);
        // (1 - w)(2 + w) = 2 - w - w^2 = 3
        let expected = Cyc::from_coeffs(3, vec![q(2, 3), q(1, 3)]);
        assert_eq!(x.checked_inv().unwrap(), expected);
        assert!(x.times(&expected).is_one());
    }

    #[test]
    fn errors() {
        assert_eq!(Cyc::zero(5).checked_inv(), Err(Error::DivisionByZero));
        assert!(matches!(Cyc::one(3).checked_add(&Cyc::one(4)), Err(Error::ConductorMismatch { .. })));
        assert!(matches!(Cyc::one(3).lift(4), Err(Error::ConductorNotDivisor { .. })));
    }

    #[test]
    fn lifting() {
        assert_eq!(Cyc::from_int(2, -1).lift(4).unwrap(), Cyc::zeta_pow(4, 2));
        assert_eq!(Cyc::zeta_pow(3, 1).lift(12).unwrap(), Cyc::zeta_pow(12, 4));
        assert!(Cyc::zero(3).lift(15).unwrap().is_zero());
    }

    #[test]
    fn parse_and_display_agree() {
        for s in ["0", "1", "-3/4", "z4", "-z12^5", "1/3*z12 + 1/3*z12^3", "2 - z5^2"] {
            let c = Cyc::parse(s).unwrap();
            assert_eq!(Cyc::parse(&c.to_string()).unwrap(), c, "{s}");
        }
        let sqrt3 = Cyc::parse("z12 + z12^11").unwrap();
        assert_eq!(sqrt3.times(&sqrt3), Cyc::from_int(12, 3));
        assert_eq!(sqrt3.conj(), sqrt3);
        assert!(Cyc::parse("1/0").is_err());
        assert!(Cyc::parse("z0").is_err());
    }

    #[test]
    fn conjugation_and_roots() {
        let z = Cyc::zeta_pow(8, 3);
        assert_eq!(z.conj(), Cyc::zeta_pow(8, 5));
        assert_eq!(z.root_of_unity_exponent(), Some(3));
        assert_eq!(Cyc::from_int(8, 2).root_of_unity_exponent(), None);
        assert_eq!(z.pow(8), Cyc::one(8));
    }
}
