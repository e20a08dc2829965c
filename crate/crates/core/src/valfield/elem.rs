use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element of Q(ζ_p), stored as a polynomial in ζ of degree < p − 1.
///
/// For p = 2 this is just a rational number (ζ = −1). Coefficients are kept
/// reduced modulo the p-th cyclotomic polynomial with trailing zeros
/// trimmed, so structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    p: u32,
    coeffs: Vec<BigRational>,
}

impl FieldElem {
    pub fn zero(p: u32) -> Self {
        FieldElem {
            p,
            coeffs: Vec::new(),
        }
    }

    pub fn one(p: u32) -> Self {
        Self::rational(p, BigRational::one())
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        Self::rational(p, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(p: u32, q: BigRational) -> Self {
        Self::from_coeffs(p, vec![q])
    }

    /// Builds an element from coefficients of 1, ζ, ζ², … (any length).
    pub fn from_coeffs(p: u32, coeffs: Vec<BigRational>) -> Self {
        FieldElem {
            p,
            coeffs: reduce(p, coeffs),
        }
    }

    /// ζ^k for any integer k.
    pub fn zeta_power(p: u32, k: i64) -> Self {
        let k = k.rem_euclid(p as i64) as usize;
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::one();
        Self::from_coeffs(p, coeffs)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// The element as a rational number, if it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Image under the automorphism ζ ↦ ζ^k.
    pub fn conjugate(&self, k: u32) -> Self {
        let p = self.p as usize;
        let mut out = vec![BigRational::zero(); p];
        for (m, c) in self.coeffs.iter().enumerate() {
            out[(m * k as usize) % p] += c;
        }
        Self::from_coeffs(self.p, out)
    }

    /// Field norm down to Q, as the product of all Galois conjugates.
    pub fn norm(&self) -> BigRational {
        let mut prod = self.clone();
        for k in 2..self.p {
            prod = &prod * &self.conjugate(k);
        }
        prod.as_rational()
            .expect("norm of a cyclotomic element is rational")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut others = FieldElem::one(self.p);
        for k in 2..self.p {
            others = &others * &self.conjugate(k);
        }
        let norm = (self * &others)
            .as_rational()
            .expect("norm of a cyclotomic element is rational");
        Ok(others.scale(&norm.recip()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return FieldElem::zero(self.p);
        }
        FieldElem {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = FieldElem::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

/// Reduces a coefficient vector modulo Φ_p: fold exponents modulo p, then
/// rewrite ζ^{p−1} = −(1 + ζ + … + ζ^{p−2}).
fn reduce(p: u32, coeffs: Vec<BigRational>) -> Vec<BigRational> {
    let p = p as usize;
    let mut w = if coeffs.len() < p {
        let mut w = coeffs;
        w.resize(p, BigRational::zero());
        w
    } else {
        let mut w = vec![BigRational::zero(); p];
        for (k, c) in coeffs.into_iter().enumerate() {
            w[k % p] += c;
        }
        w
    };
    let top = w.pop().expect("p >= 2");
    if !top.is_zero() {
        for c in w.iter_mut() {
            *c -= &top;
        }
    }
    while w.last().is_some_and(|c| c.is_zero()) {
        w.pop();
    }
    w
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        debug_assert_eq!(self.p, rhs.p);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = self
                .coeffs
                .get(k)
                .cloned()
                .unwrap_or_else(BigRational::zero);
            if let Some(d) = rhs.coeffs.get(k) {
                c += d;
            }
            out.push(c);
        }
        while out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        FieldElem {
            p: self.p,
            coeffs: out,
        }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self + &(-rhs)
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        debug_assert_eq!(self.p, rhs.p);
        if self.is_zero() || rhs.is_zero() {
            return FieldElem::zero(self.p);
        }
        if self.coeffs.len() == 1 && rhs.coeffs.len() == 1 {
            return FieldElem::rational(self.p, &self.coeffs[0] * &rhs.coeffs[0]);
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        FieldElem::from_coeffs(self.p, out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

pub(crate) fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return f.write_str(&fmt_rational(&q));
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = fmt_rational(&c.abs());
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => f.write_str(&mag)?,
                _ => {
                    if mag != "1" {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        f.write_str("zeta")?;
                    } else {
                        write!(f, "zeta^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
