//! Exact arithmetic in Q(ζ_p) with a discrete valuation.
//!
//! Three settings are supported: p = 2 over Q with any ℓ-adic valuation,
//! odd p with ℓ ≡ 1 (mod p) (ζ_p lives in Q_ℓ), and odd p with ℓ = p
//! (totally ramified, normalized so that v(p) = 1).

mod elem;
mod poly;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) use elem::fmt_rational;
pub use elem::FieldElem;
pub use poly::resultant;

use crate::error::{Error, Result};

/// A valuation value: an exact rational, or +∞ for the valuation of zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValRat {
    Finite(Rational64),
    Infinity,
}

impl ValRat {
    pub fn int(n: i64) -> Self {
        ValRat::Finite(Rational64::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn finite(self) -> Option<Rational64> {
        match self {
            ValRat::Finite(r) => Some(r),
            ValRat::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ValRat::Infinity)
    }

    /// Unwraps a finite value; panics on +∞.
    pub fn expect_finite(self) -> Rational64 {
        self.finite().expect("valuation is finite")
    }
}

impl From<Rational64> for ValRat {
    fn from(r: Rational64) -> Self {
        ValRat::Finite(r)
    }
}

impl Ord for ValRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ValRat::Finite(a), ValRat::Finite(b)) => a.cmp(b),
            (ValRat::Finite(_), ValRat::Infinity) => Ordering::Less,
            (ValRat::Infinity, ValRat::Finite(_)) => Ordering::Greater,
            (ValRat::Infinity, ValRat::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ValRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ValRat {
    type Output = ValRat;
    fn add(self, rhs: ValRat) -> ValRat {
        match (self, rhs) {
            (ValRat::Finite(a), ValRat::Finite(b)) => ValRat::Finite(a + b),
            _ => ValRat::Infinity,
        }
    }
}

impl Add<Rational64> for ValRat {
    type Output = ValRat;
    fn add(self, rhs: Rational64) -> ValRat {
        self + ValRat::Finite(rhs)
    }
}

impl fmt::Display for ValRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValRat::Infinity => f.write_str("inf"),
            ValRat::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            ValRat::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for ValRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    /// p = 2, K = Q with the ℓ-adic valuation.
    RationalField,
    /// Odd p, ℓ ≡ 1 (mod p): ζ_p is an ℓ-adic integer.
    CyclotomicSplit,
    /// Odd p = ℓ: Q(ζ_p) is totally ramified at p.
    CyclotomicRamified,
}

struct HenselRoot {
    precision: u32,
    modulus: BigInt,
    root: BigInt,
}

struct CtxInner {
    p: u32,
    ell: u32,
    kind: FieldKind,
    rho: Rational64,
    zeta: FieldElem,
    root: Mutex<Option<HenselRoot>>,
}

/// The field K = Q(ζ_p) together with its valuation.
///
/// Cheap to clone; clones share the lazily lifted ℓ-adic root of unity.
#[derive(Clone)]
pub struct FieldCtx {
    inner: Arc<CtxInner>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.inner.p)
            .field("ell", &self.inner.ell)
            .field("kind", &self.inner.kind)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.ell == other.inner.ell
    }
}

impl Eq for FieldCtx {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// ℓ-adic valuation of a nonzero integer.
fn int_valuation(n: &BigInt, ell: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(ell);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

fn rational_valuation(q: &BigRational, ell: u32) -> ValRat {
    if q.is_zero() {
        return ValRat::Infinity;
    }
    let ell = BigInt::from(ell);
    ValRat::int(int_valuation(q.numer(), &ell) - int_valuation(q.denom(), &ell))
}

impl FieldCtx {
    pub fn new(p: u32, ell: u32) -> Result<Self> {
        let unsupported = |reason: &str| Error::UnsupportedField {
            p,
            ell,
            reason: reason.to_string(),
        };
        if !is_prime(p) {
            return Err(unsupported("p must be prime"));
        }
        if !is_prime(ell) {
            return Err(unsupported("ell must be prime"));
        }
        let kind = if p == 2 {
            FieldKind::RationalField
        } else if ell == p {
            FieldKind::CyclotomicRamified
        } else if ell % p == 1 {
            FieldKind::CyclotomicSplit
        } else {
            return Err(unsupported(
                "for odd p the valuation needs ell = p or ell = 1 mod p",
            ));
        };
        let rho = if ell == p {
            Rational64::new(1, (p - 1) as i64)
        } else {
            Rational64::zero()
        };
        Ok(FieldCtx {
            inner: Arc::new(CtxInner {
                p,
                ell,
                kind,
                rho,
                zeta: FieldElem::zeta_power(p, 1),
                root: Mutex::new(None),
            }),
        })
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn ell(&self) -> u32 {
        self.inner.ell
    }

    pub fn kind(&self) -> FieldKind {
        self.inner.kind
    }

    /// ρ = v(p)/(p − 1), the radius of the tube fixed by an order-p element.
    pub fn rho(&self) -> Rational64 {
        self.inner.rho
    }

    pub fn separation_radius(&self) -> ValRat {
        ValRat::Finite(self.inner.rho)
    }

    pub fn zeta(&self) -> &FieldElem {
        &self.inner.zeta
    }

    pub fn zeta_power(&self, n: i64) -> FieldElem {
        FieldElem::zeta_power(self.inner.p, n)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::zero(self.inner.p)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::one(self.inner.p)
    }

    pub fn int(&self, n: i64) -> FieldElem {
        FieldElem::from_int(self.inner.p, n)
    }

    pub fn rational(&self, q: BigRational) -> FieldElem {
        FieldElem::rational(self.inner.p, q)
    }

    pub fn frac(&self, num: i64, den: i64) -> FieldElem {
        self.rational(BigRational::new(num.into(), den.into()))
    }

    pub fn valuation(&self, x: &FieldElem) -> ValRat {
        if x.is_zero() {
            return ValRat::Infinity;
        }
        if let Some(q) = x.as_rational() {
            return rational_valuation(&q, self.inner.ell);
        }
        match self.inner.kind {
            FieldKind::RationalField => unreachable!("p = 2 elements are rational"),
            FieldKind::CyclotomicRamified => {
                let norm = resultant(&poly::cyclotomic(self.inner.p), x.coeffs());
                let v = rational_valuation(&norm, self.inner.ell).expect_finite();
                ValRat::Finite(v / Rational64::from_integer((self.inner.p - 1) as i64))
            }
            FieldKind::CyclotomicSplit => self.split_valuation(x),
        }
    }

    /// v(x − y), the workhorse of every disc predicate.
    pub fn dist(&self, x: &FieldElem, y: &FieldElem) -> ValRat {
        self.valuation(&(x - y))
    }

    fn split_valuation(&self, x: &FieldElem) -> ValRat {
        let ell = BigInt::from(self.inner.ell);
        let mut den = BigInt::one();
        for c in x.coeffs() {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = x
            .coeffs()
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let v_den = int_valuation(&den, &ell);
        let mut precision = 16u32;
        loop {
            let (used, modulus, root) = self.hensel_root(precision);
            let mut acc = BigInt::zero();
            for c in ints.iter().rev() {
                acc = (acc * &root + c).mod_floor(&modulus);
            }
            if !acc.is_zero() {
                return ValRat::int(int_valuation(&acc, &ell) - v_den);
            }
            precision = used * 2;
        }
    }

    /// A root of Φ_p in Z/ℓ^N, lifted by Newton iteration and memoized.
    fn hensel_root(&self, precision: u32) -> (u32, BigInt, BigInt) {
        let mut guard = self.inner.root.lock().expect("hensel cache poisoned");
        if let Some(h) = guard.as_ref() {
            if h.precision >= precision {
                return (h.precision, h.modulus.clone(), h.root.clone());
            }
        }
        let p = self.inner.p;
        let ell = BigInt::from(self.inner.ell);
        let start = match guard.as_ref() {
            Some(h) => h.root.clone(),
            None => {
                let e = BigInt::from((self.inner.ell - 1) / p);
                (2..self.inner.ell)
                    .map(|g| BigInt::from(g).modpow(&e, &ell))
                    .find(|r| !r.is_one())
                    .expect("a primitive p-th root of unity exists mod ell")
            }
        };
        let modulus = num_traits::pow(ell.clone(), precision as usize);
        let pb = BigInt::from(p);
        let mut r = start;
        loop {
            let f = (r.modpow(&pb, &modulus) - BigInt::one()).mod_floor(&modulus);
            if f.is_zero() {
                break;
            }
            let df = (&pb * r.modpow(&BigInt::from(p - 1), &modulus)).mod_floor(&modulus);
            let inv = df.extended_gcd(&modulus).x.mod_floor(&modulus);
            r = (&r - f * inv).mod_floor(&modulus);
        }
        *guard = Some(HenselRoot {
            precision,
            modulus: modulus.clone(),
            root: r.clone(),
        });
        (precision, modulus, r)
    }
}

impl ValRat {
    pub fn to_f64(self) -> f64 {
        match self {
            ValRat::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            ValRat::Infinity => f64::INFINITY,
        }
    }
}
