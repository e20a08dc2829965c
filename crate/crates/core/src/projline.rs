//! Points of P¹(K), Möbius transformations and their classification.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::valfield::{FieldCtx, FieldElem, ValRat};

/// A point of P¹(K).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PPoint {
    Finite(FieldElem),
    Infinity,
}

impl PPoint {
    pub fn finite(&self) -> Option<&FieldElem> {
        match self {
            PPoint::Finite(x) => Some(x),
            PPoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, PPoint::Infinity)
    }

    /// Parses `inf`, an integer, or `num/den`.
    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<PPoint> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(PPoint::Infinity);
        }
        Ok(PPoint::Finite(ctx.rational(parse_rational(s)?)))
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("not a rational literal: {s:?}"));
    let int = |t: &str| BigInt::from_str(t.trim()).map_err(|_| bad());
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(int(s)?)),
        Some((n, d)) => {
            let d = int(d)?;
            if d.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(int(n)?, d))
        }
    }
}

impl From<FieldElem> for PPoint {
    fn from(x: FieldElem) -> Self {
        PPoint::Finite(x)
    }
}

impl fmt::Display for PPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PPoint::Finite(x) => fmt::Display::fmt(x, f),
            PPoint::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for PPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// z ↦ (az + b)/(cz + d), an element of PGL₂(K).
///
/// Entries are kept at a canonical scale (integral coefficients with
/// content 1, first nonzero coefficient positive); equality is projective.
#[derive(Clone)]
pub struct Mobius {
    a: FieldElem,
    b: FieldElem,
    c: FieldElem,
    d: FieldElem,
}

impl Mobius {
    pub fn new(a: FieldElem, b: FieldElem, c: FieldElem, d: FieldElem) -> Result<Mobius> {
        let m = Mobius { a, b, c, d };
        if m.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(m.canonical())
    }

    pub fn from_ints(ctx: &FieldCtx, rows: [[i64; 2]; 2]) -> Result<Mobius> {
        Mobius::new(
            ctx.int(rows[0][0]),
            ctx.int(rows[0][1]),
            ctx.int(rows[1][0]),
            ctx.int(rows[1][1]),
        )
    }

    pub fn identity(ctx: &FieldCtx) -> Mobius {
        Mobius {
            a: ctx.one(),
            b: ctx.zero(),
            c: ctx.zero(),
            d: ctx.one(),
        }
    }

    pub fn entries(&self) -> [&FieldElem; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> FieldElem {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> FieldElem {
        &self.a + &self.d
    }

    fn canonical(self) -> Mobius {
        let coeffs = || self.entries().into_iter().flat_map(|e| e.coeffs().iter());
        let mut den = BigInt::one();
        for c in coeffs() {
            den = den.lcm(c.denom());
        }
        let mut content = BigInt::zero();
        for c in coeffs() {
            content = content.gcd(&(c.numer() * (&den / c.denom())));
        }
        let mut scale = BigRational::new(den, content);
        let lead = coeffs()
            .find(|c| !c.is_zero())
            .expect("nonsingular matrix has a nonzero entry");
        if lead.is_negative() {
            scale = -scale;
        }
        if scale.is_one() {
            return self;
        }
        Mobius {
            a: self.a.scale(&scale),
            b: self.b.scale(&scale),
            c: self.c.scale(&scale),
            d: self.d.scale(&scale),
        }
    }

    pub fn apply(&self, pt: &PPoint) -> PPoint {
        match pt {
            PPoint::Infinity => {
                if self.c.is_zero() {
                    PPoint::Infinity
                } else {
                    PPoint::Finite(self.a.checked_div(&self.c).expect("c is nonzero"))
                }
            }
            PPoint::Finite(z) => {
                let num = &self.a * z + &self.b;
                let den = &self.c * z + &self.d;
                if den.is_zero() {
                    PPoint::Infinity
                } else {
                    PPoint::Finite(num.checked_div(&den).expect("denominator is nonzero"))
                }
            }
        }
    }

    /// The map z ↦ self(other(z)).
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
        .canonical()
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
        .canonical()
    }

    pub fn pow(&self, n: u32) -> Mobius {
        let mut acc = Mobius {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            d: self.d.clone(),
        };
        if n == 0 {
            let one = FieldElem::one(self.a.p());
            let zero = FieldElem::zero(self.a.p());
            return Mobius {
                a: one.clone(),
                b: zero.clone(),
                c: zero,
                d: one,
            };
        }
        for _ in 1..n {
            acc = acc.compose(self);
        }
        acc
    }

    /// g ∘ self ∘ g⁻¹.
    pub fn conjugate_by(&self, g: &Mobius) -> Mobius {
        g.compose(self).compose(&g.inverse())
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// tr²/det, which does not depend on the chosen representative.
    pub fn trace_ratio(&self) -> FieldElem {
        let t = self.trace();
        (&t * &t)
            .checked_div(&self.det())
            .expect("determinant is nonzero")
    }
}

impl PartialEq for Mobius {
    fn eq(&self, other: &Mobius) -> bool {
        let lhs = self.entries();
        let rhs = other.entries();
        for i in 0..4 {
            for j in (i + 1)..4 {
                if lhs[i] * rhs[j] != lhs[j] * rhs[i] {
                    return false;
                }
            }
            if lhs[i].is_zero() != rhs[i].is_zero() {
                return false;
            }
        }
        true
    }
}

impl Eq for Mobius {}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The order-p element fixing `a` and `b`, raised to the power `n`.
///
/// Near `a` it acts as multiplication by ζⁿ in the coordinate
/// w = (z − a)/(z − b) (w = z − a when b = ∞). A point at infinity must be
/// passed as `b`.
pub fn order_p_fixing(ctx: &FieldCtx, a: &PPoint, b: &PPoint, n: i64) -> Result<Mobius> {
    if a == b {
        return Err(Error::DegeneratePair);
    }
    let z = ctx.zeta_power(n);
    let one = ctx.one();
    let a = a.finite().ok_or_else(|| {
        Error::InvalidInput("the point at infinity must be the second fixed point".into())
    })?;
    match b {
        PPoint::Infinity => Mobius::new(z.clone(), (&one - &z) * a, ctx.zero(), one),
        PPoint::Finite(b) => Mobius::new(
            a - &(&z * b),
            (&z - &one) * (a * b),
            &one - &z,
            &z * a - b.clone(),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementClass {
    Identity,
    Parabolic,
    Elliptic,
    Loxodromic { translation_length: Rational64 },
}

impl ElementClass {
    pub fn translation_length(&self) -> ValRat {
        match self {
            ElementClass::Loxodromic { translation_length } => ValRat::Finite(*translation_length),
            _ => ValRat::zero(),
        }
    }

    pub fn is_loxodromic(&self) -> bool {
        matches!(self, ElementClass::Loxodromic { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ElementClass::Identity => "identity",
            ElementClass::Parabolic => "parabolic",
            ElementClass::Elliptic => "elliptic",
            ElementClass::Loxodromic { .. } => "loxodromic",
        }
    }
}

/// Classifies by the Newton polygon of T² − tr·T + det.
pub fn classify(ctx: &FieldCtx, m: &Mobius) -> ElementClass {
    if m.is_scalar() {
        return ElementClass::Identity;
    }
    let tr = m.trace();
    let det = m.det();
    if &tr * &tr == det.scale(&BigRational::from_integer(4.into())) {
        return ElementClass::Parabolic;
    }
    let v_tr = ctx.valuation(&tr);
    let v_det = ctx.valuation(&det).expect_finite();
    match v_tr {
        ValRat::Finite(t) if t + t < v_det => ElementClass::Loxodromic {
            translation_length: v_det - t - t,
        },
        _ => ElementClass::Elliptic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx25() -> FieldCtx {
        FieldCtx::new(2, 5).unwrap()
    }

    fn pt(ctx: &FieldCtx, n: i64) -> PPoint {
        PPoint::Finite(ctx.int(n))
    }

    #[test]
    fn generators_of_the_paired_example() {
        let ctx = ctx25();
        let s0 = order_p_fixing(&ctx, &pt(&ctx, 7), &pt(&ctx, 12), 1).unwrap();
        let s1 = order_p_fixing(&ctx, &pt(&ctx, 0), &pt(&ctx, 5), 1).unwrap();
        let s2 = order_p_fixing(&ctx, &pt(&ctx, 1), &PPoint::Infinity, 1).unwrap();
        assert_eq!(s0, Mobius::from_ints(&ctx, [[19, -168], [2, -19]]).unwrap());
        assert_eq!(s1, Mobius::from_ints(&ctx, [[5, 0], [2, -5]]).unwrap());
        assert_eq!(s2, Mobius::from_ints(&ctx, [[-1, 2], [0, 1]]).unwrap());
    }

    #[test]
    fn product_with_trace_350() {
        let ctx = ctx25();
        let s0 = order_p_fixing(&ctx, &pt(&ctx, 7), &pt(&ctx, 12), 1).unwrap();
        let s1 = order_p_fixing(&ctx, &pt(&ctx, 0), &pt(&ctx, 5), 1).unwrap();
        let s2 = order_p_fixing(&ctx, &pt(&ctx, 1), &PPoint::Infinity, 1).unwrap();
        let w = s1.compose(&s2).compose(&s0).compose(&s2);
        assert_eq!(w, Mobius::from_ints(&ctx, [[75, 500], [40, 275]]).unwrap());
        assert_eq!(w.trace_ratio(), ctx.frac(350 * 350, 625));
        assert_eq!(classify(&ctx, &w), ElementClass::Elliptic);
    }

    #[test]
    fn apply_examples() {
        let ctx = ctx25();
        let m = Mobius::from_ints(&ctx, [[-1, 2], [0, 1]]).unwrap();
        assert_eq!(m.apply(&pt(&ctx, 7)), pt(&ctx, -5));
        assert_eq!(m.apply(&PPoint::Infinity), PPoint::Infinity);
        let inv = Mobius::from_ints(&ctx, [[0, 1], [1, -3]]).unwrap();
        assert_eq!(inv.apply(&pt(&ctx, 3)), PPoint::Infinity);
        assert_eq!(inv.apply(&PPoint::Infinity), pt(&ctx, 0));
        let fold = Mobius::from_ints(&ctx, [[24, -18920], [-2, -24]]).unwrap();
        assert_eq!(fold.apply(&PPoint::Finite(ctx.frac(1336, 3))), pt(&ctx, 9));
    }

    #[test]
    fn classify_examples() {
        let ctx = ctx25();
        let diag = Mobius::from_ints(&ctx, [[5, 0], [0, 1]]).unwrap();
        assert_eq!(
            classify(&ctx, &diag),
            ElementClass::Loxodromic {
                translation_length: Rational64::one()
            }
        );
        assert_eq!(
            classify(&ctx, &Mobius::from_ints(&ctx, [[1, 1], [0, 1]]).unwrap()),
            ElementClass::Parabolic
        );
        assert_eq!(
            classify(&ctx, &Mobius::from_ints(&ctx, [[3, 0], [0, 3]]).unwrap()),
            ElementClass::Identity
        );
    }

    #[test]
    fn singular_and_degenerate() {
        let ctx = ctx25();
        assert_eq!(
            Mobius::from_ints(&ctx, [[1, 2], [2, 4]]),
            Err(Error::SingularMatrix)
        );
        assert_eq!(
            order_p_fixing(&ctx, &pt(&ctx, 3), &pt(&ctx, 3), 1),
            Err(Error::DegeneratePair)
        );
    }

    #[test]
    fn order_p_for_odd_p() {
        for (p, ell) in [(3, 7), (3, 3), (5, 11)] {
            let ctx = FieldCtx::new(p, ell).unwrap();
            let a = PPoint::Finite(ctx.frac(2, 3));
            let b = PPoint::Finite(ctx.int(-5));
            for n in 1..p as i64 {
                let s = order_p_fixing(&ctx, &a, &b, n).unwrap();
                assert_eq!(s.apply(&a), a);
                assert_eq!(s.apply(&b), b);
                assert!(s.pow(p).is_scalar());
                let s1 = order_p_fixing(&ctx, &a, &b, 1).unwrap();
                assert_eq!(s, s1.pow(n as u32));
                assert_eq!(classify(&ctx, &s), ElementClass::Elliptic);
            }
            let t = order_p_fixing(&ctx, &a, &PPoint::Infinity, 1).unwrap();
            let t_lim = order_p_fixing(&ctx, &a, &PPoint::Finite(ctx.int(1)), 1).unwrap();
            // Both act as multiplication by ζ at a.
            let z = ctx.zeta();
            let probe = |m: &Mobius, w: &PPoint| m.apply(w);
            let near = PPoint::Finite(a.finite().unwrap() + &ctx.int(1));
            let moved = probe(&t, &near);
            assert_eq!(moved, PPoint::Finite(a.finite().unwrap() + z));
            assert!(t_lim.pow(p).is_scalar());
        }
    }

    #[test]
    fn parse_points() {
        let ctx = ctx25();
        assert_eq!(PPoint::parse(&ctx, "inf").unwrap(), PPoint::Infinity);
        assert_eq!(
            PPoint::parse(&ctx, "-1336/3").unwrap(),
            PPoint::Finite(ctx.frac(-1336, 3))
        );
        assert_eq!(PPoint::parse(&ctx, "4/-2").unwrap(), pt(&ctx, -2));
        assert!(PPoint::parse(&ctx, "1/0").is_err());
        assert!(PPoint::parse(&ctx, "x").is_err());
    }
}
