//! Brute-force checks: words in the index-p subgroup, classified one by one.
//!
//! The audit can only falsify goodness. A clean audit up to some length
//! says nothing about longer words.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::clusters::PairedConfiguration;
use crate::error::Result;
use crate::folding::FoldingStep;
use crate::projline::{order_p_fixing, ElementClass, Mobius, PPoint};
use crate::valfield::{FieldCtx, FieldElem, ValRat};

/// A reduced word s_{i1}^{e1} ⋯ s_{ik}^{ek} in the free product of the
/// order-p generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord {
    pub syllables: Vec<(usize, u32)>,
}

impl GroupWord {
    pub fn new(syllables: Vec<(usize, u32)>) -> GroupWord {
        GroupWord { syllables }
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn exponent_sum(&self) -> u32 {
        self.syllables.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_reduced(&self) -> bool {
        self.syllables.windows(2).all(|w| w[0].0 != w[1].0)
    }

    /// Evaluates the word as a matrix product, leftmost syllable outermost.
    pub fn evaluate(&self, pcfg: &PairedConfiguration) -> Result<Mobius> {
        let gens = generators(pcfg)?;
        let mut m = Mobius::identity(pcfg.ctx());
        for &(i, e) in &self.syllables {
            m = m.compose(&gens[i].pow(e));
        }
        Ok(m)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|&(i, e)| {
                if e == 1 {
                    format!("s{i}")
                } else {
                    format!("s{i}^{e}")
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// s_i = order_p_fixing(a_i, b_i, 1) for each pair.
pub fn generators(pcfg: &PairedConfiguration) -> Result<Vec<Mobius>> {
    pcfg.pairs()
        .iter()
        .map(|(a, b)| generator(pcfg, a, b))
        .collect()
}

fn generator(pcfg: &PairedConfiguration, a: &PPoint, b: &PPoint) -> Result<Mobius> {
    let ctx = pcfg.ctx();
    if a.is_infinity() {
        order_p_fixing(ctx, b, a, ctx.p() as i64 - 1)
    } else {
        order_p_fixing(ctx, a, b, 1)
    }
}

/// All nonempty reduced words of at most `max_len` syllables over g + 1
/// generators of order p whose exponent sum is divisible by p, in
/// length-lexicographic order.
pub fn enumerate_gamma_words(g: usize, p: u32, max_len: usize) -> Vec<GroupWord> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        let mut word = Vec::with_capacity(len);
        walk(g, p, len, &mut word, &mut |w| {
            if w.iter().map(|&(_, e)| e).sum::<u32>() % p == 0 {
                out.push(GroupWord::new(w.to_vec()));
            }
        });
    }
    out
}

type Syllable = (usize, u32);

fn walk(
    g: usize,
    p: u32,
    len: usize,
    word: &mut Vec<Syllable>,
    visit: &mut dyn FnMut(&[Syllable]),
) {
    if word.len() == len {
        visit(word);
        return;
    }
    for i in 0..=g {
        if word.last().is_some_and(|&(k, _)| k == i) {
            continue;
        }
        for e in 1..p {
            word.push((i, e));
            walk(g, p, len, word, visit);
            word.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Audit {
    pub max_len: usize,
    pub words_checked: usize,
    /// First word, in length-lexicographic order, that is neither
    /// loxodromic nor the identity.
    pub witness: Option<(GroupWord, ElementClass)>,
    /// Words evaluating to the identity (relations).
    pub relations: Vec<GroupWord>,
}

/// Classifies every word of `enumerate_gamma_words` up to `max_len`.
///
/// A single depth-first pass visits words of each length in lexicographic
/// order; finding a witness of length L lowers the depth limit to L − 1, so
/// the witness kept at the end is the length-lexicographic minimum.
pub fn audit(pcfg: &PairedConfiguration, max_len: usize) -> Result<Audit> {
    let ctx = pcfg.ctx();
    let gens = generators(pcfg)?;
    let gens: Vec<IntMat> = gens
        .iter()
        .map(|m| IntMat::from_mobius(m, ctx.p()))
        .collect();
    let mut result = Audit {
        max_len,
        words_checked: 0,
        witness: None,
        relations: Vec::new(),
    };
    Search::new(ctx, &gens, max_len).run(&mut result);
    let keep = result.witness.as_ref().map_or(max_len, |(w, _)| w.len());
    result.relations.retain(|w| w.len() <= keep);
    Ok(result)
}

/// Matrix arithmetic used by the word search.
trait WordMatrix: Clone {
    fn identity(ctx: &FieldCtx) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn class(&self, ctx: &FieldCtx) -> ElementClass;
}

/// Representative of a map with entries in Z[ζ_p], as coefficient vectors
/// in the basis 1, ζ, …, ζ^(p−2). Products are not normalized; the
/// classification only looks at scale-free data.
#[derive(Clone)]
struct IntMat([Vec<BigInt>; 4]);

impl IntMat {
    fn from_mobius(m: &Mobius, p: u32) -> IntMat {
        let den = m
            .entries()
            .iter()
            .flat_map(|e| e.coeffs().iter())
            .fold(BigInt::one(), |d, x| d.lcm(x.denom()));
        IntMat(m.entries().map(|e| {
            let mut v: Vec<BigInt> = e
                .coeffs()
                .iter()
                .map(|x| x.numer() * (&den / x.denom()))
                .collect();
            v.resize(p as usize - 1, BigInt::zero());
            v
        }))
    }
}

/// Product in Z[ζ_p] reduced to the power basis.
fn cyc_mul(x: &[BigInt], y: &[BigInt], p: usize) -> Vec<BigInt> {
    let mut full = vec![BigInt::zero(); p];
    for (i, a) in x.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            full[(i + j) % p] += a * b;
        }
    }
    let top = full.pop().expect("p ≥ 2");
    full.iter_mut().for_each(|c| *c -= &top);
    full
}

fn cyc_add(x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn int_valuation(x: &BigInt, ell: u32) -> ValRat {
    if x.is_zero() {
        return ValRat::Infinity;
    }
    let ell = BigInt::from(ell);
    let mut x = x.clone();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&ell);
        if !r.is_zero() {
            return ValRat::int(k);
        }
        x = q;
        k += 1;
    }
}

fn cyc_valuation(ctx: &FieldCtx, x: &[BigInt]) -> ValRat {
    if ctx.p() == 2 {
        return int_valuation(&x[0], ctx.ell());
    }
    let q = x
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    ctx.valuation(&FieldElem::from_coeffs(ctx.p(), q))
}

impl WordMatrix for IntMat {
    fn identity(ctx: &FieldCtx) -> Self {
        let n = ctx.p() as usize - 1;
        let mut one = vec![BigInt::zero(); n];
        one[0] = BigInt::one();
        IntMat([
            one.clone(),
            vec![BigInt::zero(); n],
            vec![BigInt::zero(); n],
            one,
        ])
    }

    fn mul(&self, o: &Self) -> Self {
        let p = self.0[0].len() + 1;
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        let m = |x: &[BigInt], y: &[BigInt]| cyc_mul(x, y, p);
        IntMat([
            cyc_add(&m(a, e), &m(b, g)),
            cyc_add(&m(a, f), &m(b, h)),
            cyc_add(&m(c, e), &m(d, g)),
            cyc_add(&m(c, f), &m(d, h)),
        ])
    }

    fn class(&self, ctx: &FieldCtx) -> ElementClass {
        let p = ctx.p() as usize;
        let [a, b, c, d] = &self.0;
        let zero = |x: &[BigInt]| x.iter().all(Zero::is_zero);
        if zero(b) && zero(c) && a == d {
            return ElementClass::Identity;
        }
        let tr = cyc_add(a, d);
        let bc: Vec<BigInt> = cyc_mul(b, c, p).into_iter().map(|x| -x).collect();
        let det = cyc_add(&cyc_mul(a, d, p), &bc);
        let four_det: Vec<BigInt> = det.iter().map(|x| x * 4).collect();
        if cyc_mul(&tr, &tr, p) == four_det {
            return ElementClass::Parabolic;
        }
        let v_det = cyc_valuation(ctx, &det).expect_finite();
        match cyc_valuation(ctx, &tr) {
            ValRat::Finite(t) if t + t < v_det => ElementClass::Loxodromic {
                translation_length: v_det - t - t,
            },
            _ => ElementClass::Elliptic,
        }
    }
}

struct Search<'a, M> {
    ctx: &'a FieldCtx,
    powers: Vec<Vec<M>>,
    limit: usize,
    word: Vec<(usize, u32)>,
    prefix: Vec<M>,
}

impl<'a, M: WordMatrix> Search<'a, M> {
    fn new(ctx: &'a FieldCtx, gens: &[M], limit: usize) -> Self {
        let powers = gens
            .iter()
            .map(|s| {
                let mut out = vec![s.clone()];
                for _ in 2..ctx.p() {
                    out.push(out.last().expect("nonempty").mul(s));
                }
                out
            })
            .collect();
        Search {
            ctx,
            powers,
            limit,
            word: Vec::new(),
            prefix: vec![M::identity(ctx)],
        }
    }

    fn run(mut self, result: &mut Audit) {
        self.descend(result);
    }

    fn descend(&mut self, result: &mut Audit) {
        let p = self.ctx.p();
        let depth = self.word.len();
        if depth > 0 && self.word.iter().map(|&(_, e)| e).sum::<u32>() % p == 0 {
            result.words_checked += 1;
            match self.prefix.last().expect("prefix").class(self.ctx) {
                ElementClass::Identity => result.relations.push(GroupWord::new(self.word.clone())),
                c if c.is_loxodromic() => {}
                c => {
                    result.witness = Some((GroupWord::new(self.word.clone()), c));
                    self.limit = depth - 1;
                    return;
                }
            }
        }
        if depth >= self.limit {
            return;
        }
        for i in 0..self.powers.len() {
            if self.word.last().is_some_and(|&(k, _)| k == i) {
                continue;
            }
            for e in 1..p {
                if self.word.len() >= self.limit {
                    return;
                }
                let next = self
                    .prefix
                    .last()
                    .expect("prefix")
                    .mul(&self.powers[i][e as usize - 1]);
                self.word.push((i, e));
                self.prefix.push(next);
                self.descend(result);
                self.prefix.pop();
                self.word.pop();
            }
        }
    }
}

pub fn schottky_audit(
    pcfg: &PairedConfiguration,
    max_len: usize,
) -> Result<Option<(GroupWord, ElementClass)>> {
    Ok(audit(pcfg, max_len)?.witness)
}

/// Checks that each moved pair's generator is the conjugate of the old one
/// by the fold map.
pub fn verify_fold_conjugation(step: &FoldingStep) -> Result<bool> {
    let pcfg = &step.before;
    for &l in &step.indices {
        let (a, b) = pcfg.pair(l);
        let s = generator(pcfg, a, b)?;
        let moved = generator(pcfg, &step.map.apply(a), &step.map.apply(b))?;
        if moved != s.conjugate_by(&step.map) {
            return Ok(false);
        }
    }
    Ok(true)
}
