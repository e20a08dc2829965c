#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use whittaker::{pair_up, Configuration, FieldCtx, PPoint};

/// ℓ-adic valuation of a rational by repeated division; None for zero.
pub fn vell(q: &BigRational, ell: u32) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let ell = BigInt::from(ell);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut k = 0;
        loop {
            let (d, r) = n.div_rem(&ell);
            if !r.is_zero() {
                return k;
            }
            n = d;
            k += 1;
        }
    };
    Some(count(q.numer()) - count(q.denom()))
}

pub fn rat(s: &str) -> BigRational {
    match s.split_once('/') {
        Some((n, d)) => BigRational::new(n.parse().unwrap(), d.parse().unwrap()),
        None => BigRational::from_integer(s.parse().unwrap()),
    }
}

pub fn config(ctx: &FieldCtx, pts: &[String]) -> Configuration {
    Configuration::new(
        ctx,
        pts.iter().map(|s| PPoint::parse(ctx, s).unwrap()).collect(),
    )
    .unwrap()
}

pub fn strs(pts: &[&str]) -> Vec<String> {
    pts.iter().map(|s| s.to_string()).collect()
}

fn unit(rng: &mut ChaCha8Rng, ell: i64) -> i64 {
    loop {
        let u = rng.gen_range(-40..=40);
        if u % ell != 0 {
            return u;
        }
    }
}

fn pow(ell: i64, e: u32) -> i64 {
    ell.pow(e)
}

/// A random integer built from ℓ-adic digits, so that points share
/// leading digits often enough to form nested clusters.
fn digits(rng: &mut ChaCha8Rng, ell: i64, len: u32) -> i64 {
    (0..len)
        .map(|k| rng.gen_range(0..ell) * pow(ell, k))
        .sum::<i64>()
        * if rng.gen_bool(0.5) { -1 } else { 1 }
}

/// 2g + 1 finite points plus ∞, built as pairs around random centers.
/// Not necessarily paired.
pub fn random_candidate(rng: &mut ChaCha8Rng, ell: u32, g: usize) -> Vec<String> {
    let l = ell as i64;
    let mut pts = Vec::new();
    for _ in 0..g {
        let a = digits(rng, l, 4);
        let e = rng.gen_range(1..=5);
        let b = a + unit(rng, l) * pow(l, e);
        pts.push(a.to_string());
        pts.push(b.to_string());
    }
    pts.push(digits(rng, l, 4).to_string());
    pts.push("inf".into());
    pts
}

/// Rejection-samples a configuration that passes the pairing test.
pub fn random_paired(rng: &mut ChaCha8Rng, ctx: &FieldCtx, g: usize) -> Vec<String> {
    loop {
        let pts = random_candidate(rng, ctx.ell(), g);
        let distinct = {
            let mut v = pts.clone();
            v.sort();
            v.dedup();
            v.len() == pts.len()
        };
        if distinct && pair_up(&config(ctx, &pts)).is_ok() {
            return pts;
        }
    }
}

/// Configurations {0, b_0, a_1, b_1, …, 1, ∞} with
/// v(b_0) > v(a_1) ≥ v(b_1) ≥ … ≥ v(b_{g−1}) > 0 and mutually disjoint
/// discs D_{a_i, b_i}, i < g.
pub fn valuation_chain(rng: &mut ChaCha8Rng, ell: u32, g: usize) -> Vec<String> {
    let l = ell as i64;
    loop {
        let mut exps: Vec<u32> = (0..g).map(|_| rng.gen_range(1..=4)).collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        exps[0] += 1;
        let mut pairs: Vec<(i64, i64)> = vec![(0, unit(rng, l) * pow(l, exps[0]))];
        for &e in &exps[1..] {
            let a = unit(rng, l) * pow(l, e);
            let b = a + unit(rng, l) * pow(l, e + rng.gen_range(1..=3));
            pairs.push((a, b));
        }
        if chain_conditions_hold(&pairs, ell) {
            let mut pts: Vec<String> = pairs
                .iter()
                .flat_map(|&(a, b)| [a.to_string(), b.to_string()])
                .collect();
            pts.push("1".into());
            pts.push("inf".into());
            return pts;
        }
    }
}

/// Independent check of both conditions.
fn chain_conditions_hold(pairs: &[(i64, i64)], ell: u32) -> bool {
    let v = |x: i64| vell(&BigRational::from_integer(x.into()), ell);
    let mut chain = vec![v(pairs[0].1)];
    for &(a, b) in &pairs[1..] {
        chain.push(v(a));
        chain.push(v(b));
    }
    let Some(chain) = chain.into_iter().collect::<Option<Vec<i64>>>() else {
        return false;
    };
    if chain.len() > 1 && chain[0] <= chain[1] {
        return false;
    }
    if chain.windows(2).any(|w| w[0] < w[1]) || *chain.last().unwrap() <= 0 {
        return false;
    }
    // D_{w,w'} = {z : v(z − w) ≥ v(w' − w)}; two such discs are disjoint
    // iff neither contains the other's center.
    let inside = |c: i64, (a, b): (i64, i64)| match (v(c - a), v(b - a)) {
        (None, _) => true,
        (Some(x), Some(r)) => x >= r,
        _ => false,
    };
    for x in 0..pairs.len() {
        for y in 0..pairs.len() {
            if x != y && inside(pairs[y].0, pairs[x]) {
                return false;
            }
        }
    }
    true
}

/// Clusters of the finite points by direct enumeration over rational
/// valuations: for each point and each radius realized from it, the set
/// of points at least that close.
pub fn brute_clusters(pts: &[String], ell: u32) -> Vec<Vec<usize>> {
    let fin: Vec<(usize, BigRational)> = pts
        .iter()
        .enumerate()
        .filter(|(_, s)| s.as_str() != "inf")
        .map(|(k, s)| (k, rat(s)))
        .collect();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (_, x) in &fin {
        let mut radii: Vec<Option<i64>> = fin.iter().map(|(_, y)| vell(&(x - y), ell)).collect();
        radii.sort();
        radii.dedup();
        for r in radii {
            let members: Vec<usize> = fin
                .iter()
                .filter(|(_, y)| match (vell(&(x - y), ell), r) {
                    (None, _) => true,
                    (Some(_), None) => false,
                    (Some(d), Some(r)) => d >= r,
                })
                .map(|(k, _)| *k)
                .collect();
            if !out.contains(&members) {
                out.push(members);
            }
        }
    }
    out
}
