//! Dense univariate polynomials over Q, just enough for resultants.

use num_rational::BigRational;
use num_traits::{One, Zero};

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let factor = r.last().unwrap() / lb;
        for (k, c) in b.iter().enumerate() {
            r[shift + k] -= &factor * c;
        }
        r.pop();
        r = trim(r);
    }
    r
}

/// Res(a, b) for coefficient vectors (constant term first).
pub fn resultant(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let a = trim(a.to_vec());
    let b = trim(b.to_vec());
    if a.is_empty() || b.is_empty() {
        return BigRational::zero();
    }
    let mut acc = BigRational::one();
    let (mut a, mut b) = (a, b);
    loop {
        let m = a.len() - 1;
        let n = b.len() - 1;
        if n == 0 {
            return acc * pow(&b[0], m);
        }
        let r = rem(&a, &b);
        if r.is_empty() {
            return BigRational::zero();
        }
        let deg_r = r.len() - 1;
        if (m * n) % 2 == 1 {
            acc = -acc;
        }
        acc *= pow(&b[n], m - deg_r);
        a = b;
        b = r;
    }
}

fn pow(x: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Coefficients of Φ_p = 1 + x + … + x^{p−1}.
pub fn cyclotomic(p: u32) -> Vec<BigRational> {
    vec![BigRational::one(); p as usize]
}
