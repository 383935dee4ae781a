//! Brute-force reference implementations and instance generators.
#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use trumpkit::{ProbVec, Rational, Scalar};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pv(entries: &[&str]) -> ProbVec {
    let raw = entries
        .iter()
        .map(|e| Rational::parse_literal(e).unwrap())
        .collect();
    ProbVec::new(raw, false).unwrap()
}

/// Normalized vector from positive integer weights.
pub fn from_weights(w: &[u64]) -> ProbVec {
    ProbVec::new(w.iter().map(|&v| Rational::from_u64(v)).collect(), true).unwrap()
}

pub fn random_weights(rng: &mut ChaCha8Rng, n: usize, max: u64, allow_zero: bool) -> Vec<u64> {
    loop {
        let lo = if allow_zero { 0 } else { 1 };
        let w: Vec<u64> = (0..n).map(|_| rng.gen_range(lo..=max)).collect();
        if w.iter().any(|&v| v > 0) {
            return w;
        }
    }
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, max: u64, allow_zero: bool) -> ProbVec {
    from_weights(&random_weights(rng, n, max, allow_zero))
}

/// Plain Kronecker product of raw entry lists, unsorted.
pub fn kron(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for u in a {
        for v in b {
            out.push(u * v);
        }
    }
    out
}

pub fn brute_power(x: &[Rational], k: u32) -> Vec<Rational> {
    let mut acc = vec![q(1, 1)];
    for _ in 0..k {
        acc = kron(&acc, x);
    }
    acc
}

pub fn sorted_desc(mut v: Vec<Rational>) -> Vec<Rational> {
    v.sort_by(|a, b| b.cmp(a));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Brute {
    Strict,
    Boundary,
    Fails,
}

/// Reference majorization with full prefix enumeration.
pub fn brute_majorize(x: &[Rational], y: &[Rational]) -> (Brute, Vec<usize>) {
    assert_eq!(x.len(), y.len());
    let (x, y) = (sorted_desc(x.to_vec()), sorted_desc(y.to_vec()));
    let (mut ex, mut ey) = (q(0, 1), q(0, 1));
    let mut eq = Vec::new();
    for l in 1..x.len() {
        ex += &x[l - 1];
        ey += &y[l - 1];
        if ex > ey {
            return (Brute::Fails, eq);
        }
        if ex == ey {
            eq.push(l);
        }
    }
    if eq.is_empty() {
        (Brute::Strict, eq)
    } else {
        (Brute::Boundary, eq)
    }
}

pub fn brute_holds(x: &[Rational], y: &[Rational]) -> bool {
    brute_majorize(x, y).0 != Brute::Fails
}

/// Reference for `x^{⊗k} ≺ y^{⊗k}`.
pub fn brute_in_mk(x: &ProbVec, y: &ProbVec, k: u32) -> bool {
    brute_holds(&brute_power(x.entries(), k), &brute_power(y.entries(), k))
}

/// Reference for `x ⊗ c ≺ y ⊗ c`.
pub fn brute_catalyzes(x: &ProbVec, y: &ProbVec, c: &[Rational]) -> bool {
    brute_holds(&kron(x.entries(), c), &kron(y.entries(), c))
}

/// Move mass from poorer to richer components of `x`, producing `y` with
/// `x ≺ y`. Each step keeps both components within [0, 1].
pub fn robin_hood_reverse(rng: &mut ChaCha8Rng, x: &ProbVec, steps: usize) -> ProbVec {
    let mut v = x.entries().to_vec();
    let n = v.len();
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let (rich, poor) = if v[i] >= v[j] { (i, j) } else { (j, i) };
        let frac = q(rng.gen_range(1..=4), 4);
        let amount = &v[poor] * &frac;
        v[rich] += &amount;
        v[poor] -= &amount;
    }
    ProbVec::new(v, false).unwrap()
}
