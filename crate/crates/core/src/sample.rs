//! Random exact inputs for randomized checks and Monte-Carlo runs.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index;
use rand::{Rng, SeedableRng};

use crate::plhomeo::{Breakpoint, PlMap};
use crate::qfield::QNum;

/// Denominator of every sampled rational.
pub const DENOM: i64 = 64;

/// Uniform on `{k / DENOM : lo * DENOM <= k < hi * DENOM}`.
pub fn rational<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64) -> BigRational {
    let k = rng.gen_range(lo * DENOM..hi * DENOM);
    BigRational::new(BigInt::from(k), BigInt::from(DENOM))
}

/// `a + b sqrt(d)` with `a` in `[-span, span)` and `b` in `[-1, 1)`.
pub fn qnum<R: Rng + ?Sized>(rng: &mut R, d: u64, span: i64) -> QNum {
    let a = rational(rng, -span, span);
    let b = rational(rng, -1, 1);
    QNum::new(a, b, d).expect("valid discriminant")
}

/// `k` sorted distinct fractions in `[0, 1)`.
fn fractions<R: Rng + ?Sized>(rng: &mut R, k: usize, den: usize) -> Vec<BigRational> {
    let mut idx = index::sample(rng, den, k).into_vec();
    idx.sort_unstable();
    idx.into_iter()
        .map(|i| BigRational::new(BigInt::from(i), BigInt::from(den)))
        .collect()
}

/// A random map commuting with translation by `period`, with at most `k`
/// breakpoints per period (fewer after canonicalization).
pub fn plmap<R: Rng + ?Sized>(rng: &mut R, period: &QNum, k: usize) -> PlMap {
    let d = period.discriminant();
    let den = 4 * k.max(1) + 4;
    let us = fractions(rng, k.max(1), den);
    let vs = fractions(rng, k.max(1), den);
    let offset = qnum(rng, d, 2);
    let points = us
        .iter()
        .zip(&vs)
        .map(|(u, v)| Breakpoint::new(period.scale(u), &period.scale(v) + &offset))
        .collect();
    PlMap::from_window(period.clone(), points).expect("sampled points are in strict form")
}

/// Pairs of leaves in `[-span, span)` (plus an irrational part).
pub fn leaf_pairs<R: Rng + ?Sized>(rng: &mut R, d: u64, count: usize, span: i64) -> Vec<(QNum, QNum)> {
    (0..count).map(|_| (qnum(rng, d, span), qnum(rng, d, span))).collect()
}

/// [`leaf_pairs`] from a fresh generator seeded with `seed`.
pub fn seeded_leaf_pairs(seed: u64, d: u64, count: usize, span: i64) -> Vec<(QNum, QNum)> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    leaf_pairs(&mut rng, d, count, span)
}
