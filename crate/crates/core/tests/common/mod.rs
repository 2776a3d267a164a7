//! Independent reference implementations used by the integration tests.
//! Everything here works on plain vectors and loops, sharing no code paths
//! with the library beyond the public data types.
#![allow(dead_code)]

use std::collections::HashMap;

use genreason::{Dataset, Formula, World};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

/// Truth value by direct recursion over the syntax tree.
pub fn naive_eval(f: &Formula, bits: &[bool]) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => bits[a.index()],
        Formula::Not(g) => !naive_eval(g, bits),
        Formula::And(a, b) => naive_eval(a, bits) && naive_eval(b, bits),
        Formula::Or(a, b) => naive_eval(a, bits) || naive_eval(b, bits),
        Formula::Implies(a, b) => !naive_eval(a, bits) || naive_eval(b, bits),
        Formula::Iff(a, b) => naive_eval(a, bits) == naive_eval(b, bits),
    }
}

/// Bits of world index `idx`, atom `i` at bit `i`.
pub fn index_bits(width: usize, idx: u64) -> Vec<bool> {
    (0..width).map(|i| (idx >> i) & 1 == 1).collect()
}

pub fn world_bits(w: &World) -> Vec<bool> {
    w.bits().collect()
}

/// Counts per world index, summed over duplicate entries.
pub fn world_counts(ds: &Dataset) -> HashMap<u64, u64> {
    let mut out = HashMap::new();
    for (w, c) in ds.entries() {
        let idx = world_bits(w)
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        *out.entry(idx).or_insert(0) += c;
    }
    out
}

/// Evidence as a set: structural duplicates removed.
pub fn as_set(delta: &[Formula]) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    for f in delta {
        if !out.contains(f) {
            out.push(f.clone());
        }
    }
    out
}

fn bernoulli(holds: bool, mu: f64) -> f64 {
    if holds {
        mu
    } else {
        1.0 - mu
    }
}

/// `sum_m p(alpha|m) prod p(beta|m) p(m) / sum_m prod p(beta|m) p(m)` by
/// enumerating every world, in plain floating point.
pub fn brute_conditional(ds: &Dataset, alpha: &Formula, delta: &[Formula], mu: f64) -> f64 {
    let width = ds.width();
    let counts = world_counts(ds);
    let k = ds.total() as f64;
    let delta = as_set(delta);
    let (mut num, mut den) = (0.0, 0.0);
    for idx in 0..(1u64 << width) {
        let pm = counts.get(&idx).copied().unwrap_or(0) as f64 / k;
        if pm == 0.0 {
            continue;
        }
        let bits = index_bits(width, idx);
        let lik: f64 = delta
            .iter()
            .map(|b| bernoulli(naive_eval(b, &bits), mu))
            .product();
        den += pm * lik;
        num += pm * lik * bernoulli(naive_eval(alpha, &bits), mu);
    }
    num / den
}

/// `sum_m p(alpha|m) p(m)` by enumeration.
pub fn brute_marginal(ds: &Dataset, alpha: &Formula, mu: f64) -> f64 {
    brute_conditional(ds, alpha, &[], mu)
}

/// The `mu = 1` conditional as an exact ratio over all worlds; `None` when
/// no world of positive mass satisfies the evidence.
pub fn brute_exact_one(ds: &Dataset, alpha: &Formula, delta: &[Formula]) -> Option<BigRational> {
    let width = ds.width();
    let counts = world_counts(ds);
    let (mut num, mut den) = (0u64, 0u64);
    for idx in 0..(1u64 << width) {
        let c = counts.get(&idx).copied().unwrap_or(0);
        let bits = index_bits(width, idx);
        if c == 0 || !delta.iter().all(|b| naive_eval(b, &bits)) {
            continue;
        }
        den += c;
        if naive_eval(alpha, &bits) {
            num += c;
        }
    }
    (den > 0).then(|| BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Worlds (as indices) satisfying all of `gamma`.
pub fn brute_models(gamma: &[Formula], width: usize) -> Vec<u64> {
    (0..(1u64 << width))
        .filter(|&idx| {
            let bits = index_bits(width, idx);
            gamma.iter().all(|f| naive_eval(f, &bits))
        })
        .collect()
}

/// Worlds of positive mass satisfying all of `gamma`.
pub fn brute_possible(ds: &Dataset, gamma: &[Formula]) -> Vec<u64> {
    let counts = world_counts(ds);
    brute_models(gamma, ds.width())
        .into_iter()
        .filter(|idx| counts.get(idx).is_some_and(|&c| c > 0))
        .collect()
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn is_zero(r: &BigRational) -> bool {
    r.is_zero()
}

/// Random formula over `width` atoms with at most `depth` connective levels.
pub fn random_formula<R: Rng>(rng: &mut R, width: usize, depth: u32) -> Formula {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(rng.random_range(0..width)),
        };
    }
    let sub = |rng: &mut R| random_formula(rng, width, depth - 1);
    match rng.random_range(0..5) {
        0 => Formula::negate(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        _ => Formula::iff(sub(rng), sub(rng)),
    }
}

/// Random dataset: up to `max_entries` entries with counts in 1..=5.
pub fn random_dataset<R: Rng>(rng: &mut R, width: usize, max_entries: usize) -> Dataset {
    let n = rng.random_range(1..=max_entries);
    let counts: Vec<(u64, u64)> = (0..n)
        .map(|_| {
            (
                rng.random_range(0..(1u64 << width)),
                rng.random_range(1..=5),
            )
        })
        .collect();
    Dataset::from_index_counts(width, &counts).expect("valid dataset")
}

pub fn formula_strategy(width: usize) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        8 => (0..width).prop_map(Formula::atom),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::negate),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

pub fn dataset_strategy(width: usize, max_entries: usize) -> impl Strategy<Value = Dataset> {
    prop::collection::vec((0..(1u64 << width), 1u64..=5), 1..=max_entries)
        .prop_map(move |counts| Dataset::from_index_counts(width, &counts).expect("valid"))
}

/// A dataset, a target and up to four evidence formulas over 1..=`max_width` atoms.
pub fn instance_strategy(
    max_width: usize,
) -> impl Strategy<Value = (Dataset, Formula, Vec<Formula>)> {
    (1..=max_width).prop_flat_map(|width| {
        (
            dataset_strategy(width, 50),
            formula_strategy(width),
            prop::collection::vec(formula_strategy(width), 0..=4),
        )
    })
}
