//! Mismatch profiles: the sufficient statistic of a conditional query.
//!
//! Under the Bernoulli likelihood a datum whose world violates `h` of the
//! `n` evidence formulas has weight `mu^(n-h) (1-mu)^h`. Every datum with
//! the same `h` therefore contributes identically up to whether it
//! satisfies the target formula, so a query reduces to per-`h` counts:
//! `total[h]` data, of which `hits[h]` satisfy the target.
//!
//! * `mu = 1`: only `h = 0` survives, `hits[0] / total[0]`, undefined if
//!   `total[0] = 0`.
//! * `mu -> 1`: the smallest populated `h*` dominates, `hits[h*] / total[h*]`
//!   (min-plus evaluation on the `(1-mu)` exponents).
//! * `mu` in `(0.5, 1)`: dividing through by `mu^n` leaves weights
//!   `r^h` with `r = (1-mu)/mu`, summed in log space.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{MuMode, QueryResult, UndefinedReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bin {
    pub mismatches: u32,
    pub total: u64,
    pub hits: u64,
}

/// Data counts grouped by mismatch count, ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MismatchProfile {
    bins: Vec<Bin>,
}

impl MismatchProfile {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from a dense `(total, hits)` table indexed by mismatch count;
    /// empty rows are dropped.
    pub fn from_dense<I>(rows: I) -> Self
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let bins = rows
            .into_iter()
            .enumerate()
            .filter(|(_, (total, _))| *total > 0)
            .map(|(h, (total, hits))| {
                debug_assert!(hits <= total);
                Bin {
                    mismatches: h as u32,
                    total,
                    hits,
                }
            })
            .collect();
        MismatchProfile { bins }
    }

    /// Adds `count` data with `mismatches` violated evidence formulas.
    pub fn add(&mut self, mismatches: u32, count: u64, hit: bool) {
        let hits = if hit { count } else { 0 };
        match self
            .bins
            .binary_search_by_key(&mismatches, |b| b.mismatches)
        {
            Ok(i) => {
                self.bins[i].total += count;
                self.bins[i].hits += hits;
            }
            Err(i) => self.bins.insert(
                i,
                Bin {
                    mismatches,
                    total: count,
                    hits,
                },
            ),
        }
    }

    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().map(|b| b.total).sum()
    }

    /// Smallest mismatch count present.
    pub fn min_mismatches(&self) -> Option<u32> {
        self.bins.first().map(|b| b.mismatches)
    }

    /// `p(target | evidence)` under `mode`.
    pub fn evaluate(&self, mode: MuMode) -> QueryResult {
        match mode {
            MuMode::ExactOne => match self.bins.first() {
                Some(b) if b.mismatches == 0 => ratio(b.hits, b.total),
                _ => QueryResult::Undefined(UndefinedReason::EmptyPossibleModels),
            },
            MuMode::Limit => match self.bins.first() {
                Some(b) => ratio(b.hits, b.total),
                None => QueryResult::Undefined(UndefinedReason::NoData),
            },
            MuMode::Numeric(mu) => {
                if self.bins.is_empty() {
                    return QueryResult::Undefined(UndefinedReason::NoData);
                }
                QueryResult::Approx(self.numeric(mu.value()))
            }
        }
    }

    fn numeric(&self, mu: f64) -> f64 {
        let ln_mu = mu.ln();
        let ln_not_mu = (1.0 - mu).ln();
        let ln_r = ln_not_mu - ln_mu;
        let mut den = LogSumExp::default();
        let mut num = LogSumExp::default();
        for b in &self.bins {
            let base = f64::from(b.mismatches) * ln_r;
            den.push((b.total as f64).ln() + base);
            if b.hits > 0 {
                num.push((b.hits as f64).ln() + ln_mu + base);
            }
            let misses = b.total - b.hits;
            if misses > 0 {
                num.push((misses as f64).ln() + ln_not_mu + base);
            }
        }
        (num.value() - den.value()).exp().clamp(0.0, 1.0)
    }
}

fn ratio(hits: u64, total: u64) -> QueryResult {
    QueryResult::Exact(BigRational::new(BigInt::from(hits), BigInt::from(total)))
}

/// Log-sum-exp over terms reduced in insertion order against their maximum.
#[derive(Debug, Default)]
struct LogSumExp {
    terms: Vec<f64>,
}

impl LogSumExp {
    fn push(&mut self, x: f64) {
        self.terms.push(x);
    }

    fn value(&self) -> f64 {
        let max = self.terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return max;
        }
        max + self
            .terms
            .iter()
            .map(|&t| (t - max).exp())
            .sum::<f64>()
            .ln()
    }
}
