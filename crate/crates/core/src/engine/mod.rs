//! Marginal and conditional formula probabilities, and the two consequence
//! relations they characterise.

mod profile;
mod query;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::formula::{models_of, AtomUniverse, Formula, FormulaError};
use crate::worlds::{possible_models, world_dist, Dataset, DatasetError, World};

pub use profile::{Bin, MismatchProfile};
pub use query::{parse_entailment, parse_query, Entailment, Query};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("mu must lie strictly between 0.5 and 1, got {0}")]
    InvalidMu(f64),
    #[error("bad mu spec `{0}`: expected `exact1`, `limit` or a decimal in (0.5, 1)")]
    BadMuSpec(String),
    #[error("query syntax error at byte {position}: {message}")]
    QuerySyntax { position: usize, message: String },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Bernoulli parameter restricted to the open interval `(0.5, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Mu(f64);

impl Mu {
    pub fn new(value: f64) -> Result<Self, EngineError> {
        if value > 0.5 && value < 1.0 {
            Ok(Mu(value))
        } else {
            Err(EngineError::InvalidMu(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Evaluation regime for `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuMode {
    /// `mu = 1`, exact rational arithmetic.
    ExactOne,
    /// The limit `mu -> 1`, evaluated by mismatch counting.
    Limit,
    /// A fixed `mu` in `(0.5, 1)`.
    Numeric(Mu),
}

impl MuMode {
    pub fn numeric(mu: f64) -> Result<Self, EngineError> {
        Mu::new(mu).map(MuMode::Numeric)
    }
}

impl FromStr for MuMode {
    type Err = EngineError;

    /// `exact1`, `limit`, or a decimal in `(0.5, 1)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact1" => Ok(MuMode::ExactOne),
            "limit" => Ok(MuMode::Limit),
            _ => {
                let v: f64 = s
                    .parse()
                    .map_err(|_| EngineError::BadMuSpec(s.to_string()))?;
                if !v.is_finite() {
                    return Err(EngineError::BadMuSpec(s.to_string()));
                }
                MuMode::numeric(v)
            }
        }
    }
}

impl fmt::Display for MuMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuMode::ExactOne => f.write_str("exact1"),
            MuMode::Limit => f.write_str("limit"),
            MuMode::Numeric(mu) => write!(f, "{}", mu.value()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UndefinedReason {
    /// No supported world satisfies the evidence (`mu = 1`).
    EmptyPossibleModels,
    /// The profile holds no data at all.
    NoData,
}

impl fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UndefinedReason::EmptyPossibleModels => f.write_str("empty possible-model set"),
            UndefinedReason::NoData => f.write_str("no data"),
        }
    }
}

/// Probability of a query, or why it has none.
#[derive(Debug, Clone, PartialEq)]
pub enum QueryResult {
    Exact(BigRational),
    Approx(f64),
    Undefined(UndefinedReason),
}

impl QueryResult {
    pub fn value(&self) -> Option<f64> {
        match self {
            QueryResult::Exact(r) => Some(rational_to_f64(r)),
            QueryResult::Approx(v) => Some(*v),
            QueryResult::Undefined(_) => None,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            QueryResult::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, QueryResult::Exact(_))
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, QueryResult::Undefined(_))
    }

    /// Exactly one (only meaningful for exact results).
    pub fn is_certain(&self) -> bool {
        self.exact().is_some_and(One::is_one)
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Bernoulli likelihood `p(alpha | m) = mu^a (1 - mu)^(1 - a)` with
/// `a = 1` iff `m` satisfies `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Likelihood {
    satisfied: bool,
}

impl Likelihood {
    pub fn of(alpha: &Formula, world: &World) -> Self {
        Likelihood {
            satisfied: alpha.holds_in(world),
        }
    }

    pub fn mu_exponent(self) -> u32 {
        u32::from(self.satisfied)
    }

    pub fn one_minus_mu_exponent(self) -> u32 {
        1 - self.mu_exponent()
    }

    pub fn eval(self, mu: f64) -> f64 {
        if self.satisfied {
            mu
        } else {
            1.0 - mu
        }
    }

    pub fn eval_exact(self, mu: &BigRational) -> BigRational {
        if self.satisfied {
            mu.clone()
        } else {
            BigRational::one() - mu
        }
    }
}

/// `p(alpha) = intercept + slope * mu`, exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineInMu {
    pub intercept: BigRational,
    pub slope: BigRational,
}

impl AffineInMu {
    pub fn eval(&self, mu: &BigRational) -> BigRational {
        &self.intercept + &self.slope * mu
    }
}

/// The marginal of `alpha` as an exact affine function of `mu`:
/// `sum_m p(alpha | m) p(m)`.
pub fn marginal_affine(ds: &Dataset, alpha: &Formula) -> Result<AffineInMu, EngineError> {
    alpha.check_width(ds.width())?;
    let k = BigInt::from(ds.total());
    let sat: u64 = ds
        .entries()
        .iter()
        .filter(|(w, _)| alpha.holds_in(w))
        .map(|(_, c)| c)
        .sum();
    let unsat = ds.total() - sat;
    let p_sat = BigRational::new(BigInt::from(sat), k.clone());
    let p_unsat = BigRational::new(BigInt::from(unsat), k);
    Ok(AffineInMu {
        slope: &p_sat - &p_unsat,
        intercept: p_unsat,
    })
}

/// `p(alpha)`. Never undefined.
pub fn prob_marginal(
    ds: &Dataset,
    alpha: &Formula,
    mode: MuMode,
) -> Result<QueryResult, EngineError> {
    let affine = marginal_affine(ds, alpha)?;
    Ok(match mode {
        MuMode::ExactOne | MuMode::Limit => QueryResult::Exact(affine.eval(&BigRational::one())),
        MuMode::Numeric(mu) => {
            let v =
                rational_to_f64(&affine.intercept) + rational_to_f64(&affine.slope) * mu.value();
            QueryResult::Approx(v.clamp(0.0, 1.0))
        }
    })
}

/// Structural de-duplication, first occurrence kept.
pub fn dedup_evidence(delta: &[Formula]) -> Vec<&Formula> {
    let mut out: Vec<&Formula> = Vec::with_capacity(delta.len());
    for f in delta {
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

/// Groups the data of `ds` by how many evidence formulas their world
/// violates, recording which of them satisfy `alpha`.
pub fn mismatch_profile(
    ds: &Dataset,
    alpha: &Formula,
    delta: &[Formula],
) -> Result<MismatchProfile, EngineError> {
    alpha.check_width(ds.width())?;
    for f in delta {
        f.check_width(ds.width())?;
    }
    let delta = dedup_evidence(delta);
    let mut profile = MismatchProfile::new();
    for (w, c) in ds.entries() {
        let h = delta.iter().filter(|b| !b.holds_in(w)).count() as u32;
        profile.add(h, *c, alpha.holds_in(w));
    }
    Ok(profile)
}

/// `p(alpha | delta)` computed over the data.
///
/// Only `ExactOne` can be undefined, when no datum's world satisfies all
/// of `delta`.
pub fn prob_conditional(
    ds: &Dataset,
    alpha: &Formula,
    delta: &[Formula],
    mode: MuMode,
) -> Result<QueryResult, EngineError> {
    Ok(mismatch_profile(ds, alpha, delta)?.evaluate(mode))
}

/// `p(alpha | delta)` at `mu = 1` via enumerated possible models:
/// the mass of possible models of `delta` and `alpha` over the mass of
/// possible models of `delta`.
pub fn prob_conditional_by_models(
    ds: &Dataset,
    alpha: &Formula,
    delta: &[Formula],
) -> Result<QueryResult, EngineError> {
    let dist = world_dist(ds);
    let given = possible_models(ds, delta)?;
    if given.is_empty() {
        return Ok(QueryResult::Undefined(UndefinedReason::EmptyPossibleModels));
    }
    let both = given.intersection(&possible_models(ds, std::slice::from_ref(alpha))?);
    let mass = |set: &crate::worlds::WorldSet| {
        set.iter()
            .map(|w| dist.prob(&w))
            .fold(BigRational::zero(), |acc, p| acc + p)
    };
    Ok(QueryResult::Exact(mass(&both) / mass(&given)))
}

/// Classical consequence: every model of `delta` is a model of `alpha`.
pub fn entails_classical(
    delta: &[Formula],
    alpha: &Formula,
    universe: &AtomUniverse,
) -> Result<bool, EngineError> {
    let premises = models_of(delta, universe)?;
    let conclusion = models_of(std::slice::from_ref(alpha), universe)?;
    Ok(premises.is_subset(&conclusion))
}

/// Empirical consequence: every possible model of `delta` is a possible
/// model of `alpha`.
pub fn entails_empirical(
    ds: &Dataset,
    delta: &[Formula],
    alpha: &Formula,
) -> Result<bool, EngineError> {
    let premises = possible_models(ds, delta)?;
    let conclusion = possible_models(ds, std::slice::from_ref(alpha))?;
    Ok(premises.is_subset(&conclusion))
}
