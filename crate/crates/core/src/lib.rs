//! Probabilistic reasoning over data-grounded possible worlds.
//!
//! Data items each support exactly one possible world (a total truth
//! assignment over a finite set of atoms). The probability of a formula is
//! obtained by pushing the uniform distribution over data through the
//! data-to-world map and a Bernoulli likelihood with parameter `mu` that
//! scores whether the formula holds in a world:
//!
//! ```text
//! p(alpha | delta) = sum_d p(alpha | d) prod_{beta in delta} p(beta | d)
//!                    ---------------------------------------------------
//!                         sum_d prod_{beta in delta} p(beta | d)
//! ```
//!
//! Three regimes for `mu` are supported (see [`engine::MuMode`]):
//!
//! * `mu = 1` reproduces classical consequence restricted to worlds that
//!   are supported by data, with an explicit `Undefined` result when no
//!   supported world satisfies the evidence;
//! * `mu -> 1` is an all-nearest-neighbour rule over mismatch counts;
//! * `mu` in `(0.5, 1)` is a smoothed version that weighs every datum by
//!   `mu^matches * (1 - mu)^mismatches`.
//!
//! The [`mnist`] module applies the same conditional to binarised
//! handwritten digit images for classification, class-image generation
//! and image completion.
//!
//! # Crate features
//!
//! * `parallel` (default): batch scoring in [`mnist`] runs on the rayon
//!   thread pool when [`Execution::Parallel`] is requested. Without it
//!   every batch runs sequentially.

pub mod engine;
mod exec;
pub mod formula;
pub mod mnist;
pub mod worlds;

pub use engine::{
    entails_classical, entails_empirical, prob_conditional, prob_marginal, EngineError, Mu, MuMode,
    QueryResult, UndefinedReason,
};
pub use exec::Execution;
pub use formula::{parse_formula, Atom, AtomUniverse, Formula, FormulaError};
pub use worlds::{world_dist, Dataset, DatasetError, World, WorldDist, WorldSet};
