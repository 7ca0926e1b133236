//! Fitting random utility models (RUMs) to winner distributions on k-slates.
//!
//! A RUM is a probability distribution over permutations of a universe `[n]`;
//! offered a slate of k items, a user samples a permutation and picks the
//! slate member it ranks highest. Given the empirical winner distribution of
//! each slate, [`fit::fit_rum`] searches for the RUM minimizing the average
//! per-slate l1 error by column generation: a restricted linear program over
//! a growing support of permutations, with new columns produced by a
//! separation oracle that solves the weighted feedback hyperedge set problem
//! ([`wfhs`]) on the dual values, either exactly (bitmask dynamic program) or
//! by randomized local search.
//!
//! The crate also ships dataset ingestion ([`ingest`]), a multinomial-logit
//! baseline ([`mnl`]), and evaluation utilities ([`eval`]: error CDFs, RMSE,
//! k-fold cross-validation).

pub mod error;
pub mod eval;
pub mod fit;
pub mod ingest;
pub mod lp;
pub mod mnl;
pub mod model;
pub mod seeding;
pub mod simplex;
pub mod synth;
pub mod wfhs;

pub use error::{Error, Result};
pub use model::{ItemId, Permutation, Rum, Slate, WinnerTable};
