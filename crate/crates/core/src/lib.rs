//! Finite approach spaces with exact rational arithmetic.
//!
//! The crate models `[0, inf]`-valued convergence on finite carriers:
//! relations and their min-plus composition, the ultrafilter machinery that
//! states the convergence axioms, approach spaces with their distance view,
//! function-space distances, and an exact decider for the exponentiability
//! criterion. Every structural step has two independent computations that
//! are required to agree, so a bug in one route surfaces as a test failure
//! rather than a silently wrong verdict.

pub mod approach;
pub mod expcheck;
pub mod gen;
pub mod exponential;
pub mod io;
pub mod cost;
pub mod numrel;
pub mod ultra;
