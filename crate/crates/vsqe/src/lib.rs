//! Quantifier elimination for the first-order theory of real closed fields
//! by virtual substitution, restricted to variables of degree at most two.
//!
//! The crate is layered: [`polyarith`] provides exact multivariate
//! polynomial arithmetic over the rationals with De Bruijn variable
//! indices, [`formula`] the formula language, [`transform`] structural
//! preprocessing, [`vsub`] the substitution core, [`engine`] the
//! elimination drivers, [`oracle`] an independent univariate decision
//! procedure used for cross-checking, and [`frontend`] the parsers, the
//! printer, and the benchmark harness behind the `vsqe` binary.

pub mod engine;
pub mod formula;
pub mod frontend;
pub mod oracle;
pub mod polyarith;
pub mod transform;
pub mod vsub;
