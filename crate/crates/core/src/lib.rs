//! Computability workbench.
//!
//! An indexed programming system with oracles, a lambda-calculus kernel,
//! Turing machines, stage-bounded r.e. sets, executable witnesses for the
//! classical effective-undecidability notions and finite-injury priority
//! constructions.

pub mod coding;
pub mod ips;
pub mod lambda;
pub mod machines;
pub mod re_sets;
pub mod classes;
pub mod priority;
pub mod verify;
pub mod cli;
