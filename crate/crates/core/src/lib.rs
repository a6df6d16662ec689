//! Computational Khalimsky topology.
//!
//! - [`lattice`]: points of `K^n`, smallest neighborhoods, closures, chains.
//! - [`space`]: finite Alexandroff spaces given by neighborhood systems.
//! - [`analysis`]: constant / continuous / quasi-continuous / closed-graph
//!   checks for maps between finite spaces.
//! - [`rule`]: the same checks for rule-defined self-maps of `K^n`.
//! - [`compact`]: the one-point compactification `A(K^n)`.
//! - [`enumerate`]: exhaustive and sampled censuses of self-maps.
//! - [`suites`]: the verification suites run by the CLI.

pub mod analysis;
pub mod compact;
pub mod enumerate;
pub mod error;
pub mod lattice;
pub mod rule;
pub mod space;
pub mod suites;

pub use analysis::{Check, PropertyReport, SpaceMap, Tier};
pub use compact::{classify_ext, EventuallyConstantMap, ExtPoint};
pub use enumerate::{Census, DEFAULT_LIMIT};
pub use error::{Error, Result};
pub use lattice::{KPoint, PointSet};
pub use rule::{Arm, LocalProperty, ParityRule, Rule, RuleMap};
pub use space::{FiniteSpace, PointLabel, Subset, Violation};
