//! Property checkers for maps between finite spaces: constant, continuous,
//! quasi-continuous and closed graph, each with a failure witness.
//!
//! All checks work on smallest neighborhoods:
//!
//! - continuity at `x`: `f(U(x)) ⊆ U(f(x))`;
//! - quasi-continuity at `a`: some `w ∈ U(a)` has `f(U(w)) ⊆ U(f(a))`.
//!   Every nonempty open subset of `U(a)` contains such a `U(w)`, and the
//!   smallest neighborhoods of `a` and `f(a)` are the hardest to satisfy, so
//!   this finite test is equivalent to the open-set definition;
//! - `(x, y)` lies in the closure of the graph iff `U(x) × U(y)` meets it,
//!   i.e. some `x' ∈ U(x)` has `f(x') ∈ U(y)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::FiniteSpace;

/// Outcome of a property check; a failure carries its witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check<W> {
    Holds,
    Fails(W),
}

impl<W> Check<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Check::Holds => None,
            Check::Fails(w) => Some(w),
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Check<V> {
        match self {
            Check::Holds => Check::Holds,
            Check::Fails(w) => Check::Fails(f(w)),
        }
    }

    pub(crate) fn from_first(first: Option<W>) -> Self {
        first.map_or(Check::Holds, Check::Fails)
    }
}

/// The innermost ring of the nested diagram
/// `closed graph ⊆ constant ⊆ continuous ⊆ quasi-continuous ⊆ all`
/// that a map belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    ClosedGraph,
    Constant,
    Continuous,
    QuasiContinuous,
    Arbitrary,
}

impl Tier {
    pub const ALL: [Tier; 5] = [
        Tier::ClosedGraph,
        Tier::Constant,
        Tier::Continuous,
        Tier::QuasiContinuous,
        Tier::Arbitrary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tier::ClosedGraph => "closed graph",
            Tier::Constant => "constant",
            Tier::Continuous => "continuous",
            Tier::QuasiContinuous => "quasi-continuous",
            Tier::Arbitrary => "arbitrary",
        }
    }
}

/// The four diagram properties of one map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport<P> {
    pub constant: Option<P>,
    pub continuous: Check<P>,
    pub quasi_continuous: Check<P>,
    pub closed_graph: Check<(P, P)>,
}

impl<P> PropertyReport<P> {
    pub fn tier(&self) -> Tier {
        if self.closed_graph.holds() {
            Tier::ClosedGraph
        } else if self.constant.is_some() {
            Tier::Constant
        } else if self.continuous.holds() {
            Tier::Continuous
        } else if self.quasi_continuous.holds() {
            Tier::QuasiContinuous
        } else {
            Tier::Arbitrary
        }
    }

    /// Verifies closed graph ⟹ constant ⟹ continuous ⟹ quasi-continuous.
    pub fn check_nesting(&self) -> Result<()> {
        let broken = if self.closed_graph.holds() && self.constant.is_none() {
            Some("closed graph but not constant")
        } else if self.constant.is_some() && !self.continuous.holds() {
            Some("constant but not continuous")
        } else if self.continuous.holds() && !self.quasi_continuous.holds() {
            Some("continuous but not quasi-continuous")
        } else {
            None
        };
        match broken {
            Some(msg) => Err(Error::NestingViolation(msg.into())),
            None => Ok(()),
        }
    }

    pub fn map_points<Q>(self, f: impl Fn(P) -> Q) -> PropertyReport<Q> {
        PropertyReport {
            constant: self.constant.map(&f),
            continuous: self.continuous.map(&f),
            quasi_continuous: self.quasi_continuous.map(&f),
            closed_graph: self.closed_graph.map(|(x, y)| (f(x), f(y))),
        }
    }
}

/// A total map between finite spaces, as a table of codomain indices.
#[derive(Debug, Clone)]
pub struct SpaceMap<'a> {
    domain: &'a FiniteSpace,
    codomain: &'a FiniteSpace,
    table: Vec<usize>,
}

impl<'a> SpaceMap<'a> {
    pub fn new(
        domain: &'a FiniteSpace,
        codomain: &'a FiniteSpace,
        table: Vec<usize>,
    ) -> Result<Self> {
        if table.len() != domain.len() {
            return Err(Error::TableNotTotal {
                expected: domain.len(),
                found: table.len(),
            });
        }
        if let Some(&index) = table.iter().find(|&&v| v >= codomain.len()) {
            return Err(Error::IndexOutOfRange {
                index,
                len: codomain.len(),
            });
        }
        Ok(SpaceMap {
            domain,
            codomain,
            table,
        })
    }

    pub fn self_map(space: &'a FiniteSpace, table: Vec<usize>) -> Result<Self> {
        Self::new(space, space, table)
    }

    pub fn identity(space: &'a FiniteSpace) -> Self {
        SpaceMap {
            domain: space,
            codomain: space,
            table: (0..space.len()).collect(),
        }
    }

    pub fn constant(
        domain: &'a FiniteSpace,
        codomain: &'a FiniteSpace,
        value: usize,
    ) -> Result<Self> {
        Self::new(domain, codomain, vec![value; domain.len()])
    }

    pub fn domain(&self) -> &'a FiniteSpace {
        self.domain
    }

    pub fn codomain(&self) -> &'a FiniteSpace {
        self.codomain
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn is_constant(&self) -> Option<usize> {
        let (&first, rest) = self.table.split_first()?;
        rest.iter().all(|&v| v == first).then_some(first)
    }

    /// Whether `f(U(x)) ⊆ V` where `V` is the neighborhood of `target`.
    fn maps_nbhd_into(&self, x: usize, target: usize) -> bool {
        self.domain
            .nbhd(x)
            .iter()
            .all(|&z| self.codomain.in_nbhd(self.table[z], target))
    }

    pub fn is_continuous_at(&self, x: usize) -> bool {
        self.maps_nbhd_into(x, self.table[x])
    }

    /// First `x` (in index order) with `f(U(x)) ⊄ U(f(x))`.
    pub fn is_continuous(&self) -> Check<usize> {
        Check::from_first((0..self.domain.len()).find(|&x| !self.is_continuous_at(x)))
    }

    pub fn is_quasi_continuous_at(&self, a: usize) -> bool {
        let target = self.table[a];
        self.domain
            .nbhd(a)
            .iter()
            .any(|&w| self.maps_nbhd_into(w, target))
    }

    pub fn is_quasi_continuous(&self) -> Check<usize> {
        Check::from_first((0..self.domain.len()).find(|&a| !self.is_quasi_continuous_at(a)))
    }

    /// Whether `(x, y)` lies in the closure of the graph.
    pub fn graph_closure_member(&self, x: usize, y: usize) -> bool {
        self.domain
            .nbhd(x)
            .iter()
            .any(|&z| self.codomain.in_nbhd(self.table[z], y))
    }

    /// Scans codomain points `y` in order and, for each, domain points `x`;
    /// the first pair in the closure of the graph but off the graph is the
    /// witness.
    pub fn has_closed_graph(&self) -> Check<(usize, usize)> {
        for y in 0..self.codomain.len() {
            for x in 0..self.domain.len() {
                if self.table[x] != y && self.graph_closure_member(x, y) {
                    return Check::Fails((x, y));
                }
            }
        }
        Check::Holds
    }

    pub fn classify(&self) -> Result<PropertyReport<usize>> {
        let report = PropertyReport {
            constant: self.is_constant(),
            continuous: self.is_continuous(),
            quasi_continuous: self.is_quasi_continuous(),
            closed_graph: self.has_closed_graph(),
        };
        report.check_nesting()?;
        Ok(report)
    }

    /// First `x` at which `f` is not constant on `U(x)` or on the closure
    /// of `{x}`.
    pub fn constancy_failure(&self) -> Option<usize> {
        (0..self.domain.len()).find(|&x| {
            let v = self.table[x];
            self.domain
                .nbhd(x)
                .iter()
                .chain(self.domain.point_closure(x))
                .any(|&z| self.table[z] != v)
        })
    }
}
