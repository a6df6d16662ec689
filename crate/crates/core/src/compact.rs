//! The one-point compactification `A(K^n) = K^n ∪ {∞}`.
//!
//! Open sets are the open sets of `K^n` together with the complements of
//! compact closed subsets of `K^n`. Every compact subset of `K^n` is finite,
//! since it is covered by the finite neighborhoods of its points. So the
//! neighborhoods of `∞` are exactly the sets `A(K^n) \ F` with `F` finite
//! and closed, and the closure of any finite lattice set is finite. The
//! closed points are the all-even lattice points and `∞`.
//!
//! Self-maps are restricted to eventually constant ones: an explicit table on
//! a finite box `B`, a tail value `c` on `K^n \ B`, and a value at `∞`. For
//! those the closed-graph property reduces to finitely many checks. A pair
//! `(x, y)` off the graph must have a product neighborhood missing the graph:
//!
//! 1. lattice `x`, lattice `y`: `f(V(x)) ∩ V(y) = ∅`. Only `x` in `B` grown
//!    by one can see the table; every farther `x` has `f(V(x)) = {c}`, which
//!    forces a lattice `c` to be closed.
//! 2. lattice `x`, `y = ∞`: `f(V(x))` must avoid `∞` unless `f(x) = ∞`
//!    (a finite lattice image can always be fenced off by its closure).
//! 3. `x = ∞`, lattice `y`: the preimage of `V(y)` must be finite and miss
//!    `∞`, i.e. neither `c` nor `f(∞)` lies in `V(y)`.
//! 4. `x = y = ∞` with `f(∞) ≠ ∞`: points far out map to `c`, so the pair
//!    is separated iff `c` is a lattice point.

use std::fmt;
use std::ops::RangeInclusive;

use itertools::Itertools;
use serde::Serialize;

use crate::analysis::{Check, PropertyReport};
use crate::error::{Error, Result};
use crate::lattice::{box_points, closure_box, in_min_nbhd, is_closed_point, nbhd_box, KPoint};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtPoint {
    Lattice(KPoint),
    Infinity,
}

impl ExtPoint {
    pub fn lattice(&self) -> Option<&KPoint> {
        match self {
            ExtPoint::Lattice(p) => Some(p),
            ExtPoint::Infinity => None,
        }
    }

    fn ensure_dim(&self, dim: usize) -> Result<()> {
        self.lattice().map_or(Ok(()), |p| p.ensure_dim(dim))
    }
}

impl From<KPoint> for ExtPoint {
    fn from(p: KPoint) -> Self {
        ExtPoint::Lattice(p)
    }
}

impl fmt::Display for ExtPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtPoint::Lattice(p) => write!(f, "{p}"),
            ExtPoint::Infinity => f.write_str("∞"),
        }
    }
}

pub fn is_closed_point_ext(p: &ExtPoint) -> bool {
    match p {
        ExtPoint::Lattice(q) => is_closed_point(q),
        ExtPoint::Infinity => true,
    }
}

/// Whether the constant self-map with value `c` has closed graph.
pub fn constant_map_closed_graph(c: &ExtPoint) -> bool {
    is_closed_point_ext(c)
}

/// A self-map of `A(K^n)` that is constant outside a finite box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventuallyConstantMap {
    dim: usize,
    bbox: Vec<(i64, i64)>,
    table: Vec<ExtPoint>,
    tail: ExtPoint,
    at_infinity: ExtPoint,
}

impl EventuallyConstantMap {
    /// `table` lists the values on the lattice points of `bbox` in
    /// lexicographic order.
    pub fn new(
        bbox: Vec<(i64, i64)>,
        table: Vec<ExtPoint>,
        tail: ExtPoint,
        at_infinity: ExtPoint,
    ) -> Result<Self> {
        if bbox.is_empty() {
            return Err(Error::EmptyBox);
        }
        let mut size: u128 = 1;
        for &(a, b) in &bbox {
            if a > b {
                return Err(Error::EmptyInterval { a, b });
            }
            for c in [a, b] {
                KPoint::new(vec![c])?;
            }
            size = size.saturating_mul((b as i128 - a as i128 + 1) as u128);
        }
        if size != table.len() as u128 {
            return Err(Error::TableNotTotal {
                expected: usize::try_from(size).unwrap_or(usize::MAX),
                found: table.len(),
            });
        }
        let dim = bbox.len();
        for v in table.iter().chain([&tail, &at_infinity]) {
            v.ensure_dim(dim)?;
        }
        Ok(EventuallyConstantMap {
            dim,
            bbox,
            table,
            tail,
            at_infinity,
        })
    }

    /// The constant map with value `c`, encoded with a one-point box at the
    /// origin.
    pub fn constant(dim: usize, c: ExtPoint) -> Result<Self> {
        Self::new(vec![(0, 0); dim], vec![c.clone()], c.clone(), c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bbox(&self) -> &[(i64, i64)] {
        &self.bbox
    }

    pub fn table(&self) -> &[ExtPoint] {
        &self.table
    }

    pub fn tail(&self) -> &ExtPoint {
        &self.tail
    }

    pub fn at_infinity(&self) -> &ExtPoint {
        &self.at_infinity
    }

    fn table_index(&self, p: &KPoint) -> Option<usize> {
        let mut index = 0usize;
        for (&c, &(a, b)) in p.coords().iter().zip(&self.bbox) {
            if c < a || c > b {
                return None;
            }
            index = index * (b - a + 1) as usize + (c - a) as usize;
        }
        Some(index)
    }

    pub fn eval(&self, p: &KPoint) -> &ExtPoint {
        self.table_index(p).map_or(&self.tail, |i| &self.table[i])
    }

    pub fn eval_ext(&self, x: &ExtPoint) -> &ExtPoint {
        match x {
            ExtPoint::Lattice(p) => self.eval(p),
            ExtPoint::Infinity => &self.at_infinity,
        }
    }

    /// Whether table, tail and value at `∞` all coincide, and with what.
    pub fn constant_value(&self) -> Option<&ExtPoint> {
        let c = &self.at_infinity;
        (self.tail == *c && self.table.iter().all(|v| v == c)).then_some(c)
    }

    fn expanded_box(&self) -> Vec<RangeInclusive<i64>> {
        self.bbox.iter().map(|&(a, b)| a - 1..=b + 1).collect()
    }

    /// Whether `f` maps the lattice box `region` into every neighborhood of
    /// `target`.
    fn image_within(&self, region: &[RangeInclusive<i64>], target: &ExtPoint) -> bool {
        match target {
            ExtPoint::Lattice(y) => box_points(region).all(|z| match self.eval(&z) {
                ExtPoint::Lattice(v) => in_min_nbhd(v, y),
                ExtPoint::Infinity => false,
            }),
            ExtPoint::Infinity => box_points(region).all(|z| *self.eval(&z) == ExtPoint::Infinity),
        }
    }

    fn continuous_at_infinity(&self) -> bool {
        match (&self.at_infinity, &self.tail) {
            (ExtPoint::Lattice(y), ExtPoint::Lattice(c)) => in_min_nbhd(c, y),
            (ExtPoint::Infinity, ExtPoint::Infinity) => true,
            _ => false,
        }
    }

    /// A lattice point whose neighborhood misses the box.
    fn far_point(&self) -> KPoint {
        KPoint::from_vec(self.bbox.iter().map(|&(_, b)| b + 2).collect())
    }
}

/// Which kind of pair witnesses a non-closed graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    LatticeLattice,
    LatticeInfinity,
    InfinityLattice,
    InfinityInfinity,
}

/// A pair in the closure of the graph but not on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtWitness {
    pub kind: PairKind,
    pub x: ExtPoint,
    pub y: ExtPoint,
}

/// Decides whether the graph of `f` is closed in `A(K^n) × A(K^n)`; the
/// witness is the first violation in the order of the module-level cases.
pub fn has_closed_graph_ext(f: &EventuallyConstantMap) -> Check<ExtWitness> {
    Check::from_first(first_violation(f))
}

fn first_violation(f: &EventuallyConstantMap) -> Option<ExtWitness> {
    let lattice_pair = |x: KPoint, y: KPoint| ExtWitness {
        kind: PairKind::LatticeLattice,
        x: x.into(),
        y: y.into(),
    };
    let expanded = f.expanded_box();

    // 1. near the box: y ranges over closures of lattice values on V(x)
    for x in box_points(&expanded) {
        let fx = f.eval(&x);
        let mut candidates: Vec<KPoint> = box_points(&nbhd_box(&x))
            .filter_map(|z| f.eval(&z).lattice().cloned())
            .flat_map(|v| box_points(&closure_box(&v)).collect::<Vec<_>>())
            .collect();
        candidates.sort();
        candidates.dedup();
        if let Some(y) = candidates.into_iter().find(|y| fx.lattice() != Some(y)) {
            return Some(lattice_pair(x, y));
        }
    }
    // 1. far from the box every neighborhood maps to the tail alone
    if let ExtPoint::Lattice(c) = &f.tail {
        if let Some(y) = box_points(&closure_box(c)).find(|y| y != c) {
            return Some(lattice_pair(f.far_point(), y));
        }
    }

    // 2.
    for x in box_points(&expanded) {
        let hits_infinity = box_points(&nbhd_box(&x)).any(|z| *f.eval(&z) == ExtPoint::Infinity);
        if hits_infinity && *f.eval(&x) != ExtPoint::Infinity {
            return Some(ExtWitness {
                kind: PairKind::LatticeInfinity,
                x: x.into(),
                y: ExtPoint::Infinity,
            });
        }
    }

    // 3.
    let mut candidates: Vec<KPoint> = [&f.tail, &f.at_infinity]
        .into_iter()
        .filter_map(ExtPoint::lattice)
        .flat_map(|v| box_points(&closure_box(v)).collect::<Vec<_>>())
        .collect();
    candidates.sort();
    candidates.dedup();
    if let Some(y) = candidates
        .into_iter()
        .find(|y| f.at_infinity.lattice() != Some(y))
    {
        return Some(ExtWitness {
            kind: PairKind::InfinityLattice,
            x: ExtPoint::Infinity,
            y: y.into(),
        });
    }

    // 4.
    if f.tail == ExtPoint::Infinity && f.at_infinity != ExtPoint::Infinity {
        return Some(ExtWitness {
            kind: PairKind::InfinityInfinity,
            x: ExtPoint::Infinity,
            y: ExtPoint::Infinity,
        });
    }
    None
}

/// Continuity of `f` on `A(K^n)`; the witness is the first failing point,
/// lattice points of the grown box in lexicographic order, then `∞`.
///
/// `∞` has no smallest neighborhood. At a lattice `x` with `f(x) = ∞` this
/// forces `f(V(x)) = {∞}`, since any lattice value can be fenced off by its
/// finite closure. At `∞` every neighborhood contains far points mapping to
/// the tail `c`, so continuity there means `c ∈ V(f(∞))` for lattice `f(∞)`
/// and `c = ∞` otherwise.
pub fn is_continuous_ext(f: &EventuallyConstantMap) -> Check<ExtPoint> {
    let failing = box_points(&f.expanded_box())
        .find(|x| !f.image_within(&nbhd_box(x), f.eval(x)))
        .map(ExtPoint::from)
        .or_else(|| (!f.continuous_at_infinity()).then_some(ExtPoint::Infinity));
    Check::from_first(failing)
}

/// Quasi-continuity of `f` on `A(K^n)`, with witnesses ordered as in
/// [`is_continuous_ext`]. At `∞` it coincides with continuity: small open
/// sets near `∞` consist of far points, all mapped to the tail.
pub fn is_quasi_continuous_ext(f: &EventuallyConstantMap) -> Check<ExtPoint> {
    let failing = box_points(&f.expanded_box())
        .find(|a| {
            let target = f.eval(a);
            !box_points(&nbhd_box(a)).any(|w| f.image_within(&nbhd_box(&w), target))
        })
        .map(ExtPoint::from)
        .or_else(|| (!f.continuous_at_infinity()).then_some(ExtPoint::Infinity));
    Check::from_first(failing)
}

/// All four diagram properties of an eventually constant map.
pub fn classify_ext(f: &EventuallyConstantMap) -> Result<PropertyReport<ExtPoint>> {
    let report = PropertyReport {
        constant: f.constant_value().cloned(),
        continuous: is_continuous_ext(f),
        quasi_continuous: is_quasi_continuous_ext(f),
        closed_graph: has_closed_graph_ext(f).map(|w| (w.x, w.y)),
    };
    report.check_nesting()?;
    Ok(report)
}

/// The closed-graph characterization on `A(K^n)`: globally constant at a
/// closed point.
pub fn predicted_closed_graph(f: &EventuallyConstantMap) -> bool {
    f.constant_value().is_some_and(is_closed_point_ext)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompactifiedMismatch {
    pub index: usize,
    pub decided: bool,
    pub predicted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompactifiedReport {
    pub checked: usize,
    pub closed_graph: usize,
    pub mismatches: Vec<CompactifiedMismatch>,
}

impl CompactifiedReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Runs [`has_closed_graph_ext`] on every map of the family and compares it
/// with [`predicted_closed_graph`].
pub fn verify_compactified_theorem(
    dim: usize,
    family: &[EventuallyConstantMap],
) -> Result<CompactifiedReport> {
    let mut report = CompactifiedReport {
        checked: 0,
        closed_graph: 0,
        mismatches: Vec::new(),
    };
    for (index, f) in family.iter().enumerate() {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.dim(),
            });
        }
        let decided = has_closed_graph_ext(f).holds();
        let predicted = predicted_closed_graph(f);
        report.checked += 1;
        report.closed_graph += usize::from(decided);
        if decided != predicted {
            report.mismatches.push(CompactifiedMismatch {
                index,
                decided,
                predicted,
            });
        }
    }
    Ok(report)
}

/// Every map on `bbox` whose table takes values in `values`, with the given
/// tail and value at `∞`, in lexicographic order of tables.
pub fn perturbation_family(
    bbox: &[(i64, i64)],
    values: &[ExtPoint],
    tail: &ExtPoint,
    at_infinity: &ExtPoint,
) -> Result<Vec<EventuallyConstantMap>> {
    let size: usize = bbox
        .iter()
        .map(|&(a, b)| (b - a + 1).max(0) as usize)
        .product();
    let tables = std::iter::repeat_n(values.iter().cloned(), size);
    tables
        .multi_cartesian_product()
        .map(|table| {
            EventuallyConstantMap::new(bbox.to_vec(), table, tail.clone(), at_infinity.clone())
        })
        .collect()
}
