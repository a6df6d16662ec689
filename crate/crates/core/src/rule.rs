//! Rule-defined self-maps of `K^n`, evaluated pointwise.
//!
//! Continuity and quasi-continuity are local, and every smallest
//! neighborhood in `K^n` is finite, so both are decided exactly at any given
//! point. The closed-graph property is global: a constant rule has closed
//! graph iff its value is a closed point, and a non-constant rule never
//! does. Refutation inside a finite region is also available.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::analysis::{Check, PropertyReport};
use crate::error::{Error, Result};
use crate::lattice::{box_points, closure_box, in_min_nbhd, is_closed_point, nbhd_box, KPoint};

/// Largest accepted absolute shift in a parity rule.
pub const SHIFT_LIMIT: i64 = 1 << 61;

/// How a parity class of integers is mapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    /// `x ↦ x + k`
    Shift(i64),
    /// `x ↦ v`
    Const(i64),
}

impl Arm {
    fn apply(self, x: i64) -> i64 {
        match self {
            Arm::Shift(k) => x + k,
            Arm::Const(v) => v,
        }
    }
}

/// A map of the line defined separately on even and odd integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParityRule {
    pub even: Arm,
    pub odd: Arm,
}

impl ParityRule {
    /// `h(x) = x` for odd `x`, `x + 1` for even `x`.
    pub const EXAMPLE_D: ParityRule = ParityRule {
        even: Arm::Shift(1),
        odd: Arm::Shift(0),
    };

    /// `h(x) = 1` for even `x`, `-1` for odd `x`.
    pub const EXAMPLE_E: ParityRule = ParityRule {
        even: Arm::Const(1),
        odd: Arm::Const(-1),
    };

    pub fn apply(&self, x: i64) -> i64 {
        if x.rem_euclid(2) == 0 {
            self.even.apply(x)
        } else {
            self.odd.apply(x)
        }
    }

    fn constant_value(&self) -> Option<i64> {
        match (self.even, self.odd) {
            (Arm::Const(a), Arm::Const(b)) if a == b => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Constant(KPoint),
    Identity,
    /// The parity rule applied to every coordinate.
    Coordinatewise(ParityRule),
    /// Explicit values on finitely many points, `default` elsewhere.
    Patched {
        table: BTreeMap<KPoint, KPoint>,
        default: Box<Rule>,
    },
}

impl Rule {
    fn apply(&self, p: &KPoint) -> KPoint {
        match self {
            Rule::Constant(c) => c.clone(),
            Rule::Identity => p.clone(),
            Rule::Coordinatewise(h) => {
                KPoint::from_vec(p.coords().iter().map(|&x| h.apply(x)).collect())
            }
            Rule::Patched { table, default } => {
                table.get(p).cloned().unwrap_or_else(|| default.apply(p))
            }
        }
    }

    fn check_dims(&self, dim: usize) -> Result<()> {
        let check_arm = |arm: Arm| match arm {
            Arm::Shift(k) if k.abs() > SHIFT_LIMIT => Err(Error::ShiftOutOfRange(k)),
            Arm::Const(v) => KPoint::new(vec![v]).map(drop),
            Arm::Shift(_) => Ok(()),
        };
        match self {
            Rule::Constant(c) => c.ensure_dim(dim),
            Rule::Identity => Ok(()),
            Rule::Coordinatewise(h) => {
                check_arm(h.even)?;
                check_arm(h.odd)
            }
            Rule::Patched { table, default } => {
                for (k, v) in table {
                    k.ensure_dim(dim)?;
                    v.ensure_dim(dim)?;
                }
                default.check_dims(dim)
            }
        }
    }

    fn constant_value(&self, dim: usize) -> Option<KPoint> {
        match self {
            Rule::Constant(c) => Some(c.clone()),
            Rule::Identity => None,
            Rule::Coordinatewise(h) => h.constant_value().map(|v| KPoint::from_vec(vec![v; dim])),
            Rule::Patched { table, default } => {
                let c = default.constant_value(dim)?;
                table.values().all(|v| *v == c).then_some(c)
            }
        }
    }

    fn collect_patch_keys<'a>(&'a self, out: &mut Vec<&'a KPoint>) {
        if let Rule::Patched { table, default } = self {
            out.extend(table.keys());
            default.collect_patch_keys(out);
        }
    }
}

/// A total self-map of `K^n` given by a rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleMap {
    dim: usize,
    rule: Rule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalProperty {
    Continuity,
    QuasiContinuity,
}

impl RuleMap {
    pub fn new(dim: usize, rule: Rule) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        rule.check_dims(dim)?;
        Ok(RuleMap { dim, rule })
    }

    pub fn constant(value: KPoint) -> Self {
        RuleMap {
            dim: value.dim(),
            rule: Rule::Constant(value),
        }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(dim, Rule::Identity)
    }

    pub fn coordinatewise(dim: usize, h: ParityRule) -> Result<Self> {
        Self::new(dim, Rule::Coordinatewise(h))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn apply(&self, p: &KPoint) -> KPoint {
        self.rule.apply(p)
    }

    /// The value of the map if it is constant on all of `K^n`.
    pub fn is_constant(&self) -> Option<KPoint> {
        self.rule.constant_value(self.dim)
    }

    /// Whether `f(V(x)) ⊆ V(target)`.
    fn maps_nbhd_into(&self, x: &KPoint, target: &KPoint) -> bool {
        box_points(&nbhd_box(x)).all(|z| in_min_nbhd(&self.apply(&z), target))
    }

    pub fn check_at(&self, property: LocalProperty, p: &KPoint) -> Result<bool> {
        p.ensure_dim(self.dim)?;
        let fp = self.apply(p);
        Ok(match property {
            LocalProperty::Continuity => self.maps_nbhd_into(p, &fp),
            LocalProperty::QuasiContinuity => {
                box_points(&nbhd_box(p)).any(|w| self.maps_nbhd_into(&w, &fp))
            }
        })
    }

    /// Whether `(x, y)` lies in the closure of the graph.
    pub fn graph_closure_member(&self, x: &KPoint, y: &KPoint) -> bool {
        box_points(&nbhd_box(x)).any(|z| in_min_nbhd(&self.apply(&z), y))
    }

    /// Looks for `(x, y)` with both coordinates in `region`, in the closure of
    /// the graph but off it. Scans `y` in lexicographic order, then `x`.
    /// Finding nothing does not prove the graph closed.
    pub fn refute_closed_graph(&self, region: &[(i64, i64)]) -> Result<Option<(KPoint, KPoint)>> {
        let ranges = region_ranges(region, self.dim)?;
        for y in box_points(&ranges) {
            for x in box_points(&ranges) {
                if self.apply(&x) != y && self.graph_closure_member(&x, &y) {
                    return Ok(Some((x, y)));
                }
            }
        }
        Ok(None)
    }

    /// Decides the closed-graph property on all of `K^n`.
    ///
    /// A constant map at `c` fails exactly when `c` is not closed, with
    /// witness `(x, y)` for `y` in the closure of `c`. A non-constant map
    /// has some `x` and `z ∈ V(x)` with `f(z) ≠ f(x)`; then `(x, f(z))` is in
    /// the closure of the graph. Such a pair exists in the patch bounding
    /// box joined with `[-2,2]^n` and grown by three, because a non-constant
    /// parity rule is never constant on three consecutive integers.
    pub fn closed_graph(&self) -> Check<(KPoint, KPoint)> {
        if let Some(c) = self.is_constant() {
            if is_closed_point(&c) {
                return Check::Holds;
            }
            let y = box_points(&closure_box(&c))
                .find(|y| *y != c)
                .expect("a non-closed point has a larger closure");
            return Check::Fails((c, y));
        }
        let region = self.search_region();
        for x in box_points(&region) {
            let fx = self.apply(&x);
            if let Some(fz) = box_points(&nbhd_box(&x))
                .map(|z| self.apply(&z))
                .find(|fz| *fz != fx)
            {
                return Check::Fails((x, fz));
            }
        }
        unreachable!("non-constant rule map without a local jump in {region:?}")
    }

    fn search_region(&self) -> Vec<RangeInclusive<i64>> {
        let mut keys = Vec::new();
        self.rule.collect_patch_keys(&mut keys);
        (0..self.dim)
            .map(|i| {
                let lo = keys
                    .iter()
                    .map(|k| k.coords()[i])
                    .min()
                    .unwrap_or(0)
                    .min(-2);
                let hi = keys.iter().map(|k| k.coords()[i]).max().unwrap_or(0).max(2);
                lo - 3..=hi + 3
            })
            .collect()
    }

    /// Classifies the map: continuity and quasi-continuity are checked at
    /// every point of `window` (first failure in lexicographic order),
    /// constancy and closed graph on all of `K^n`.
    pub fn classify(&self, window: &[(i64, i64)]) -> Result<PropertyReport<KPoint>> {
        let ranges = region_ranges(window, self.dim)?;
        let first_failure = |property| -> Result<Check<KPoint>> {
            for p in box_points(&ranges) {
                if !self.check_at(property, &p)? {
                    return Ok(Check::Fails(p));
                }
            }
            Ok(Check::Holds)
        };
        let report = PropertyReport {
            constant: self.is_constant(),
            continuous: first_failure(LocalProperty::Continuity)?,
            quasi_continuous: first_failure(LocalProperty::QuasiContinuity)?,
            closed_graph: self.closed_graph(),
        };
        report.check_nesting()?;
        Ok(report)
    }
}

fn region_ranges(region: &[(i64, i64)], dim: usize) -> Result<Vec<RangeInclusive<i64>>> {
    if region.is_empty() {
        return Err(Error::EmptyBox);
    }
    if region.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: region.len(),
        });
    }
    region
        .iter()
        .map(|&(a, b)| {
            if a > b {
                return Err(Error::EmptyInterval { a, b });
            }
            for c in [a, b] {
                KPoint::new(vec![c])?;
            }
            Ok(a..=b)
        })
        .collect()
}
