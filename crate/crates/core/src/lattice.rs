//! Points of the Khalimsky line and of `K^n`, with their smallest open
//! neighborhoods and point closures in closed form.
//!
//! On the line, odd integers are open points (`V(x) = {x}`) and even integers
//! are closed points (`V(x) = {x-1, x, x+1}`). In `K^n` both neighborhoods
//! and closures are products of the one-dimensional ones, so everything here
//! is a box of small integer ranges.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::RangeInclusive;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest accepted absolute coordinate.
///
/// Neighborhood and chain arithmetic moves at most two steps past an input
/// coordinate, so every intermediate value stays far from `i64` overflow.
pub const COORD_LIMIT: i64 = 1 << 62;

/// A point of `K^n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct KPoint(Vec<i64>);

impl KPoint {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(&c) = coords.iter().find(|c| c.abs() > COORD_LIMIT) {
            return Err(Error::CoordinateOutOfRange(c));
        }
        Ok(KPoint(coords))
    }

    /// Builds a point from values produced internally (neighbors of checked
    /// points, rule images), which may sit just past the input limit.
    pub(crate) fn from_vec(coords: Vec<i64>) -> Self {
        debug_assert!(!coords.is_empty());
        KPoint(coords)
    }

    /// The origin of `K^n`.
    pub fn origin(dim: usize) -> Result<Self> {
        Self::new(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    pub fn even_coords(&self) -> usize {
        self.0.iter().filter(|c| is_even(**c)).count()
    }

    pub fn is_closed_point(&self) -> bool {
        is_closed_point(self)
    }

    pub(crate) fn ensure_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            })
        }
    }
}

impl fmt::Display for KPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [c] = self.0.as_slice() {
            return write!(f, "{c}");
        }
        write!(f, "({})", self.0.iter().join(", "))
    }
}

/// A finite, dimension-homogeneous set of lattice points, ordered
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: BTreeSet<KPoint>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        PointSet {
            dim,
            points: BTreeSet::new(),
        }
    }

    pub fn from_points(dim: usize, points: impl IntoIterator<Item = KPoint>) -> Result<Self> {
        let mut set = PointSet::new(dim);
        for p in points {
            set.insert(p)?;
        }
        Ok(set)
    }

    /// Collects a box of coordinate ranges as a set.
    pub fn from_box(ranges: &[RangeInclusive<i64>]) -> Self {
        PointSet {
            dim: ranges.len(),
            points: box_points(ranges).collect(),
        }
    }

    pub fn insert(&mut self, p: KPoint) -> Result<bool> {
        p.ensure_dim(self.dim)?;
        Ok(self.points.insert(p))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &KPoint) -> bool {
        self.points.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &KPoint> + '_ {
        self.points.iter()
    }

    pub fn first(&self) -> Option<&KPoint> {
        self.points.first()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.points.is_subset(&other.points)
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet {
            dim: self.dim,
            points: self.points.intersection(&other.points).cloned().collect(),
        }
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        self.points.iter().any(|p| other.contains(p))
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.points.iter().join(", "))
    }
}

fn is_even(x: i64) -> bool {
    x.rem_euclid(2) == 0
}

/// Smallest open neighborhood of `x` on the line, as a range.
pub fn nbhd_range(x: i64) -> RangeInclusive<i64> {
    if is_even(x) {
        x - 1..=x + 1
    } else {
        x..=x
    }
}

/// Closure of `{x}` on the line, as a range.
pub fn closure_range(x: i64) -> RangeInclusive<i64> {
    if is_even(x) {
        x..=x
    } else {
        x - 1..=x + 1
    }
}

pub fn min_nbhd_1d(x: i64) -> PointSet {
    PointSet::from_box(&[nbhd_range(x)])
}

pub fn closure_1d(x: i64) -> PointSet {
    PointSet::from_box(&[closure_range(x)])
}

/// `V(p)` as a box: the product of the line neighborhoods of the coordinates.
pub fn nbhd_box(p: &KPoint) -> Vec<RangeInclusive<i64>> {
    p.coords().iter().map(|&c| nbhd_range(c)).collect()
}

pub fn closure_box(p: &KPoint) -> Vec<RangeInclusive<i64>> {
    p.coords().iter().map(|&c| closure_range(c)).collect()
}

pub fn min_nbhd(p: &KPoint) -> PointSet {
    PointSet::from_box(&nbhd_box(p))
}

pub fn point_closure(p: &KPoint) -> PointSet {
    PointSet::from_box(&closure_box(p))
}

/// Whether `q ∈ V(p)`, without materializing the neighborhood.
///
/// Dimensions are assumed equal.
pub fn in_min_nbhd(q: &KPoint, p: &KPoint) -> bool {
    q.coords()
        .iter()
        .zip(p.coords())
        .all(|(&qc, &pc)| nbhd_range(pc).contains(&qc))
}

pub fn is_closed_point(p: &KPoint) -> bool {
    p.coords().iter().all(|&c| is_even(c))
}

/// Iterates the lattice points of a box in lexicographic order.
pub fn box_points(ranges: &[RangeInclusive<i64>]) -> impl Iterator<Item = KPoint> + '_ {
    ranges
        .iter()
        .cloned()
        .multi_cartesian_product()
        .map(KPoint::from_vec)
}

/// The even neighbor used to enter the lattice of closed points; odd points
/// step down.
fn anchor(x: i64) -> i64 {
    if is_even(x) {
        x
    } else {
        x - 1
    }
}

fn chain_1d(x: i64, y: i64) -> Vec<i64> {
    if x == y {
        return vec![x];
    }
    let (start, end) = (anchor(x), anchor(y));
    let mut out = vec![x];
    if start != x {
        out.push(start);
    }
    let step = if start <= end { 2 } else { -2 };
    let mut c = start;
    while c != end {
        c += step;
        out.push(c);
    }
    if y != end {
        out.push(y);
    }
    out
}

/// A finite sequence from `x` to `y` in which consecutive points have
/// intersecting smallest neighborhoods.
///
/// Walks the first coordinate through even values with the others held
/// fixed, then the second, and so on. Not necessarily shortest.
pub fn chain(x: &KPoint, y: &KPoint) -> Result<Vec<KPoint>> {
    y.ensure_dim(x.dim())?;
    let mut current = x.coords().to_vec();
    let mut out = vec![x.clone()];
    for i in 0..x.dim() {
        for c in chain_1d(current[i], y.coords()[i]).into_iter().skip(1) {
            current[i] = c;
            out.push(KPoint::from_vec(current.clone()));
        }
    }
    Ok(out)
}

/// The lexicographically smallest point of `V(a) ∩ V(b)`, if any.
pub fn overlap_point(a: &KPoint, b: &KPoint) -> Option<KPoint> {
    if a.dim() != b.dim() {
        return None;
    }
    let mut coords = Vec::with_capacity(a.dim());
    for (&ac, &bc) in a.coords().iter().zip(b.coords()) {
        let (ra, rb) = (nbhd_range(ac), nbhd_range(bc));
        let lo = *ra.start().max(rb.start());
        let hi = *ra.end().min(rb.end());
        if lo > hi {
            return None;
        }
        coords.push(lo);
    }
    Some(KPoint::from_vec(coords))
}

/// Checks the chain contract: nonempty, consecutive neighborhoods meet.
pub fn is_valid_chain(points: &[KPoint]) -> bool {
    !points.is_empty()
        && points
            .windows(2)
            .all(|w| min_nbhd(&w[0]).intersects(&min_nbhd(&w[1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> KPoint {
        KPoint::new(c.to_vec()).unwrap()
    }

    fn line(xs: &[i64]) -> PointSet {
        PointSet::from_points(1, xs.iter().map(|&x| p(&[x]))).unwrap()
    }

    fn set(pts: &[&[i64]]) -> PointSet {
        PointSet::from_points(pts[0].len(), pts.iter().map(|c| p(c))).unwrap()
    }

    // Brute-force duality: closure of {x} is every y whose neighborhood holds x.
    fn closure_by_duality(x: i64) -> PointSet {
        line(
            &(x - 5..=x + 5)
                .filter(|&y| min_nbhd_1d(y).contains(&p(&[x])))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn line_neighborhoods() {
        assert_eq!(min_nbhd_1d(3), line(&[3]));
        assert_eq!(min_nbhd_1d(0), line(&[-1, 0, 1]));
        assert_eq!(min_nbhd_1d(-2), line(&[-3, -2, -1]));
    }

    #[test]
    fn line_closures_match_duality_oracle() {
        assert_eq!(closure_1d(0), line(&[0]));
        assert_eq!(closure_by_duality(1), line(&[0, 1, 2]));
        assert_eq!(closure_1d(1), closure_by_duality(1));
        assert_eq!(closure_by_duality(-3), line(&[-4, -3, -2]));
        assert_eq!(closure_1d(-3), closure_by_duality(-3));
        for x in -20..=20 {
            assert_eq!(closure_1d(x), closure_by_duality(x), "x = {x}");
        }
    }

    #[test]
    fn product_neighborhoods() {
        assert_eq!(min_nbhd(&p(&[1, 3])), set(&[&[1, 3]]));
        assert_eq!(min_nbhd(&p(&[0, 1])), set(&[&[-1, 1], &[0, 1], &[1, 1]]));
        let block = min_nbhd(&p(&[0, 0]));
        assert_eq!(block.len(), 9);
        assert_eq!(block, PointSet::from_box(&[-1..=1, -1..=1]));
    }

    #[test]
    fn product_closures() {
        assert_eq!(point_closure(&p(&[0, 2])), set(&[&[0, 2]]));
        assert_eq!(
            point_closure(&p(&[1, 1])),
            PointSet::from_box(&[0..=2, 0..=2])
        );
        assert_eq!(
            point_closure(&p(&[1, 0])),
            PointSet::from_box(&[0..=2, 0..=0])
        );
    }

    #[test]
    fn closed_points() {
        assert!(is_closed_point(&p(&[2, -4])));
        assert!(!is_closed_point(&p(&[2, 3])));
        assert!(is_closed_point(&p(&[0])));
        assert!(!p(&[-1]).is_closed_point());
    }

    #[test]
    fn coordinate_limits() {
        assert_eq!(KPoint::new(vec![]), Err(Error::ZeroDimension));
        assert!(KPoint::new(vec![COORD_LIMIT, -COORD_LIMIT]).is_ok());
        assert_eq!(
            KPoint::new(vec![0, COORD_LIMIT + 1]),
            Err(Error::CoordinateOutOfRange(COORD_LIMIT + 1))
        );
        // the extreme even point still has a representable neighborhood
        assert_eq!(min_nbhd(&p(&[COORD_LIMIT])).len(), 3);
    }

    #[test]
    fn chain_examples() {
        let c = chain(&p(&[5]), &p(&[5])).unwrap();
        assert_eq!(c, vec![p(&[5])]);

        let c = chain(&p(&[0]), &p(&[4])).unwrap();
        assert_eq!(c, vec![p(&[0]), p(&[2]), p(&[4])]);
        assert_eq!(overlap_point(&c[0], &c[1]), Some(p(&[1])));
        assert_eq!(overlap_point(&c[1], &c[2]), Some(p(&[3])));

        let c = chain(&p(&[1]), &p(&[5])).unwrap();
        assert_eq!(c, vec![p(&[1]), p(&[0]), p(&[2]), p(&[4]), p(&[5])]);
        assert!(is_valid_chain(&c));
    }

    #[test]
    fn chain_walks_coordinates_in_order() {
        let c = chain(&p(&[1, 0]), &p(&[3, 2])).unwrap();
        assert_eq!(
            c,
            vec![p(&[1, 0]), p(&[0, 0]), p(&[2, 0]), p(&[3, 0]), p(&[3, 2])]
        );
        assert!(is_valid_chain(&c));
    }

    #[test]
    fn chain_descending_and_negative() {
        let c = chain(&p(&[7, -3]), &p(&[-4, 5])).unwrap();
        assert_eq!(c.first(), Some(&p(&[7, -3])));
        assert_eq!(c.last(), Some(&p(&[-4, 5])));
        assert!(is_valid_chain(&c));
    }

    #[test]
    fn chain_dimension_mismatch() {
        assert_eq!(
            chain(&p(&[0]), &p(&[0, 1])),
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn overlap_of_two_open_points_is_empty() {
        assert_eq!(overlap_point(&p(&[1]), &p(&[3])), None);
        assert!(!is_valid_chain(&[p(&[1]), p(&[3])]));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[4]).to_string(), "4");
        assert_eq!(p(&[1, -2]).to_string(), "(1, -2)");
        assert_eq!(line(&[0, 1]).to_string(), "{0, 1}");
    }
}
