//! Finite Alexandroff spaces given by their minimal-open-neighborhood system.
//!
//! A space is a list of labelled points plus, for every point `x`, the set
//! `U(x)` of point indices forming its smallest open neighborhood. Closures
//! of points are the dual sets `{y : x ∈ U(y)}` and are computed once at
//! construction; spaces are immutable afterwards.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{nbhd_range, KPoint, COORD_LIMIT};

/// Upper bound on the number of points of a constructed space.
pub const MAX_POINTS: usize = 1 << 20;

/// Label of a point. Khalimsky-derived spaces use their lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum PointLabel {
    Lattice(KPoint),
    Named(String),
    Pair(Box<PointLabel>, Box<PointLabel>),
}

impl PointLabel {
    /// Label of a point of a product space. Two lattice labels concatenate.
    pub fn pair(a: &PointLabel, b: &PointLabel) -> PointLabel {
        match (a, b) {
            (PointLabel::Lattice(p), PointLabel::Lattice(q)) => {
                let mut coords = p.coords().to_vec();
                coords.extend_from_slice(q.coords());
                PointLabel::Lattice(KPoint::from_vec(coords))
            }
            _ => PointLabel::Pair(Box::new(a.clone()), Box::new(b.clone())),
        }
    }
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointLabel::Lattice(p) => write!(f, "{p}"),
            PointLabel::Named(s) => f.write_str(s),
            PointLabel::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

/// A broken neighborhood-system axiom, with the offending point indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// `x ∉ U(x)`.
    NotInOwnNeighborhood {
        x: usize,
    },
    /// `y ∈ U(x)` but `U(y) ⊄ U(x)`.
    NotMinimal {
        x: usize,
        y: usize,
    },
    DuplicateLabel {
        first: usize,
        second: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotInOwnNeighborhood { x } => write!(f, "x ∉ U(x) at x = #{x}"),
            Violation::NotMinimal { x, y } => {
                write!(f, "y ∈ U(x) but U(y) ⊄ U(x) at (x, y) = (#{x}, #{y})")
            }
            Violation::DuplicateLabel { first, second } => {
                write!(f, "points #{first} and #{second} share a label")
            }
        }
    }
}

/// A set of point indices into one particular space.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Subset(BTreeSet<usize>);

impl Subset {
    pub fn empty() -> Self {
        Subset::default()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.0.is_subset(&other.0)
    }
}

#[derive(Debug, Clone)]
pub struct FiniteSpace {
    description: String,
    labels: Vec<PointLabel>,
    nbhd: Vec<Vec<usize>>,
    closure: Vec<Vec<usize>>,
    index: HashMap<PointLabel, usize>,
}

impl FiniteSpace {
    /// Builds a space from labels and neighborhood lists without checking the
    /// Alexandroff axioms; see [`FiniteSpace::validate`].
    pub fn new(
        description: impl Into<String>,
        labels: Vec<PointLabel>,
        mut nbhd: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let len = labels.len();
        if nbhd.len() != len {
            return Err(Error::TableNotTotal {
                expected: len,
                found: nbhd.len(),
            });
        }
        if len > MAX_POINTS {
            return Err(Error::SpaceTooLarge(len as u128));
        }
        for u in &mut nbhd {
            if let Some(&index) = u.iter().find(|&&i| i >= len) {
                return Err(Error::IndexOutOfRange { index, len });
            }
            u.sort_unstable();
            u.dedup();
        }
        let mut closure = vec![Vec::new(); len];
        for (x, u) in nbhd.iter().enumerate() {
            for &y in u {
                closure[y].push(x);
            }
        }
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Ok(FiniteSpace {
            description: description.into(),
            labels,
            nbhd,
            closure,
            index,
        })
    }

    /// Like [`FiniteSpace::new`], but rejects spaces that fail validation.
    pub fn validated(
        description: impl Into<String>,
        labels: Vec<PointLabel>,
        nbhd: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let space = Self::new(description, labels, nbhd)?;
        let violations = space.validate();
        if violations.is_empty() {
            Ok(space)
        } else {
            Err(Error::InvalidSpace(violations))
        }
    }

    /// The subspace `[a,b]` of the Khalimsky line.
    pub fn interval(a: i64, b: i64) -> Result<Self> {
        if a > b {
            return Err(Error::EmptyInterval { a, b });
        }
        for c in [a, b] {
            if c.abs() > COORD_LIMIT {
                return Err(Error::CoordinateOutOfRange(c));
            }
        }
        let len = (b as i128 - a as i128 + 1) as u128;
        if len > MAX_POINTS as u128 {
            return Err(Error::SpaceTooLarge(len));
        }
        let labels = (a..=b)
            .map(|x| PointLabel::Lattice(KPoint::from_vec(vec![x])))
            .collect();
        let nbhd = (a..=b)
            .map(|x| {
                nbhd_range(x)
                    .filter(|y| (a..=b).contains(y))
                    .map(|y| (y - a) as usize)
                    .collect()
            })
            .collect();
        Self::new(format!("interval [{a},{b}]"), labels, nbhd)
    }

    /// A finite box of `K^n` with the subspace topology, built as the
    /// iterated product of its interval factors.
    pub fn boxed(ranges: &[(i64, i64)]) -> Result<Self> {
        let (first, rest) = ranges.split_first().ok_or(Error::EmptyBox)?;
        let mut space = Self::interval(first.0, first.1)?;
        for &(a, b) in rest {
            space = space.product(&Self::interval(a, b)?)?;
        }
        space.description = format!(
            "box {}",
            ranges.iter().map(|(a, b)| format!("[{a},{b}]")).join("x")
        );
        Ok(space)
    }

    pub fn one_point() -> Self {
        Self::new("point", vec![PointLabel::Named("*".into())], vec![vec![0]])
            .expect("one-point space is well formed")
    }

    /// Product topology: `U((a,b)) = U(a) × U(b)`, points in lexicographic
    /// order of index pairs.
    pub fn product(&self, other: &FiniteSpace) -> Result<FiniteSpace> {
        let (n, m) = (self.len(), other.len());
        let total = n as u128 * m as u128;
        if total > MAX_POINTS as u128 {
            return Err(Error::SpaceTooLarge(total));
        }
        let mut labels = Vec::with_capacity(n * m);
        let mut nbhd = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                labels.push(PointLabel::pair(&self.labels[i], &other.labels[j]));
                nbhd.push(
                    self.nbhd[i]
                        .iter()
                        .flat_map(|&a| other.nbhd[j].iter().map(move |&b| a * m + b))
                        .collect(),
                );
            }
        }
        Self::new(
            format!("{} × {}", self.description, other.description),
            labels,
            nbhd,
        )
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[PointLabel] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &PointLabel {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &PointLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn index_of_point(&self, p: &KPoint) -> Option<usize> {
        self.index_of(&PointLabel::Lattice(p.clone()))
    }

    /// The lattice coordinates of `x`, for Khalimsky-derived spaces.
    pub fn embedding(&self, x: usize) -> Option<&KPoint> {
        match &self.labels[x] {
            PointLabel::Lattice(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_khalimsky(&self) -> bool {
        !self.labels.is_empty() && (0..self.len()).all(|x| self.embedding(x).is_some())
    }

    /// Dimension of the ambient `K^n`, if the space is Khalimsky-derived.
    pub fn dim(&self) -> Option<usize> {
        if self.is_khalimsky() {
            self.embedding(0).map(KPoint::dim)
        } else {
            None
        }
    }

    /// `U(x)`, sorted.
    pub fn nbhd(&self, x: usize) -> &[usize] {
        &self.nbhd[x]
    }

    /// Closure of `{x}`, sorted.
    pub fn point_closure(&self, x: usize) -> &[usize] {
        &self.closure[x]
    }

    /// Whether `y ∈ U(x)`.
    pub fn in_nbhd(&self, y: usize, x: usize) -> bool {
        self.nbhd[x].binary_search(&y).is_ok()
    }

    pub fn subset(&self, points: impl IntoIterator<Item = usize>) -> Result<Subset> {
        let len = self.len();
        points
            .into_iter()
            .map(|index| {
                if index < len {
                    Ok(index)
                } else {
                    Err(Error::IndexOutOfRange { index, len })
                }
            })
            .collect::<Result<BTreeSet<_>>>()
            .map(Subset)
    }

    pub fn whole(&self) -> Subset {
        Subset((0..self.len()).collect())
    }

    pub fn complement(&self, t: &Subset) -> Subset {
        Subset((0..self.len()).filter(|x| !t.contains(*x)).collect())
    }

    /// Every violated axiom, in index order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            if !self.in_nbhd(x, x) {
                out.push(Violation::NotInOwnNeighborhood { x });
            }
            for &y in &self.nbhd[x] {
                if !self.nbhd[y].iter().all(|&z| self.in_nbhd(z, x)) {
                    out.push(Violation::NotMinimal { x, y });
                }
            }
        }
        let mut seen: HashMap<&PointLabel, usize> = HashMap::new();
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(&first) = seen.get(l) {
                out.push(Violation::DuplicateLabel { first, second: i });
            } else {
                seen.insert(l, i);
            }
        }
        out
    }

    /// `{y : U(y) ∩ t ≠ ∅}`.
    pub fn closure_of(&self, t: &Subset) -> Subset {
        Subset(
            (0..self.len())
                .filter(|&y| self.nbhd[y].iter().any(|&z| t.contains(z)))
                .collect(),
        )
    }

    pub fn is_open(&self, t: &Subset) -> bool {
        t.iter()
            .all(|x| self.nbhd[x].iter().all(|&z| t.contains(z)))
    }

    pub fn is_closed(&self, t: &Subset) -> bool {
        self.closure_of(t) == *t
    }

    pub fn closed_points(&self) -> Subset {
        Subset(
            (0..self.len())
                .filter(|&x| self.closure[x] == [x])
                .collect(),
        )
    }
}
