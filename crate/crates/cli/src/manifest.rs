//! JSON manifests describing a space and, optionally, a map on it.
//!
//! ```json
//! { "space": { "interval": [0, 4] },
//!   "map": { "table": [[0, 2], [1, 2], [2, 2], [3, 2], [4, 2]] } }
//! ```
//!
//! Labels are integers (points of an interval), integer arrays (points of a
//! box), strings (points of an explicit space) or arrays mixing those (points
//! of a product with explicit factors). In a compactified space the string
//! `"inf"` denotes the point at infinity.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use khalimsky::{
    Arm, Error as CoreError, EventuallyConstantMap, ExtPoint, FiniteSpace, KPoint, ParityRule,
    PointLabel, Rule, RuleMap,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const INFINITY: &str = "inf";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub space: SpaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Interval([i64; 2]),
    Box(Vec<[i64; 2]>),
    Product(Vec<SpaceSpec>),
    Explicit {
        points: Vec<Label>,
        neighborhoods: Vec<Vec<Label>>,
    },
    /// `A(K^n)` with a map that is given on `box` by the manifest table and
    /// equals `tail` elsewhere; `infinity` is the value at `∞`.
    Compactified {
        n: usize,
        #[serde(rename = "box")]
        bbox: Vec<[i64; 2]>,
        tail: Label,
        infinity: Label,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Coords(Vec<i64>),
    Name(String),
    Tuple(Vec<Label>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Table(Vec<(Label, Label)>),
    Rule(RuleSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coords {
    One(i64),
    Many(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleSpec {
    Identity,
    ExampleD,
    ExampleE,
    Constant(Coords),
    Parity {
        even: ArmSpec,
        odd: ArmSpec,
    },
    Patched {
        table: Vec<(Coords, Coords)>,
        default: Box<RuleSpec>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmSpec {
    Shift(i64),
    Constant(i64),
}

impl Manifest {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|source| CliError::Parse {
            path: origin.to_string(),
            line: source.line(),
            column: source.column(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifests always serialize")
    }
}

impl Label {
    pub fn to_point_label(&self) -> Result<PointLabel, CliError> {
        Ok(match self {
            Label::Int(x) => PointLabel::Lattice(KPoint::new(vec![*x])?),
            Label::Coords(c) => PointLabel::Lattice(KPoint::new(c.clone())?),
            Label::Name(s) => PointLabel::Named(s.clone()),
            Label::Tuple(items) => {
                let mut labels = items.iter().map(Label::to_point_label);
                let first = labels
                    .next()
                    .ok_or_else(|| CliError::Manifest("empty label tuple".into()))??;
                labels.try_fold(first, |acc, l| {
                    Ok::<_, CliError>(PointLabel::pair(&acc, &l?))
                })?
            }
        })
    }

    pub fn from_point_label(label: &PointLabel) -> Label {
        match label {
            PointLabel::Lattice(p) => Label::from_point(p),
            PointLabel::Named(s) => Label::Name(s.clone()),
            PointLabel::Pair(a, b) => {
                let mut items = match Label::from_point_label(a) {
                    Label::Tuple(items) if matches!(**a, PointLabel::Pair(..)) => items,
                    other => vec![other],
                };
                items.push(Label::from_point_label(b));
                Label::Tuple(items)
            }
        }
    }

    pub fn from_point(p: &KPoint) -> Label {
        match p.coords() {
            [x] => Label::Int(*x),
            c => Label::Coords(c.to_vec()),
        }
    }

    pub fn from_ext(p: &ExtPoint) -> Label {
        match p {
            ExtPoint::Lattice(q) => Label::from_point(q),
            ExtPoint::Infinity => Label::Name(INFINITY.into()),
        }
    }

    fn to_ext(&self, dim: usize) -> Result<ExtPoint, CliError> {
        let point = match self {
            Label::Name(s) if s == INFINITY => return Ok(ExtPoint::Infinity),
            Label::Int(x) => KPoint::new(vec![*x])?,
            Label::Coords(c) => KPoint::new(c.clone())?,
            other => {
                return Err(CliError::Manifest(format!(
                    "expected a lattice point or \"{INFINITY}\", found {}",
                    serde_json::to_string(other).expect("labels serialize")
                )))
            }
        };
        if point.dim() != dim {
            return Err(CoreError::DimensionMismatch {
                expected: dim,
                found: point.dim(),
            }
            .into());
        }
        Ok(point.into())
    }
}

impl Coords {
    fn to_point(&self) -> Result<KPoint, CliError> {
        Ok(match self {
            Coords::One(x) => KPoint::new(vec![*x])?,
            Coords::Many(c) => KPoint::new(c.clone())?,
        })
    }
}

impl From<ArmSpec> for Arm {
    fn from(a: ArmSpec) -> Arm {
        match a {
            ArmSpec::Shift(k) => Arm::Shift(k),
            ArmSpec::Constant(v) => Arm::Const(v),
        }
    }
}

impl RuleSpec {
    pub fn to_rule(&self) -> Result<Rule, CliError> {
        Ok(match self {
            RuleSpec::Identity => Rule::Identity,
            RuleSpec::ExampleD => Rule::Coordinatewise(ParityRule::EXAMPLE_D),
            RuleSpec::ExampleE => Rule::Coordinatewise(ParityRule::EXAMPLE_E),
            RuleSpec::Constant(c) => Rule::Constant(c.to_point()?),
            RuleSpec::Parity { even, odd } => Rule::Coordinatewise(ParityRule {
                even: (*even).into(),
                odd: (*odd).into(),
            }),
            RuleSpec::Patched { table, default } => {
                let mut entries = BTreeMap::new();
                for (x, y) in table {
                    let x = x.to_point()?;
                    if entries.insert(x.clone(), y.to_point()?).is_some() {
                        return Err(CliError::Manifest(format!("rule patch lists {x} twice")));
                    }
                }
                Rule::Patched {
                    table: entries,
                    default: Box::new(default.to_rule()?),
                }
            }
        })
    }
}

/// A space built from a manifest.
#[derive(Debug, Clone)]
pub enum Space {
    /// A finite space; `window` is set when it is a box of `K^n`.
    Finite {
        space: FiniteSpace,
        window: Option<Vec<(i64, i64)>>,
    },
    Compactified {
        dim: usize,
        bbox: Vec<(i64, i64)>,
        tail: ExtPoint,
        at_infinity: ExtPoint,
    },
}

/// A map built from a manifest, together with its domain.
#[derive(Debug, Clone)]
pub enum Subject {
    Table {
        space: FiniteSpace,
        table: Vec<usize>,
    },
    Rule {
        window: Vec<(i64, i64)>,
        map: RuleMap,
    },
    Compactified(EventuallyConstantMap),
}

fn ranges(pairs: &[[i64; 2]]) -> Vec<(i64, i64)> {
    pairs.iter().map(|&[a, b]| (a, b)).collect()
}

impl SpaceSpec {
    pub fn build(&self) -> Result<Space, CliError> {
        match self {
            SpaceSpec::Interval([a, b]) => Ok(Space::Finite {
                space: FiniteSpace::interval(*a, *b)?,
                window: Some(vec![(*a, *b)]),
            }),
            SpaceSpec::Box(pairs) => {
                let window = ranges(pairs);
                Ok(Space::Finite {
                    space: FiniteSpace::boxed(&window)?,
                    window: Some(window),
                })
            }
            SpaceSpec::Product(factors) => {
                let mut built = factors.iter().map(|f| match f.build()? {
                    Space::Finite { space, window } => Ok((space, window)),
                    Space::Compactified { .. } => Err(CliError::Manifest(
                        "products of compactified spaces are not supported".into(),
                    )),
                });
                let (mut space, mut window) = built.next().ok_or_else(|| {
                    CliError::Manifest("product needs at least one factor".into())
                })??;
                for factor in built {
                    let (s, w) = factor?;
                    space = space.product(&s)?;
                    window = window.zip(w).map(|(mut a, b)| {
                        a.extend(b);
                        a
                    });
                }
                Ok(Space::Finite { space, window })
            }
            SpaceSpec::Explicit {
                points,
                neighborhoods,
            } => build_explicit(points, neighborhoods),
            SpaceSpec::Compactified {
                n,
                bbox,
                tail,
                infinity,
            } => {
                if bbox.len() != *n {
                    return Err(CoreError::DimensionMismatch {
                        expected: *n,
                        found: bbox.len(),
                    }
                    .into());
                }
                Ok(Space::Compactified {
                    dim: *n,
                    bbox: ranges(bbox),
                    tail: tail.to_ext(*n)?,
                    at_infinity: infinity.to_ext(*n)?,
                })
            }
        }
    }
}

fn build_explicit(points: &[Label], neighborhoods: &[Vec<Label>]) -> Result<Space, CliError> {
    let labels = points
        .iter()
        .map(Label::to_point_label)
        .collect::<Result<Vec<_>, _>>()?;
    let mut index = std::collections::HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        if let Some(first) = index.insert(l.clone(), i) {
            return Err(CliError::InvalidSpace(format!(
                "points #{first} and #{i} share the label {l}"
            )));
        }
    }
    if neighborhoods.len() != labels.len() {
        return Err(CliError::InvalidSpace(format!(
            "{} points but {} neighborhoods",
            labels.len(),
            neighborhoods.len()
        )));
    }
    let nbhd = neighborhoods
        .iter()
        .map(|u| {
            u.iter()
                .map(|l| {
                    let l = l.to_point_label()?;
                    index.get(&l).copied().ok_or_else(|| {
                        CliError::InvalidSpace(format!("neighborhood mentions unknown point {l}"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let description = format!("explicit space ({} points)", labels.len());
    Ok(Space::Finite {
        space: FiniteSpace::validated(description, labels, nbhd)?,
        window: None,
    })
}

impl Manifest {
    pub fn build_space(&self) -> Result<Space, CliError> {
        self.space.build()
    }

    /// Builds the map the manifest describes. Compactified spaces default to
    /// the tail value on the whole box when no map is given.
    pub fn build_subject(&self) -> Result<Subject, CliError> {
        match (self.build_space()?, &self.map) {
            (Space::Finite { space, .. }, Some(MapSpec::Table(pairs))) => {
                let table = finite_table(&space, pairs)?;
                Ok(Subject::Table { space, table })
            }
            (Space::Finite { window, .. }, Some(MapSpec::Rule(spec))) => {
                let window = window.ok_or_else(|| {
                    CliError::Manifest("rule maps need an interval or box window".into())
                })?;
                let map = RuleMap::new(window.len(), spec.to_rule()?)?;
                Ok(Subject::Rule { window, map })
            }
            (Space::Finite { .. }, None) => Err(CliError::Manifest(
                "manifest has no \"map\" to classify".into(),
            )),
            (
                Space::Compactified {
                    dim,
                    bbox,
                    tail,
                    at_infinity,
                },
                map,
            ) => {
                let pairs: &[(Label, Label)] = match map {
                    None => &[],
                    Some(MapSpec::Table(pairs)) => pairs,
                    Some(MapSpec::Rule(_)) => {
                        return Err(CliError::Manifest(
                            "compactified spaces take a table map".into(),
                        ))
                    }
                };
                let f = compact_map(dim, bbox, tail, at_infinity, pairs)?;
                Ok(Subject::Compactified(f))
            }
        }
    }
}

fn finite_table(space: &FiniteSpace, pairs: &[(Label, Label)]) -> Result<Vec<usize>, CliError> {
    let lookup = |l: &Label| -> Result<usize, CliError> {
        let label = l.to_point_label()?;
        space
            .index_of(&label)
            .ok_or_else(|| CliError::Manifest(format!("{label} is not a point of the space")))
    };
    let mut table = vec![None; space.len()];
    for (x, y) in pairs {
        let (x, y) = (lookup(x)?, lookup(y)?);
        if table[x].replace(y).is_some() {
            return Err(CliError::Manifest(format!(
                "map table lists {} twice",
                space.label(x)
            )));
        }
    }
    table
        .iter()
        .enumerate()
        .map(|(x, v)| {
            v.ok_or_else(|| {
                CliError::Manifest(format!("map table has no value for {}", space.label(x)))
            })
        })
        .collect()
}

fn compact_map(
    dim: usize,
    bbox: Vec<(i64, i64)>,
    tail: ExtPoint,
    at_infinity: ExtPoint,
    pairs: &[(Label, Label)],
) -> Result<EventuallyConstantMap, CliError> {
    let window = FiniteSpace::boxed(&bbox)?;
    let mut table = vec![tail.clone(); window.len()];
    let mut seen = HashSet::new();
    for (x, y) in pairs {
        let label = x.to_point_label()?;
        let i = window
            .index_of(&label)
            .ok_or_else(|| CliError::Manifest(format!("{label} is not a point of the box")))?;
        if !seen.insert(i) {
            return Err(CliError::Manifest(format!("map table lists {label} twice")));
        }
        table[i] = y.to_ext(dim)?;
    }
    Ok(EventuallyConstantMap::new(bbox, table, tail, at_infinity)?)
}
