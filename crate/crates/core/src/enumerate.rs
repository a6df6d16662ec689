//! Exhaustive and sampled censuses of the self-maps of a finite space, and
//! brute-force checks of the closed-graph characterization.
//!
//! Tables are numbered in lexicographic order (the first point is the most
//! significant digit). Exhaustive runs split that numbering into fixed
//! chunks and merge per-chunk tallies, so results do not depend on how many
//! worker threads rayon uses.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{Check, SpaceMap, Tier};
use crate::error::{Error, Result};
use crate::lattice::{chain, is_valid_chain};
use crate::space::{FiniteSpace, PointLabel};

pub const DEFAULT_LIMIT: u64 = 10_000_000;

const CHUNK: u64 = 1024;

/// Number of self-maps `|X|^|X|`, or `None` if it overflows `u64`.
pub fn self_map_count(space: &FiniteSpace) -> Option<u64> {
    let n = space.len() as u64;
    let exp = u32::try_from(space.len()).ok()?;
    n.checked_pow(exp)
}

fn budget(space: &FiniteSpace, limit: u64) -> Result<u64> {
    match self_map_count(space) {
        Some(total) if total <= limit => Ok(total),
        other => Err(Error::BudgetExceeded {
            required: other.map_or_else(
                || format!("{}^{}", space.len(), space.len()),
                |t| t.to_string(),
            ),
            limit,
        }),
    }
}

fn decode(mut index: u64, base: usize, table: &mut [usize]) {
    for slot in table.iter_mut().rev() {
        *slot = (index % base as u64) as usize;
        index /= base as u64;
    }
}

/// A failure witness rendered with point labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Point(PointLabel),
    Pair(PointLabel, PointLabel),
}

/// The first map found in one ring of the diagram, with the witness that
/// keeps it out of the next inner ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exemplar {
    pub tier: Tier,
    pub table: Vec<PointLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CensusMode {
    Exhaustive,
    Sampled {
        trials: u64,
        seed: u64,
        injected: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub space: String,
    pub points: Vec<PointLabel>,
    pub mode: CensusMode,
    pub all: u64,
    pub quasi_continuous: u64,
    pub continuous: u64,
    pub constant: u64,
    pub closed_graph: u64,
    pub closed_graph_maps: Vec<Vec<PointLabel>>,
    pub exemplars: Vec<Exemplar>,
}

impl Census {
    /// `(class, count)` rows from the outermost ring inwards.
    pub fn rows(&self) -> [(&'static str, u64); 5] {
        [
            ("all", self.all),
            ("quasi_continuous", self.quasi_continuous),
            ("continuous", self.continuous),
            ("constant", self.constant),
            ("closed_graph", self.closed_graph),
        ]
    }

    pub fn is_nested(&self) -> bool {
        self.rows().windows(2).all(|w| w[0].1 >= w[1].1)
    }
}

/// Per-chunk accumulator. Maps are keyed by their position in the run so
/// merging keeps the earliest exemplars.
#[derive(Default)]
struct Tally {
    counts: [u64; 5],
    closed: Vec<(u64, Vec<usize>)>,
    exemplars: [Option<ExemplarSlot>; 5],
}

type ExemplarSlot = (u64, Vec<usize>, Option<RawWitness>);

#[derive(Clone)]
enum RawWitness {
    Point(usize),
    Pair(usize, usize),
}

impl Tally {
    fn record(&mut self, position: u64, f: &SpaceMap<'_>) -> Result<()> {
        let report = f.classify()?;
        let tier = report.tier();
        for (slot, t) in Tier::ALL.iter().enumerate() {
            if *t >= tier {
                self.counts[slot] += 1;
            }
        }
        if tier == Tier::ClosedGraph {
            self.closed.push((position, f.table().to_vec()));
        }
        let slot = Tier::ALL.iter().position(|t| *t == tier).unwrap();
        if self.exemplars[slot].is_none() {
            let witness = match tier {
                Tier::ClosedGraph => None,
                Tier::Constant => report
                    .closed_graph
                    .witness()
                    .map(|&(x, y)| RawWitness::Pair(x, y)),
                Tier::Continuous => None,
                Tier::QuasiContinuous => report.continuous.witness().map(|&x| RawWitness::Point(x)),
                Tier::Arbitrary => report
                    .quasi_continuous
                    .witness()
                    .map(|&x| RawWitness::Point(x)),
            };
            self.exemplars[slot] = Some((position, f.table().to_vec(), witness));
        }
        Ok(())
    }

    fn merge(mut self, other: Tally) -> Tally {
        for i in 0..5 {
            self.counts[i] += other.counts[i];
        }
        self.closed.extend(other.closed);
        for (mine, theirs) in self.exemplars.iter_mut().zip(other.exemplars) {
            let take = match (&*mine, &theirs) {
                (None, Some(_)) => true,
                (Some((a, ..)), Some((b, ..))) => b < a,
                _ => false,
            };
            if take {
                *mine = theirs;
            }
        }
        self
    }

    fn into_census(mut self, space: &FiniteSpace, mode: CensusMode) -> Census {
        let labels = |table: &[usize]| table.iter().map(|&v| space.label(v).clone()).collect();
        self.closed.sort_by_key(|(pos, _)| *pos);
        let mut seen = BTreeSet::new();
        let closed_graph_maps = self
            .closed
            .iter()
            .filter(|(_, t)| seen.insert(t.clone()))
            .map(|(_, t)| labels(t))
            .collect();
        let exemplars = Tier::ALL
            .iter()
            .zip(self.exemplars)
            .filter_map(|(&tier, ex)| {
                ex.map(|(_, table, witness)| Exemplar {
                    tier,
                    table: labels(&table),
                    witness: witness.map(|w| match w {
                        RawWitness::Point(x) => Witness::Point(space.label(x).clone()),
                        RawWitness::Pair(x, y) => {
                            Witness::Pair(space.label(x).clone(), space.label(y).clone())
                        }
                    }),
                })
            })
            .collect();
        let [closed_graph, constant, continuous, quasi_continuous, all] = self.counts;
        Census {
            space: space.description().to_string(),
            points: space.labels().to_vec(),
            mode,
            all,
            quasi_continuous,
            continuous,
            constant,
            closed_graph,
            closed_graph_maps,
            exemplars,
        }
    }
}

fn tally_range(space: &FiniteSpace, range: std::ops::Range<u64>) -> Result<Tally> {
    let mut tally = Tally::default();
    let mut table = vec![0; space.len()];
    for index in range {
        decode(index, space.len(), &mut table);
        let f = SpaceMap::self_map(space, table.clone())?;
        tally.record(index, &f)?;
    }
    Ok(tally)
}

fn chunks(total: u64) -> impl IndexedParallelIterator<Item = std::ops::Range<u64>> {
    let count = usize::try_from(total.div_ceil(CHUNK)).expect("chunk count fits in usize");
    (0..count).into_par_iter().map(move |c| {
        let c = c as u64;
        c * CHUNK..((c + 1) * CHUNK).min(total)
    })
}

/// Classifies every self-map of `space`.
pub fn enumerate_census(space: &FiniteSpace, limit: u64) -> Result<Census> {
    let total = budget(space, limit)?;
    let tally = chunks(total)
        .map(|r| tally_range(space, r))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(tally.into_census(space, CensusMode::Exhaustive))
}

/// Classifies `trials` uniformly random self-maps plus every constant map.
///
/// Constants come first (positions `0..|X|`), random tables follow. Trial
/// chunk `k` draws from ChaCha stream `k` of `seed`, so the census depends
/// only on `(space, trials, seed)`.
pub fn sample_census(space: &FiniteSpace, trials: u64, seed: u64) -> Result<Census> {
    let n = space.len();
    let mut tally = Tally::default();
    for c in 0..n {
        tally.record(c as u64, &SpaceMap::constant(space, space, c)?)?;
    }
    let offset = n as u64;
    let sampled = chunks(trials)
        .enumerate()
        .map(|(k, range)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut t = Tally::default();
            for i in range {
                let table = (0..n).map(|_| rng.gen_range(0..n)).collect();
                t.record(offset + i, &SpaceMap::self_map(space, table)?)?;
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let mode = CensusMode::Sampled {
        trials,
        seed,
        injected: offset,
    };
    Ok(tally.merge(sampled).into_census(space, mode))
}

/// Which statement a theorem check speaks to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    /// A Khalimsky interval with at least two points.
    Interval,
    /// A single point: every self-map is constant at a closed point.
    Singleton,
    /// A box of dimension ≥ 2; the prediction is a conjecture extension.
    BoxExtension,
}

impl Coverage {
    pub fn label(self) -> &'static str {
        match self {
            Coverage::Interval => "interval",
            Coverage::Singleton => "singleton",
            Coverage::BoxExtension => "conjecture extension",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "table")]
pub enum Counterexample {
    /// Has closed graph but is not a constant map at a closed point.
    UnpredictedClosedGraph(Vec<PointLabel>),
    /// Constant at a closed point but the graph is not closed.
    MissingClosedGraph(Vec<PointLabel>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremCheck {
    pub space: String,
    pub coverage: Coverage,
    pub maps_checked: u64,
    pub closed_graph_maps: Vec<Vec<PointLabel>>,
    pub counterexample: Option<Counterexample>,
}

impl TheoremCheck {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn coverage(space: &FiniteSpace) -> Result<Coverage> {
    match space.dim() {
        None => Err(Error::NotKhalimsky),
        Some(_) if space.len() == 1 => Ok(Coverage::Singleton),
        Some(1) => Ok(Coverage::Interval),
        Some(_) => Ok(Coverage::BoxExtension),
    }
}

/// The closed-graph self-maps predicted by the characterization: constants
/// at closed points, as tables.
pub fn predicted_closed_graph_maps(space: &FiniteSpace) -> Vec<Vec<usize>> {
    space
        .closed_points()
        .iter()
        .map(|c| vec![c; space.len()])
        .collect()
}

/// Compares the closed-graph self-maps of a Khalimsky interval or box with
/// the constants at its closed points.
pub fn verify_main_theorem(space: &FiniteSpace, limit: u64) -> Result<TheoremCheck> {
    let coverage = coverage(space)?;
    let total = budget(space, limit)?;
    let predicted: BTreeSet<Vec<usize>> = predicted_closed_graph_maps(space).into_iter().collect();

    let mut found: Vec<(u64, Vec<usize>)> = chunks(total)
        .map(|range| -> Result<Vec<(u64, Vec<usize>)>> {
            let mut table = vec![0; space.len()];
            let mut hits = Vec::new();
            for index in range {
                decode(index, space.len(), &mut table);
                let f = SpaceMap::self_map(space, table.clone())?;
                if f.has_closed_graph().holds() {
                    hits.push((index, table.clone()));
                }
            }
            Ok(hits)
        })
        .try_reduce(Vec::new, |mut a, b| {
            a.extend(b);
            Ok(a)
        })?;
    found.sort_by_key(|(i, _)| *i);

    let labels = |t: &[usize]| {
        t.iter()
            .map(|&v| space.label(v).clone())
            .collect::<Vec<_>>()
    };
    let found_set: BTreeSet<Vec<usize>> = found.iter().map(|(_, t)| t.clone()).collect();
    let counterexample = found
        .iter()
        .find(|(_, t)| !predicted.contains(t))
        .map(|(_, t)| Counterexample::UnpredictedClosedGraph(labels(t)))
        .or_else(|| {
            predicted
                .iter()
                .find(|t| !found_set.contains(*t))
                .map(|t| Counterexample::MissingClosedGraph(labels(t)))
        });
    Ok(TheoremCheck {
        space: space.description().to_string(),
        coverage,
        maps_checked: total,
        closed_graph_maps: found.iter().map(|(_, t)| labels(t)).collect(),
        counterexample,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LemmaFailure {
    InvalidChain {
        from: PointLabel,
        to: PointLabel,
    },
    NotConstantNearby {
        table: Vec<PointLabel>,
        at: PointLabel,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub pairs_checked: u64,
    pub closed_graph_maps_checked: u64,
    pub failures: Vec<LemmaFailure>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Chains between all pairs of points, and constancy of every closed-graph
/// self-map on each `U(x)` and each point closure.
pub fn lemma_suite(space: &FiniteSpace, limit: u64) -> Result<LemmaReport> {
    if !space.is_khalimsky() {
        return Err(Error::NotKhalimsky);
    }
    let mut failures = Vec::new();
    let mut pairs_checked = 0;
    for a in 0..space.len() {
        for b in 0..space.len() {
            let (p, q) = (space.embedding(a).unwrap(), space.embedding(b).unwrap());
            let c = chain(p, q)?;
            pairs_checked += 1;
            if c.first() != Some(p) || c.last() != Some(q) || !is_valid_chain(&c) {
                failures.push(LemmaFailure::InvalidChain {
                    from: space.label(a).clone(),
                    to: space.label(b).clone(),
                });
            }
        }
    }
    let check = verify_main_theorem(space, limit)?;
    let mut maps_checked = 0;
    for labels in &check.closed_graph_maps {
        let table = labels
            .iter()
            .map(|l| space.index_of(l).expect("label from this space"))
            .collect();
        let f = SpaceMap::self_map(space, table)?;
        maps_checked += 1;
        if let Some(x) = f.constancy_failure() {
            failures.push(LemmaFailure::NotConstantNearby {
                table: labels.clone(),
                at: space.label(x).clone(),
            });
        }
    }
    Ok(LemmaReport {
        pairs_checked,
        closed_graph_maps_checked: maps_checked,
        failures,
    })
}

/// Every self-map of `space` with closed graph that is not constant on some
/// neighborhood or point closure, as tables. Empty when the constancy
/// property holds.
pub fn constancy_violations(space: &FiniteSpace, limit: u64) -> Result<Vec<Vec<usize>>> {
    let total = budget(space, limit)?;
    chunks(total)
        .map(|range| -> Result<Vec<Vec<usize>>> {
            let mut table = vec![0; space.len()];
            let mut bad = Vec::new();
            for index in range {
                decode(index, space.len(), &mut table);
                let f = SpaceMap::self_map(space, table.clone())?;
                if matches!(f.has_closed_graph(), Check::Holds) && f.constancy_failure().is_some() {
                    bad.push(table.clone());
                }
            }
            Ok(bad)
        })
        .try_reduce(Vec::new, |mut a, b| {
            a.extend(b);
            Ok(a)
        })
}
