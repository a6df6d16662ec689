//! Verification suites: structural invariants of `K^n`, chain sampling, the
//! main characterization on small spaces, the compactified case, and the
//! five diagram fixtures.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::Tier;
use crate::compact::{
    classify_ext, constant_map_closed_graph, has_closed_graph_ext, perturbation_family,
    verify_compactified_theorem, EventuallyConstantMap, ExtPoint,
};
use crate::enumerate::{
    constancy_violations, lemma_suite, sample_census, verify_main_theorem, DEFAULT_LIMIT,
};
use crate::error::Result;
use crate::lattice::{chain, is_valid_chain, min_nbhd, nbhd_box, nbhd_range, KPoint, PointSet};
use crate::rule::{ParityRule, RuleMap};
use crate::space::FiniteSpace;

const MAX_DIM: usize = 3;

type Ranges = [(i64, i64); MAX_DIM];

fn nbhd_bounds(x: i64) -> (i64, i64) {
    let r = nbhd_range(x);
    (*r.start(), *r.end())
}

/// Calls `f` on every point of the box, reusing one buffer.
fn each_point(ranges: &[(i64, i64)], f: &mut impl FnMut(&[i64])) {
    let dim = ranges.len();
    let mut buf = [0i64; MAX_DIM];
    for (b, r) in buf.iter_mut().zip(ranges) {
        *b = r.0;
    }
    loop {
        f(&buf[..dim]);
        let mut i = dim;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if buf[i] < ranges[i].1 {
                buf[i] += 1;
                break;
            }
            buf[i] = ranges[i].0;
        }
    }
}

fn bounds_of(p: &[i64]) -> Ranges {
    let mut out = [(0, 0); MAX_DIM];
    for (o, &c) in out.iter_mut().zip(p) {
        *o = nbhd_bounds(c);
    }
    out
}

fn inside(p: &[i64], ranges: &[(i64, i64)]) -> bool {
    p.iter()
        .zip(ranges)
        .all(|(&c, &(lo, hi))| lo <= c && c <= hi)
}

/// Runs `count` for every point of `[-radius, radius]^dim`, split over the
/// first coordinate.
fn count_over_cube(dim: usize, radius: i64, count: impl Fn(&[i64]) -> u64 + Sync) -> u64 {
    assert!((1..=MAX_DIM).contains(&dim));
    (-radius..=radius)
        .into_par_iter()
        .map(|first| {
            let mut ranges = vec![(-radius, radius); dim];
            ranges[0] = (first, first);
            let mut total = 0;
            each_point(&ranges, &mut |p| total += count(p));
            total
        })
        .sum()
}

/// Points `p` of the cube with some `q ∈ V(p)` and `V(q) ⊄ V(p)`.
pub fn alexandroff_violations(dim: usize, radius: i64) -> u64 {
    count_over_cube(dim, radius, |p| {
        let vp = bounds_of(p);
        let mut bad = false;
        each_point(&vp[..p.len()], &mut |q| {
            let vq = bounds_of(q);
            each_point(&vq[..q.len()], &mut |r| bad |= !inside(r, &vp[..p.len()]));
        });
        u64::from(bad)
    })
}

/// Points `p` of the cube where `q ∈ cl{p} ⟺ p ∈ V(q)` fails for some `q`
/// within distance `reach`. Both sides are false beyond distance one, so
/// `reach = 1` already covers every interesting `q`.
pub fn duality_violations(dim: usize, radius: i64, reach: i64) -> u64 {
    count_over_cube(dim, radius, |p| {
        let closure: Vec<(i64, i64)> = p
            .iter()
            .map(|&c| {
                let r = crate::lattice::closure_range(c);
                (*r.start(), *r.end())
            })
            .collect();
        let window: Vec<(i64, i64)> = p.iter().map(|&c| (c - reach, c + reach)).collect();
        let mut bad = false;
        each_point(&window, &mut |q| {
            let in_closure = inside(q, &closure);
            let p_in_vq = inside(p, &bounds_of(q)[..q.len()]);
            bad |= in_closure != p_in_vq;
        });
        u64::from(bad)
    })
}

/// Basic open sets of the line that contain `x`: the triples
/// `{2m-1, 2m, 2m+1}` and the singletons `{2m+1}`, as inclusive ranges.
fn line_basis_containing(x: i64) -> Vec<(i64, i64)> {
    let m0 = x.div_euclid(2);
    (m0 - 2..=m0 + 2)
        .flat_map(|m| [(2 * m - 1, 2 * m + 1), (2 * m + 1, 2 * m + 1)])
        .filter(|&(lo, hi)| lo <= x && x <= hi)
        .collect()
}

/// The smallest open neighborhood of `p` computed as the intersection of
/// every product basis set containing it, as a point set.
pub fn nbhd_from_basis(p: &KPoint) -> PointSet {
    let per_coord: Vec<Vec<(i64, i64)>> = p
        .coords()
        .iter()
        .map(|&c| line_basis_containing(c))
        .collect();
    let mut combos: Vec<Vec<(i64, i64)>> = vec![vec![]];
    for options in &per_coord {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(*o);
                    v
                })
            })
            .collect();
    }
    let mut acc: Option<BTreeSet<KPoint>> = None;
    for combo in combos {
        let ranges: Vec<_> = combo.iter().map(|&(lo, hi)| lo..=hi).collect();
        let set: BTreeSet<KPoint> = crate::lattice::box_points(&ranges).collect();
        acc = Some(match acc {
            None => set,
            Some(a) => a.intersection(&set).cloned().collect(),
        });
    }
    PointSet::from_points(p.dim(), acc.unwrap_or_default()).expect("dimension-homogeneous")
}

/// Points where `min_nbhd` differs from the basis-intersection oracle,
/// compared as sets.
pub fn product_rule_violations(dim: usize, radius: i64) -> u64 {
    count_over_cube(dim, radius, |p| {
        let p = KPoint::new(p.to_vec()).expect("cube inside the coordinate limit");
        u64::from(min_nbhd(&p) != nbhd_from_basis(&p))
    })
}

/// Same comparison in box form: the intersection of the basis boxes
/// containing `p` against [`nbhd_box`].
pub fn product_rule_box_violations(dim: usize, radius: i64) -> u64 {
    count_over_cube(dim, radius, |p| {
        let k = KPoint::new(p.to_vec()).expect("cube inside the coordinate limit");
        let bad = p.iter().zip(nbhd_box(&k)).any(|(&c, r)| {
            let meet = line_basis_containing(c)
                .into_iter()
                .fold((i64::MIN, i64::MAX), |(lo, hi), (a, b)| {
                    (lo.max(a), hi.min(b))
                });
            meet != (*r.start(), *r.end())
        });
        u64::from(bad)
    })
}

/// On products of intervals of at most `max_len` points: product
/// neighborhoods and point closures commute with the factors.
pub fn finite_product_violations(max_len: i64) -> u64 {
    let intervals: Vec<FiniteSpace> = (0..=1)
        .flat_map(|a| (0..max_len).map(move |len| FiniteSpace::interval(a, a + len).unwrap()))
        .collect();
    let mut bad = 0;
    for s in &intervals {
        for t in &intervals {
            let prod = s.product(t).unwrap();
            for (i, j) in (0..s.len()).flat_map(|i| (0..t.len()).map(move |j| (i, j))) {
                let x = i * t.len() + j;
                let expect_nbhd: Vec<usize> = s
                    .nbhd(i)
                    .iter()
                    .flat_map(|&a| t.nbhd(j).iter().map(move |&b| a * t.len() + b))
                    .collect();
                let single = prod.subset([x]).unwrap();
                let closure: Vec<usize> = prod.closure_of(&single).iter().collect();
                let expect_closure: Vec<usize> = s
                    .point_closure(i)
                    .iter()
                    .flat_map(|&a| t.point_closure(j).iter().map(move |&b| a * t.len() + b))
                    .collect();
                if prod.nbhd(x) != expect_nbhd.as_slice() || closure != expect_closure {
                    bad += 1;
                }
            }
            bad += prod.validate().len() as u64;
        }
    }
    bad
}

/// Random pairs in `[-radius, radius]^dim` whose chain is invalid or has the
/// wrong endpoints.
pub fn chain_violations(dim: usize, pairs: usize, radius: i64, seed: u64) -> Result<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| {
        KPoint::new((0..dim).map(|_| rng.gen_range(-radius..=radius)).collect())
    };
    let mut bad = 0;
    for _ in 0..pairs {
        let x = point(&mut rng)?;
        let y = point(&mut rng)?;
        let c = chain(&x, &y)?;
        if c.first() != Some(&x) || c.last() != Some(&y) || !is_valid_chain(&c) {
            bad += 1;
        }
    }
    Ok(bad)
}

/// One of the five diagram examples, with the ring it belongs to.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub map: RuleMap,
    pub expected: Tier,
}

pub fn diagram_fixtures(dim: usize) -> Result<Vec<Fixture>> {
    Ok(vec![
        Fixture {
            name: "A",
            map: RuleMap::constant(KPoint::origin(dim)?),
            expected: Tier::ClosedGraph,
        },
        Fixture {
            name: "B",
            map: RuleMap::constant(KPoint::new(vec![1; dim])?),
            expected: Tier::Constant,
        },
        Fixture {
            name: "C",
            map: RuleMap::identity(dim)?,
            expected: Tier::Continuous,
        },
        Fixture {
            name: "D",
            map: RuleMap::coordinatewise(dim, ParityRule::EXAMPLE_D)?,
            expected: Tier::QuasiContinuous,
        },
        Fixture {
            name: "E",
            map: RuleMap::coordinatewise(dim, ParityRule::EXAMPLE_E)?,
            expected: Tier::Arbitrary,
        },
    ])
}

/// Classifies the fixture on `[-4,4]^n` and refutes its graph on
/// `[-2,2]^n`; returns the observed tier and whether a refutation exists.
pub fn run_fixture(fixture: &Fixture) -> Result<(Tier, bool)> {
    let dim = fixture.map.dim();
    let tier = fixture.map.classify(&vec![(-4, 4); dim])?.tier();
    let refuted = fixture
        .map
        .refute_closed_graph(&vec![(-2, 2); dim])?
        .is_some();
    Ok((tier, refuted))
}

pub fn fixture_matches(fixture: &Fixture) -> Result<bool> {
    let (tier, refuted) = run_fixture(fixture)?;
    Ok(tier == fixture.expected && refuted == (fixture.expected != Tier::ClosedGraph))
}

fn lat(c: &[i64]) -> ExtPoint {
    ExtPoint::Lattice(KPoint::new(c.to_vec()).expect("small literal"))
}

/// Families of eventually constant self-maps of `A(K)` and `A(K^2)`: the
/// constant maps, and every table on `[0,2]` (resp. `[0,1]^2`) over a small
/// value set for each choice of tail and value at infinity.
pub fn compactified_families() -> Result<Vec<(String, usize, Vec<EventuallyConstantMap>)>> {
    let inf = ExtPoint::Infinity;
    let mut out = Vec::new();

    let consts1 = [lat(&[0]), lat(&[1]), lat(&[2]), lat(&[3]), inf.clone()];
    out.push((
        "constants n=1".to_string(),
        1,
        consts1
            .iter()
            .map(|c| EventuallyConstantMap::constant(1, c.clone()))
            .collect::<Result<_>>()?,
    ));
    let consts2 = [lat(&[0, 0]), lat(&[1, 0]), lat(&[2, 2]), inf.clone()];
    out.push((
        "constants n=2".to_string(),
        2,
        consts2
            .iter()
            .map(|c| EventuallyConstantMap::constant(2, c.clone()))
            .collect::<Result<_>>()?,
    ));

    out.push((
        "B=[0,2] values {0,2} tail 0 f(∞)=0".to_string(),
        1,
        perturbation_family(&[(0, 2)], &[lat(&[0]), lat(&[2])], &lat(&[0]), &lat(&[0]))?,
    ));

    let values1 = [lat(&[0]), lat(&[1]), lat(&[2]), inf.clone()];
    let mut wide = Vec::new();
    for tail in &values1 {
        for at_inf in &values1 {
            wide.extend(perturbation_family(&[(0, 2)], &values1, tail, at_inf)?);
        }
    }
    out.push(("B=[0,2] values {0,1,2,∞} all tails".to_string(), 1, wide));

    let values2 = [lat(&[0, 0]), lat(&[2, 0]), inf.clone()];
    let mut plane = Vec::new();
    for tail in &values2 {
        for at_inf in &values2 {
            plane.extend(perturbation_family(
                &[(0, 1), (0, 1)],
                &values2,
                tail,
                at_inf,
            )?);
        }
    }
    out.push((
        "B=[0,1]^2 values {(0,0),(2,0),∞} all tails".to_string(),
        2,
        plane,
    ));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Structure,
    Lemmas,
    Theorem,
    Compactified,
    Examples,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Structure,
        Suite::Lemmas,
        Suite::Theorem,
        Suite::Compactified,
        Suite::Examples,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::Lemmas => "lemmas",
            Suite::Theorem => "theorem",
            Suite::Compactified => "compactified",
            Suite::Examples => "examples",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn outcome(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

fn zero(name: String, violations: u64) -> CheckOutcome {
    outcome(name, violations == 0, format!("{violations} violation(s)"))
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Structure => structure_checks(),
        Suite::Lemmas => lemma_checks()?,
        Suite::Theorem => theorem_checks()?,
        Suite::Compactified => compactified_checks()?,
        Suite::Examples => example_checks()?,
    };
    Ok(SuiteReport { suite, checks })
}

fn structure_checks() -> Vec<CheckOutcome> {
    let mut checks = Vec::new();
    for dim in 1..=3 {
        checks.push(zero(
            format!("alexandroff axiom n={dim} |x|<=100"),
            alexandroff_violations(dim, 100),
        ));
        let reach = if dim == 3 { 1 } else { 2 };
        checks.push(zero(
            format!("closure duality n={dim} |x|<=100"),
            duality_violations(dim, 100, reach),
        ));
        checks.push(zero(
            format!("product rule (boxes) n={dim} |x|<=100"),
            product_rule_box_violations(dim, 100),
        ));
        let radius = if dim == 3 { 12 } else { 100 };
        checks.push(zero(
            format!("product rule (sets) n={dim} |x|<={radius}"),
            product_rule_violations(dim, radius),
        ));
    }
    checks.push(zero(
        "finite products of intervals up to length 5".into(),
        finite_product_violations(5),
    ));
    checks
}

fn lemma_checks() -> Result<Vec<CheckOutcome>> {
    let mut checks = Vec::new();
    for dim in 1..=3 {
        let start = Instant::now();
        let bad = chain_violations(dim, 1000, 100, 0x5EED + dim as u64)?;
        checks.push(outcome(
            format!("chains n={dim}, 1000 random pairs in [-100,100]^n"),
            bad == 0,
            format!("{bad} invalid, {:.2?}", start.elapsed()),
        ));
    }
    for b in 2..=4 {
        let s = FiniteSpace::interval(0, b)?;
        let bad = constancy_violations(&s, DEFAULT_LIMIT)?.len() as u64;
        checks.push(zero(
            format!("closed graph ⟹ constant on U(x) and cl{{x}} on [0,{b}]"),
            bad,
        ));
    }
    let report = lemma_suite(&FiniteSpace::interval(0, 4)?, DEFAULT_LIMIT)?;
    checks.push(outcome(
        "lemma suite on [0,4]",
        report.passed(),
        format!(
            "{} pairs, {} closed-graph maps",
            report.pairs_checked, report.closed_graph_maps_checked
        ),
    ));
    Ok(checks)
}

fn theorem_checks() -> Result<Vec<CheckOutcome>> {
    let mut checks = Vec::new();
    let start = Instant::now();
    let mut failing = Vec::new();
    let mut spaces = 0;
    for a in -4..=4 {
        for b in a + 1..=a + 4 {
            let check = verify_main_theorem(&FiniteSpace::interval(a, b)?, DEFAULT_LIMIT)?;
            let evens = (a..=b).filter(|x| x % 2 == 0).count();
            spaces += 1;
            if !check.passed() || check.closed_graph_maps.len() != evens {
                failing.push(format!("[{a},{b}]"));
            }
        }
    }
    checks.push(outcome(
        "intervals [a,b], -4<=a<b<=a+4",
        failing.is_empty(),
        format!(
            "{spaces} spaces, {} failing {:?}, {:.2?}",
            failing.len(),
            failing,
            start.elapsed()
        ),
    ));

    let square = FiniteSpace::boxed(&[(0, 1), (0, 1)])?;
    let check = verify_main_theorem(&square, DEFAULT_LIMIT)?;
    checks.push(outcome(
        "box [0,1]^2 (conjecture extension)",
        check.passed() && check.closed_graph_maps.len() == 1,
        format!(
            "{} maps, {} with closed graph",
            check.maps_checked,
            check.closed_graph_maps.len()
        ),
    ));

    let big = FiniteSpace::boxed(&[(0, 2), (0, 2)])?;
    let census = sample_census(&big, 100_000, 2024)?;
    let predicted: Vec<_> = big
        .closed_points()
        .iter()
        .map(|c| vec![big.label(c).clone(); big.len()])
        .collect();
    checks.push(outcome(
        "box [0,2]^2 sampled, 1e5 trials (conjecture extension)",
        census.closed_graph_maps == predicted,
        format!(
            "{} distinct closed-graph maps",
            census.closed_graph_maps.len()
        ),
    ));
    Ok(checks)
}

fn compactified_checks() -> Result<Vec<CheckOutcome>> {
    let mut checks = Vec::new();
    let mut unnested = 0;
    for (name, dim, family) in compactified_families()? {
        unnested += family.iter().filter(|f| classify_ext(f).is_err()).count() as u64;
        let report = verify_compactified_theorem(dim, &family)?;
        checks.push(outcome(
            name,
            report.passed(),
            format!(
                "{} maps, {} closed graph, {} mismatches",
                report.checked,
                report.closed_graph,
                report.mismatches.len()
            ),
        ));
    }
    let consts = [
        lat(&[0]),
        lat(&[1]),
        lat(&[-2]),
        lat(&[0, 0]),
        lat(&[1, 0]),
        lat(&[2, 2]),
        lat(&[3, 3, 0]),
        ExtPoint::Infinity,
    ];
    let mut bad = 0;
    for c in &consts {
        for dim in 1..=3 {
            if c.lattice().is_some_and(|p| p.dim() != dim) {
                continue;
            }
            let f = EventuallyConstantMap::constant(dim, c.clone())?;
            bad += u64::from(has_closed_graph_ext(&f).holds() != constant_map_closed_graph(c));
        }
    }
    checks.push(zero("constant maps vs closed-point criterion".into(), bad));
    checks.push(zero("diagram nesting on all families".into(), unnested));
    Ok(checks)
}

fn example_checks() -> Result<Vec<CheckOutcome>> {
    let mut checks = Vec::new();
    for dim in 1..=2 {
        for fixture in diagram_fixtures(dim)? {
            let (tier, refuted) = run_fixture(&fixture)?;
            let ok = fixture_matches(&fixture)?;
            checks.push(outcome(
                format!("example {} n={dim}", fixture.name),
                ok,
                format!(
                    "expected {}, got {}, refuted on [-2,2]^n: {refuted}",
                    fixture.expected.name(),
                    tier.name()
                ),
            ));
        }
    }
    Ok(checks)
}
