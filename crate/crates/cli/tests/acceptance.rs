//! Acceptance gate. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed. Run with `--nocapture` to see the lines.

use std::process::Command;
use std::time::{Duration, Instant};

use khalimsky::compact::{
    constant_map_closed_graph, has_closed_graph_ext, perturbation_family, predicted_closed_graph,
    verify_compactified_theorem,
};
use khalimsky::enumerate::{
    constancy_violations, enumerate_census, sample_census, verify_main_theorem, Coverage,
    DEFAULT_LIMIT,
};
use khalimsky::suites::{
    alexandroff_violations, chain_violations, diagram_fixtures, duality_violations,
    finite_product_violations, product_rule_box_violations, product_rule_violations, run_fixture,
};
use khalimsky::{EventuallyConstantMap, ExtPoint, FiniteSpace, KPoint, PointLabel, Tier};
use khalimsky_cli::commands::{enumerate, render_census_json, EnumerateOptions};
use khalimsky_cli::{Format, Manifest};

const INTERVAL_BUDGET: Duration = Duration::from_secs(5);
const FIXTURE_BUDGET: Duration = Duration::from_secs(5);
const CHAIN_BUDGET: Duration = Duration::from_secs(2);
const CHAIN_PAIRS: usize = 1000;
const CHAIN_RADIUS: i64 = 100;
const BOX_TRIALS: u64 = 100_000;
const BOX_SEED: u64 = 2024;
const STRUCTURE_RADIUS: i64 = 100;
const SET_RADIUS_3D: i64 = 12;
const FINITE_PRODUCT_LEN: i64 = 5;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn lattice(c: &[i64]) -> PointLabel {
    PointLabel::Lattice(KPoint::new(c.to_vec()).unwrap())
}

fn ext(c: &[i64]) -> ExtPoint {
    ExtPoint::Lattice(KPoint::new(c.to_vec()).unwrap())
}

fn constant_tables(values: &[PointLabel], len: usize) -> Vec<Vec<PointLabel>> {
    values.iter().map(|v| vec![v.clone(); len]).collect()
}

fn interval_theorem() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut spaces = 0;
    for a in -4..=4 {
        for b in a + 1..=a + 4 {
            let space = FiniteSpace::interval(a, b).unwrap();
            let check = verify_main_theorem(&space, DEFAULT_LIMIT).unwrap();
            let evens: Vec<_> = (a..=b)
                .filter(|x| x % 2 == 0)
                .map(|x| lattice(&[x]))
                .collect();
            let expected = constant_tables(&evens, space.len());
            spaces += 1;
            if !check.passed() || check.closed_graph_maps != expected {
                bad.push(format!("[{a},{b}]"));
            }
        }
    }
    let c02 = verify_main_theorem(&FiniteSpace::interval(0, 2).unwrap(), DEFAULT_LIMIT).unwrap();
    let c04 = verify_main_theorem(&FiniteSpace::interval(0, 4).unwrap(), DEFAULT_LIMIT).unwrap();
    let elapsed = start.elapsed();
    let counts_ok = (c02.closed_graph_maps.len(), c02.maps_checked) == (2, 27)
        && (c04.closed_graph_maps.len(), c04.maps_checked) == (3, 3125);
    outcome(
        bad.is_empty() && counts_ok && elapsed < INTERVAL_BUDGET,
        format!(
            "{spaces} intervals, mismatches {bad:?}; [0,2] {}/{}, [0,4] {}/{}; {elapsed:.2?}",
            c02.closed_graph_maps.len(),
            c02.maps_checked,
            c04.closed_graph_maps.len(),
            c04.maps_checked
        ),
    )
}

fn diagram_examples() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for dim in 1..=2 {
        for fixture in diagram_fixtures(dim).unwrap() {
            let (tier, refuted) = run_fixture(&fixture).unwrap();
            let refutation_expected = fixture.expected != Tier::ClosedGraph;
            if tier != fixture.expected || refuted != refutation_expected {
                bad.push(format!("{} n={dim}: {}", fixture.name, tier.name()));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < FIXTURE_BUDGET,
        format!("10 fixtures, mismatches {bad:?}; {elapsed:.2?}"),
    )
}

fn constancy_near_points() -> Outcome {
    let mut maps = 0;
    let mut violations = 0;
    for b in 2..=4 {
        let space = FiniteSpace::interval(0, b).unwrap();
        maps += enumerate_census(&space, DEFAULT_LIMIT).unwrap().all;
        violations += constancy_violations(&space, DEFAULT_LIMIT).unwrap().len();
    }
    outcome(
        maps == 27 + 256 + 3125 && violations == 0,
        format!("{maps} maps, {violations} violations"),
    )
}

fn chains() -> Outcome {
    let start = Instant::now();
    let mut violations = 0;
    for dim in 1..=3 {
        violations +=
            chain_violations(dim, CHAIN_PAIRS, CHAIN_RADIUS, 0x5EED + dim as u64).unwrap();
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && elapsed < CHAIN_BUDGET,
        format!("3x{CHAIN_PAIRS} pairs, {violations} violations; {elapsed:.2?}"),
    )
}

fn compactified() -> Outcome {
    let inf = ExtPoint::Infinity;
    let mut disagreements = 0;
    let mut checked = 0;
    let families = [
        (
            1,
            vec![ext(&[0]), ext(&[1]), ext(&[2]), ext(&[3]), inf.clone()],
        ),
        (
            2,
            vec![ext(&[0, 0]), ext(&[1, 0]), ext(&[2, 2]), inf.clone()],
        ),
    ];
    for (dim, values) in &families {
        let maps: Vec<_> = values
            .iter()
            .map(|c| EventuallyConstantMap::constant(*dim, c.clone()).unwrap())
            .collect();
        let report = verify_compactified_theorem(*dim, &maps).unwrap();
        disagreements += report.mismatches.len();
        checked += report.checked;
        for (c, f) in values.iter().zip(&maps) {
            disagreements +=
                usize::from(constant_map_closed_graph(c) != has_closed_graph_ext(f).holds());
        }
    }
    let family =
        perturbation_family(&[(0, 2)], &[ext(&[0]), ext(&[2])], &ext(&[0]), &ext(&[0])).unwrap();
    let report = verify_compactified_theorem(1, &family).unwrap();
    disagreements += report.mismatches.len();
    checked += report.checked;
    let only_zero = family
        .iter()
        .filter(|f| has_closed_graph_ext(f).holds())
        .map(|f| f.table().to_vec())
        .collect::<Vec<_>>()
        == vec![vec![ext(&[0]); 3]];
    let agree = family
        .iter()
        .all(|f| has_closed_graph_ext(f).holds() == predicted_closed_graph(f));
    outcome(
        disagreements == 0 && only_zero && agree && family.len() == 8,
        format!("{checked} maps, {disagreements} disagreements, 8-map family passes only all-0: {only_zero}"),
    )
}

fn box_report() -> Outcome {
    let square = FiniteSpace::boxed(&[(0, 1), (0, 1)]).unwrap();
    let exhaustive = verify_main_theorem(&square, DEFAULT_LIMIT).unwrap();
    let square_ok = exhaustive.passed()
        && exhaustive.maps_checked == 256
        && exhaustive.closed_graph_maps == vec![vec![lattice(&[0, 0]); 4]]
        && exhaustive.coverage == Coverage::BoxExtension
        && exhaustive.coverage.label() == "conjecture extension";

    let big = FiniteSpace::boxed(&[(0, 2), (0, 2)]).unwrap();
    let census = sample_census(&big, BOX_TRIALS, BOX_SEED).unwrap();
    let corners = [[0, 0], [0, 2], [2, 0], [2, 2]].map(|c| lattice(&c));
    let sampled_ok = census.closed_graph_maps == constant_tables(&corners, 9)
        && census.closed_graph == 4
        && census.all == BOX_TRIALS + 9;
    outcome(
        square_ok && sampled_ok,
        format!(
            "[0,1]^2 {}/{} closed graph; [0,2]^2 sampled {} trials, {} closed-graph hits, {} distinct",
            exhaustive.closed_graph_maps.len(),
            exhaustive.maps_checked,
            BOX_TRIALS,
            census.closed_graph,
            census.closed_graph_maps.len()
        ),
    )
}

fn structure() -> Outcome {
    let mut counts = Vec::new();
    for dim in 1..=3 {
        counts.push(alexandroff_violations(dim, STRUCTURE_RADIUS));
        counts.push(duality_violations(
            dim,
            STRUCTURE_RADIUS,
            if dim == 3 { 1 } else { 2 },
        ));
        counts.push(product_rule_box_violations(dim, STRUCTURE_RADIUS));
        let radius = if dim == 3 {
            SET_RADIUS_3D
        } else {
            STRUCTURE_RADIUS
        };
        counts.push(product_rule_violations(dim, radius));
    }
    counts.push(finite_product_violations(FINITE_PRODUCT_LEN));
    let total: u64 = counts.iter().sum();
    outcome(
        total == 0,
        format!("{} checks, {total} violations", counts.len()),
    )
}

fn census_json(manifest: &str, sample: Option<u64>, seed: u64) -> String {
    let manifest = Manifest::parse(manifest, "inline").unwrap();
    let opts = EnumerateOptions {
        limit: DEFAULT_LIMIT,
        sample,
        seed,
        format: Format::Json,
        verify: true,
    };
    render_census_json(&enumerate(&manifest, &opts).unwrap())
}

fn determinism() -> Outcome {
    let box22 = r#"{"space": {"box": [[0, 2], [0, 2]]}}"#;
    let i04 = r#"{"space": {"interval": [0, 4]}}"#;
    let library = census_json(box22, Some(5000), 7) == census_json(box22, Some(5000), 7)
        && census_json(i04, None, 0) == census_json(i04, None, 0)
        && census_json(box22, Some(5000), 7) != census_json(box22, Some(5000), 8);

    let dir = std::env::temp_dir().join(format!("ktopo-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("box22.json");
    std::fs::write(&path, box22).unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_ktopo"))
            .args([
                "enumerate",
                "--sample",
                "5000",
                "--seed",
                "7",
                "--format",
                "json",
                "--verify",
            ])
            .arg(&path)
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    let binary = a.status.success() && a.stdout == b.stdout && a.stdout.ends_with(b"\n");
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        library && binary,
        format!(
            "library runs identical: {library}; binary runs identical: {binary} ({} bytes)",
            a.stdout.len()
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        (
            "interval closed-graph maps are the constants at even points",
            interval_theorem,
        ),
        ("diagram fixtures A-E for n = 1, 2", diagram_examples),
        (
            "closed graph forces constancy on U(x) and point closures",
            constancy_near_points,
        ),
        ("chains in [-100,100]^n, n <= 3", chains),
        ("compactified closed-graph decision", compactified),
        ("box report (conjecture extension)", box_report),
        ("structural invariants", structure),
        ("determinism of enumerate JSON", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let mark = if o.passed { "PASS" } else { "FAIL" };
        println!("{mark} criterion {}: {name}: {}", i + 1, o.detail);
        if !o.passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
