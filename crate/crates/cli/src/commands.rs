use std::fmt::Write as _;
use std::io::Write;

use khalimsky::analysis::{Check, PropertyReport, SpaceMap, Tier};
use khalimsky::compact::classify_ext;
use khalimsky::enumerate::{
    enumerate_census, predicted_closed_graph_maps, sample_census, verify_main_theorem, Census,
    Counterexample, Exemplar, Witness,
};
use khalimsky::lattice::{chain, overlap_point};
use khalimsky::suites::{run_suite, Suite, SuiteReport};
use khalimsky::{KPoint, PointLabel};
use serde::Serialize;

use crate::error::CliError;
use crate::manifest::{Label, Manifest, Space, Subject};

/// How a command ended when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Counterexample,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Counterexample => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("reports always serialize");
    writeln!(out, "{text}")?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Label>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    pub constant: Option<Label>,
    pub continuous: Verdict,
    pub quasi_continuous: Verdict,
    pub closed_graph: Verdict,
    pub tier: Tier,
    pub summary: String,
}

fn verdict<P>(check: &Check<P>, render: impl Fn(&P) -> Vec<Label>) -> Verdict {
    Verdict {
        holds: check.holds(),
        witness: check.witness().map(render),
    }
}

fn summary<P>(report: &PropertyReport<P>) -> String {
    [
        ("constant", report.constant.is_some()),
        ("continuous", report.continuous.holds()),
        ("quasi-continuous", report.quasi_continuous.holds()),
        ("closed graph", report.closed_graph.holds()),
    ]
    .iter()
    .map(|(name, holds)| {
        if *holds {
            name.to_string()
        } else {
            format!("NOT {name}")
        }
    })
    .collect::<Vec<_>>()
    .join(", ")
}

fn classification<P>(
    space: String,
    window: Option<String>,
    report: &PropertyReport<P>,
    label: impl Fn(&P) -> Label,
) -> Classification {
    Classification {
        space,
        window,
        constant: report.constant.as_ref().map(&label),
        continuous: verdict(&report.continuous, |x| vec![label(x)]),
        quasi_continuous: verdict(&report.quasi_continuous, |x| vec![label(x)]),
        closed_graph: verdict(&report.closed_graph, |(x, y)| vec![label(x), label(y)]),
        tier: report.tier(),
        summary: summary(report),
    }
}

fn render_window(window: &[(i64, i64)]) -> String {
    window
        .iter()
        .map(|(a, b)| format!("[{a},{b}]"))
        .collect::<Vec<_>>()
        .join("x")
}

pub fn classify(manifest: &Manifest) -> Result<Classification, CliError> {
    Ok(match manifest.build_subject()? {
        Subject::Table { space, table } => {
            let f = SpaceMap::self_map(&space, table)?;
            let report = f.classify()?;
            classification(space.description().to_string(), None, &report, |&x| {
                Label::from_point_label(space.label(x))
            })
        }
        Subject::Rule { window, map } => {
            let report = map.classify(&window)?;
            classification(
                format!("K^{}", map.dim()),
                Some(render_window(&window)),
                &report,
                Label::from_point,
            )
        }
        Subject::Compactified(f) => {
            let report = classify_ext(&f)?;
            classification(
                format!("A(K^{})", f.dim()),
                Some(render_window(f.bbox())),
                &report,
                Label::from_ext,
            )
        }
    })
}

fn show(label: &Label) -> String {
    match label {
        Label::Int(x) => x.to_string(),
        Label::Coords(c) => format!(
            "({})",
            c.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")
        ),
        Label::Name(s) if s == crate::manifest::INFINITY => "∞".into(),
        Label::Name(s) => s.clone(),
        Label::Tuple(items) => format!(
            "({})",
            items.iter().map(show).collect::<Vec<_>>().join(", ")
        ),
    }
}

pub fn render_classification(c: &Classification) -> String {
    let mut s = String::new();
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    writeln!(s, "space: {}", c.space).unwrap();
    if let Some(w) = &c.window {
        writeln!(s, "window: {w}").unwrap();
    }
    match &c.constant {
        Some(v) => writeln!(s, "constant: yes, value {}", show(v)).unwrap(),
        None => writeln!(s, "constant: no").unwrap(),
    }
    for (name, v) in [
        ("continuous", &c.continuous),
        ("quasi-continuous", &c.quasi_continuous),
    ] {
        match &v.witness {
            Some(w) => writeln!(s, "{name}: no, fails at x = {}", show(&w[0])).unwrap(),
            None => writeln!(s, "{name}: {}", yes_no(v.holds)).unwrap(),
        }
    }
    match &c.closed_graph.witness {
        Some(w) => writeln!(
            s,
            "closed graph: no, ({}, {}) is in the closure of the graph but not on it",
            show(&w[0]),
            show(&w[1])
        )
        .unwrap(),
        None => writeln!(s, "closed graph: {}", yes_no(c.closed_graph.holds)).unwrap(),
    }
    writeln!(s, "tier: {}", c.tier.name()).unwrap();
    writeln!(s, "{}", c.summary).unwrap();
    s
}

pub fn cmd_classify(
    manifest: &Manifest,
    format: Format,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let c = classify(manifest)?;
    match format {
        Format::Json => json_line(out, &c)?,
        Format::Text | Format::Csv => out.write_all(render_classification(&c).as_bytes())?,
    }
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Default)]
pub struct EnumerateOptions {
    pub limit: u64,
    pub sample: Option<u64>,
    pub seed: u64,
    pub format: Format,
    pub verify: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub passed: bool,
    pub coverage: String,
    pub maps_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerateReport {
    pub census: Census,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

/// Census of the manifest's space, plus the closed-graph comparison when
/// `verify` is set. A sampled census is checked against the constants at
/// closed points only among the sampled maps.
pub fn enumerate(
    manifest: &Manifest,
    opts: &EnumerateOptions,
) -> Result<EnumerateReport, CliError> {
    let space = match manifest.build_space()? {
        Space::Finite { space, .. } => space,
        Space::Compactified { .. } => {
            return Err(CliError::Manifest(
                "enumeration needs a finite space".into(),
            ))
        }
    };
    let census = match opts.sample {
        Some(trials) => sample_census(&space, trials, opts.seed)?,
        None => enumerate_census(&space, opts.limit)?,
    };
    let verification = if !opts.verify {
        None
    } else if opts.sample.is_none() {
        let check = verify_main_theorem(&space, opts.limit)?;
        Some(Verification {
            passed: check.passed(),
            coverage: check.coverage.label().to_string(),
            maps_checked: check.maps_checked,
            counterexample: check.counterexample,
        })
    } else {
        let dim = space.dim().ok_or(khalimsky::Error::NotKhalimsky)?;
        let labels = |t: Vec<usize>| {
            t.into_iter()
                .map(|v| space.label(v).clone())
                .collect::<Vec<_>>()
        };
        let predicted: Vec<_> = predicted_closed_graph_maps(&space)
            .into_iter()
            .map(labels)
            .collect();
        let counterexample = census
            .closed_graph_maps
            .iter()
            .find(|t| !predicted.contains(t))
            .map(|t| Counterexample::UnpredictedClosedGraph(t.clone()))
            .or_else(|| {
                predicted
                    .iter()
                    .find(|t| !census.closed_graph_maps.contains(t))
                    .map(|t| Counterexample::MissingClosedGraph(t.clone()))
            });
        let coverage = if space.len() == 1 {
            "singleton"
        } else if dim == 1 {
            "interval"
        } else {
            "conjecture extension"
        };
        Some(Verification {
            passed: counterexample.is_none(),
            coverage: format!("{coverage}, sampled"),
            maps_checked: census.all,
            counterexample,
        })
    };
    Ok(EnumerateReport {
        census,
        verification,
    })
}

fn show_table(table: &[PointLabel]) -> String {
    table
        .iter()
        .map(|l| show(&Label::from_point_label(l)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn show_exemplar(e: &Exemplar) -> String {
    let witness = match &e.witness {
        None => String::new(),
        Some(Witness::Point(x)) => {
            format!("  (fails at x = {})", show(&Label::from_point_label(x)))
        }
        Some(Witness::Pair(x, y)) => format!(
            "  (({}, {}) in the closure of the graph)",
            show(&Label::from_point_label(x)),
            show(&Label::from_point_label(y))
        ),
    };
    format!("{}: {}{witness}", e.tier.name(), show_table(&e.table))
}

pub fn render_census_text(report: &EnumerateReport) -> String {
    let c = &report.census;
    let mut s = String::new();
    writeln!(s, "space: {}", c.space).unwrap();
    match c.mode {
        khalimsky::enumerate::CensusMode::Exhaustive => writeln!(s, "mode: exhaustive").unwrap(),
        khalimsky::enumerate::CensusMode::Sampled {
            trials,
            seed,
            injected,
        } => writeln!(
            s,
            "mode: sampled, {trials} trials, seed {seed}, {injected} constants injected"
        )
        .unwrap(),
    }
    for (class, count) in c.rows() {
        writeln!(s, "{class}: {count}").unwrap();
    }
    writeln!(s, "closed-graph maps:").unwrap();
    for t in &c.closed_graph_maps {
        writeln!(s, "  {}", show_table(t)).unwrap();
    }
    writeln!(s, "exemplars:").unwrap();
    for e in &c.exemplars {
        writeln!(s, "  {}", show_exemplar(e)).unwrap();
    }
    if let Some(v) = &report.verification {
        let result = if v.passed { "pass" } else { "FAIL" };
        writeln!(
            s,
            "verify: {result} ({}, {} maps)",
            v.coverage, v.maps_checked
        )
        .unwrap();
        match &v.counterexample {
            Some(Counterexample::UnpredictedClosedGraph(t)) => writeln!(
                s,
                "counterexample: closed graph but not constant at a closed point: {}",
                show_table(t)
            )
            .unwrap(),
            Some(Counterexample::MissingClosedGraph(t)) => writeln!(
                s,
                "counterexample: constant at a closed point without closed graph: {}",
                show_table(t)
            )
            .unwrap(),
            None => {}
        }
    }
    s
}

pub fn render_census_csv(report: &EnumerateReport) -> String {
    let mut s = String::from("class,count\n");
    for (class, count) in report.census.rows() {
        writeln!(s, "{class},{count}").unwrap();
    }
    s
}

pub fn render_census_json(report: &EnumerateReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("census always serializes");
    s.push('\n');
    s
}

pub fn cmd_enumerate(
    manifest: &Manifest,
    opts: &EnumerateOptions,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let report = enumerate(manifest, opts)?;
    let text = match opts.format {
        Format::Text => render_census_text(&report),
        Format::Csv => render_census_csv(&report),
        Format::Json => render_census_json(&report),
    };
    out.write_all(text.as_bytes())?;
    Ok(match &report.verification {
        Some(v) if !v.passed => Status::Counterexample,
        _ => Status::Ok,
    })
}

/// Parses `4`, `1,0`, `(1, 0)` or `[1,0]`.
pub fn parse_point(text: &str) -> Result<KPoint, CliError> {
    let inner = text
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    let coords = inner
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|e| CliError::Usage(format!("bad coordinate {c:?} in {text:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KPoint::new(coords)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub chain: Vec<Label>,
    pub overlaps: Vec<Label>,
}

pub fn chain_report(x: &KPoint, y: &KPoint) -> Result<ChainReport, CliError> {
    let points = chain(x, y)?;
    let overlaps = points
        .windows(2)
        .map(|w| overlap_point(&w[0], &w[1]).expect("consecutive chain points overlap"))
        .collect::<Vec<_>>();
    Ok(ChainReport {
        chain: points.iter().map(Label::from_point).collect(),
        overlaps: overlaps.iter().map(Label::from_point).collect(),
    })
}

pub fn cmd_chain(
    x: &str,
    y: &str,
    format: Format,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let report = chain_report(&parse_point(x)?, &parse_point(y)?)?;
    match format {
        Format::Json => json_line(out, &report)?,
        Format::Text | Format::Csv => {
            let line = |v: &[Label]| v.iter().map(show).collect::<Vec<_>>().join(" ");
            writeln!(out, "{}", line(&report.chain))?;
            for (pair, o) in report.chain.windows(2).zip(&report.overlaps) {
                writeln!(
                    out,
                    "  {} ~ {}: {}",
                    show(&pair[0]),
                    show(&pair[1]),
                    show(o)
                )?;
            }
        }
    }
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SuiteArg {
    All,
    Structure,
    Lemmas,
    Theorem,
    Compactified,
    Examples,
}

impl SuiteArg {
    pub fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::All => Suite::ALL.to_vec(),
            SuiteArg::Structure => vec![Suite::Structure],
            SuiteArg::Lemmas => vec![Suite::Lemmas],
            SuiteArg::Theorem => vec![Suite::Theorem],
            SuiteArg::Compactified => vec![Suite::Compactified],
            SuiteArg::Examples => vec![Suite::Examples],
        }
    }
}

pub fn render_suite(report: &SuiteReport) -> String {
    let mut s = String::new();
    let passed = report.checks.iter().filter(|c| c.passed).count();
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    writeln!(
        s,
        "{verdict} {} ({passed}/{})",
        report.suite,
        report.checks.len()
    )
    .unwrap();
    for c in &report.checks {
        let mark = if c.passed { "ok" } else { "FAIL" };
        writeln!(s, "  [{mark}] {}: {}", c.name, c.detail).unwrap();
    }
    s
}

pub fn cmd_verify(
    suite: SuiteArg,
    format: Format,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let mut reports = Vec::new();
    for s in suite.suites() {
        let report = run_suite(s)?;
        if format != Format::Json {
            out.write_all(render_suite(&report).as_bytes())?;
            out.flush()?;
        }
        reports.push(report);
    }
    if format == Format::Json {
        json_line(out, &reports)?;
    }
    Ok(if reports.iter().all(SuiteReport::passed) {
        Status::Ok
    } else {
        Status::Counterexample
    })
}
