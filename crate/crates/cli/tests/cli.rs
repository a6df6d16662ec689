use std::path::PathBuf;
use std::process::{Command, Output};

use khalimsky_cli::manifest::{ArmSpec, Coords, Label, MapSpec, RuleSpec, SpaceSpec};
use khalimsky_cli::{CliError, Manifest};
use proptest::prelude::*;

fn write_manifest(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ktopo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn ktopo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ktopo"))
        .args(args)
        .output()
        .unwrap()
}

fn ktopo_on(args: &[&str], name: &str, manifest: &str) -> Output {
    let path = write_manifest(name, manifest);
    let mut all: Vec<&str> = args.to_vec();
    all.push(path.to_str().unwrap());
    ktopo(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_example_b_on_box_window() {
    let o = ktopo_on(
        &["classify"],
        "b.json",
        r#"{"space": {"box": [[-4, 4], [-4, 4]]}, "map": {"rule": {"constant": [1, 1]}}}"#,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("constant, continuous, quasi-continuous, NOT closed graph"),
        "{text}"
    );
    assert!(text.contains("tier: constant"));
}

#[test]
fn classify_example_a_has_all_four() {
    let o = ktopo_on(
        &["classify", "--format", "json"],
        "a.json",
        r#"{"space": {"interval": [-4, 4]}, "map": {"rule": {"constant": 0}}}"#,
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["summary"],
        "constant, continuous, quasi-continuous, closed graph"
    );
    assert_eq!(v["tier"], "closed_graph");
    assert_eq!(v["constant"], 0);
}

#[test]
fn classify_tables_and_compactified_maps() {
    let o = ktopo_on(
        &["classify", "--format", "json"],
        "t.json",
        r#"{"space": {"interval": [0, 2]}, "map": {"table": [[0, 0], [1, 1], [2, 2]]}}"#,
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tier"], "continuous");
    assert_eq!(v["closed_graph"]["witness"], serde_json::json!([1, 0]));

    let o = ktopo_on(
        &["classify", "--format", "json"],
        "c.json",
        r#"{"space": {"compactified": {"n": 1, "box": [[0, 0]], "tail": "inf", "infinity": "inf"}}}"#,
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tier"], "closed_graph");
    assert_eq!(v["constant"], "inf");
}

#[test]
fn malformed_manifest_reports_position() {
    let text = "{\"space\":\n  {\"interval\": [0 2]}}";
    match Manifest::parse(text, "m.json") {
        Err(CliError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 19)),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let o = ktopo_on(&["classify"], "bad.json", text);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2 column 19"), "{err}");

    let o = ktopo_on(
        &["classify"],
        "unknown.json",
        r#"{"space": {"interval": [0, 2]}, "extra": 1}"#,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_spaces_exit_3() {
    // U(b) = {a, b} but U(a) = {a, c} is not inside it
    let o = ktopo_on(
        &["classify"],
        "bad-space.json",
        r#"{"space": {"explicit": {"points": ["a", "b", "c"], "neighborhoods": [["a", "c"], ["a", "b"], ["c"]]}},
            "map": {"table": [["a", "a"], ["b", "a"], ["c", "a"]]}}"#,
    );
    assert_eq!(o.status.code(), Some(3));
    let o = ktopo_on(
        &["enumerate"],
        "empty.json",
        r#"{"space": {"interval": [3, 1]}}"#,
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn enumerate_rows_and_verification() {
    let o = ktopo_on(
        &["enumerate"],
        "i02.json",
        r#"{"space": {"interval": [0, 2]}}"#,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "closed_graph: 2"));

    let o = ktopo_on(
        &["enumerate", "--verify"],
        "i04.json",
        r#"{"space": {"interval": [0, 4]}}"#,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify: pass"));

    let o = ktopo_on(
        &["enumerate", "--format", "csv"],
        "sq.json",
        r#"{"space": {"box": [[0, 1], [0, 1]]}}"#,
    );
    assert_eq!(
        stdout(&o),
        "class,count\nall,256\nquasi_continuous,81\ncontinuous,36\nconstant,4\nclosed_graph,1\n"
    );
}

#[test]
fn enumerate_budget_exit_4() {
    let box22 = r#"{"space": {"box": [[0, 2], [0, 2]]}}"#;
    let o = ktopo_on(&["enumerate"], "box22.json", box22);
    assert_eq!(o.status.code(), Some(4));
    let o = ktopo_on(
        &["enumerate", "--limit", "26"],
        "i02b.json",
        r#"{"space": {"interval": [0, 2]}}"#,
    );
    assert_eq!(o.status.code(), Some(4));
    let o = ktopo_on(
        &["enumerate", "--sample", "200", "--seed", "3", "--verify"],
        "box22s.json",
        box22,
    );
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn enumerate_product_and_explicit_spaces() {
    let o = ktopo_on(
        &["enumerate", "--format", "json"],
        "prod.json",
        r#"{"space": {"product": [{"interval": [0, 1]}, {"interval": [0, 1]}]}}"#,
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["census"]["closed_graph"], 1);
    assert_eq!(v["census"]["points"][1], serde_json::json!([0, 1]));

    // Sierpinski space: o open, c closed
    let o = ktopo_on(
        &["enumerate", "--format", "csv"],
        "sierpinski.json",
        r#"{"space": {"explicit": {"points": ["o", "c"], "neighborhoods": [["o"], ["o", "c"]]}}}"#,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("closed_graph,1\n"));
}

#[test]
fn chain_output() {
    let o = ktopo(&["chain", "0", "4"]);
    assert_eq!(stdout(&o), "0 2 4\n  0 ~ 2: 1\n  2 ~ 4: 3\n");
    assert_eq!(stdout(&ktopo(&["chain", "5", "5"])), "5\n");

    let o = ktopo(&["chain", "(1,0)", "(3,2)", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["chain"],
        serde_json::json!([[1, 0], [0, 0], [2, 0], [3, 0], [3, 2]])
    );
    assert_eq!(v["overlaps"].as_array().unwrap().len(), 4);

    assert_eq!(ktopo(&["chain", "-3", "1"]).status.code(), Some(0));
    assert_eq!(ktopo(&["chain", "1,0", "3"]).status.code(), Some(2));
    assert_eq!(ktopo(&["chain", "1,x", "3,0"]).status.code(), Some(2));
}

#[test]
fn verify_examples_suite() {
    let o = ktopo(&["verify", "--suite", "examples"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS examples (10/10)"));
}

fn label() -> impl Strategy<Value = Label> {
    let name = "[a-z]{1,3}".prop_map(Label::Name);
    prop_oneof![
        any::<i32>().prop_map(|x| Label::Int(x.into())),
        prop::collection::vec(-50i64..50, 1..4).prop_map(Label::Coords),
        name.clone(),
        (name, -5i64..5).prop_map(|(n, x)| Label::Tuple(vec![n, Label::Int(x)])),
    ]
}

fn coords() -> impl Strategy<Value = Coords> {
    prop_oneof![
        (-9i64..9).prop_map(Coords::One),
        prop::collection::vec(-9i64..9, 2..4).prop_map(Coords::Many),
    ]
}

fn arm() -> impl Strategy<Value = ArmSpec> {
    prop_oneof![
        (-3i64..3).prop_map(ArmSpec::Shift),
        (-3i64..3).prop_map(ArmSpec::Constant)
    ]
}

fn rule() -> impl Strategy<Value = RuleSpec> {
    let leaf = prop_oneof![
        Just(RuleSpec::Identity),
        Just(RuleSpec::ExampleD),
        Just(RuleSpec::ExampleE),
        coords().prop_map(RuleSpec::Constant),
        (arm(), arm()).prop_map(|(even, odd)| RuleSpec::Parity { even, odd }),
    ];
    leaf.prop_recursive(2, 6, 3, |inner| {
        (prop::collection::vec((coords(), coords()), 0..3), inner).prop_map(|(table, default)| {
            RuleSpec::Patched {
                table,
                default: Box::new(default),
            }
        })
    })
}

fn range() -> impl Strategy<Value = [i64; 2]> {
    (-9i64..9, 0i64..4).prop_map(|(a, len)| [a, a + len])
}

fn space() -> impl Strategy<Value = SpaceSpec> {
    let leaf = prop_oneof![
        range().prop_map(SpaceSpec::Interval),
        prop::collection::vec(range(), 1..3).prop_map(SpaceSpec::Box),
        (
            prop::collection::vec(label(), 1..4),
            prop::collection::vec(prop::collection::vec(label(), 0..3), 1..4)
        )
            .prop_map(|(points, neighborhoods)| SpaceSpec::Explicit {
                points,
                neighborhoods
            }),
        (prop::collection::vec(range(), 1..3), label(), label()).prop_map(
            |(bbox, tail, infinity)| {
                SpaceSpec::Compactified {
                    n: bbox.len(),
                    bbox,
                    tail,
                    infinity,
                }
            }
        ),
    ];
    leaf.prop_recursive(2, 6, 3, |inner| {
        prop::collection::vec(inner, 1..3).prop_map(SpaceSpec::Product)
    })
}

fn manifest() -> impl Strategy<Value = Manifest> {
    let map = prop_oneof![
        Just(None),
        prop::collection::vec((label(), label()), 0..4).prop_map(|t| Some(MapSpec::Table(t))),
        rule().prop_map(|r| Some(MapSpec::Rule(r))),
    ];
    (space(), map).prop_map(|(space, map)| Manifest { space, map })
}

proptest! {
    #[test]
    fn manifests_round_trip(m in manifest()) {
        let text = m.to_json();
        let parsed = Manifest::parse(&text, "round-trip").unwrap();
        prop_assert_eq!(&parsed, &m);
        prop_assert_eq!(parsed.to_json(), text);
    }
}

#[test]
fn bundled_manifests_classify() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("manifests");
    let expected = [
        ("compactified.json", "quasi_continuous"),
        ("constant-ones.json", "constant"),
        ("constant-origin.json", "closed_graph"),
        ("identity.json", "continuous"),
        ("interval-table.json", "continuous"),
        ("odd-fixed-even-up.json", "quasi_continuous"),
        ("parity-jump.json", "arbitrary"),
        ("sierpinski.json", "closed_graph"),
    ];
    for (name, tier) in expected {
        let path = dir.join(name);
        let o = ktopo(&["classify", "--format", "json", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["tier"], tier, "{name}");
    }
    for name in ["interval-0-4.json", "square-0-2.json"] {
        let path = dir.join(name);
        let o = ktopo(&[
            "enumerate",
            "--sample",
            "1000",
            "--verify",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{name}");
    }
}
