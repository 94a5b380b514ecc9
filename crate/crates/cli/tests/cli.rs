//! End-to-end runs of the binary: golden text output, JSON reports and
//! exit codes. Set `UPDATE_GOLDEN=1` to rewrite the golden files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use fquot_lab::report::*;

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fquot-lab"))
        .args(args)
        .current_dir(workspace())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const GOLDEN: &[(&str, &[&str], i32)] = &[
    ("validate_z6", &["validate", "fixtures/z6.json"], 0),
    ("validate_graph4", &["validate", "fixtures/graph4.json"], 0),
    ("con_z6", &["con", "fixtures/z6.json"], 0),
    ("con_p3", &["con", "fixtures/p3.json"], 0),
    ("con_flag", &["con", "fixtures/flag.json"], 0),
    ("con_graph4", &["con", "fixtures/graph4.json"], 0),
    ("con_mi2", &["con", "fixtures/mi2.json"], 0),
    (
        "quotient_z6_parity",
        &["quotient", "fixtures/z6.json", "--by", "0 2 4 | 1 3 5"],
        0,
    ),
    (
        "quotient_z6_not_congruence",
        &["quotient", "fixtures/z6.json", "--by", "0 1"],
        1,
    ),
    (
        "hom_check_z6_z2",
        &["hom", "check", "fixtures/z6.json", "fixtures/z2.json", "--map", "0,1,0,1,0,1"],
        0,
    ),
    (
        "hom_check_z6_z2_bad",
        &["hom", "check", "fixtures/z6.json", "fixtures/z2.json", "--map", "0,1,1,0,1,1"],
        1,
    ),
    (
        "hom_enum_z6_z3",
        &["hom", "enum", "fixtures/z6.json", "fixtures/z3.json", "--filter", "surjective"],
        0,
    ),
    ("iso_theorems_z6", &["iso-theorems", "fixtures/z6.json"], 0),
    ("iso_theorems_graph4", &["iso-theorems", "fixtures/graph4.json"], 0),
    (
        "eval_flag_forall",
        &["eval", "fixtures/flag.json", "--formula", "forall x. R(x)"],
        1,
    ),
    (
        "eval_flag_exists",
        &["eval", "fixtures/flag.json", "--formula", "exists x. R(x)"],
        0,
    ),
    (
        "eval_z6_assign",
        &["eval", "fixtures/z6.json", "--formula", "add(x, x) = y", "--assign", "x=2", "--assign", "y=4"],
        0,
    ),
    ("pcnf_mi_monoid", &["pcnf", "fixtures/mi-monoid.theory.json"], 0),
    (
        "pcnf_formula",
        &["pcnf", "fixtures/flag.json", "--formula", "forall x. (R(x) -> exists y. ~R(y))"],
        0,
    ),
    (
        "preserve_z6_unsafe",
        &["preserve", "fixtures/z6.json", "--formula", "exists x. ~(x = zero)"],
        0,
    ),
    (
        "preserve_z6_abelian",
        &["preserve", "fixtures/z6.json", "--theory", "fixtures/abelian-group.theory.json"],
        0,
    ),
    (
        "preserve_mi2",
        &["preserve", "fixtures/mi2.json", "--theory", "fixtures/mi-monoid.theory.json"],
        0,
    ),
    (
        "preserve_premise_false",
        &["preserve", "fixtures/flag.json", "--formula", "forall x. R(x)"],
        1,
    ),
    ("fquot_z6", &["fquot", "fixtures/z6.json"], 0),
    ("fquot_p3", &["fquot", "fixtures/p3.json"], 0),
    ("fquot_graph4", &["fquot", "fixtures/graph4.json"], 0),
    (
        "free_check_pointed",
        &["free-check", "fixtures/p3.json", "--x", "1 2", "--all-up-to", "3"],
        0,
    ),
    (
        "free_check_padded",
        &["free-check", "fixtures/pointed4.json", "--x", "1 2", "--all-up-to", "3"],
        1,
    ),
    (
        "free_check_flag",
        &["free-check", "fixtures/flag.json", "--x", "0", "--all-up-to", "2"],
        1,
    ),
];

#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut failures = Vec::new();
    for (name, args, code) in GOLDEN {
        let o = run(args);
        let text = if o.status.code() == Some(2) {
            stderr(&o)
        } else {
            stdout(&o)
        };
        let path = dir.join(format!("{name}.txt"));
        if update {
            std::fs::write(&path, &text).unwrap();
        } else {
            let want = std::fs::read_to_string(&path)
                .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
            if want != text {
                failures.push(format!("{name}: output differs\n--- want\n{want}--- got\n{text}"));
            }
        }
        if o.status.code() != Some(*code) {
            failures.push(format!("{name}: exit {:?}, want {code}", o.status.code()));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

/// Parses the `--json` output as `R`, then checks that serializing `R`
/// gives back the same document.
fn round_trip<R: Serialize + DeserializeOwned>(args: &[&str], code: i32) -> R {
    let mut full = args.to_vec();
    full.push("--json");
    let o = run(&full);
    assert_eq!(o.status.code(), Some(code), "{}", stderr(&o));
    let raw: Value = serde_json::from_str(&stdout(&o)).expect("valid JSON");
    let report: R = serde_json::from_value(raw.clone()).expect("matches the report schema");
    assert_eq!(serde_json::to_value(&report).unwrap(), raw);
    report
}

#[test]
fn json_reports_round_trip() {
    let r: ValidateReport = round_trip(&["validate", "fixtures/mi2.json"], 0);
    assert_eq!(r.size, Some(2));

    let r: ConReport = round_trip(&["con", "fixtures/z6.json"], 0);
    assert_eq!(r.congruences.len(), 4);
    assert_eq!(r.covers, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);

    let r: QuotientReport =
        round_trip(&["quotient", "fixtures/z6.json", "--by", "0 3 | 1 4 | 2 5"], 0);
    assert_eq!(r.size, Some(3));
    let q = fquot_core::json::structure_from_json(r.quotient.as_ref().unwrap()).unwrap();
    assert_eq!(q.size(), 3);

    let r: HomCheckReport = round_trip(
        &["hom", "check", "fixtures/z6.json", "fixtures/z3.json", "--map", "0,1,2,0,1,2"],
        0,
    );
    assert!(r.strong_hom && r.surjective && !r.injective);

    let r: HomEnumReport =
        round_trip(&["hom", "enum", "fixtures/z6.json", "fixtures/z6.json"], 0);
    assert_eq!(r.count, 6);

    let r: IsoTheoremsReport = round_trip(&["iso-theorems", "fixtures/p3.json"], 0);
    assert_eq!(r.total_defects, 0);

    let r: EvalReport = round_trip(
        &["eval", "fixtures/z6.json", "--formula", "add(x, x) = zero", "--assign", "x=3"],
        0,
    );
    assert!(r.value);

    let r: PcnfReport = round_trip(&["pcnf", "fixtures/abelian-group.theory.json"], 0);
    assert!(r.formulas.iter().all(|e| e.quotient_safe));

    let r: PreserveReport = round_trip(
        &["preserve", "fixtures/z6.json", "--formula", "exists x. ~(x = zero)"],
        0,
    );
    assert_eq!(r.formulas[0].counterexamples, 1);
    assert_eq!(r.total_defects, 0);

    let r: FquotReport = round_trip(&["fquot", "fixtures/mi2.json"], 0);
    assert!(r.agrees);

    let r: FreeCheckReport = round_trip(
        &["free-check", "fixtures/pointed4.json", "--x", "1 2", "--all-up-to", "3"],
        1,
    );
    assert_eq!(r.witness.unwrap().extensions, 2);
}

#[test]
fn quotient_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let o = run(&[
        "quotient",
        "fixtures/z6.json",
        "--by",
        "0 2 4 | 1 3 5",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let q = fquot_core::json::structure_from_str(&text).unwrap();
    assert_eq!(q.size(), 2);
    assert_eq!(q.elem_names().unwrap(), ["[0 2 4]", "[1 3 5]"]);
    let o = run(&["validate", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("con.dot");
    let o = run(&["con", "fixtures/p3.json", "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("->").count(), 6);

    let dot = dir.path().join("quo.dot");
    let o = run(&["fquot", "fixtures/z6.json", "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.contains("ker = "));
    assert_eq!(text.matches("->").count(), 4);
}

#[test]
fn usage_and_io_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &[],
        &["frobnicate"],
        &["con"],
        &["con", "fixtures/missing.json"],
        &["con", "fixtures/z6.json", "--max-universe", "0"],
        &["con", "fixtures/z6.json", "--max-universe", "5"],
        &["quotient", "fixtures/z6.json", "--by", "0 9"],
        &["hom", "check", "fixtures/z6.json", "fixtures/z2.json", "--map", "0,1"],
        &["hom", "enum", "fixtures/z6.json", "fixtures/z6.json", "--max-search", "10"],
        &["eval", "fixtures/flag.json", "--formula", "forall x. R(x"],
        &["eval", "fixtures/z6.json", "--formula", "x = zero"],
        &["preserve", "fixtures/z6.json"],
        &["preserve", "fixtures/z6.json", "--formula", "x = zero"],
        &["preserve", "fixtures/flag.json", "--theory", "fixtures/mi-monoid.theory.json"],
        &["pcnf", "fixtures/z6.json"],
        &["free-check", "fixtures/z6.json", "--x", "1", "--all-up-to", "4"],
        &["free-check", "fixtures/flag.json", "--x", "0", "--targets", "fixtures/z2.json"],
        &["validate", "fixtures/z6.json", "--dot", "x.dot"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty(), "{args:?} printed nothing to stderr");
    }
}

#[test]
fn invalid_structure_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"signature": {"functions": [{"name": "f", "arity": 1}], "relations": []},
            "universe": 2, "functions": {"f": [0, 5]}, "relations": {}}"#,
    )
    .unwrap();
    let o = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("invalid"));
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("free-check"));
}
