use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn infinialg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infinialg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn body(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&o.stdout)
        )
    })
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let fx = dir.path().join("fixtures");
        let o = infinialg(&["fixtures", "--write", fx.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", text(&o));
        Workspace { dir }
    }

    fn fixture(&self, name: &str) -> String {
        self.dir
            .path()
            .join("fixtures")
            .join(name)
            .display()
            .to_string()
    }

    fn write(&self, name: &str, contents: &str) -> String {
        let p = self.dir.path().join(name);
        std::fs::write(&p, contents).unwrap();
        p.display().to_string()
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.fixture(name)).unwrap()
    }
}

#[test]
fn validating_the_nil_square_fixture_reports_no_violations() {
    let ws = Workspace::new();
    let f = ws.fixture("affine_z4_nilsquare.json");
    let o = infinialg(&["validate", "--ialgebra", &f, "--format", "text"]);
    assert_eq!(code(&o), 0);
    assert!(text(&o).contains("0 violations"), "{}", text(&o));
    let o = infinialg(&["validate", "--ialgebra", &f]);
    assert_eq!(body(&o)["result"]["violations"], 0);
}

#[test]
fn pushout_with_a_non_reflecting_leg_is_a_domain_failure() {
    let ws = Workspace::new();
    let o = infinialg(&[
        "colimit",
        "pushout",
        "--diagram",
        &ws.fixture("pushout_nonreflecting.json"),
    ]);
    assert_eq!(code(&o), 1);
    let b = body(&o);
    assert_eq!(b["error"]["reason"], "LegNotReflecting(1)");
    assert_eq!(b["error"]["kind"], "LegNotReflecting");
}

#[test]
fn counterexample_suite_has_three_passing_entries() {
    let o = infinialg(&["fixtures", "--run", "counterexamples"]);
    assert_eq!(code(&o), 0);
    let b = body(&o);
    let entries = b["result"]["fixtures"].as_array().unwrap();
    let names: Vec<&str> = entries
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["coeq_totals", "non_reflecting_identity", "not_kernel_pair"]
    );
    assert!(entries.iter().all(|e| e["passed"] == true));
    assert_eq!(entries[0]["observed"]["set_carrier"], 3);
    assert_eq!(entries[0]["observed"]["ialg_carrier"], 2);
    assert_eq!(entries[1]["observed"]["reflects"], false);
    assert_eq!(entries[2]["observed"]["joint_reflection_failure"], true);
}

#[test]
fn fixture_expectations_reproduce() {
    let ws = Workspace::new();
    let index: Value = serde_json::from_str(&ws.read("index.json")).unwrap();
    for entry in index.as_array().unwrap() {
        let file = ws.fixture(entry["file"].as_str().unwrap());
        let expected = &entry["expected"];
        match entry["kind"].as_str().unwrap() {
            "ialgebra" => {
                let o = infinialg(&["validate", "--ialgebra", &file]);
                assert_eq!(code(&o), 0);
                assert_eq!(body(&o)["result"]["violations"], expected["violations"]);
            }
            "diagram" => {
                let o = infinialg(&["colimit", "pushout", "--diagram", &file]);
                let b = body(&o);
                if let Some(err) = expected.get("error") {
                    assert_eq!(code(&o), 1);
                    assert_eq!(&b["error"]["reason"], err);
                } else {
                    assert_eq!(code(&o), 0);
                    assert_eq!(b["result"]["apex_carrier"], expected["apex_carrier"]);
                }
            }
            "coproduct" => {
                let o = infinialg(&["colimit", "coproduct", "--diagram", &file]);
                assert_eq!(body(&o)["result"]["apex_carrier"], expected["apex_carrier"]);
            }
            "congruence" => {
                let o = infinialg(&["oracle", "kernel-pair", "--input", &file]);
                assert_eq!(code(&o), 0);
                assert_eq!(
                    body(&o)["result"]["is_kernel_pair"],
                    expected["is_kernel_pair"]
                );
                let o = infinialg(&["colimit", "quotient", "--diagram", &file]);
                let b = body(&o);
                match expected.get("error") {
                    Some(kind) => {
                        assert_eq!(code(&o), 1);
                        assert_eq!(&b["error"]["kind"], kind);
                    }
                    None => assert_eq!(b["result"]["apex_carrier"], expected["apex_carrier"]),
                }
            }
            "atlas" => {
                let mut args = vec!["glue", "--atlas", &file];
                let compare = expected
                    .get("equals")
                    .map(|e| ws.fixture(e.as_str().unwrap()));
                if let Some(c) = &compare {
                    args.extend(["--compare", c.as_str()]);
                }
                let o = infinialg(&args);
                assert_eq!(code(&o), 0, "{}", text(&o));
                let b = body(&o);
                assert_eq!(b["result"]["carrier"], expected["carrier"]);
                if compare.is_some() {
                    assert_eq!(b["result"]["identical"], true);
                }
            }
            other => panic!("unknown fixture kind {other}"),
        }
    }
}

#[test]
fn checked_in_fixtures_match_a_fresh_write() {
    let ws = Workspace::new();
    let repo: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let index: Value = serde_json::from_str(&ws.read("index.json")).unwrap();
    for entry in index.as_array().unwrap() {
        let name = entry["file"].as_str().unwrap();
        let checked_in = std::fs::read_to_string(repo.join(name)).unwrap_or_else(|_| {
            panic!("fixtures/{name} missing; run `infinialg fixtures --write fixtures`")
        });
        assert_eq!(checked_in, ws.read(name), "fixtures/{name} is stale");
    }
}

/// One invocation per library operation that the command line exposes,
/// paired with the expected exit code.
fn coverage_table(ws: &Workspace) -> Vec<(&'static str, Vec<String>, i32)> {
    let line = ws.fixture("affine_z4_nilsquare.json");
    let line_json = ws.read("affine_z4_nilsquare.json");
    let thy = ws.write("t.thy", "theory T; op f/2; op c/0; eq[2] f(x1,x2)=x1;");
    let product = ws.write(
        "product.json",
        &format!("{{\"factors\": [{line_json}, {line_json}]}}"),
    );
    let endo = ws.write(
        "endo.json",
        &format!("{{\"source\": {line_json}, \"target\": {line_json}, \"map\": [0,1,2,3]}}"),
    );
    let parallel = ws.write(
        "parallel.json",
        &format!(
            "{{\"source\": {line_json}, \"target\": {line_json}, \"maps\": [[0,1,2,3],[0,1,2,3]]}}"
        ),
    );
    let cospan = ws.write(
        "cospan.json",
        &format!(
            "{{\"f\": {{\"source\": {line_json}, \"target\": {line_json}, \"map\": [0,1,2,3]}}, \
              \"g\": {{\"source\": {line_json}, \"target\": {line_json}, \"map\": [0,1,2,3]}}}}"
        ),
    );
    let initial = ws.write("initial.json", "{\"clone\": \"abelian(2,3)\"}");
    let image = ws.write(
        "image.json",
        "{\"istructure\": {\"generate\": \"nil_square\", \"ring\": 4, \"k\": 1}, \"map\": [0,1,0,1]}",
    );
    let structure = ws.write(
        "structure.json",
        "{\"generate\": \"binary\", \"size\": 3, \"pairs\": [[0,0],[1,1],[2,2],[0,1],[1,0]]}",
    );
    let discrete = ws.write("discrete.json", "{\"generate\": \"discrete\", \"size\": 3}");
    let indiscrete = ws.write(
        "indiscrete.json",
        "{\"generate\": \"indiscrete\", \"size\": 3}",
    );
    let tuples = ws.write(
        "tuples.json",
        "{\"generate\": \"tuples\", \"size\": 3, \"tuples\": {\"2\": [[0,1]]}}",
    );
    let map = ws.write(
        "map.json",
        "{\"source\": {\"generate\": \"discrete\", \"size\": 3}, \
          \"target\": {\"generate\": \"indiscrete\", \"size\": 2}, \"map\": [0,1,1]}",
    );
    let clone_hom = ws.write(
        "clone_hom.json",
        "{\"source\": \"abelian(2,2)\", \"target\": \"abelian(2,2)\", \
          \"maps\": [[\"()\"], [\"(0)\", \"(1)\"], [\"(0,0)\", \"(0,1)\", \"(1,0)\", \"(1,1)\"]]}",
    );
    let total = ws.write("total.json", &total_z2_json());
    let closure = ws.write(
        "closure.json",
        "{\"size\": 3, \"tuples\": {\"2\": [[0,1],[1,2]]}}",
    );
    let set_coeq = ws.write(
        "set_coeq.json",
        "{\"f\": [0,0,0,0], \"g\": [0,2,0,2], \"codomain\": 4}",
    );
    let nil = ws.write("nil.json", "{\"ring\": 4, \"k\": 1}");
    let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        (
            "term_substitute",
            s(&[
                "free-clone",
                "--presentation",
                &thy,
                "--substitute",
                "f(x1,x2)",
                "--into",
                "c;f(x1,x1)",
            ]),
            0,
        ),
        ("free_clone", s(&["free-clone", "--presentation", &thy]), 0),
        (
            "validate_clone",
            s(&["validate", "--clone", "affine(Z/4,3)"]),
            0,
        ),
        ("endo_clone", s(&["validate", "--clone", "endo(2,2)"]), 0),
        (
            "clone_hom_check",
            s(&["validate", "--clone-hom", &clone_hom]),
            0,
        ),
        (
            "theory_of_clone",
            s(&["free-clone", "--theory-of", "pointed(2)"]),
            0,
        ),
        (
            "constants_algebra",
            s(&["colimit", "initial", "--diagram", &initial]),
            0,
        ),
        (
            "validate_istructure",
            s(&["validate", "--istructure", &structure]),
            0,
        ),
        ("discrete", s(&["validate", "--istructure", &discrete]), 0),
        (
            "indiscrete",
            s(&["validate", "--istructure", &indiscrete]),
            0,
        ),
        (
            "generate_from_binary",
            s(&["validate", "--istructure", &structure]),
            0,
        ),
        (
            "generate_from_tuples",
            s(&["validate", "--istructure", &tuples]),
            0,
        ),
        (
            "nil_square",
            s(&["oracle", "nil-square", "--input", &nil]),
            0,
        ),
        ("is_i_morphism", s(&["validate", "--map", &map]), 0),
        (
            "image_istructure",
            s(&["colimit", "image", "--diagram", &image]),
            0,
        ),
        (
            "validate_ialgebra",
            s(&["validate", "--ialgebra", &line]),
            0,
        ),
        ("total_algebra", s(&["validate", "--total", &total]), 0),
        ("is_ihom", s(&["validate", "--hom", &endo]), 0),
        (
            "initial_object",
            s(&["colimit", "initial", "--diagram", &initial]),
            0,
        ),
        (
            "product",
            s(&["limit", "product", "--diagram", &product]),
            0,
        ),
        (
            "equalizer",
            s(&["limit", "equalizer", "--diagram", &parallel]),
            0,
        ),
        (
            "kernel_pair",
            s(&["limit", "kernel-pair", "--diagram", &endo]),
            0,
        ),
        (
            "wide_pushout",
            s(&[
                "colimit",
                "pushout",
                "--diagram",
                &ws.fixture("pushout_wedge.json"),
            ]),
            0,
        ),
        (
            "coproduct",
            s(&[
                "colimit",
                "coproduct",
                "--diagram",
                &ws.fixture("coproduct_affine_z3.json"),
            ]),
            0,
        ),
        (
            "coequalizer_congruence",
            s(&[
                "colimit",
                "quotient",
                "--diagram",
                &ws.fixture("congruence_z4_mod2.json"),
            ]),
            0,
        ),
        (
            "coequalizer_reflecting",
            s(&["colimit", "coequalizer", "--diagram", &parallel]),
            0,
        ),
        (
            "is_kernel_pair",
            s(&[
                "oracle",
                "kernel-pair",
                "--input",
                &ws.fixture("congruence_z4_mod2.json"),
            ]),
            0,
        ),
        (
            "is_regular_epi",
            s(&["limit", "regular-epi", "--diagram", &endo]),
            0,
        ),
        (
            "pullback",
            s(&["limit", "pullback", "--diagram", &cospan]),
            0,
        ),
        (
            "glue_atlas",
            s(&["glue", "--atlas", &ws.fixture("atlas_z4.json")]),
            0,
        ),
        (
            "affine_clone",
            s(&["free-clone", "--gallery", "affine(Z/3,2)"]),
            0,
        ),
        (
            "abelian_exp_clone",
            s(&["free-clone", "--gallery", "abelian(4,1)"]),
            0,
        ),
        (
            "counterexample_suite",
            s(&["fixtures", "--run", "counterexamples"]),
            0,
        ),
        (
            "brute_istructure_closure",
            s(&["oracle", "closure", "--input", &closure]),
            0,
        ),
        (
            "brute_set_coequalizer",
            s(&["oracle", "set-coequalizer", "--input", &set_coeq]),
            0,
        ),
        (
            "brute_iso_search",
            s(&["oracle", "iso", "--input", &line, "--other", &line]),
            0,
        ),
        (
            "round_trip",
            s(&["oracle", "round-trip", "--clone", "pointed(2)"]),
            0,
        ),
    ]
}

fn total_z2_json() -> String {
    // Z/2 under abelian(2,1): the coefficient tuple (a) acts as x ↦ a·x,
    // () is the constant 0.
    let mut action = vec![r#"{"n":0,"op":"()","tuple":[],"result":0}"#.to_string()];
    for x in 0..2 {
        for a in 0..2 {
            action.push(format!(
                r#"{{"n":1,"op":"({a})","tuple":[{x}],"result":{}}}"#,
                a * x
            ));
        }
    }
    format!(
        r#"{{"clone": "abelian(2,1)", "carrier": ["0","1"], "action": [{}]}}"#,
        action.join(",")
    )
}

#[test]
fn every_library_operation_is_reachable() {
    let ws = Workspace::new();
    let operations = [
        "term_substitute",
        "free_clone",
        "validate_clone",
        "endo_clone",
        "clone_hom_check",
        "theory_of_clone",
        "constants_algebra",
        "validate_istructure",
        "discrete",
        "indiscrete",
        "generate_from_binary",
        "generate_from_tuples",
        "nil_square",
        "is_i_morphism",
        "image_istructure",
        "validate_ialgebra",
        "total_algebra",
        "is_ihom",
        "initial_object",
        "product",
        "equalizer",
        "kernel_pair",
        "wide_pushout",
        "coproduct",
        "coequalizer_congruence",
        "is_kernel_pair",
        "is_regular_epi",
        "pullback",
        "glue_atlas",
        "affine_clone",
        "abelian_exp_clone",
        "counterexample_suite",
        "brute_istructure_closure",
        "brute_set_coequalizer",
    ];
    let table = coverage_table(&ws);
    for op in operations {
        assert!(
            table.iter().any(|(name, _, _)| *name == op),
            "{op} has no command"
        );
    }
    for (name, args, expected) in &table {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = infinialg(&args);
        assert_eq!(
            code(&o),
            *expected,
            "{name}: {args:?}\n{}\n{}",
            text(&o),
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(body(&o)["status"], "ok", "{name}");
    }
}

#[test]
fn reports_are_deterministic_outside_meta() {
    let ws = Workspace::new();
    for args in [
        vec![
            "colimit",
            "pushout",
            "--diagram",
            &ws.fixture("pushout_wedge.json"),
        ],
        vec!["fixtures", "--run", "counterexamples"],
        vec!["glue", "--atlas", &ws.fixture("atlas_three_charts.json")],
    ] {
        let mut a = body(&infinialg(&args));
        let mut b = body(&infinialg(&args));
        a.as_object_mut().unwrap().remove("meta");
        b.as_object_mut().unwrap().remove("meta");
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn meta_records_the_seed_and_flags() {
    let o = Command::new(env!("CARGO_BIN_EXE_infinialg"))
        .args(["fixtures", "--run", "counterexamples", "--n-max", "2"])
        .env("INFINIALG_SEED", "0x2a")
        .output()
        .unwrap();
    let meta = &body(&o)["meta"];
    assert_eq!(meta["seed"], 42);
    assert_eq!(meta["n_max"], 2);
    assert_eq!(meta["command"], "fixtures");
}

#[test]
fn n_max_flag_truncates_generated_structures() {
    let ws = Workspace::new();
    let s = ws.write(
        "s.json",
        "{\"generate\": \"nil_square\", \"ring\": 4, \"k\": 1}",
    );
    let o = infinialg(&["validate", "--istructure", &s, "--n-max", "2"]);
    assert_eq!(
        body(&o)["result"]["block_sizes"],
        serde_json::json!([1, 4, 8])
    );
    let o = infinialg(&["validate", "--istructure", &s]);
    assert_eq!(
        body(&o)["result"]["block_sizes"],
        serde_json::json!([1, 4, 8, 16])
    );
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let ws = Workspace::new();
    let out = ws.dir.path().join("report.txt");
    let o = infinialg(&[
        "validate",
        "--ialgebra",
        &ws.fixture("affine_z4_nilsquare.json"),
        "--format",
        "text",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(out)
        .unwrap()
        .contains("0 violations"));
}

#[test]
fn violations_and_rejections_exit_with_one() {
    let ws = Workspace::new();
    let line = ws.read("affine_z4_nilsquare.json");
    let not_hom = ws.write(
        "nothom.json",
        &format!("{{\"source\": {line}, \"target\": {line}, \"map\": [0,0,0,1]}}"),
    );
    let o = infinialg(&["validate", "--hom", &not_hom]);
    assert_eq!(code(&o), 1);
    assert_eq!(body(&o)["result"]["accepted"], false);

    let broken = ws.write(
        "broken.json",
        "{\"carrier\": [\"0\",\"1\",\"2\"], \"n_max\": 3, \"nbhd\": {\"2\": [[0,1]]}}",
    );
    let o = infinialg(&["validate", "--istructure", &broken]);
    assert_eq!(code(&o), 1);
    assert!(body(&o)["result"]["violations"].as_u64().unwrap() > 0);

    let q = infinialg(&[
        "colimit",
        "quotient",
        "--diagram",
        &ws.fixture("congruence_discrete_z3.json"),
    ]);
    assert_eq!(code(&q), 1);
    assert_eq!(body(&q)["error"]["kind"], "JointReflectionFailure");
}

#[test]
fn malformed_input_exits_with_two_and_never_panics() {
    let ws = Workspace::new();
    let line = ws.read("affine_z4_nilsquare.json");
    let cases: Vec<(&str, String)> = vec![
        ("garbage", "not json at all".into()),
        ("empty", "{}".into()),
        ("wrong_type", "[1, 2, 3]".into()),
        ("missing_action", "{\"clone\": \"affine(Z/4,3)\", \"istructure\": {\"carrier\": [\"0\"], \"n_max\": 3}}".into()),
        ("unknown_clone", "{\"clone\": \"nonsense(1)\", \"istructure\": {\"carrier\": [\"0\"], \"n_max\": 3}, \"action\": []}".into()),
        ("tuple_out_of_range", "{\"carrier\": [\"0\"], \"n_max\": 3, \"nbhd\": {\"2\": [[0,5]]}}".into()),
        ("map_out_of_range", format!("{{\"source\": {line}, \"target\": {line}, \"map\": [0,1,2,9]}}")),
        ("map_too_short", format!("{{\"source\": {line}, \"target\": {line}, \"map\": [0]}}")),
        ("span_without_legs", format!("{{\"source\": {line}}}")),
    ];
    let verbs: [&[&str]; 8] = [
        &["validate", "--ialgebra"],
        &["validate", "--istructure"],
        &["validate", "--hom"],
        &["validate", "--map"],
        &["colimit", "pushout", "--diagram"],
        &["limit", "kernel-pair", "--diagram"],
        &["glue", "--atlas"],
        &["oracle", "closure", "--input"],
    ];
    for (name, contents) in &cases {
        let path = ws.write(&format!("{name}.json"), contents);
        for verb in verbs {
            let mut args = verb.to_vec();
            args.push(&path);
            let o = infinialg(&args);
            let c = code(&o);
            assert!(
                c == 1 || c == 2,
                "{name} via {verb:?} exited {c}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
            assert_eq!(body(&o)["status"], "error", "{name} via {verb:?}");
        }
    }
    let thy = ws.write("bad.thy", "theory T; op f/2; eq[1] f(x1)=x1;");
    let o = infinialg(&["free-clone", "--presentation", &thy]);
    assert_eq!(code(&o), 2);
    assert_eq!(body(&o)["error"]["kind"], "Arity");
    assert_eq!(code(&infinialg(&["no-such-verb"])), 2);
    assert_eq!(code(&infinialg(&["limit", "product"])), 2);
    assert_eq!(code(&infinialg(&["validate", "--clone", "affine(Z/4"])), 2);
    assert_eq!(
        code(&infinialg(&[
            "--budget",
            "0",
            "fixtures",
            "--run",
            "counterexamples"
        ])),
        2
    );
}

#[test]
fn budget_flag_bounds_brute_force_work() {
    let o = infinialg(&[
        "--budget",
        "10",
        "oracle",
        "round-trip",
        "--clone",
        "pointed(2)",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(body(&o)["error"]["kind"], "BudgetExceeded");
}
