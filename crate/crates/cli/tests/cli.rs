use ncspec_cli::workspace::{Workspace, BUILTIN};
use ncspec_cli::{run, Invocation};
use serde_json::Value;

fn ncspec(args: &[&str]) -> Invocation {
    run(std::iter::once("ncspec").chain(args.iter().copied()))
}

fn report(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--export", "json"]);
    let inv = ncspec(&a);
    assert!(inv.stderr.is_empty(), "{}", inv.stderr);
    let v: Value = serde_json::from_str(&inv.stdout).unwrap();
    assert_eq!(v["schema"], "ncspec.report/v1");
    (inv.code, v)
}

fn labels(v: &Value) -> Vec<String> {
    v["result"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["label"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn verify_epi_exit_codes() {
    assert_eq!(ncspec(&["verify-epi", "@ka2", "P2"]).code, 0);
    assert_eq!(ncspec(&["verify-epi", "@ka2", "id"]).code, 0);
    let (code, v) = report(&["verify-epi", "@dual", "pr"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["result"]["certificate"]["tor_dims"][1], 1);
}

#[test]
fn ka2_spectra() {
    let (code, fine) = report(&["spectrum", "@ka2", "kA2", "--topology", "fine"]);
    assert_eq!(code, 0);
    assert_eq!(labels(&fine).len(), 3);
    assert_eq!(fine["result"]["discrete"], true);
    assert_eq!(fine["result"]["ideals"].as_array().unwrap().len(), 8);

    let (_, triv) = report(&["spectrum", "@ka2", "kA2", "--topology", "trivial"]);
    let pts = triv["result"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 4);
    assert_eq!(pts.iter().filter(|p| p["generic"] == true).count(), 3);
    assert_eq!(pts.iter().filter(|p| p["closed"] == true).count(), 1);
    assert_eq!(triv["result"]["ideals"].as_array().unwrap().len(), 9);
}

#[test]
fn valuation_spectrum() {
    let (code, v) = report(&["spectrum", "@valuation", "valuation"]);
    assert_eq!(code, 0);
    assert_eq!(labels(&v), ["Q", "k", "R"]);
    assert_eq!(v["result"]["specializations"].as_array().unwrap().len(), 2);
}

#[test]
fn descend_reports_both_checks() {
    let (code, v) = report(&["descend", "@ka2", "kA2", "--cover", "P1", "--cover", "P2", "--cover", "S2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["sheaf"]["pass"], false);
    assert_eq!(v["result"]["descent_pass"], true);
    assert_eq!(v["result"]["tor_dependent_pairs"].as_array().unwrap().len(), 1);

    let (code, v) = report(&["descend", "@ka2", "kA2", "--cover", "kA2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["sheaf"]["pass"], true);

    let (code, v) = report(&["descend", "@kk", "k2", "--cover", "pr1", "--cover", "pr2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["sheaf"]["pass"], true);
    assert_eq!(v["result"]["descent_pass"], true);
}

#[test]
fn descend_rejects_a_non_cover() {
    let inv = ncspec(&["descend", "@ka2", "kA2", "--cover", "P1", "--cover", "S2"]);
    assert_eq!(inv.code, 3);
    assert!(inv.stderr.contains("invalid cover"));
}

#[test]
fn diagonal_map_hits_the_specialization_point() {
    let (code, v) = report(&["map", "@kk", "diag"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["map_exists"], true);
    let (_, s) = report(&["spectrum", "@kk", "k2", "--topology", "trivial"]);
    let special: Vec<&str> = s["result"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["generic"] == false)
        .map(|p| p["label"].as_str().unwrap())
        .collect();
    assert_eq!(special.len(), 1);
    assert_eq!(v["result"]["point_map"][0]["image"], special[0]);

    let (code, v) = report(&["map", "@kk", "diag", "--topology", "fine"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["map_exists"], false);
    assert!(!v["result"]["diagnostics"].as_array().unwrap().is_empty());
    assert_eq!(v["result"]["correspondence"][0]["related"].as_array().unwrap().len(), 2);
}

#[test]
fn projection_lands_on_an_open_point() {
    let (_, v) = report(&["map", "@kk", "pr1"]);
    let image = v["result"]["point_map"][0]["image"].as_str().unwrap().to_string();
    let (_, s) = report(&["spectrum", "@kk", "k2", "--topology", "trivial"]);
    let opens = s["result"]["opens"].as_array().unwrap();
    assert!(opens.iter().any(|o| o["points"] == serde_json::json!([image])));
}

#[test]
fn identity_map_is_the_identity() {
    let (_, v) = report(&["map", "@kk", "id", "--topology", "trivial"]);
    for p in v["result"]["point_map"].as_array().unwrap() {
        assert_eq!(p["point"], p["image"]);
    }
}

#[test]
fn builtin_workspaces_round_trip() {
    for (name, text) in BUILTIN {
        let ws = Workspace::parse(text).unwrap();
        let once = ws.to_toml().unwrap();
        let again = Workspace::parse(&once).unwrap();
        assert_eq!(again, ws, "{name}");
        assert_eq!(again.to_toml().unwrap(), once, "{name}");
    }
}

#[test]
fn exports_are_deterministic() {
    for args in [
        ["lattice", "@ka2", "kA2"].as_slice(),
        ["spectrum", "@ka2", "kA2"].as_slice(),
        ["map", "@kk", "diag"].as_slice(),
    ] {
        for export in ["json", "dot"] {
            let mut a = args.to_vec();
            a.extend(["--export", export]);
            let x = ncspec(&a);
            let y = ncspec(&a);
            assert_eq!(x.code, 0);
            assert_eq!(x.stdout, y.stdout);
        }
    }
}

#[test]
fn lattice_dot_has_the_diamond() {
    let inv = ncspec(&["lattice", "@ka2", "kA2", "--export", "dot"]);
    assert_eq!(inv.code, 0);
    assert!(inv.stdout.starts_with("digraph \"kA2\" {"));
    assert_eq!(inv.stdout.matches(" -> ").count(), 6);
}

#[test]
fn workspace_files_with_out() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("w.toml");
    std::fs::write(
        &ws,
        r#"
field = "fp:5"

[[algebra]]
name = "A"
kind = "structure"
labels = ["1", "x"]
unit = "1"
table = [["1", "x"], ["x", "x"]]

[[algebra]]
name = "k"
kind = "ground"

[[morphism]]
name = "f"
kind = "images"
source = "A"
target = "k"
images = ["1", "1"]
"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let inv = ncspec(&["verify-epi", ws.to_str().unwrap(), "f", "--export", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(inv.code, 0, "{}", inv.stderr);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["valid"], true);
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("w.toml");
    std::fs::write(
        &ws,
        "[[algebra]]\nname = \"A\"\nkind = \"product\"\nfactors = [\"B\"]\n\n[[algebra]]\nname = \"B\"\nkind = \"quotient\"\nof = \"A\"\nrelations = []\n",
    )
    .unwrap();
    let inv = ncspec(&["lattice", ws.to_str().unwrap(), "A"]);
    assert_eq!(inv.code, 3);
    assert!(inv.stderr.contains("cycle"), "{}", inv.stderr);

    std::fs::write(&ws, "[[algebra]]\nname = \"A\"\nkind = \"matrix\"\n").unwrap();
    let inv = ncspec(&["lattice", ws.to_str().unwrap(), "A"]);
    assert_eq!(inv.code, 3);
    assert!(inv.stderr.contains("line"), "{}", inv.stderr);

    assert_eq!(ncspec(&["verify-epi", "@ka2", "missing"]).code, 3);
    assert_eq!(ncspec(&["frobnicate"]).code, 3);
    assert_eq!(ncspec(&["spectrum", "@ka2", "kA2", "--field", "fp:4"]).code, 3);
}

#[test]
fn selftest_passes() {
    let inv = ncspec(&["selftest"]);
    assert_eq!(inv.code, 0, "{}", inv.stdout);
    assert!(!inv.stdout.contains("FAIL"));
}

#[test]
fn fixtures_print_workspaces() {
    let inv = ncspec(&["fixtures"]);
    assert_eq!(inv.code, 0);
    assert!(inv.stdout.contains("@ka2"));
    let inv = ncspec(&["fixtures", "ka2"]);
    assert!(Workspace::parse(&inv.stdout.replace("status: pass\n", "")).is_ok());
}

#[test]
fn prime_field_override() {
    let (code, v) = report(&["spectrum", "@ka2", "kA2", "--field", "fp:7", "--topology", "trivial"]);
    assert_eq!(code, 0);
    assert_eq!(labels(&v).len(), 4);
}
