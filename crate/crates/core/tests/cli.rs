use std::path::Path;
use std::process::{Command, Output};

use chemdyn::polysys::PolySystem;

fn chemdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chemdyn")).args(args).env("CHEMDYN_THREADS", "2").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// In-process run, returning (code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = chemdyn::cli::run(std::iter::once("chemdyn").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn exit_codes() {
    assert_eq!(chemdyn(&["check", "--id", "wr"]).status.code(), Some(0));
    let o = chemdyn(&["check", "--id", "rossler"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("chemical: no"));
    assert!(stdout(&o).contains("violation: equation 2: -x"));
    assert_eq!(chemdyn(&["check", "--id", "nope"]).status.code(), Some(2));
    assert_eq!(chemdyn(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(chemdyn(&["check"]).status.code(), Some(2));
    assert_eq!(chemdyn(&["--help"]).status.code(), Some(0));
    // parameters on a non-parametric entry
    assert_eq!(run(&["check", "--id", "rossler", "--eps", "1/10"]).0, 2);
    // no network for a non-chemical system
    assert_eq!(run(&["crn", "--id", "rossler"]).0, 1);
}

#[test]
fn list_covers_the_catalog() {
    let (code, out, _) = run(&["list", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), chemdyn::catalog::ids().len());
}

#[test]
fn transform_reproduces_the_stored_system() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for id in ["cds-one-wing", "cds-two-wing", "cds-hidden", "chemical-rossler"] {
        let (code, out, err) = run(&["transform", "--id", id, "--out", d]);
        assert_eq!(code, 0, "{id}: {err}");
        assert!(out.contains(" chemical\n"), "{out}");
        let rescaled = PolySystem::read(&dir.path().join("rescaled.json")).unwrap();
        let (_, shown, _) = run(&["show", "--id", id]);
        let json: String = shown.lines().take_while(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
        assert_eq!(PolySystem::from_json(&json).unwrap(), rescaled, "{id}");
        let csv = std::fs::read_to_string(dir.path().join("constraints.csv")).unwrap();
        assert!(csv.lines().count() > 1);
    }
}

#[test]
fn universal_construction_labels_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, err) =
        run(&["transform", "--id", "rossler", "--universal", "--a", "1,3,1", "--eps", "1/10", "--mu", "1/100", "--out", d]);
    assert_eq!(code, 0, "{err}");
    let rescaled = dir.path().join("rescaled.json");
    let label = PolySystem::read(&rescaled).unwrap().complexity().label();
    assert!(out.contains(&format!("result: {label} chemical")), "{out}");
    let (code, check, _) = run(&["check", "--file", rescaled.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(check.contains(&format!("complexity: {label}")));
}

#[test]
fn infeasible_plan_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let (_, plan, _) = run(&["transform", "--id", "cds-one-wing", "--emit-plan"]);
    let mut v: serde_json::Value = serde_json::from_str(&plan).unwrap();
    v["a"][1] = "1".into();
    let path = dir.path().join("plan.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let o = chemdyn(&["transform", "--plan", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("infeasible plan"), "{}", stderr(&o));
}

#[test]
fn reactions_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for fused in [false, true] {
        let mut args = vec!["crn", "--id", "cds-two-wing"];
        if fused {
            args.push("--fused");
        }
        let (code, net, _) = run(&args);
        assert_eq!(code, 0);
        assert!(net.starts_with(if fused { "# fused CRN (" } else { "# canonical CRN (" }));
        let path = dir.path().join("net.crn");
        std::fs::write(&path, &net).unwrap();
        let (code, json, err) = run(&["crn", "--reactions", path.to_str().unwrap(), "--species", "X,Y,Z"]);
        assert_eq!(code, 0, "{err}");
        let back = PolySystem::from_json(&json).unwrap();
        let original = chemdyn::catalog::instantiate_default("cds-two-wing").unwrap();
        assert_eq!(back.eqs(), original.eqs());
    }
}

#[test]
fn show_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&["show", "--id", "cds-hidden", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    for f in ["system.json", "canonical.crn", "fused.crn"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn simulate_writes_full_precision_csv() {
    let (code, out, err) = run(&["simulate", "--id", "rossler", "--t-end", "1", "--samples", "3"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,x1,x2,x3"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 5.0, -5.0, 5.0]);
    assert_eq!(lines.count(), 2);
    assert!(err.starts_with("3 samples"));
    assert!(out.lines().nth(1).unwrap().contains("5.0000000000000000e0"));

    // explicit initial condition with negative entries
    let (code, out, _) = run(&["simulate", "--id", "rossler", "--ic", "-1,-2,-3", "--t-end", "1", "--samples", "2"]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,-1.0"));
}

#[test]
fn simulate_reports_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("blowup.json");
    PolySystem::parse(&["x"], &["x^2"]).unwrap().write(&path).unwrap();
    let (code, _, err) = run(&["simulate", "--file", path.to_str().unwrap(), "--ic", "1", "--t-end", "2", "--samples", "3"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn lce_summary_routing() {
    let (code, out, err) = run(&["lce", "--id", "rossler", "--t-end", "5"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("t,lambda1,lambda2,lambda3\n"));
    assert!(err.starts_with("t=") && err.contains("lambdas=["));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lce.csv");
    let (code, out, _) = run(&["lce", "--id", "rossler", "--t-end", "5", "--tau", "0.5", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("t=") && out.contains("tau=0.5"));
    assert!(path.exists());
}

fn read_dir(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read_to_string(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn quick_reproduction_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o = chemdyn(&["reproduce", "fig3", "--quick", "--out", a.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_chemdyn"))
        .args(["reproduce", "fig3", "--quick", "--out", b.path().to_str().unwrap()])
        .env("CHEMDYN_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let fa = read_dir(&a.path().join("fig3"));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "cds_lce.csv",
            "cds_trajectory.csv",
            "ds_equilibria.csv",
            "ds_lce.csv",
            "ds_trajectory.csv",
            "manifest.json",
            "perturbed_lce.csv"
        ]
    );
    assert_eq!(fa, read_dir(&b.path().join("fig3")));
    let m: serde_json::Value = serde_json::from_str(&fa[5].1).unwrap();
    assert_eq!(m["files"].as_array().unwrap().len(), 6);
}

#[test]
fn unknown_figure() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(chemdyn(&["reproduce", "fig9", "--out", dir.path().to_str().unwrap()]).status.code(), Some(2));
}
