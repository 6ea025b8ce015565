use std::path::Path;
use std::process::{Command, Output};

fn qramwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qramwb")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn build_recursive_golden() {
    let o = qramwb(&["build", "--kind", "recursive", "--n", "8", "--table", "random", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("build_recursive_n8.json"));
    assert_eq!(json(&o)["report"]["t_count"], 24);
}

#[test]
fn distill_cap_golden() {
    let o = qramwb(&["bounds", "distill-cap", "--d", "4", "--n", "64"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("distill_cap.json"));
    assert!(stdout(&o).starts_with("{\"value\":0.8125,"));
}

#[test]
fn verify_golden() {
    let o = qramwb(&["verify", "--kind", "bucket_brigade", "--n", "8", "--table", "random", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("verify_bb_n8.json"));
}

#[test]
fn regime_markdown_golden() {
    let o = qramwb(&["cost", "regime", "--n", "1048576", "--d", "8", "--k", "32"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("regime.md"));
}

#[test]
fn select_swap_reports_pages() {
    let o = qramwb(&["build", "--kind", "select_swap", "--n", "64", "--page-log", "3", "--table", "random", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!((v["info"]["page_log"].as_u64(), v["info"]["page_count"].as_u64(), v["info"]["page_size"].as_u64()), (Some(3), Some(8), Some(8)));
}

#[test]
fn usage_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["build", "--kind", "recursive", "--n", "8"],
        &["build", "--kind", "recursive", "--n", "8", "--table", "random"],
        &["build", "--kind", "nonsense", "--n", "8", "--table", "random", "--seed", "1"],
        &["verify", "--kind", "unary", "--n", "512", "--table", "random", "--seed", "1"],
        &["noise", "--kind", "unary", "--n", "8", "--p", "0.5", "--trials", "1000", "--seed", "1"],
        &["bounds", "distill-cap", "--d", "0", "--n", "64"],
    ];
    for args in cases {
        let o = qramwb(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn all_builders_verify_at_n8() {
    let o = qramwb(&["verify", "--kind", "all", "--n", "8", "--table", "random", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["reports"].as_array().unwrap().len(), 7);
}

#[test]
fn mutated_circuit_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("c.json");
    let base = ["--kind", "recursive", "--n", "8", "--table", "random", "--seed", "7"];
    let mut args = vec!["build"];
    args.extend(base);
    args.extend(["--circuit-out", good.to_str().unwrap()]);
    assert_eq!(qramwb(&args).status.code(), Some(0));

    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    let layers = doc["layers"].as_array_mut().unwrap();
    layers.retain(|l| !l.as_array().unwrap().is_empty());
    layers[0].as_array_mut().unwrap().pop();
    let bad = dir.path().join("m.json");
    std::fs::write(&bad, doc.to_string()).unwrap();

    let verify = |path: &Path| {
        let mut a = vec!["verify"];
        a.extend(base);
        a.extend(["--circuit", path.to_str().unwrap()]);
        qramwb(&a)
    };
    assert_eq!(verify(&good).status.code(), Some(0));
    let o = verify(&bad);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["all_pass"], false);
}

#[test]
fn noise_sweep_csv() {
    let args = ["noise", "--kind", "bucket_brigade", "--sweep-n", "8:32", "--p", "1e-3", "--trials", "2000", "--seed", "1"];
    let o = qramwb(&args);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "builder,N,p,trials,seed,infidelity,ci_lo,ci_hi");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("bucket_brigade,8,0.001,2000,1,"));
    // progress goes to stderr only
    assert!(!o.stderr.is_empty());
    let threaded = Command::new(env!("CARGO_BIN_EXE_qramwb")).args(args).env("QRAMWB_THREADS", "1").output().unwrap();
    assert_eq!(stdout(&threaded), out);
}

#[test]
fn noise_fit_reads_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let mut csv = String::from("builder,N,p,trials,seed,infidelity,ci_lo,ci_hi\n");
    for n in [8, 16, 32, 64] {
        let y = 1e-4 * n as f64;
        csv.push_str(&format!("unary,{n},0.001,10000,1,{y},{},{}\n", y * 0.9, y * 1.1));
    }
    std::fs::write(&path, csv).unwrap();
    let o = qramwb(&["noise", "fit", "--input", path.to_str().unwrap(), "--model", "power_in_N"]);
    assert_eq!(o.status.code(), Some(0));
    let a = json(&o)["fits"][0]["fit"]["exponent"].as_f64().unwrap();
    assert!((a - 1.0).abs() < 1e-9);
}

#[test]
fn persistent_and_derangement_json() {
    let o = qramwb(&["noise", "persistent", "--n", "1024", "--p", "1e-3", "--queries", "4", "--trials", "4", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["fraction"].as_array().unwrap().len(), 4);
    let o = qramwb(&["noise", "derangement", "--m", "4", "--p", "0.01", "--trials", "1000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["trials"], 1000);
}

#[test]
fn lemma_checks_set_exit_code() {
    let o = qramwb(&["bounds", "ham-lemma", "--dim", "4", "--t", "1", "--trials", "50", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["value"], 0.0);
    // a uniform-ish probe set beats 2ℓ√d/N
    let o = qramwb(&["bounds", "tables-lemma", "--d", "4", "--n", "64", "--trials", "20", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json(&o)["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn single_line_bounds_json() {
    for args in [
        &["bounds", "circuit-count", "--w", "4", "--d", "3", "--gates", "5", "--g", "3", "--k", "2"][..],
        &["bounds", "min-gates", "--n", "1024", "--w", "64", "--d", "64", "--g", "16", "--k", "2"],
        &["bounds", "ballistic", "--n", "3", "--t", "2", "--e", "5", "--w", "8", "--table-size", "40"],
        &["bounds", "ham-floor", "--delta", "1", "--t", "1"],
        &["bounds", "diagonal", "--eps", "0.01", "--t", "0.05"],
    ] {
        let o = qramwb(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let out = stdout(&o);
        assert_eq!(out.lines().count(), 1);
        assert!(json(&o)["value"].is_number());
    }
    let o = qramwb(&["bounds", "ballistic", "--n", "3", "--t", "2", "--e", "5", "--w", "8", "--table-size", "40"]);
    assert_eq!(json(&o)["value"], 39.0);
}

#[test]
fn steps_and_transform() {
    let o = qramwb(&["cost", "steps", "--n", "1024", "--d", "4", "--p", "4096", "--model", "mesh2d_sort"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["total"], 67.0);

    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("h.mtx");
    let v = dir.path().join("v.txt");
    std::fs::write(&m, "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 1.0\n").unwrap();
    std::fs::write(&v, "1\n0\n").unwrap();
    let out = dir.path().join("out.txt");
    let o = qramwb(&[
        "cost", "transform", "--matrix", m.to_str().unwrap(), "--vector", v.to_str().unwrap(),
        "--coeffs", "0,1", "--check", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["matvecs"], 1);
    assert!(r["oracle_relative_error"].as_f64().unwrap() < 1e-12);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "0e0 0e0\n1e0 0e0\n");
}
