use std::io::Write;
use std::process::{Command, Output};

fn beltrami(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beltrami"))
        .args(args)
        .env_remove("BELTRAMI_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn close(v: &serde_json::Value, want: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() < 1e-9
}

#[test]
fn polar_metric_as_json() {
    let out = beltrami(&["metric", "--builtin", "polar2", "--point", "2,0.5236", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(close(&v["g"][0][0], 1.0) && close(&v["g"][0][1], 0.0));
    assert!(close(&v["g"][1][1], 4.0) && close(&v["g_inv"][1][1], 0.25));
}

#[test]
fn non_terminal_output_defaults_to_json() {
    let out = beltrami(&["metric", "--builtin", "euclidean", "--dim", "3", "--point", "1,1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for i in 0..3 {
        for k in 0..3 {
            assert!(close(&v["g"][i][k], if i == k { 1.0 } else { 0.0 }));
        }
    }
}

#[test]
fn out_of_domain_point_exits_3() {
    let out = beltrami(&["metric", "--builtin", "polar2", "--point", "0,-1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
}

#[test]
fn polar_christoffel_rows() {
    let out = beltrami(&["christoffel", "--builtin", "polar2", "--point", "2,1.0", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["i,k,l,value", "r,theta,theta,-2", "theta,r,theta,0.5", "theta,theta,r,0.5"]);
}

#[test]
fn euclidean_christoffel_table_is_empty() {
    let out = beltrami(&["christoffel", "--builtin", "euclidean", "--dim", "2", "--point", "1,2", "--format", "json"]);
    assert_eq!(json(&out)["entries"].as_array().unwrap().len(), 0);
}

#[test]
fn missing_point_is_a_usage_error() {
    let out = beltrami(&["christoffel", "--builtin", "polar2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn delta_examples() {
    let cases: [(&[&str], f64); 3] = [
        (&["--op", "2", "--phi", "u1^2+u2^2+u3^2", "--builtin", "euclidean", "--dim", "3", "--point", "1,2,3"], 6.0),
        (&["--op", "2", "--phi", "r^2", "--builtin", "spherical3", "--point", "1.5,0.7,1.0"], 6.0),
        (&["--op", "1", "--phi", "norm()", "--builtin", "euclidean", "--dim", "4", "--point", "1,1,1,1"], 1.0),
    ];
    for (args, want) in cases {
        let mut full = vec!["delta"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--format", "json"]);
        let out = beltrami(&full);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let v = json(&out);
        assert!(close(&v["re"], want) && close(&v["im"], 0.0), "{args:?}: {v}");
    }
}

#[test]
fn delta_pair_requires_psi() {
    let base = ["delta", "--op", "1pair", "--phi", "r", "--builtin", "polar2", "--point", "1,1"];
    assert_eq!(beltrami(&base).status.code(), Some(2));
    let mut with_psi = base.to_vec();
    with_psi.extend_from_slice(&["--psi", "r*theta", "--format", "json"]);
    let out = beltrami(&with_psi);
    assert_eq!(out.status.code(), Some(0));
    // 2 g^rr ∂r(r) ∂r(rθ) = 2θ
    assert!(close(&json(&out)["re"], 2.0));
}

#[test]
fn parse_errors_report_offsets_and_exit_2() {
    let out = beltrami(&["delta", "--op", "1", "--phi", "r + (theta", "--builtin", "polar2", "--point", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("offset 10"));
}

#[test]
fn evaluation_errors_exit_3() {
    let out = beltrami(&["delta", "--op", "2", "--phi", "log(r - 1)", "--builtin", "polar2", "--point", "1,1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn chart_files_load_and_validate() {
    let dir = std::env::temp_dir();
    let good = dir.join(format!("beltrami-polar-{}.json", std::process::id()));
    std::fs::File::create(&good)
        .unwrap()
        .write_all(
            br#"{"name":"polar2","coords":["r","theta"],"embedding":["r*cos(theta)","r*sin(theta)"],"domain":[[0.1,5],[0.1,6.18]]}"#,
        )
        .unwrap();
    let out = beltrami(&["metric", "--chart-file", good.to_str().unwrap(), "--point", "2,1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(close(&json(&out)["g"][1][1], 4.0));

    let flat = dir.join(format!("beltrami-flat-{}.json", std::process::id()));
    std::fs::write(&flat, r#"{"name":"flat","coords":["a","b"],"embedding":["a+b","2*a+2*b"],"domain":[[0,1],[0,1]]}"#).unwrap();
    let out = beltrami(&["metric", "--chart-file", flat.to_str().unwrap(), "--point", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(3));

    let missing = beltrami(&["metric", "--chart-file", "/nonexistent/chart.json", "--point", "1,1"]);
    assert_eq!(missing.status.code(), Some(2));
    let _ = std::fs::remove_file(good);
    let _ = std::fs::remove_file(flat);
}

#[test]
fn verify_paper_psi_is_an_expected_failure() {
    let out = beltrami(&["verify", "--identity", "thm3", "--psi", "paper", "--dims", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["pass"], false);
    assert_eq!(rows[0]["psi_variant"], "paper");
    assert!(rows[0]["max_abs_residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn verify_eq24() {
    let out = beltrami(&["verify", "--identity", "eq24", "--samples", "100", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    assert_eq!(rows[0]["pass"], true);
    assert_eq!(rows[0]["samples"], 100);
    assert_eq!(rows[0]["tolerance"], 1e-9);
}

#[test]
fn verify_verdict_mismatch_exits_1() {
    // a tolerance below the attainable floor turns passes into mismatches
    let out = beltrami(&["verify", "--identity", "prop1", "--tol", "1e-30", "--samples", "10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("identity,chart,dim,"));
    assert!(String::from_utf8(out.stderr).unwrap().contains("prop1@"));
}

#[test]
fn verify_rejects_bad_flags() {
    assert_eq!(beltrami(&["verify", "--identity", "prop9"]).status.code(), Some(2));
    assert_eq!(beltrami(&["verify", "--suite", "all", "--psi", "other"]).status.code(), Some(2));
    assert_eq!(beltrami(&["verify", "--suite", "all", "--dims", "1"]).status.code(), Some(2));
    assert_eq!(beltrami(&["verify"]).status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["verify", "--identity", "thm2,prop6ii", "--samples", "50", "--format", "json"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_beltrami"))
            .args(args)
            .env("BELTRAMI_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("many").status.code(), Some(2));
}
