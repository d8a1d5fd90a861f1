use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radpersist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn orbit_json() {
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["orbit", "--a", "2/3", "--max-iter", "50"])).unwrap();
    assert_eq!(v["classification"], "AperiodicUpTo(50)");
    let v: serde_json::Value = serde_json::from_str(&stdout(&["orbit", "--a", "63/100"])).unwrap();
    assert_eq!(v["kappa"], 2);
    assert_eq!(v["points"][1], "100/63");
}

#[test]
fn orbit_of_fractional_start_is_exact() {
    let args = ["orbit", "--a", "2/3", "--x", "1/7", "--max-iter", "4"];
    let v: serde_json::Value = serde_json::from_str(&stdout(&args)).unwrap();
    assert_eq!(
        v["points"],
        serde_json::json!(["1/7", "12/7", "15/14", "3/28"])
    );
    assert_eq!(
        run(&["orbit", "--a", "2/3", "--x", "abc"]).status.code(),
        Some(2)
    );
}

#[test]
fn validation_exit_codes() {
    assert_eq!(run(&["orbit", "--a", "3/4"]).status.code(), Some(2));
    assert_eq!(
        run(&["--experimental", "orbit", "--a", "3/4", "--max-iter", "20"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["lambda", "--p", "0.5", "--a", "0.63"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["lambda", "--p", "1.5", "--a", "2/3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["lumped", "--a", "2/3", "--p", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["cdf", "--a", "2/3", "--p", "0.5", "--grid", "0:4:3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn numeric_failure_exit_code() {
    let out = run(&[
        "simulate", "--a", "63/100", "--p", "0.5", "--n", "200", "--reps", "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn lambda_values() {
    let rows = csv_rows(&stdout(&["lambda", "--p", "0.5", "--a", "2/3"]));
    assert!((rows[0][2].parse::<f64>().unwrap() - 0.75).abs() < 1e-10);
    let out = run(&["lambda", "--p", "0.5", "--a", "1/3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("closed form a <= 1/2"));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.5);
    let inexact = csv_rows(&stdout(&[
        "--inexact",
        "lambda",
        "--p",
        "0.5",
        "--a",
        "0.63",
    ]));
    assert_eq!(&inexact[0][..2], &["63", "100"]);
}

#[test]
fn lambda_grid_is_monotone() {
    let text = stdout(&["lambda", "--p", "0.5", "--a-grid", "0.501:0.667:500"]);
    assert!(text.starts_with("a_num,a_den,lambda,kappa,kappa_prime,classification,c,tail_bound\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 500);
    let lambdas: Vec<f64> = rows.iter().filter_map(|r| r[2].parse().ok()).collect();
    assert!(lambdas.len() >= 498);
    assert!(lambdas.windows(2).all(|w| w[1] >= w[0] - 2e-10));
}

#[test]
fn cdf_is_uniform_at_two_thirds() {
    let rows = csv_rows(&stdout(&[
        "cdf", "--a", "2/3", "--p", "0.5", "--grid", "0:3:300",
    ]));
    assert_eq!(rows.len(), 300);
    for r in rows {
        let (z, f): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        assert!((f - z / 3.0).abs() < 1e-8);
    }
}

#[test]
fn lumped_matrix() {
    let csv = stdout(&["lumped", "--a", "63/100", "--p", "0.5", "--format", "csv"]);
    assert_eq!(csv, "1,0,0,0\n0.5,0,0,0.5\n0,0.5,0.5,0\n0.5,0,0.5,0\n");
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["lumped", "--a", "63/100", "--p", "0.5"])).unwrap();
    assert_eq!(v["labels"][0]["label"], "absorbed");
    assert_eq!(v["dim"], 4);
}

#[test]
fn validate_report_agrees() {
    let text = stdout(&[
        "validate", "--a", "63/100", "--p", "0.5", "--n", "20", "--reps", "1000000", "--seed", "7",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["all_pass"], true, "{text}");
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn outputs_are_reproducible_with_manifest() {
    let dir = std::env::temp_dir().join(format!("radpersist-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let paths = [dir.join("a.json"), dir.join("b.json")];
    for p in &paths {
        let args = [
            "simulate", "--a", "2/3", "--p", "0.5", "--n", "10", "--reps", "200000", "--seed", "3",
            "--out",
        ];
        let mut args: Vec<&str> = args.to_vec();
        args.push(p.to_str().unwrap());
        stdout(&args);
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("a.json.manifest.json")).unwrap())
            .unwrap();
    let out: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(manifest["config_hash"], out["config_hash"]);
    assert_eq!(manifest["params"]["a"], "2/3");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn ecdf_csv() {
    let text = stdout(&[
        "simulate", "--a", "2/3", "--p", "0.5", "--n", "8", "--reps", "100000", "--ecdf", "0:3:4",
    ]);
    assert!(text.starts_with("z,ecdf\n"));
    assert_eq!(csv_rows(&text).len(), 4);
}
