use std::process::{Command, Output};

fn bwdecomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bwdecomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn field_and_energy() {
    let o = bwdecomp(&["field", "--p", "3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("modulus = 1,0,1"));

    let o = bwdecomp(&["energy", "--p", "1009", "--set", "interval:0,4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("E(A) = 44 "));
}

#[test]
fn decompose_and_charsum() {
    let o = bwdecomp(&["decompose", "--p", "257", "--set", "rand:60,3", "--m", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("iterations = "));

    let o = bwdecomp(&[
        "charsum",
        "--p",
        "101",
        "--kind",
        "S",
        "--sets",
        "interval:1,5",
        "list:2;3",
        "msub:4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bound bilinear_s"));
}

#[test]
fn verify_suite() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let o = bwdecomp(&[
        "verify",
        "--p",
        "101",
        "--suite",
        "constructions",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("suite,instance,lhs,rhs,ratio,pass,runtime_ms\n"));
}

#[test]
fn experiment_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"field": {{"p": 101}}, "suites": ["lemmas"], "seed": 1, "trials": 2, "output": {:?}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = bwdecomp(&["experiment", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(out.exists());

    std::fs::write(
        &cfg,
        r#"{"field": {"p": 101}, "suites": ["lemmas"], "seed": 1, "trails": 2}"#,
    )
    .unwrap();
    let o = bwdecomp(&["experiment", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trails"));
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["field", "--p", "10"][..],
        &["energy", "--set", "box:1"],
        &["verify", "--suite", "nope"],
        &[
            "decompose",
            "--p",
            "7",
            "--set",
            "all",
            "--fn",
            "1,6,0,0,0,0,0,1",
        ],
        &["experiment", "--config", "/nonexistent.json"],
        &["charsum", "--kind", "Q", "--sets", "all", "all", "all"],
    ] {
        assert_eq!(bwdecomp(args).status.code(), Some(2), "{args:?}");
    }
}
