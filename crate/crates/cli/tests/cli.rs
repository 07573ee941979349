use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn mrs(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrs"))
        .args(args)
        .current_dir(cwd)
        .env_remove("MRS_SEED")
        .output()
        .expect("run mrs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn cfg(name: &str) -> String {
    configs().join(name).display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn simulate_writes_csv_and_manifest_that_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let out = mrs(
        &[
            "simulate",
            "--code",
            &cfg("blockwise.json"),
            "--channel",
            &cfg("c06.json"),
            "--n",
            "20000",
            "--seed",
            "7",
            "--trials",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("mrs-out/trials.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "c_1,s_1,seed,N,decoded_prefix,final_rate,err_bits,err_rate"
    );
    assert_eq!(lines.count(), 3);

    let manifest: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("mrs-out/manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["code"]["family"], "blockwise");
    assert!(manifest["outputs"]["trials.csv"].as_str().unwrap().len() == 64);

    let again = mrs(
        &["rerun", "mrs-out/manifest.json", "--out-dir", "again"],
        dir.path(),
    );
    assert_eq!(
        code(&again),
        0,
        "{}",
        String::from_utf8_lossy(&again.stdout)
    );
    assert_eq!(
        fs::read(dir.path().join("mrs-out/trials.csv")).unwrap(),
        fs::read(dir.path().join("again/trials.csv")).unwrap()
    );
}

#[test]
fn rerun_detects_changed_digest() {
    let dir = tempfile::tempdir().unwrap();
    let out = mrs(
        &[
            "simulate",
            "--code",
            &cfg("blockwise.json"),
            "--channel",
            &cfg("c06.json"),
            "--n",
            "2000",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let path = dir.path().join("mrs-out/manifest.json");
    let mut m: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    m["outputs"]["trials.csv"] = Value::String("0".repeat(64));
    fs::write(&path, serde_json::to_string(&m).unwrap()).unwrap();
    let again = mrs(&["rerun", "mrs-out/manifest.json"], dir.path());
    assert_eq!(code(&again), 2);
    assert!(String::from_utf8_lossy(&again.stdout).contains("MISMATCH trials.csv"));
}

#[test]
fn parallel_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "simulate",
        "--config",
        &cfg("superposition_sim.json"),
        "--n",
        "4000",
        "--trials",
        "40",
    ];
    let one = mrs(
        &[&base[..], &["--parallel", "1", "--out-dir", "p1"]].concat(),
        dir.path(),
    );
    let eight = mrs(
        &[&base[..], &["--parallel", "8", "--out-dir", "p8"]].concat(),
        dir.path(),
    );
    assert_eq!(code(&one), code(&eight));
    for f in ["trials.csv", "verdict.json", "summary.json"] {
        assert_eq!(
            fs::read(dir.path().join("p1").join(f)).unwrap(),
            fs::read(dir.path().join("p8").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn admissibility_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let run = |cap: &str, out: &str| {
        let ch = write(
            dir.path(),
            &format!("{out}.json"),
            &format!(r#"{{"capacities":["{cap}"]}}"#),
        );
        mrs(
            &[
                "simulate",
                "--config",
                &cfg("superposition_sim.json"),
                "--channel",
                &ch,
                "--n",
                "8000",
                "--trials",
                "10",
                "--out-dir",
                out,
            ],
            dir.path(),
        )
    };
    assert_eq!(code(&run("7/10", "good")), 0);
    let bad = run("2/5", "bad");
    assert_eq!(code(&bad), 2, "{}", stderr(&bad));
    let verdict: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("bad/verdict.json")).unwrap())
            .unwrap();
    assert_eq!(verdict["pass"], false);
    assert_eq!(verdict["checkpoints"].as_array().unwrap().len(), 3);
}

#[test]
fn config_errors_name_the_field_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"family":"blockwise","k":"x","l":4}"#, "code.k"),
        (r#"{"family":"blockwise","k":4}"#, "missing field `l`"),
        (r#"{"family":"blockwise","k":8,"l":4}"#, "`l`"),
        (r#"{"family":"fountain","k":8}"#, "fountain"),
    ];
    for (text, needle) in cases {
        let bad = write(dir.path(), "bad.json", text);
        let out = mrs(
            &["simulate", "--code", &bad, "--channel", &cfg("c06.json")],
            dir.path(),
        );
        assert_eq!(code(&out), 1, "{text}");
        assert!(stderr(&out).contains(needle), "{text}: {}", stderr(&out));
    }
    let ch = write(dir.path(), "ch.json", r#"{"capacities":["3/2"]}"#);
    let out = mrs(
        &[
            "simulate",
            "--code",
            &cfg("blockwise.json"),
            "--channel",
            &ch,
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    let out = mrs(&["simulate", "--no-such-flag"], dir.path());
    assert_eq!(code(&out), 1);
    let out = mrs(&["simulate", "--code", &cfg("blockwise.json")], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("channel"), "{}", stderr(&out));
}

#[test]
fn seed_comes_from_environment_only_when_unset() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str], env: Option<&str>, out: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_mrs"));
        c.args([
            "simulate",
            "--code",
            &cfg("blockwise.json"),
            "--channel",
            &cfg("c06.json"),
            "--n",
            "3000",
            "--out-dir",
            out,
        ])
        .args(args)
        .current_dir(dir.path())
        .env_remove("MRS_SEED");
        if let Some(s) = env {
            c.env("MRS_SEED", s);
        }
        assert!(c.output().unwrap().status.success());
        fs::read(dir.path().join(out).join("trials.csv")).unwrap()
    };
    let flag = run(&["--seed", "11"], None, "a");
    assert_eq!(run(&[], Some("11"), "b"), flag);
    assert_eq!(run(&["--seed", "11"], Some("5"), "c"), flag);
    assert_ne!(run(&[], Some("5"), "d"), flag);
}

#[test]
fn region_counterexample_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = mrs(
        &[
            "region",
            "--check",
            "superposition",
            "--input",
            &cfg("counterexample.json"),
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["feasible"], false);
    assert!(!v["violated_constraints"].as_array().unwrap().is_empty());

    let two = write(
        dir.path(),
        "two.json",
        r#"{"pairs":[{"rate":"1/2","capacities":["3/4",0]},{"rate":"1/2","capacities":[0,"3/4"]}]}"#,
    );
    let out = mrs(
        &[
            "region",
            "--check",
            "superposition",
            "--input",
            &two,
            "--out-dir",
            "r",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["feasible"], true);
    assert_eq!(v["witness"].as_array().unwrap().len(), 2);
    let again = mrs(&["rerun", "r/manifest.json"], dir.path());
    assert_eq!(code(&again), 0);

    let empty = write(dir.path(), "empty.json", r#"{"pairs":[]}"#);
    let out = mrs(
        &["region", "--check", "superposition", "--input", &empty],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn region_checks_cover_every_kind() {
    let dir = tempfile::tempdir().unwrap();
    let check = |kind: &str, input: &str| {
        let out = mrs(&["region", "--check", kind, "--input", input], dir.path());
        let v: Value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
        (code(&out), v)
    };
    let (c, v) = check("integral", &cfg("blockwise_rate.json"));
    assert_eq!(
        (c, v["integral_exact"].as_str(), v["achievable"].as_bool()),
        (0, Some("1"), Some(true))
    );
    let (c, v) = check("example3", &cfg("example3.json"));
    assert_eq!((c, v["tight"].as_bool()), (0, Some(true)));
    assert_eq!(check("example3-sup", &cfg("example3.json")).0, 2);

    let ooa = write(
        dir.path(),
        "ooa.json",
        r#"{"w":[1,1],"r0":1,"r":["1/2","1/2"]}"#,
    );
    let (c, v) = check("one-or-all", &ooa);
    assert_eq!(c, 0);
    assert_eq!(v["witness"].as_array().unwrap().len(), 2);
    assert_eq!(check("mdc", &ooa).0, 0);

    let ts = write(
        dir.path(),
        "ts.json",
        r#"{"decomposition":[{"rate":"1/2","capacities":["1/2",0]},{"rate":"1/2","capacities":[0,"1/2"]}],"total":{"rate":1,"capacities":["1/2","1/2"]}}"#,
    );
    let (_, v) = check("two-sum", &ts);
    assert!(v["status"]
        .as_str()
        .unwrap()
        .starts_with("necessary-condition"));
}

#[test]
fn sweep_with_theory_overlay_and_single_point_matches_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let out = mrs(
        &[
            "sweep",
            "--code",
            &cfg("blockwise.json"),
            "--line",
            "2/5:1:4",
            "--theory",
            &write(
                dir.path(),
                "th.json",
                r#"{"direction":"increasing","breakpoints":[1],"values":["1/2"]}"#,
            ),
            "--n",
            "3000",
            "--trials",
            "2",
            "--seed",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let agg = fs::read_to_string(dir.path().join("mrs-out/sweep.csv")).unwrap();
    assert!(agg.lines().next().unwrap().ends_with("theory_rate"));
    assert_eq!(agg.lines().count(), 5);
    let svg = fs::read_to_string(dir.path().join("mrs-out/sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains(">theory<") && svg.contains(">empirical<"));

    let grid = write(dir.path(), "grid.json", r#"[{"capacities":["3/5"]}]"#);
    let common = [
        "--code",
        &cfg("blockwise.json"),
        "--n",
        "3000",
        "--trials",
        "3",
        "--seed",
        "9",
    ];
    let s = mrs(
        &[
            &["sweep", "--grid", &grid, "--out-dir", "sw"][..],
            &common[..],
        ]
        .concat(),
        dir.path(),
    );
    let t = mrs(
        &[
            &[
                "simulate",
                "--channel",
                &cfg("c06.json"),
                "--out-dir",
                "sim",
            ][..],
            &common[..],
        ]
        .concat(),
        dir.path(),
    );
    assert_eq!((code(&s), code(&t)), (0, 0));
    assert_eq!(
        fs::read(dir.path().join("sw/sweep_trials.csv")).unwrap(),
        fs::read(dir.path().join("sim/trials.csv")).unwrap()
    );
}
