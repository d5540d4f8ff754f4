use std::fs;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use grouplab_cli::output::{from_csv, from_json};
use grouplab_cli::{RowVerdict, CATALOG};

fn grouplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grouplab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn every_smoke_command_passes_within_a_minute() {
    for e in CATALOG {
        let cmd = e.smoke_command();
        let args: Vec<&str> = cmd.split_whitespace().skip(1).collect();
        let start = Instant::now();
        let out = grouplab(&args);
        let took = start.elapsed();
        assert!(
            out.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(took < Duration::from_secs(60), "{cmd} took {took:?}");
        let rows = from_csv(&stdout(&out)).unwrap();
        assert!(!rows.is_empty(), "{cmd}");
        for r in &rows {
            assert_eq!(r.experiment, e.name);
            assert_ne!(r.verdict, RowVerdict::Fail, "{cmd}: {r:?}");
        }
    }
}

#[test]
fn same_seed_gives_identical_bytes() {
    let args = [
        "run",
        "--experiment",
        "slide-attack",
        "--seed",
        "7",
        "--trials",
        "300",
    ];
    let a = grouplab(&args);
    let b = grouplab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = grouplab(&[
        "run",
        "--experiment",
        "slide-attack",
        "--seed",
        "8",
        "--trials",
        "300",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("rows.json");
    fs::write(
        &cfg,
        format!(
            r#"{{"experiment": "sc-mixing", "group": "zmod:8", "r": 10, "seed": 3, "format": "json", "output": {:?}}}"#,
            out.display().to_string()
        ),
    )
    .unwrap();
    let res = grouplab(&["run", "--config", cfg.to_str().unwrap(), "--r", "4"]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert!(res.stdout.is_empty());
    let rows = from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows[0].measured.to_string(), "7/128");
    assert!(rows[0].params.contains("r=4"));
}

#[test]
fn table_reads_csv_and_json_together() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let json = dir.path().join("b.json");
    let base = [
        "run",
        "--experiment",
        "bad-keys",
        "--seed",
        "1",
        "--trials",
        "5",
    ];
    assert!(
        grouplab(&[&base[..], &["--output", csv.to_str().unwrap()]].concat())
            .status
            .success()
    );
    assert!(grouplab(
        &[
            &base[..],
            &["--output", json.to_str().unwrap(), "--format", "json"]
        ]
        .concat()
    )
    .status
    .success());
    assert_eq!(
        from_csv(&fs::read_to_string(&csv).unwrap()).unwrap(),
        from_json(&fs::read_to_string(&json).unwrap()).unwrap()
    );
    let out = grouplab(&["table", csv.to_str().unwrap(), json.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("experiment"), "{text}");
    assert!(text.ends_with("4 PASS, 0 FAIL, 2 INFO\n"), "{text}");
}

#[test]
fn listing_shows_every_experiment() {
    for args in [&["list"][..], &["--list"][..]] {
        let text = stdout(&grouplab(args));
        for e in CATALOG {
            assert!(text.contains(&e.smoke_command()), "{}", e.name);
        }
    }
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let cases: [&[&str]; 4] = [
        &["run", "--experiment", "roundtrip"],
        &["run", "--experiment", "nope", "--seed", "1"],
        &[
            "run",
            "--experiment",
            "roundtrip",
            "--seed",
            "1",
            "--group",
            "sym:11",
        ],
        &[
            "run",
            "--experiment",
            "game-equivalence",
            "--seed",
            "1",
            "--group",
            "zmod:9",
        ],
    ];
    let expect = ["seed", "unknown experiment", "group", "game-equivalence"];
    for (args, needle) in cases.iter().zip(expect) {
        let out = grouplab(args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{args:?}: {err}");
    }
}

#[test]
fn malformed_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\n  \"seed\": 1,\n  \"trails\": 5\n}").unwrap();
    let out = grouplab(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("trails"), "{err}");
}
