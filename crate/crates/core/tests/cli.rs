use std::process::{Command, Output};

fn arches(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arches"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn result(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()["result"].clone()
}

#[test]
fn series_value() {
    let v = result(&arches(&[
        "circles", "--mode", "series", "--kmax", "1000000",
    ]))["value"]
        .as_f64()
        .unwrap();
    assert!((v - 0.1591549).abs() < 1e-6);
}

#[test]
fn meander_count() {
    let r = result(&arches(&["meander", "count", "--order", "3"]));
    assert_eq!(r["count"], 8);
}

#[test]
fn exit_codes() {
    let out = arches(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frobnicate"));
    assert_eq!(arches(&["sample"]).status.code(), Some(2));
    let out = arches(&[
        "realize",
        "--len",
        "4",
        "--profile",
        "1,0,0,0",
        "--sigma",
        "1-2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(arches(&["--help"]).status.success());
}

#[test]
fn record_shape_and_meta() {
    let out = arches(&["trace", "--seed", "9", "--origin", "-4"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["subcommand"], "trace");
    assert_eq!(v["seeds"], serde_json::json!([9]));
    assert!(v["version"].is_string() && v["wall_time_ms"].is_u64());
    assert_eq!(v["params"]["command"]["trace"]["origin"], -4);
    let out = arches(&["trace", "--seed", "9", "--origin", "-4", "--no-meta"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("version").is_none() && v.get("wall_time_ms").is_none());
}

#[test]
fn other_formats_and_out_file() {
    let out = arches(&[
        "ends",
        "--seed",
        "1",
        "--lengths",
        "1,10",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,samples,mean_n_tot"));
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("1,8,2"));

    let out = arches(&[
        "realize",
        "--len",
        "10",
        "--profile",
        "2,0,1,1",
        "--sigma",
        "1-4,2-3",
        "--format",
        "svg",
    ]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("<svg"));

    let path = std::env::temp_dir().join(format!("arches-cli-{}.json", std::process::id()));
    let out = arches(&[
        "sample",
        "--seed",
        "2",
        "--len",
        "8",
        "--no-meta",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let saved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved["result"]["sites"].as_array().unwrap().len(), 8);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn rewire_takes_window_json() {
    let w = result(&arches(&[
        "realize",
        "--len",
        "12",
        "--profile",
        "2,0,1,1",
        "--sigma",
        "1-2,3-4",
    ]))["window"]
        .to_string();
    let r = result(&arches(&["rewire", "--window", &w, "--i", "0", "--j", "3"]));
    assert_eq!(r["sigma_before"], "1-2,3-4");
    assert_eq!(r["sigma_after"], "1-4,2-3");
    assert_eq!(r["profile"], "2,0,1,1");
    assert_eq!(
        arches(&["rewire", "--window", "{", "--i", "0", "--j", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn witness_scan() {
    let r = result(&arches(&[
        "trifurcations",
        "--witness",
        "--lo",
        "-1",
        "--len",
        "6",
    ]));
    assert_eq!(r["points"], serde_json::json!([0]));
    assert_eq!(r["counting_bound_holds"], true);
}

#[test]
fn replay_is_byte_identical() {
    for args in [
        &["sample", "--seed", "5", "--no-meta"][..],
        &[
            "meander",
            "sample",
            "--order",
            "4",
            "--seed",
            "5",
            "--no-meta",
        ],
        &[
            "circles",
            "--mode",
            "mc",
            "--seed",
            "5",
            "--replicas",
            "2",
            "--len",
            "10000",
            "--no-meta",
        ],
    ] {
        assert_eq!(arches(args).stdout, arches(args).stdout);
    }
}
