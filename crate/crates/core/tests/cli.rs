mod common;

use std::fs::File;
use std::process::{Command, Output};

use nusampler::cli::{EXIT_NO_PATH, EXIT_OK};
use nusampler::{merge_cells, rasterize, read_csv, summarize, write_csv, CSV_HEADER};

fn nusampler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nusampler")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> String {
    common::scenario_path(name).to_string_lossy().into_owned()
}

#[test]
fn writes_metrics_svg_and_partition_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let out = nusampler(&[
        "plan",
        "--scene",
        &scenario("spiral"),
        "--seed",
        "4",
        "--metrics",
        &path("m.csv"),
        "--svg",
        &path("s.svg"),
        "--dump-partition",
        &path("p.json"),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(path("m.csv")).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].planner.as_str(), rows[0].seed, rows[0].status.as_str()), ("nonuniform", 4, "ok"));

    let svg = std::fs::read_to_string(path("s.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("<svg ") && svg.trim_end().ends_with("</svg>"));

    let dump: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path("p.json")).unwrap()).unwrap();
    let scene = common::load("spiral");
    let partition = merge_cells(&rasterize(&scene, 2.0).unwrap());
    assert_eq!(dump["n"], 15);
    assert_eq!(dump["groups"].as_array().unwrap().len(), partition.len());
    assert_eq!(dump["regions"].as_array().unwrap().len(), rows[0].n_regions);
}

#[test]
fn both_planners_over_a_seed_range() {
    let out = nusampler(&[
        "plan",
        "--scene",
        &scenario("empty"),
        "--planner",
        "both",
        "--seeds",
        "1..30",
        "--max-iters",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 60);
    for (planner, half) in ["nonuniform", "uniform"].iter().zip(rows.chunks(30)) {
        assert!(half.iter().all(|r| r.planner == *planner && r.is_ok()));
        assert_eq!(half.iter().map(|r| r.seed).collect::<Vec<_>>(), (1..=30).collect::<Vec<_>>());
    }
}

#[test]
fn summary_survives_a_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv").to_string_lossy().into_owned();
    let out = nusampler(&[
        "plan",
        "--scene",
        &scenario("single_box"),
        "--planner",
        "both",
        "--seeds",
        "1..4",
        "--max-iters",
        "3000",
        "--metrics",
        &csv,
        "--summary",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(File::open(&csv).unwrap()).unwrap();
    let summary = summarize(&rows).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), summary.to_string());

    let mut again = Vec::new();
    write_csv(&mut again, &rows).unwrap();
    let reread = read_csv(again.as_slice()).unwrap();
    assert_eq!(reread, rows);
    assert_eq!(summarize(&reread).unwrap(), summary);
    assert_eq!(again, std::fs::read(&csv).unwrap());
}

#[test]
fn missing_scene_names_the_path() {
    let out = nusampler(&["plan", "--scene", "/no/such/scene.json"]);
    assert_ne!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/scene.json"));
}

#[test]
fn invalid_arguments_are_rejected() {
    let scene = scenario("empty");
    for args in [
        vec!["plan", "--scene", scene.as_str(), "--seeds", "5..1"],
        vec!["plan", "--scene", scene.as_str(), "--planner", "bogus"],
        vec!["plan", "--scene", scene.as_str(), "--cell-size", "7"],
        vec!["plan", "--scene", scene.as_str(), "--goal-bias", "1.5"],
    ] {
        let out = nusampler(&args);
        assert_ne!(out.status.code(), Some(EXIT_OK), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn disconnected_scene_reports_no_path() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("walled.json");
    std::fs::write(
        &scene,
        r#"{"width": 20, "height": 20, "start": [2, 2], "goal": [18, 18],
            "obstacles": [{"type": "rect", "min": [0, 9], "max": [20, 11]}]}"#,
    )
    .unwrap();
    let out = nusampler(&["plan", "--scene", &scene.to_string_lossy(), "--planner", "both", "--max-iters", "500"]);
    assert_eq!(out.status.code(), Some(EXIT_NO_PATH));
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.status == "no_path" && r.feasible_len.is_none()));
}
