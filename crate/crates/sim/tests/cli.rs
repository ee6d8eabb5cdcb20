use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lisl_core::topology::{generate_records, Arrangement};
use lisl_sim::records::write_records;
use lisl_sim::{exit, Config};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lisl-sim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write_config(dir: &TempDir, toml: &str) -> PathBuf {
    let path = dir.path().join("config.toml");
    fs::write(&path, toml).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report_map(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_owned(), v.to_owned()))
        .collect()
}

fn count_records(dir: &Path) -> usize {
    fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_str().unwrap().starts_with("sat_"))
        .count()
}

const SMALL: &str = "
[shell]
planes = 4
sats_per_plane = 4
[traffic]
total_bytes = 8388608
max_flow_bytes = 1048576
";

#[test]
fn generate_default_shell_writes_every_satellite() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "");
    let out = dir.path().join("records");
    let o = run(&["generate", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), exit::SUCCESS, "{}", stderr(&o));
    assert_eq!(count_records(&out), 1584);

    // idempotent: a second run leaves identical files
    let before = fs::read(out.join("sat_800.json")).unwrap();
    let o = run(&["generate", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), exit::SUCCESS);
    assert_eq!(count_records(&out), 1584);
    assert_eq!(fs::read(out.join("sat_800.json")).unwrap(), before);
}

#[test]
fn generate_small_and_invalid_shells() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[shell]\nplanes = 3\nsats_per_plane = 3\n");
    let out = dir.path().join("r");
    let o = run(&["generate", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), exit::SUCCESS);
    assert_eq!(count_records(&out), 9);

    let cfg = write_config(&dir, "[shell]\nplanes = 2\n");
    let o = run(&["generate", "--config", s(&cfg), "--out", s(&dir.path().join("x"))]);
    assert_eq!(code(&o), exit::CONFIG);
    assert!(stderr(&o).contains("planes must be ≥ 3"), "{}", stderr(&o));

    let cfg = write_config(&dir, "[shell]\nplanez = 4\n");
    let o = run(&["generate", "--config", s(&cfg), "--out", s(&dir.path().join("x"))]);
    assert_eq!(code(&o), exit::CONFIG);

    let o = run(&["generate", "--config", s(&dir.path().join("missing.toml")), "--out", "x"]);
    assert_eq!(code(&o), exit::CONFIG);

    let o = run(&["generate", "--config", s(&cfg)]);
    assert_eq!(code(&o), exit::USAGE);
}

#[test]
fn simulate_is_deterministic_and_matches_in_memory_run() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let rec = dir.path().join("rec");
    assert_eq!(code(&run(&["generate", "--config", s(&cfg), "--out", s(&rec)])), 0);

    let a = run(&["simulate", "--config", s(&cfg), "--records", s(&rec), "--seed", "11"]);
    let b = run(&["simulate", "--config", s(&cfg), "--records", s(&rec), "--seed", "11"]);
    assert_eq!(code(&a), exit::SUCCESS, "{}", stderr(&a));
    let (mut ma, mut mb) = (report_map(&stdout(&a)), report_map(&stdout(&b)));
    ma.remove("wall_time_ms");
    mb.remove("wall_time_ms");
    assert_eq!(ma, mb);
    assert_eq!(ma["seed"], "11");
    assert_eq!(ma["bytes_delivered"], "8388608");
    assert_eq!(ma["flows_dropped"], "0");

    let config = Config::load(&cfg).unwrap();
    let memory = lisl_sim::pipeline::simulate_in_memory(&config, Some(11)).unwrap();
    assert_eq!(ma["flow_count"], memory.flow_count.to_string());
    assert_eq!(ma["sim_time_ns"], memory.sim_time_ns.to_string());
    assert_eq!(ma["chunk_transmissions"], memory.chunk_transmissions.to_string());
    assert_eq!(ma["cache_misses"], memory.cache_misses.to_string());

    let c = run(&["simulate", "--config", s(&cfg), "--records", s(&rec), "--seed", "12"]);
    assert_ne!(report_map(&stdout(&c))["sim_time_ns"], ma["sim_time_ns"]);
}

#[test]
fn simulate_writes_report_and_run_log() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.txt");
    let log = dir.path().join("runs.jsonl");
    let cfg = write_config(
        &dir,
        &format!(
            "{SMALL}[output]\nreport = {:?}\nruns_log = {:?}\n",
            s(&report),
            s(&log)
        ),
    );
    let rec = dir.path().join("rec");
    run(&["generate", "--config", s(&cfg), "--out", s(&rec)]);
    for _ in 0..2 {
        let o = run(&["simulate", "--config", s(&cfg), "--records", s(&rec)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    assert!(fs::read_to_string(&report).unwrap().contains("flow_count"));
    let lines: Vec<serde_json::Value> = fs::read_to_string(&log)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["bytes_delivered"], 8388608);
    assert_eq!(lines[0]["arrangement"], "full4");
}

#[test]
fn unreachable_satellite_drops_flows_with_nonzero_exit() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "[shell]\nplanes = 3\nsats_per_plane = 3\n[traffic]\ntotal_bytes = 1048576\nmax_flow_bytes = 16384\n",
    );
    let config = Config::load(&cfg).unwrap();
    let mut records = generate_records(&config.shell, Arrangement::Full4).unwrap();
    // satellite 5 keeps its inbound links but has no way out
    records[4].neighbors.clear();
    records[4].lisl_count = 0;
    let rec = dir.path().join("rec");
    write_records(&rec, &records).unwrap();

    let o = run(&["simulate", "--config", s(&cfg), "--records", s(&rec)]);
    assert_eq!(code(&o), exit::DROPPED, "{}", stderr(&o));
    let m = report_map(&stdout(&o));
    let dropped: u64 = m["flows_dropped"].parse().unwrap();
    assert!(dropped > 0);
    assert_eq!(m["unroutable"].split(',').count() as u64, dropped);
    let total: u64 = m["bytes_delivered"].parse::<u64>().unwrap() + m["bytes_dropped"].parse::<u64>().unwrap();
    assert_eq!(total, 1048576);
}

#[test]
fn simulate_load_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let o = run(&["simulate", "--config", s(&cfg), "--records", s(&empty)]);
    assert_eq!(code(&o), exit::LOAD);
    assert!(stderr(&o).contains("no satellite records found"));

    let rec = dir.path().join("rec");
    run(&["generate", "--config", s(&cfg), "--out", s(&rec)]);
    fs::write(rec.join("sat_3.json"), "{\"id\": 3}").unwrap();
    let o = run(&["simulate", "--config", s(&cfg), "--records", s(&rec)]);
    assert_eq!(code(&o), exit::LOAD);
    assert!(stderr(&o).contains("sat_3.json"), "{}", stderr(&o));
}

fn validate_rows(out: &Output) -> Vec<Vec<String>> {
    stdout(out)
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with("note"))
        .map(|l| {
            let cols: Vec<&str> = l.split_whitespace().collect();
            vec![cols[0].to_owned(), cols[1].to_owned(), cols[2].to_owned(), cols[3..].join(" ")]
        })
        .collect()
}

#[test]
fn validate_default_and_small_shells() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "");
    let o = run(&["validate", "--config", s(&cfg)]);
    assert_eq!(code(&o), exit::SUCCESS);
    let rows = validate_rows(&o);
    let diam: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(diam, ["47", "57", "82", "92"]);
    assert!(rows.iter().all(|r| r[1] == r[2] && r[3] == "yes"));

    let cfg = write_config(&dir, "[shell]\nplanes = 4\nsats_per_plane = 4\n");
    let rows = validate_rows(&run(&["validate", "--config", s(&cfg)]));
    assert_eq!(rows.iter().map(|r| r[1].as_str()).collect::<Vec<_>>(), ["4", "5", "5", "6"]);

    let cfg = write_config(&dir, "[shell]\nplanes = 5\nsats_per_plane = 4\n");
    let o = run(&["validate", "--config", s(&cfg)]);
    assert_eq!(code(&o), exit::SUCCESS);
    assert!(validate_rows(&o).iter().all(|r| r[3] == "skipped (odd)"));
}

#[test]
fn export_default_tables() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "");
    let rec = dir.path().join("rec");
    let out = dir.path().join("out");
    run(&["generate", "--config", s(&cfg), "--out", s(&rec)]);
    let o = run(&["export", "--config", s(&cfg), "--records", s(&rec), "--out", s(&out)]);
    assert_eq!(code(&o), exit::SUCCESS, "{}", stderr(&o));

    let table = |name: &str| {
        let mut r = csv::Reader::from_path(out.join(name)).unwrap();
        let header: Vec<String> = r.headers().unwrap().iter().map(str::to_owned).collect();
        let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
        (header, rows)
    };
    let (h, sats) = table("satellites.csv");
    assert_eq!(h, ["id", "plane", "index", "lat_deg", "lon_deg", "weight"]);
    assert_eq!(sats.len(), 1584);
    for row in &sats {
        let lat: f64 = row[3].parse().unwrap();
        let lon: f64 = row[4].parse().unwrap();
        assert!(lat.abs() <= 53.0 + 1e-9 && (-180.0..=180.0).contains(&lon));
    }
    let (h, edges) = table("edges.csv");
    assert_eq!(h, ["src", "dst"]);
    assert_eq!(edges.len(), 6336);
    let (h, regions) = table("regions.csv");
    assert_eq!(h, ["name", "lat_min", "lat_max", "lon_min", "lon_max", "weight"]);
    assert_eq!(regions.len(), 7);
    let na = regions.iter().find(|r| &r[0] == "North America").unwrap();
    assert_eq!((&na[1], &na[2]), ("25.0", "50.0"));
    let (h, hist) = table("weight_histogram.csv");
    assert_eq!(h, ["weight", "count"]);
    assert_eq!(hist.iter().map(|r| r[1].parse::<u64>().unwrap()).sum::<u64>(), 1584);
}

#[test]
fn sweep_rows_and_means() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let o = run(&["sweep", "--config", s(&cfg), "--trials", "3", "--arrangements", "full4,three_within_plane,three_between_planes,two"]);
    assert_eq!(code(&o), exit::SUCCESS, "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    let trials: Vec<_> = rows.iter().filter(|r| r[1] != "mean").collect();
    let means: Vec<_> = rows.iter().filter(|r| r[1] == "mean").collect();
    assert_eq!((trials.len(), means.len()), (12, 4));
    let order: Vec<(&str, &str)> = trials.iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(order[..4], [("full4", "1"), ("full4", "2"), ("full4", "3"), ("three_within_plane", "1")]);
    for (k, m) in means.iter().enumerate() {
        let flows: Vec<f64> = trials[k * 3..k * 3 + 3].iter().map(|r| r[3].parse().unwrap()).collect();
        let mean: f64 = m[3].parse().unwrap();
        assert!((mean - flows.iter().sum::<f64>() / 3.0).abs() < 0.01);
    }

    let o = run(&["sweep", "--config", s(&cfg), "--trials", "0"]);
    assert_eq!(code(&o), exit::USAGE);
    let o = run(&["sweep", "--config", s(&cfg), "--trials", "1", "--arrangements", "5"]);
    assert_eq!(code(&o), exit::USAGE);
}
