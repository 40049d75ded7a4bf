use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn teflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture_args<'a>(prices: &'a str, manifest: &'a str) -> Vec<&'a str> {
    vec!["--prices", prices, "--manifest", manifest]
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn paths() -> (String, String) {
    (
        data("prices.csv").to_string_lossy().into_owned(),
        data("manifest.csv").to_string_lossy().into_owned(),
    )
}

#[test]
fn stats_has_one_row_per_instrument() {
    let (p, m) = paths();
    let mut args = vec!["stats"];
    args.extend(fixture_args(&p, &m));
    let out = teflow(&args);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "ticker,mean,std_dev,kurtosis,skewness,n");
    assert_eq!(lines.len(), 14);
}

#[test]
fn stats_on_empty_manifest_prints_header() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("empty.csv");
    fs::write(&manifest, "ticker,name,currency,market\n").unwrap();
    let (p, _) = paths();
    let out = teflow(&["stats", "--prices", &p, "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ticker,mean,std_dev,kurtosis,skewness,n\n");
}

#[test]
fn missing_price_file_is_an_input_error() {
    let (_, m) = paths();
    let out = teflow(&["stats", "--prices", "/nonexistent/prices.csv", "--manifest", &m]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prices.csv"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_ticker_is_named() {
    let (p, m) = paths();
    let mut args = vec!["pair", "--source", "ZZZZ", "--destination", "FLMB"];
    args.extend(fixture_args(&p, &m));
    let out = teflow(&args);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ZZZZ"));
}

#[test]
fn conflicting_scheme_flags_are_rejected() {
    let (p, m) = paths();
    let mut args = vec!["flow", "--quantiles", "0.1,0.9", "--thresholds", "-0.01,0.01"];
    args.extend(fixture_args(&p, &m));
    assert_eq!(teflow(&args).status.code(), Some(1));
}

#[test]
fn scope_selects_row_count() {
    let (p, m) = paths();
    for (scope, rows) in [("US", 12), ("Canada-Europe", 16)] {
        let dir = tempfile::tempdir().unwrap();
        let out_dir = dir.path().to_str().unwrap();
        let mut args = vec!["flow", "--scope", scope, "--out", out_dir, "--boot", "30", "--shuffles", "10"];
        args.extend(fixture_args(&p, &m));
        let out = teflow(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains(&format!("{rows} directed pair(s) computed")));
        let matrix = fs::read_to_string(dir.path().join("matrix.csv")).unwrap();
        assert_eq!(matrix.lines().count(), rows + 1);
    }
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn replay_from_emitted_config_is_byte_identical() {
    let (p, m) = paths();
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out_str = out_dir.to_str().unwrap();
    let mut args = vec!["flow", "--out", out_str, "--scope", "Europe-US", "--seed", "17", "--precision", "6"];
    args.extend(fixture_args(&p, &m));
    assert!(teflow(&args).status.success());
    let first = read_dir_sorted(&out_dir);
    let names: Vec<_> = first.iter().map(|(n, _)| n.as_str()).collect();
    for expected in ["matrix.csv", "net_flow.csv", "graph.dot", "graph.json", "results.json", "run_config.json"] {
        assert!(names.contains(&expected), "{expected} missing");
    }
    let config = out_dir.join("run_config.json");
    let saved = dir.path().join("config.json");
    fs::copy(&config, &saved).unwrap();
    assert!(teflow(&["flow", "--config", saved.to_str().unwrap()]).status.success());
    assert_eq!(read_dir_sorted(&out_dir), first);
}

#[test]
fn flags_override_config_file() {
    let (p, m) = paths();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    let out_dir = dir.path().join("out");
    fs::write(
        &config,
        serde_json::json!({ "prices": p, "manifest": m, "seed": 1, "scope": "US", "boot": 30, "shuffles": 10 })
            .to_string(),
    )
    .unwrap();
    let out = teflow(&[
        "flow",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "9",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let resolved: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("run_config.json")).unwrap()).unwrap();
    assert_eq!(resolved["seed"], 9);
    assert_eq!(resolved["boot"], 30);
    assert_eq!(resolved["scope"], "US");
}

#[test]
fn pair_matches_flow_cells() {
    let (p, m) = paths();
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let common = ["--boot", "60", "--shuffles", "20", "--precision", "full"];
    let mut args = vec!["flow", "--out", out_dir];
    args.extend(common);
    args.extend(fixture_args(&p, &m));
    assert!(teflow(&args).status.success());
    let matrix = fs::read_to_string(dir.path().join("matrix.csv")).unwrap();
    let rows: Vec<&str> = matrix.lines().skip(1).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in sample(&mut rng, rows.len(), 5) {
        let row = rows[i];
        let mut cells = row.split(',');
        let (source, destination) = (cells.next().unwrap(), cells.next().unwrap());
        let mut args = vec!["pair", "--source", source, "--destination", destination];
        args.extend(common);
        args.extend(fixture_args(&p, &m));
        let out = teflow(&args);
        assert!(out.status.success());
        let text = stdout(&out);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[1], row, "{source} -> {destination}");
        assert!(lines[2].starts_with(&format!("# {source} -> {destination}")));
    }
}

#[test]
fn pair_agrees_with_flow_for_every_us_cell() {
    use teflow_cli::commands;
    use teflow_cli::config::{PartialConfig, RunConfig};

    let config = RunConfig::resolve(PartialConfig {
        prices: Some(data("prices.csv")),
        manifest: Some(data("manifest.csv")),
        scope: Some("US".parse().unwrap()),
        boot: Some(40),
        shuffles: Some(15),
        precision: Some("full".parse().unwrap()),
        ..Default::default()
    })
    .unwrap();
    let summary = commands::flow(&config).unwrap();
    assert_eq!(summary.matrix.len(), 12);
    for cell in summary.matrix.results() {
        let mut out = Vec::new();
        commands::pair(&config, &cell.source, &cell.destination, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let fields: Vec<_> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(fields[2].parse::<f64>().unwrap(), cell.te);
        assert_eq!(fields[3].parse::<f64>().unwrap(), cell.ete);
        assert_eq!(fields[5].parse::<f64>().unwrap(), cell.p_value);
    }
}
