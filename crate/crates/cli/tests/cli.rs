use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use crucb_cli::output::{write_outputs, AGGREGATE_FILE, DIAGNOSTIC_FILE, METADATA_FILE, TRIALS_FILE};
use crucb_cli::presets::preset;
use crucb_cli::{run_and_write, run_experiment, RawConfig};

fn crucb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crucb"))
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn preset_1b_writes_the_full_long_form_table() {
    let dir = tempfile::tempdir().unwrap();
    let status = crucb()
        .args(["--figure", "1b", "--out"])
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());

    let bytes = fs::read(dir.path().join(TRIALS_FILE)).unwrap();
    assert!(!bytes.contains(&b'\r'));
    let (header, rows) = read_csv(&dir.path().join(TRIALS_FILE));
    assert_eq!(header, ["algorithm", "trial", "seed", "t", "arm", "contaminated", "pseudo_regret"]);
    assert_eq!(rows.len(), 7 * 10 * 1000);

    // grouped by algorithm in config order, then trial, then t = 1..T
    let labels = ["tUCB", "sUCB", "UCB1", "EXP3", "EXP3++", "TsallisInf", "RUCB-MAB"];
    for (i, row) in rows.iter().enumerate() {
        let algo = i / 10_000;
        let trial = (i / 1000) % 10;
        let t = i % 1000 + 1;
        assert_eq!(row[0], labels[algo]);
        assert_eq!(row[1].parse::<usize>().unwrap(), trial);
        assert_eq!(row[3].parse::<usize>().unwrap(), t);
        let arm: usize = row[4].parse().unwrap();
        assert!((1..=5).contains(&arm));
        assert!(row[5] == "0" || row[5] == "1");
    }

    // pseudo-regret is the gap sum: +1 whenever arm 2..5 is played
    for chunk in rows.chunks(1000) {
        let mut total = 0.0;
        for row in chunk {
            if row[4] != "1" {
                total += 1.0;
            }
            assert_eq!(row[6].parse::<f64>().unwrap(), total);
        }
    }

    let meta: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join(METADATA_FILE)).unwrap()).unwrap();
    assert_eq!(meta["status"], "complete");
    assert_eq!(meta["config"]["epsilon"], 0.05);
    assert_eq!(meta["config"]["adversary"]["kind"], "bernoulli");
    assert_eq!(meta["algorithms"].as_array().unwrap().len(), 7);
    assert!(meta["max_admissible_alpha"].as_array().unwrap().len() == 4);
    let trimmed = &meta["algorithms"][0];
    assert!(trimmed["regret_bound_sublinear"].as_f64().unwrap() > 0.0);
    assert!(meta["algorithms"][3]["regret_bound_sublinear"].is_null());
}

#[test]
fn aggregate_matches_the_long_form_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RawConfig::from_toml("horizon = 150\ntrials = 6\nepsilon = 0.1\nregret = \"both\"")
        .unwrap()
        .resolve()
        .unwrap();
    run_and_write(&cfg, dir.path()).unwrap();

    let (header, rows) = read_csv(&dir.path().join(TRIALS_FILE));
    assert_eq!(header.last().unwrap(), "realized_regret");
    let mut by_key: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for row in &rows {
        let t: usize = row[3].parse().unwrap();
        by_key.entry((row[0].clone(), t)).or_default().push(row[6].parse().unwrap());
    }
    let (header, agg) = read_csv(&dir.path().join(AGGREGATE_FILE));
    assert_eq!(header, ["algorithm", "t", "mean_regret", "std_regret"]);
    assert_eq!(agg.len(), 7 * 150);
    for row in &agg {
        let values = &by_key[&(row[0].clone(), row[1].parse().unwrap())];
        assert_eq!(values.len(), 6);
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!((row[2].parse::<f64>().unwrap() - mean).abs() < 1e-9);
        assert!((row[3].parse::<f64>().unwrap() - std).abs() < 1e-9);
    }
}

#[test]
fn reruns_are_byte_identical_and_metadata_reproduces_the_run() {
    let root = tempfile::tempdir().unwrap();
    let a = root.path().join("a");
    let b = root.path().join("b");
    let c = root.path().join("c");
    for (dir, threads) in [(&a, "1"), (&b, "4")] {
        let status = crucb()
            .args(["--figure", "6", "--seed", "17", "--threads", threads, "--regret", "both", "--diagnostic-eq2", "--out"])
            .arg(dir)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
    }
    for file in [TRIALS_FILE, AGGREGATE_FILE, DIAGNOSTIC_FILE] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }

    // the sidecar alone suffices; only the output directory changes
    let status = crucb()
        .arg("--config")
        .arg(a.join(METADATA_FILE))
        .arg("--out")
        .arg(&c)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    for file in [TRIALS_FILE, AGGREGATE_FILE, DIAGNOSTIC_FILE] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(c.join(file)).unwrap(), "{file}");
    }
    let meta_a: serde_json::Value = serde_json::from_slice(&fs::read(a.join(METADATA_FILE)).unwrap()).unwrap();
    let meta_c: serde_json::Value = serde_json::from_slice(&fs::read(c.join(METADATA_FILE)).unwrap()).unwrap();
    assert_eq!(meta_a["config"]["master_seed"], 17);
    assert_eq!(meta_a["algorithms"], meta_c["algorithms"]);
    assert!(meta_a["eq2_diagnostic"].as_str().unwrap().contains("not a performance measure"));
}

#[test]
fn different_seeds_change_the_table() {
    let root = tempfile::tempdir().unwrap();
    let cfg = |seed: u64| {
        RawConfig::from_toml(&format!("horizon = 50\ntrials = 2\nmaster_seed = {seed}"))
            .unwrap()
            .resolve()
            .unwrap()
    };
    run_and_write(&cfg(1), &root.path().join("x")).unwrap();
    run_and_write(&cfg(2), &root.path().join("y")).unwrap();
    assert_ne!(
        fs::read(root.path().join("x").join(TRIALS_FILE)).unwrap(),
        fs::read(root.path().join("y").join(TRIALS_FILE)).unwrap()
    );
}

#[test]
fn toml_config_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    fs::write(
        &path,
        r#"
horizon = 40
trials = 3
epsilon = 0.1

[adversary]
kind = "bernoulli"
budget = "enforced"

[[algorithms]]
kind = "crucb-trimmed"

[[algorithms]]
kind = "rucb-mab"
sigma0 = 2.0
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = crucb().arg("--config").arg(&path).arg("--out").arg(&out).output().unwrap().status;
    assert!(status.success());
    let (_, rows) = read_csv(&out.join(TRIALS_FILE));
    assert_eq!(rows.len(), 2 * 3 * 40);
    // enforced budget at epsilon 0.1 leaves the first nine pulls of an arm clean
    let mut pulls: BTreeMap<(String, String, String), usize> = BTreeMap::new();
    for row in &rows {
        let n = pulls.entry((row[0].clone(), row[1].clone(), row[4].clone())).or_default();
        *n += 1;
        if *n < 10 {
            assert_eq!(row[5], "0");
        }
    }
}

#[test]
fn invalid_input_exits_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[[algorithms]]\nkind = \"crucb-trimmed\"\nalpha = 0.6\n").unwrap();
    let out = crucb().arg("--config").arg(&path).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("algorithms[0].alpha"));

    let out = crucb().args(["--figure", "9"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("1a, 1b, 1c, 2a, 2b, 2c, 3, 4, 6"));

    let out = crucb().args(["--figure", "1a", "--config", "x.toml"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn aborted_runs_flush_what_completed() {
    let dir = tempfile::tempdir().unwrap();
    let mut raw = preset("1c").unwrap();
    raw.horizon = Some(30);
    raw.trials = Some(3);
    let cfg = raw.resolve().unwrap();
    let mut run = run_experiment(&cfg).unwrap();
    // simulate an abort in the second algorithm after one trial
    run.algorithms.truncate(2);
    run.algorithms[1].trials.truncate(1);
    run.failure = Some("sUCB: injected".into());
    write_outputs(dir.path(), &cfg, &run).unwrap();

    let (_, rows) = read_csv(&dir.path().join(TRIALS_FILE));
    assert_eq!(rows.len(), (3 + 1) * 30);
    let (_, agg) = read_csv(&dir.path().join(AGGREGATE_FILE));
    assert!(agg.iter().all(|r| r[0] == "tUCB"));
    let meta: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join(METADATA_FILE)).unwrap()).unwrap();
    assert_eq!(meta["status"], "failed");
    assert_eq!(meta["error"], "sUCB: injected");
    assert_eq!(meta["algorithms"][1]["trials_completed"], 1);
    assert!(meta["algorithms"][1]["mean_final_regret"].is_null());
}
