use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tmsim_cli::config::{RunConfig, VerifyTarget};
use tmsim_cli::learn::ModelFile;
use tmsim_cli::verify::verify_with;
use tmsim_cli::{load_dataset, replay, run, CommandSpec};
use tmsim_core::conformance::FeedbackImpl;
use tmsim_core::feedback::{fb3, FeedbackType, TaCommand};

fn iris() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/iris_binary.txt")
}

fn tmsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmsim")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn config(out: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.dataset.path = iris();
    cfg.out_dir = out.to_path_buf();
    cfg
}

#[test]
fn iris_file_shape() {
    let ds = load_dataset(&iris(), None, 0, 0.2, 1).unwrap();
    assert_eq!((ds.len(), ds.feature_count), (150, 16));
    assert_eq!(ds.samples.iter().filter(|s| s.label).count(), 50);
    assert_eq!((ds.train.len(), ds.test.len()), (120, 30));
    assert!((ds.majority_baseline() - 20.0 / 30.0).abs() < 1e-12);
}

#[test]
fn zero_epochs_snapshot_is_untrained() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.train.epochs = 0;
    cfg.train.snapshot_epochs = vec![0];
    run(&CommandSpec::Train, &cfg).unwrap();
    let (model, _) = ModelFile::load(&dir.path().join("model.json")).unwrap();
    assert_eq!(model.snapshots.len(), 1);
    let snap = &model.snapshots[0];
    assert_eq!(snap.epoch, 0);
    assert!(snap.exclude.iter().flatten().all(|&e| e));
    assert_eq!(snap, &model.machine.snapshot());
    let csv = std::fs::read_to_string(dir.path().join("train_epochs.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);

    cfg.train.snapshot_epochs = vec![0, 4];
    assert!(run(&CommandSpec::Train, &cfg).is_err());
}

#[test]
fn same_seed_gives_identical_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = tmsim(&["train", "--dataset", s(&iris()), "--epochs", "8", "--snapshot-epochs", "0,8", "--out-dir", s(dir.path())]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["train_epochs.csv", "model.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    let outputs = |dir: &Path| {
        let m: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join("train.manifest.json")).unwrap()).unwrap();
        m["outputs"].clone()
    };
    assert_eq!(outputs(a.path()), outputs(b.path()));
    let c = tempfile::tempdir().unwrap();
    tmsim(&["train", "--dataset", s(&iris()), "--epochs", "8", "--snapshot-epochs", "0,8", "--seed", "2", "--out-dir", s(c.path())]);
    assert_ne!(
        std::fs::read(a.path().join("train_epochs.csv")).unwrap(),
        std::fs::read(c.path().join("train_epochs.csv")).unwrap()
    );
}

#[test]
fn latency_writes_four_histograms_per_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let d = s(dir.path());
    let ds = iris();
    assert!(tmsim(&["train", "--dataset", s(&ds), "--epochs", "6", "--snapshot-epochs", "0,2,6", "--out-dir", d]).status.success());
    let o = tmsim(&["latency", "--dataset", s(&ds), "--snapshot-epochs", "0,2,6", "--out-dir", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("e0="));
    for e in [0, 2, 6] {
        for c in ["end_to_end", "clause", "popcount", "comparator"] {
            let csv = std::fs::read_to_string(dir.path().join(format!("latency_e{e}_{c}.csv"))).unwrap();
            assert!(csv.starts_with("bin_low,bin_high,count\n"));
            assert_eq!(csv.lines().count(), 21);
        }
        let rows = std::fs::read_to_string(dir.path().join(format!("latency_e{e}_samples.csv"))).unwrap();
        assert_eq!(rows.lines().count(), 151);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("latency_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["version"], 1);
    assert_eq!(summary["snapshots"].as_array().unwrap().len(), 3);
    let scale = summary["scales"]["end_to_end"].as_f64().unwrap();
    for snap in summary["snapshots"].as_array().unwrap() {
        assert_eq!(snap["prediction_mismatches"], 0);
        assert_eq!(snap["components"]["end_to_end"]["stats"]["scale"].as_f64().unwrap(), scale);
    }

    let missing = tmsim(&["latency", "--dataset", s(&ds), "--snapshot-epochs", "3", "--out-dir", d]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("no snapshot for epoch 3"));
}

#[test]
fn latency_rejects_empty_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.train.epochs = 0;
    cfg.train.snapshot_epochs = vec![0];
    run(&CommandSpec::Train, &cfg).unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "# nothing\n").unwrap();
    cfg.dataset.path = empty;
    let err = run(&CommandSpec::Latency { model: dir.path().join("model.json") }, &cfg).unwrap_err();
    assert!(err.to_string().contains("no samples"), "{err}");
}

#[test]
fn bad_dataset_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 0 1 0 0\n0 3 1 0 1\n").unwrap();
    let o = tmsim(&["train", "--dataset", s(&bad), "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    std::fs::write(&file, "seed = 5\n[machine]\nd_period = 10\nthreshold = 9\n[train]\nepochs = 3\n").unwrap();
    let o = tmsim(&["config", "--config", s(&file), "--d-period", "100", "--fb2-polarity", "published"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cfg = RunConfig::from_toml(&stdout(&o)).unwrap();
    assert_eq!(cfg.seed, 5);
    assert_eq!(cfg.machine.threshold, 9);
    assert_eq!(cfg.machine.d_period, 100);
    assert_eq!(cfg.train.epochs, 3);
    assert_eq!(cfg.machine.fb2_polarity, tmsim_core::Fb2Polarity::Published);

    std::fs::write(&file, "[machine]\nthreshold = 0\n").unwrap();
    assert_eq!(tmsim(&["config", "--config", s(&file)]).status.code(), Some(2));
    assert_eq!(tmsim(&["config", "--fb2-polarity", "sideways"]).status.code(), Some(2));
}

#[test]
fn delay_table_flag_changes_latency() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("delays.toml");
    std::fs::write(&table, "and2 = 2.0\nmerge = 0.5\n").unwrap();
    let mut cfg = config(dir.path());
    cfg.train.epochs = 2;
    cfg.train.snapshot_epochs = vec![2];
    run(&CommandSpec::Train, &cfg).unwrap();
    let model = dir.path().join("model.json");
    let unit = tmsim_cli::latency::latency(&cfg, &model).unwrap().1;
    let resolved = RunConfig::resolve(
        None,
        &tmsim_cli::Overrides { delay_table: Some(table), dataset: Some(iris()), ..Default::default() },
    )
    .unwrap();
    assert_eq!(resolved.latency.delays.and2, 2.0);
    assert_eq!(resolved.latency.delays.or2, 1.0);
    let mut slow = cfg.clone();
    slow.latency = resolved.latency;
    let slowed = tmsim_cli::latency::latency(&slow, &model).unwrap().1;
    let raw = |s: &tmsim_cli::latency::LatencySummary| s.snapshots[0].components["clause"].raw_mean;
    assert!(raw(&slowed) > raw(&unit));
}

#[test]
fn verify_passes_and_reports_reachable_states() {
    let dir = tempfile::tempdir().unwrap();
    let o = tmsim(&["verify", "--target", "fb-tables,stg", "--out-dir", s(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("fb-tables: pass (3 + 12 + 48 cases)"), "{out}");
    assert!(out.contains("stg: pass (110 reachable states)"), "{out}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
    assert!(json.get("ta_equivalence").is_none());
    assert_eq!(json["stg"]["report"]["deadlock_free"]["pass"], true);
}

fn mutated_fb3(f: FeedbackType, inc: bool, c: bool, x: bool, q3: bool) -> TaCommand {
    if (f, inc, c, x, q3) == (FeedbackType::Type1, true, true, false, true) {
        TaCommand::Penalty
    } else {
        fb3(f, inc, c, x, q3)
    }
}

#[test]
fn injected_fb3_mutation_fails_with_offending_row() {
    let mut cfg = RunConfig::default();
    cfg.verify.targets = vec![VerifyTarget::FbTables];
    let (out, summary) = verify_with(&cfg, &FeedbackImpl { fb3: mutated_fb3, ..FeedbackImpl::default() }).unwrap();
    assert!(!out.success && !summary.pass);
    assert!(out.summary.contains("fb-tables: FAIL"));
    assert!(out.summary.contains("mismatch at fb2=Type1 inc=1 c=1 x=0 q3=1: expected Reward, got Penalty"), "{}", out.summary);
}

#[test]
fn prbg_writes_stats_and_raw_bits() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.prbg.samples = 1001;
    cfg.prbg.gated_cycles = 500;
    let rec = run(&CommandSpec::Prbg, &cfg).unwrap();
    for duty in ["0.25", "0.5", "0.75"] {
        let bits = std::fs::read(dir.path().join(format!("prbg_duty_{duty}.bin"))).unwrap();
        assert_eq!(bits.len(), 126);
    }
    assert_eq!(rec.manifest.outputs.len(), 4);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("prbg.json")).unwrap()).unwrap();
    assert_eq!(json["lfsr"]["period"], 255);
    assert_eq!(json["lfsr"]["ones_per_period"], 128);
}

#[test]
fn replay_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let d = s(dir.path());
    let o = tmsim(&["prbg", "--out-dir", d, "--seed", "4", "--config", s(&write_small_prbg(dir.path()))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = dir.path().join("prbg.manifest.json");

    let again = dir.path().join("again");
    let ok = tmsim(&["replay", s(&manifest), "--out-dir", s(&again)]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("identical"));
    assert_eq!(
        std::fs::read(dir.path().join("prbg.json")).unwrap(),
        std::fs::read(again.join("prbg.json")).unwrap()
    );

    let mut m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    m["outputs"]["prbg.json"] = serde_json::Value::String("0".repeat(64));
    std::fs::write(&manifest, serde_json::to_string(&m).unwrap()).unwrap();
    let bad = tmsim(&["replay", s(&manifest), "--out-dir", s(&again)]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("DIFFERS   prbg.json"));

    let report = replay(&manifest, Some(&again)).unwrap();
    assert!(!report.identical);
}

fn write_small_prbg(dir: &Path) -> PathBuf {
    let p = dir.join("small.toml");
    std::fs::write(&p, "[prbg]\nsamples = 2000\ngated_cycles = 200\n").unwrap();
    p
}

#[test]
fn eval_reports_accuracy_and_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.train.epochs = 10;
    cfg.train.snapshot_epochs = vec![0, 10];
    run(&CommandSpec::Train, &cfg).unwrap();
    let (_, report) = tmsim_cli::learn::eval(&cfg, &dir.path().join("model.json")).unwrap();
    let c = report.test_confusion;
    assert_eq!(c.tp + c.fp + c.tn + c.fn_, 30);
    assert!((report.majority_baseline - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(report.snapshots.len(), 2);
    assert_eq!(report.snapshots[1].test_accuracy, report.test_accuracy);
    assert!(report.test_accuracy.unwrap() > report.majority_baseline);
}
