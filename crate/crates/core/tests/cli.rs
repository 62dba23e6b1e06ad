use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use radar_evidence::feature_model::{fit, read_model, CompositeMode};
use radar_evidence::radar_data::{radar_frame, read_csv, train_test_split, Feature};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_radar-evidence"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn corpus(dir: &Path) -> String {
    let data = path(dir, "data.csv");
    ok(&["generate", "--seed", "7", "-o", &data]);
    data
}

#[test]
fn generate_prints_hash_and_embeds_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(dir.path(), "data.csv");
    let out = ok(&[
        "generate",
        "--seed",
        "7",
        "--count-s",
        "20",
        "--count-m",
        "30",
        "-o",
        &data,
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.split_whitespace().next().unwrap().len(), 64);
    let text = fs::read_to_string(&data).unwrap();
    assert!(text.contains("# tool: radar-evidence "));
    assert!(text.contains("# seed: 7"));
    assert!(text.contains("# config: s.count = 20"));
    let dataset = read_csv(&data).unwrap();
    assert_eq!(dataset.len(), 50);
    assert_eq!(dataset.records.iter().filter(|r| r.label == "m").count(), 30);
}

#[test]
fn generate_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = path(dir.path(), "gen.conf");
    let first = path(dir.path(), "a.csv");
    ok(&[
        "generate",
        "--seed",
        "3",
        "--count-s",
        "5",
        "--count-m",
        "5",
        "-o",
        &first,
    ]);
    let embedded: String = fs::read_to_string(&first)
        .unwrap()
        .lines()
        .filter_map(|l| l.strip_prefix("# config: "))
        .map(|l| format!("{l}\n"))
        .collect();
    fs::write(&config, embedded).unwrap();
    let second = path(dir.path(), "b.csv");
    ok(&["generate", "--config", &config, "-o", &second]);
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn fit_matches_library_fit_on_train_split() {
    let dir = tempfile::tempdir().unwrap();
    let data = corpus(dir.path());
    let model_path = path(dir.path(), "model.txt");
    ok(&["fit", "--input", &data, "-o", &model_path, "--seed", "11"]);
    let from_cli = read_model(&model_path).unwrap();

    let dataset = read_csv(&data).unwrap();
    let split = train_test_split(dataset.len(), 0.7, 11).unwrap();
    let train = dataset.subset(&split.train).unwrap();
    let direct = fit(
        &train.records,
        &[Feature::Density, Feature::Reflection, Feature::Velocity],
        &radar_frame(),
        CompositeMode::SumOfSingletons,
    )
    .unwrap();
    assert_eq!(from_cli, direct);
}

#[test]
fn inject_zero_keeps_records() {
    let dir = tempfile::tempdir().unwrap();
    let data = corpus(dir.path());
    let out = path(dir.path(), "same.csv");
    ok(&["inject", "--input", &data, "-o", &out, "--count", "0"]);
    assert_eq!(read_csv(&data).unwrap().records, read_csv(&out).unwrap().records);
}

#[test]
fn inject_by_indices() {
    let dir = tempfile::tempdir().unwrap();
    let data = corpus(dir.path());
    let out = path(dir.path(), "spoofed.csv");
    ok(&["inject", "--input", &data, "-o", &out, "--indices", "0,5"]);
    let before = read_csv(&data).unwrap();
    let after = read_csv(&out).unwrap();
    for i in [0, 5] {
        assert!(after.records[i].spoofed);
        assert_ne!(after.records[i].label, before.records[i].label);
    }
    assert_eq!(after.records.iter().filter(|r| r.spoofed).count(), 2);
}

#[test]
fn classify_and_evaluate_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let data = corpus(dir.path());
    let model = path(dir.path(), "model.txt");
    let spoofed = path(dir.path(), "spoofed.csv");
    ok(&["fit", "--input", &data, "-o", &model]);
    ok(&[
        "inject", "--input", &data, "-o", &spoofed, "--count", "4", "--seed", "1",
    ]);

    let lines_path = path(dir.path(), "verdicts.jsonl");
    ok(&["classify", "--model", &model, "--input", &spoofed, "-o", &lines_path]);
    let text = fs::read_to_string(&lines_path).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 201);
    assert_eq!(lines[0]["provenance"]["command"], "classify");
    assert_eq!(lines[1]["record_index"], 0);
    assert_eq!(lines.iter().filter(|l| l["spoof_flagged"] == true).count(), 4);

    let report = path(dir.path(), "report.json");
    let plot = path(dir.path(), "plot.csv");
    ok(&[
        "evaluate",
        "--model",
        &model,
        "--input",
        &spoofed,
        "-o",
        &report,
        "--plot-data",
        &plot,
    ]);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["report"]["spoofs_detected"], 4);
    assert_eq!(json["report"]["false_flags"], 0);
    assert_eq!(json["provenance"]["features"], "velocity,reflection");
    let plot_text = fs::read_to_string(&plot).unwrap();
    assert!(plot_text
        .lines()
        .any(|l| l == "index,m_s,m_m,m_sm,decided,claimed,spoofed"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = corpus(dir.path());
    assert_eq!(run(&["fit", "--input", &data]).status.code(), Some(2));
    assert_eq!(run(&["generate"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    let model = path(dir.path(), "m.txt");
    assert_eq!(
        run(&["fit", "--input", &data, "-o", &model, "--features", "speed"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["classify", "--model", &model, "--input", &data, "-o", &model, "--tau", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "inject",
            "--input",
            &data,
            "-o",
            &model,
            "--count",
            "1",
            "--indices",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let data = corpus(dir.path());
    let out = path(dir.path(), "x");
    let missing = path(dir.path(), "missing.csv");
    let fail = run(&["fit", "--input", &missing, "-o", &out]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stderr).contains("does not exist"));

    let nowhere: PathBuf = dir.path().join("no/such/dir/out.csv");
    assert_eq!(
        run(&[
            "inject",
            "--input",
            &data,
            "-o",
            nowhere.to_str().unwrap(),
            "--count",
            "1"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        run(&["inject", "--input", &data, "-o", &out, "--count", "999"])
            .status
            .code(),
        Some(1)
    );

    let bad = path(dir.path(), "bad.csv");
    fs::write(
        &bad,
        "timestamp,density,reflection,velocity,label,spoofed\n0,1,x,0,s,0\n",
    )
    .unwrap();
    let fail = run(&["fit", "--input", &bad, "-o", &out]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stderr).contains("row 1"));

    let thin = path(dir.path(), "thin.csv");
    ok(&["generate", "--count-s", "1", "--count-m", "5", "-o", &thin]);
    let fail = run(&["fit", "--input", &thin, "-o", &out, "--split", "all"]);
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["evaluate", "--help"]).status.code(), Some(0));
}

#[test]
fn zero_counts_give_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(dir.path(), "empty.csv");
    ok(&["generate", "--count-s", "0", "--count-m", "0", "-o", &data]);
    let body: Vec<String> = fs::read_to_string(&data)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect();
    assert_eq!(body, ["timestamp,density,reflection,velocity,label,spoofed"]);
}

#[test]
fn absent_class_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(dir.path(), "moving.csv");
    ok(&["generate", "--count-s", "0", "--count-m", "20", "-o", &data]);
    let out = path(dir.path(), "model.txt");
    let fail = run(&["fit", "--input", &data, "-o", &out]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stderr).contains("class \"s\""));
}

#[test]
fn restricted_features() {
    let dir = tempfile::tempdir().unwrap();
    let data = corpus(dir.path());
    let out = path(dir.path(), "model.txt");
    ok(&["fit", "--input", &data, "-o", &out, "--features", "velocity,reflection"]);
    assert_eq!(
        read_model(&out).unwrap().features(),
        [Feature::Velocity, Feature::Reflection]
    );
}
