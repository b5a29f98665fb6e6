use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use neuralbandit::config::ExperimentConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_neuralbandit"))
}

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn grid_lists_fifteen_sorted_models() {
    let out = run(&["grid"]);
    assert!(out.status.success());
    let stdout = text(&out.stdout);
    let rows: Vec<(usize, f64)> = stdout
        .lines()
        .skip(1)
        .filter_map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f.len() == 4).then(|| (f[1].parse().unwrap(), f[2].parse().unwrap()))
        })
        .collect();
    assert_eq!(rows.len(), 15);
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    assert_eq!(rows, sorted);
    assert!(stdout.contains("15 models"));
}

#[test]
fn grid_override_to_one_model() {
    let out = run(&["grid", "--hidden", "1", "--lambdas", "1"]);
    assert!(out.status.success());
    assert!(text(&out.stdout).contains("1 models"));
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert!(out.status.success(), "{}", text(&out.stdout));
}

#[test]
fn corrupted_gradient_names_the_failed_check() {
    let out = run(&["selftest", "--corrupt-gradient-sign"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("selftest failed: gradient check"));
}

#[test]
fn desk_config_runs_and_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(repo("configs/desk.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", text(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("desk.csv")).unwrap();
    let points = neuralbandit::evaluation::parse_csv(csv.as_bytes()).unwrap();
    // 100 record points for each of five policies.
    assert_eq!(points.len(), 500);
    assert!(dir.path().join("desk.manifest.json").exists());
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for parallel in ["1", "3"] {
        let out = bin()
            .args(["run", "--config"])
            .arg(repo("configs/xor.toml"))
            .args([
                "--runs",
                "1",
                "--seed",
                "42",
                "--horizon",
                "20000",
                "--parallel",
                parallel,
                "--out",
            ])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", text(&out.stderr));
        let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
        outputs.push((read("xor.csv"), read("xor.manifest.json")));
    }
    assert!(outputs[0] == outputs[1], "outputs differ between reruns");
}

#[test]
fn missing_dataset_exits_two_with_hint() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(repo("configs/full-stationary.toml"))
        .arg("--out")
        .arg(dir.path())
        .env("NEURALBANDIT_DATA_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("fetch-data"));
}

#[test]
fn invalid_config_exits_one_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "name = \"bad\"\nhorizon = 100\nwindow = 500\n[stream]\nkind = \"xor\"\n[[policies]]\nkind = \"random\"\n",
    )
    .unwrap();
    let out = bin().args(["run", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(
        text(&out.stderr).contains("`window`"),
        "{}",
        text(&out.stderr)
    );

    let out = bin()
        .args(["run", "--config"])
        .arg(repo("configs/xor.toml"))
        .args(["--gamma", "0.7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("gamma"));

    let out = run(&["run", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn full_scale_configs_carry_the_reference_settings() {
    for (file, drift) in [
        ("full-stationary.toml", None),
        ("full-drift.toml", Some(500_000)),
    ] {
        let c = ExperimentConfig::load(&repo(&format!("configs/{file}"))).unwrap();
        assert_eq!(c.gamma, 0.005);
        assert_eq!(c.gamma_model, 0.1);
        assert_eq!(c.runs, 10);
        assert_eq!(c.stream.drift().map(|d| d.period), drift);
        let committees: Vec<_> = c
            .policies
            .iter()
            .filter_map(|p| match p {
                neuralbandit::config::PolicySpec::NeuralBandit2 {
                    hidden, lambdas, ..
                }
                | neuralbandit::config::PolicySpec::NeuralBandit3 {
                    hidden, lambdas, ..
                } => Some((hidden.clone(), lambdas.clone())),
                _ => None,
            })
            .collect();
        assert_eq!(committees.len(), 2);
        for (h, l) in committees {
            assert_eq!(h, vec![1, 5, 25, 50, 100]);
            assert_eq!(l, vec![0.01, 0.1, 1.0]);
        }
    }
}
