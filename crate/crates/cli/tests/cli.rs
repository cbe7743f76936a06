use std::path::Path;
use std::process::Command;

const CONFIG: &str = r#"
[scenario]
n = 50
p = 40
shift_coord = 3
noise_sd = 1.0
seed = 5

[schedule]
s_a = 5.0

[sweep]
n_grid = [40, 50, 60, 70]
replications = 20

[diag]
replications = 4
"#;

fn run(dir: &Path, args: &[&str], threads: &str) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_greedyshift"))
        .args(args)
        .env("GREEDYSHIFT_THREADS", threads)
        .current_dir(dir)
        .output()
        .unwrap()
}

/// File contents with timing fields blanked.
fn snapshot(out: &Path) -> Vec<(String, String)> {
    let mut files: Vec<_> = std::fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .into_iter()
        .map(|f| {
            let text = std::fs::read_to_string(&f).unwrap();
            let text = text
                .lines()
                .filter(|l| !l.trim_start().starts_with("\"wall_time_ms\""))
                .collect::<Vec<_>>()
                .join("\n");
            (f.file_name().unwrap().to_string_lossy().into_owned(), text)
        })
        .collect()
}

#[test]
fn outputs_are_reproducible_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.toml"), CONFIG).unwrap();
    for cmd in ["fit", "rate-sweep", "weights-diag", "simulate"] {
        let mut snaps = Vec::new();
        for (i, threads) in ["1", "4", "4"].iter().enumerate() {
            let out = format!("{cmd}-{i}");
            let o = run(dir.path(), &[cmd, "--config", "cfg.toml", "--out", &out], threads);
            assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
            snaps.push(snapshot(&dir.path().join(out)));
        }
        assert!(!snaps[0].is_empty());
        assert_eq!(snaps[0], snaps[1], "{cmd}: 1 vs 4 threads");
        assert_eq!(snaps[1], snaps[2], "{cmd}: repeated run");
    }
}

#[test]
fn seed_and_method_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.toml"), CONFIG).unwrap();
    let a = run(dir.path(), &["fit", "--config", "cfg.toml", "--out", "a", "--seed", "11", "--method", "oga+hdic"], "2");
    assert!(a.status.success());
    let json = std::fs::read_to_string(dir.path().join("a/run.json")).unwrap();
    assert!(json.contains("\"oga+hdic\""));
    assert!(json.contains("\"seed\": 11"));
    let bad = run(dir.path(), &["fit", "--config", "cfg.toml", "--method", "lasso"], "2");
    assert!(!bad.status.success());
}

#[test]
fn malformed_csv_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("train.csv"), "y,x1,x2\n1.0,0.5,0.25\n2.0,zz,1.0\n").unwrap();
    std::fs::write(
        dir.path().join("cfg.toml"),
        "method = \"oga+hdic\"\n[input]\ntrain = \"train.csv\"\n",
    )
    .unwrap();
    let o = run(dir.path(), &["fit", "--config", "cfg.toml"], "1");
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 2"), "{err}");
}

#[test]
fn rate_sweep_rejects_single_replication() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.toml"), CONFIG.replace("replications = 20", "replications = 1")).unwrap();
    let o = run(dir.path(), &["rate-sweep", "--config", "cfg.toml"], "1");
    assert_eq!(o.status.code(), Some(2));
}
