use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SCAN: &str = r#"
[model]
kind = "cluster"
len = 8

[scan]
param = "h"
grid = [0.1, 0.6, 1.5]
"#;

const DISORDER: &str = r#"
[model]
kind = "cluster-disordered"
len = 8
h = 0.24

[disorder]
strengths = [0.5, 1.0]
samples = 3
base_seed = 11

[output]
csv = "dis.csv"
checkpoints = true
"#;

fn tsre(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsre"))
        .args(args)
        .env("RUST_LOG", "warn")
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn run_config(dir: &Path, text: &str, out: &str) -> Output {
    fs::write(dir.join("cfg.toml"), text).unwrap();
    tsre(dir, &["--config", "cfg.toml", "--out-dir", out, "run"])
}

/// File contents with the trailing timestamp column removed.
fn without_timestamps(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| if l.starts_with('#') { l } else { l.rsplit_once(',').map_or(l, |(head, _)| head) })
        .collect::<Vec<_>>()
        .join("\n")
}

fn records(path: &Path) -> Vec<csv::StringRecord> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    let head = rdr.headers().unwrap().clone();
    let mut out = vec![head];
    out.extend(rdr.records().map(Result::unwrap));
    out
}

fn column(recs: &[csv::StringRecord], name: &str) -> Vec<String> {
    let i = recs[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    recs[1..].iter().map(|r| r[i].to_string()).collect()
}

#[test]
fn scan_is_reproducible_and_resumable() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    for out in ["a", "b"] {
        let o = run_config(p, SCAN, out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = without_timestamps(&p.join("a/results.csv"));
    assert_eq!(a, without_timestamps(&p.join("b/results.csv")));
    assert!(a.starts_with("# tsre-csv v1"));
    assert!(a.contains("# | kind = \"cluster\""));

    let recs = records(&p.join("a/results.csv"));
    assert_eq!(recs.len(), 4);
    assert!(column(&recs, "status").iter().all(|s| s == "ok"));
    let m: Vec<f64> = column(&recs, "m_topo").iter().map(|s| s.parse().unwrap()).collect();
    assert!(m[0] > 0.6 && m[2].abs() < 0.05, "{m:?}");

    // interrupted after one complete row and half of the next
    let path = p.join("b/results.csv");
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let header_lines = lines.iter().position(|l| l.starts_with("point,")).unwrap() + 1;
    let mut cut = lines[..header_lines + 1].join("\n");
    cut.push('\n');
    cut.push_str(&lines[header_lines + 1][..10]);
    fs::write(&path, cut).unwrap();
    let o = run_config(p, SCAN, "b");
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("1 resumed"));
    assert_eq!(a, without_timestamps(&path));

    // a different configuration must not append to the same file
    let o = run_config(p, &SCAN.replace("1.5]", "1.4]"), "b");
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("different configuration"));
}

#[test]
fn seed_override_changes_disorder() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let o = run_config(p, DISORDER, "a");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = tsre(p, &["--config", "cfg.toml", "--out-dir", "b", "--seed", "99", "run"]);
    assert!(o.status.success());
    let seeds = |d: &str| column(&records(&p.join(d).join("dis.csv")), "seed");
    assert_eq!(seeds("a"), ["11", "12", "13", "11", "12", "13"]);
    assert_eq!(seeds("b"), ["99", "100", "101", "99", "100", "101"]);
    assert_ne!(column(&records(&p.join("a/dis.csv")), "m_topo"), column(&records(&p.join("b/dis.csv")), "m_topo"));
    assert_eq!(fs::read_dir(p.join("a/checkpoints")).unwrap().count(), 6);
}

#[test]
fn disorder_summary_matches_rows() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let o = run_config(p, DISORDER, "out");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = records(&p.join("out/dis.csv"));
    let summary = records(&p.join("out/dis_summary.csv"));
    let m: Vec<f64> = column(&rows, "m_topo").iter().map(|s| s.parse().unwrap()).collect();
    let means: Vec<f64> = column(&summary, "m_topo_mean").iter().map(|s| s.parse().unwrap()).collect();
    let errs: Vec<f64> = column(&summary, "m_topo_stderr").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(column(&summary, "samples"), ["3", "3"]);
    for (k, chunk) in m.chunks(3).enumerate() {
        let mean = chunk.iter().sum::<f64>() / 3.0;
        let var = chunk.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 2.0;
        assert!((means[k] - mean).abs() < 1e-12);
        assert!((errs[k] - (var / 3.0).sqrt()).abs() < 1e-12);
    }

    // rerunning a finished campaign reuses every row and checkpoint
    let before = without_timestamps(&p.join("out/dis.csv"));
    let o = run_config(p, DISORDER, "out");
    assert!(String::from_utf8_lossy(&o.stdout).contains("6 resumed"));
    assert_eq!(before, without_timestamps(&p.join("out/dis.csv")));
}

#[test]
fn invalid_configs_name_the_key() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let cases = [
        (format!("{SCAN}[doping]\npattern = \"first-k\"\ncount = 12\n"), "doping.count"),
        (SCAN.replace("[0.1, 0.6, 1.5]", "[0.6, 0.1]"), "scan.grid"),
        (SCAN.replace("param = \"h\"", "param = \"q\""), "scan.param"),
        (SCAN.replace("len = 8", "len = 8\ncolour = 3"), "colour"),
        (format!("{SCAN}[sre]\ngeometry = \"hex\"\nn = 2\ncutoff = 0.0\nentanglement = false\n"), "sre.geometry"),
    ];
    for (text, key) in cases {
        let o = run_config(p, &text, "out");
        assert!(!o.status.success());
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(key), "expected {key} in {err}");
    }
}

#[test]
fn verify_detects_tampered_golden() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let o = tsre(p, &["verify", "quick"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("criterion 1"));

    let o = tsre(p, &["--out-dir", "t", "tables", "--points", "5"]);
    assert!(o.status.success());
    for f in ["fixed_points.csv", "tci_l8.csv", "golden.csv"] {
        assert!(p.join("t").join(f).exists(), "{f} missing");
    }
    let golden = p.join("t/golden.csv");
    let o = tsre(p, &["verify", "quick", "--golden", golden.to_str().unwrap()]);
    assert!(o.status.success());

    let text = fs::read_to_string(&golden).unwrap();
    let line = text.lines().find(|l| l.starts_with("1,")).unwrap();
    let (head, value) = line.rsplit_once(',').unwrap();
    let bumped = format!("{head},{:e}", value.parse::<f64>().unwrap() + 1e-3);
    fs::write(&golden, text.replacen(line, &bumped, 1)).unwrap();
    let o = tsre(p, &["verify", "quick", "--golden", golden.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAILED: criterion 1"));
}

#[test]
fn oracle_agrees_with_exact_diagonalization() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let text = SCAN.replace("[0.1, 0.6, 1.5]", "[0.3, 1.2]").replace("kind = \"cluster\"", "kind = \"tfim\"");
    // a bond cap of 4^(L/2) keeps the Pauli MPS exact
    let text = format!("{text}[sre]\ngeometry = \"quad\"\nn = 2\nmax_bond = 256\ncutoff = 0.0\nentanglement = true\n");
    fs::write(p.join("cfg.toml"), text).unwrap();
    let o = tsre(p, &["--config", "cfg.toml", "--out-dir", "o", "oracle"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let recs = records(&p.join("o/oracle.csv"));
    let num = |name: &str| column(&recs, name).iter().map(|s| s.parse::<f64>().unwrap()).collect::<Vec<_>>();
    for (a, b) in [("e_dmrg", "e_exact"), ("m_topo_engine", "m_topo_exact"), ("s_topo_engine", "s_topo_exact")] {
        for (x, y) in num(a).iter().zip(num(b)) {
            assert!((x - y).abs() < 1e-8, "{a} {x} vs {b} {y}");
        }
    }
}
