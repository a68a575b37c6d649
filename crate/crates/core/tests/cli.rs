//! End-to-end CLI behavior: exit codes, config files, and the
//! header-echo round trip.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qzeno"))
}

#[test]
fn config_error_exits_1() {
    // constraint violation
    let out = bin()
        .args(["--command", "evolve", "--t_m", "2", "--t_d", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_d must be ≥ t_m"));

    // missing command
    let out = bin().args(["--g", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // unknown key in a config file
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "command = evolve\nwibble = 3\n").unwrap();
    let out = bin().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wibble"));
}

#[test]
fn self_test_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("check.csv");
    let out = bin()
        .args(["--command", "analytic-check", "--self-test", "--output"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));

    // and a clean run passes with a full report
    let out = bin()
        .args(["--command", "analytic-check", "--output"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("two-site spectrum"));
    assert!(text.contains("all checks passed"));
}

#[test]
fn header_echo_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("run.csv");
    let status = bin()
        .args(["--preset", "fig9", "--sites", "5", "--sample_dt", "0.1", "--output"])
        .arg(&first)
        .status()
        .unwrap();
    assert!(status.success());
    let bytes1 = std::fs::read(&first).unwrap();

    // feed the emitted file straight back as the config; only the
    // output path is overridden (and echoed), so rewrite it to match
    let text = String::from_utf8(bytes1.clone()).unwrap();
    let cfg = dir.path().join("echo.cfg");
    std::fs::write(&cfg, &text).unwrap();
    let status = bin().arg("--config").arg(&cfg).status().unwrap();
    assert!(status.success());
    // the echoed output key points at the original path, which the
    // second run overwrote; compare against the fresh bytes
    let bytes2 = std::fs::read(&first).unwrap();
    assert_eq!(bytes1, bytes2, "header echo did not reproduce the run");
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out1 = dir.path().join("a.csv");
    std::fs::write(&cfg, "command = t1-curve\npoints = 7\n").unwrap();
    let status = bin()
        .arg("--config")
        .arg(&cfg)
        .args(["--delta_min", "-1", "--delta_max", "1", "--output"])
        .arg(&out1)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out1).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 7);
    let first: f64 = data[0].split(',').next().unwrap().parse().unwrap();
    let last: f64 = data[6].split(',').next().unwrap().parse().unwrap();
    assert_eq!(first, -1.0);
    assert_eq!(last, 1.0);
}

#[test]
fn survival_family_has_labels_and_references() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let status = bin()
        .args(["--preset", "fig4", "--points", "6", "--output"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    for label in ["shift=0,", "shift=1,", "shift=2,", "free_eps=0,", "free_eps=-pi,"] {
        assert!(text.contains(label), "missing {label}");
    }
}

#[test]
fn evolve_rows_carry_segment_labels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let status = bin()
        .args(["--command", "evolve", "--sites", "5", "--t_m", "0.5", "--t_f", "0.5", "--output"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let segs: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert!(segs.contains(&"M") && segs.contains(&"F"));
    assert!(segs.iter().all(|s| *s == "M" || *s == "F"));
}

#[test]
fn heatmap_mask_in_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let status = bin()
        .args([
            "--command", "map-tm-td", "--sites", "5", "--points", "4", "--tm_min", "0.2",
            "--tm_max", "1.0", "--td_min", "0.2", "--td_max", "1.4", "--eval_t", "3", "--output",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 16);
    assert!(data.iter().any(|l| l.ends_with(",,1")));
    assert!(data.iter().any(|l| l.ends_with(",0")));
}
