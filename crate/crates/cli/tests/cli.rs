use std::path::Path;
use std::process::{Command, Output};

fn jcesd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jcesd"))
        .args(args)
        .output()
        .expect("failed to launch jcesd")
}

fn read_column(path: &Path, name: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let idx = lines
        .next()
        .unwrap()
        .split(',')
        .position(|h| h == name)
        .unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn dynamics_writes_csv_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = jcesd(&[
        "dynamics",
        "--g",
        "0.25",
        "--bell",
        "2",
        "--alpha",
        "pi/12",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c = read_column(&out, "C_exact");
    assert_eq!(c.len(), 1500);
    assert!((c[0] - 0.5).abs() < 1e-10);
    let esd: Vec<[f64; 2]> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.esd.json")).unwrap())
            .unwrap();
    assert!(!esd.is_empty());
    assert!(dir.path().join("run.sources.csv").exists());
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    std::fs::write(&cfg, "g = 0.4\ntmax = 5\nsteps = 51\n").unwrap();
    let out = dir.path().join("o.csv");
    let o = jcesd(&[
        "dynamics",
        "--config",
        cfg.to_str().unwrap(),
        "--steps",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let t = read_column(&out, "t");
    assert_eq!(t.len(), 11);
    assert!((t[10] - 5.0).abs() < 1e-12);
}

#[test]
fn spectrum_lists_both_parities() {
    let o = jcesd(&["spectrum", "--g", "0.5", "--ntr", "16"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,parity,energy,n_tr"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 34);
    assert!(rows.iter().any(|r| r[1] == "+") && rows.iter().any(|r| r[1] == "-"));
    let e: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(e.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn exit_codes() {
    assert_eq!(jcesd(&["dynamics", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(jcesd(&["dynamics", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        jcesd(&["dynamics", "--config", "/nonexistent/x.conf"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(jcesd(&["sweep"]).status.code(), Some(2));
    let o = jcesd(&[
        "dynamics", "--g", "1", "--ntr", "4", "--tmax", "2", "--steps", "5",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_records_failed_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = jcesd(&[
        "sweep",
        "--sweep-g=-0.1,0.1",
        "--tmax",
        "2",
        "--steps",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let points: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.points.json")).unwrap())
            .unwrap();
    let points = points.as_array().unwrap();
    assert_eq!(points.len(), 2);
    assert!(points[0]["error"].is_string());
    assert!(points[1]["error"].is_null());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 6);
}

#[test]
fn unequal_couplings_suppress_revival() {
    // G = 0.9 split as g1 = 2 g2 against identical atoms at the same G
    let dir = tempfile::tempdir().unwrap();
    let run = |g: &str, g2: &str, name: &str| {
        let out = dir.path().join(name);
        let o = jcesd(&[
            "dynamics",
            "--g",
            g,
            "--g2",
            g2,
            "--bell",
            "1",
            "--alpha",
            "pi/4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        let esd: Vec<[f64; 2]> =
            serde_json::from_str(&std::fs::read_to_string(out.with_extension("esd.json")).unwrap())
                .unwrap();
        (read_column(&out, "C_exact"), esd)
    };
    let (asym, asym_esd) = run("0.6", "0.3", "asym.csv");
    let (same, _) = run("0.45", "0.45", "same.csv");
    assert!(!asym_esd.is_empty());
    let late_max = |c: &[f64]| c[750..].iter().copied().fold(0.0, f64::max);
    assert!(
        late_max(&asym) < late_max(&same),
        "{} vs {}",
        late_max(&asym),
        late_max(&same)
    );
}
