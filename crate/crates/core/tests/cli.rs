use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn model(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(file)
}

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_burgers-crit"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Coarse grid so the viscous runs take a fraction of a second.
const COARSE: [&str; 8] = ["--x-min", "-10", "--x-max", "10", "--nx", "800", "--tau", "1e-3"];

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn catastrophe_prints_point_and_constants() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("burgers.model");
    let o = run(dir.path(), &["catastrophe", "--model", m.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("x0        1.732050807569"), "{text}");
    assert!(text.contains("t0        1.539600717839"), "{text}");
    assert!(text.contains("gamma     0.777460987221"), "{text}");

    let g = model("generalized.model");
    let o = run(dir.path(), &["catastrophe", "--model", g.to_str().unwrap()]);
    assert!(stdout(&o).contains("gamma     0.7235089724"), "{}", stdout(&o));
}

#[test]
fn increasing_data_has_no_catastrophe() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("burgers.model");
    let o = run(dir.path(), &["catastrophe", "--model", m.to_str().unwrap(), "--F", "x"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.starts_with("error\tkind=inviscid\tmessage=no steepening"), "{err}");
}

#[test]
fn parabola_is_not_monotone_on_symmetric_branch() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("burgers.model");
    let o = run(
        dir.path(),
        &["catastrophe", "--model", m.to_str().unwrap(), "--F", "x^2", "--branch-lo", "-1", "--branch-hi", "1"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kind=model") && stderr(&o).contains("x = 0"), "{}", stderr(&o));
}

#[test]
fn missing_model_file_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["solve", "--model", "no/such.model", "--t", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kind=model") && stderr(&o).contains("no/such.model"), "{}", stderr(&o));
}

#[test]
fn empty_eps_list_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("burgers.model");
    let o = run(dir.path(), &["mass", "--model", m.to_str().unwrap(), "--eps", ""]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind=usage"), "{}", stderr(&o));
}

#[test]
fn initial_snapshot_matches_data_and_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("burgers.model");
    let mut args = vec!["solve", "--model", m.to_str().unwrap(), "--eps", "0.05", "--t", "0,0.5"];
    args.extend(COARSE);
    let o = run(dir.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = dir.path().join("burgers_snapshot_eps0.05_t0.csv");
    let text = std::fs::read_to_string(&first).unwrap();
    assert!(text.starts_with("# model=burgers eps=0.05 t=0 nx=800 tau=0.001\nx,u\n"), "{text:.80}");
    let rows = read_csv(&first);
    assert_eq!(rows.len(), 801);
    for r in &rows {
        assert!((r[1] - 1.0 / (1.0 + r[0] * r[0])).abs() < 1e-15);
    }

    let later = dir.path().join("burgers_snapshot_eps0.05_t0.5.csv");
    let before = std::fs::read(&later).unwrap();
    let again = tempfile::tempdir().unwrap();
    assert!(run(again.path(), &args).status.success());
    assert_eq!(before, std::fs::read(again.path().join("burgers_snapshot_eps0.05_t0.5.csv")).unwrap());
}

#[test]
fn mass_series_starts_at_zero_drift() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("generalized.model");
    let mut args = vec!["mass", "--model", m.to_str().unwrap(), "--eps", "0.1,0.05", "--t-end", "0.5"];
    args.extend(COARSE);
    let o = run(dir.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    for eps in ["0.1", "0.05"] {
        let rows = read_csv(&dir.path().join(format!("generalized_mass_eps{eps}.csv")));
        assert_eq!(rows[0][0], 0.0);
        assert_eq!(rows[0][2], 0.0);
        assert_eq!(rows.len(), 501);
        assert!(rows.iter().all(|r| r[2].abs() < 5e-3));
    }
}

#[test]
fn shockfront_starts_at_catastrophe() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("burgers.model");
    let o = run(dir.path(), &["shockfront", "--model", m.to_str().unwrap(), "--dt", "1e-3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("burgers_shock.csv"));
    let (t0, x0) = (8.0 * 3f64.sqrt() / 9.0, 3f64.sqrt());
    assert!((rows[0][0] - t0).abs() < 1e-5 && (rows[0][1] - x0).abs() < 1e-5, "{:?}", rows[0]);
    assert!(rows.iter().all(|r| r[6] <= 1e-6));
    assert!((rows[rows.len() - 1][0] - 1.8).abs() < 1e-12);
    for r in &rows {
        // u_left = F(a1), u_right = F(a2)
        assert!((r[4] - 1.0 / (1.0 + r[2] * r[2])).abs() < 1e-15);
        assert!((r[5] - 1.0 / (1.0 + r[3] * r[3])).abs() < 1e-15);
    }
}

#[test]
fn shockfront_before_catastrophe_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("burgers.model");
    let o = run(dir.path(), &["shockfront", "--model", m.to_str().unwrap(), "--t-end", "1.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind=usage"));
}

#[test]
fn profile_grid_is_odd_in_x() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["profile", "--x-range", "-3,3", "--t-range", "-2,2", "--points", "7,5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("profile.csv"));
    assert_eq!(rows.len(), 35);
    for row in rows.chunks(7) {
        assert_eq!(row[3][2], 0.0);
        for k in 0..3 {
            assert!((row[k][2] + row[6 - k][2]).abs() < 1e-9);
        }
    }

    let o = run(dir.path(), &["profile", "--x-range", "54,54", "--t-range", "-36,-36", "--points", "1,1"]);
    assert!(o.status.success());
    let u = read_csv(&dir.path().join("profile.csv"))[0][2];
    assert!((u + 1.420).abs() < 0.03, "{u}");
}

#[test]
fn compare_with_one_eps_skips_the_fit() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("burgers.model");
    let mut args = vec![
        "compare", "--model", m.to_str().unwrap(), "--eps", "0.05", "--t", "1.54", "--x", "1.74,1.76", "--overlay", "0",
    ];
    args.extend(COARSE);
    let o = run(dir.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("slope fit skipped"));
    let rows = read_csv(&dir.path().join("burgers_compare.csv"));
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r[5], (r[3] - r[4]).abs());
    }
}

#[test]
fn compare_fits_slope_and_writes_overlays() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("burgers.model");
    let mut args = vec![
        "compare", "--model", m.to_str().unwrap(), "--eps", "0.05,0.1", "--t", "1.54", "--x", "1.74,1.76", "--fit", "per-point",
    ];
    args.extend(COARSE);
    let o = run(dir.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("slope "), "{}", stdout(&o));
    let overlay = read_csv(&dir.path().join("burgers_overlay_eps0.1.csv"));
    assert!(overlay.len() > 10);
    assert!(overlay.iter().all(|r| (r[0] - 1.75).abs() <= 0.5));
}
