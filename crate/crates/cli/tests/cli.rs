use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use swipt_cnoma::experiments::CSV_HEADER;
use swipt_cnoma::{figure_preset, to_config_string, Figure};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_swipt-cnoma"));
    cmd.env_remove("SWIPT_CNOMA_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn presets_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presets")
}

#[test]
fn shipped_presets_match_library() {
    let update = std::env::var_os("UPDATE_PRESETS").is_some();
    for fig in Figure::ALL {
        let path = presets_dir().join(format!("{fig}.cfg"));
        let expected = to_config_string(&figure_preset(fig));
        if update {
            fs::create_dir_all(presets_dir()).unwrap();
            fs::write(&path, &expected).unwrap();
        }
        let shipped = fs::read_to_string(&path).unwrap_or_default();
        assert_eq!(
            shipped,
            expected,
            "{} is stale; rerun with UPDATE_PRESETS=1",
            path.display()
        );
    }
}

#[test]
fn validate_accepts_shipped_presets() {
    for fig in Figure::ALL {
        let path = presets_dir().join(format!("{fig}.cfg"));
        let o = run(&["validate", path.to_str().unwrap()]);
        assert!(
            o.status.success(),
            "{fig}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn validate_rejects_swapped_power_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "p_n = 0.6\np_f = 0.4\n").unwrap();
    let o = run(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p_N < p_F"));
}

#[test]
fn figure_emits_full_grid() {
    let o = run(&["figure", "fig5", "--trials", "500", "--seed", "42"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 7 * 4);
    assert!(lines[1..]
        .iter()
        .all(|l| l.starts_with("rho_db,") && l.ends_with(",500")));
}

#[test]
fn identical_command_lines_give_identical_bytes() {
    let args = ["figure", "fig9", "--trials", "300", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&[
        "figure",
        "fig9",
        "--trials",
        "300",
        "--seed",
        "7",
        "--workers",
        "1",
    ]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn point_prints_one_row_per_scheme() {
    let o = run(&["point", "--overrides", "rho_db=15", "--trials", "200"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for (row, scheme) in rows
        .iter()
        .zip(["cnoma-ps-oam", "cnoma-ps", "cnoma-ts", "oma-ps-oam"])
    {
        assert!(row.starts_with(scheme));
        assert_eq!(row.split(',').count(), 10);
    }
}

#[test]
fn error_exit_codes() {
    let o = run(&["figure", "fig11"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fig11"));

    let o = run(&["figure", "fig5", "--overrides", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["figure", "fig5", "--overrides", "warp=9"]);
    assert_eq!(o.status.code(), Some(2));
    // δ > 1 is an invalid override.
    let o = run(&["figure", "fig5", "--overrides", "delta=1.5"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["sweep", "/definitely/not/here.cfg"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_writes_configured_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res").join("delta.csv");
    let cfg = dir.path().join("delta.cfg");
    fs::write(
        &cfg,
        format!(
            "axis = delta\naxis_values = 0.1,0.5,0.9\nschemes = cnoma-ts,cnoma-ps\nmetrics = c_sum,ee\nn_trials = 300\noutput = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = run(&["sweep", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2 * 2);
    let second = text.lines().nth(1).unwrap();
    assert!(second.starts_with("delta,0.1,cnoma-ps,c_sum,"), "{second}");
}

#[test]
fn out_dir_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["figure", "fig7", "--trials", "100"])
        .env("SWIPT_CNOMA_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("fig7.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 19 * 4);

    // An explicit `--out -` still goes to stdout.
    let o = bin()
        .args(["figure", "fig7", "--trials", "100", "--out", "-"])
        .env("SWIPT_CNOMA_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.stdout, text.as_bytes());
}
