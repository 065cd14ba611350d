//! End-to-end checks of the binary: exit codes, file outputs, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn sepqkd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepqkd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const POINT_ARGS: &[&str] = &[
    "point",
    "--tau",
    "1.1512925464970228",
    "--x",
    "4.5",
    "--distance-km",
    "50",
    "--n0",
    "1",
    "--xi",
    "0.95",
    "--phi",
    "10",
    "--variant",
    "separable",
];

#[test]
fn point_prints_the_equivalent_noise() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepqkd(POINT_ARGS, dir.path());
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let omega_line = text.lines().find(|l| l.starts_with("omega")).unwrap();
    let value: f64 = omega_line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((value - 16.1039).abs() < 1e-3, "omega = {value}");
    assert!(text.contains("chi_be         0.000000"));
}

#[test]
fn conflicting_channel_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = POINT_ARGS.to_vec();
    args.extend_from_slice(&["--eta", "0.5"]);
    let out = sepqkd(&args, dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("eta") && err.contains("distance_km"), "{err}");
}

#[test]
fn missing_required_keys_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepqkd(&["sweep", "--out", "never.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("never.csv").exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "tau = 1.1512925464970228\nx = bound\ndistance_km = 50\nn0 = 1\nxi = 0.95\nphi = 10\nvariant = separable\n",
    )
    .unwrap();
    let out = sepqkd(
        &["point", "--config", cfg.to_str().unwrap(), "--xi", "0.5"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("xi             0.500000"), "{text}");
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--tau",
        "1.1512925464970228",
        "--x",
        "bound",
        "--n0",
        "1",
        "--xi",
        "0.95",
        "--phi",
        "10",
        "--variant",
        "separable",
        "--sweep-param",
        "L",
        "--sweep-start",
        "0",
        "--sweep-stop",
        "250",
        "--sweep-steps",
        "26",
        "--out",
        "a.csv",
    ];
    let out = sepqkd(&args, dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("wrote 26 rows"));
    let first = std::fs::read(dir.path().join("a.csv")).unwrap();

    let mut rerun = args.to_vec();
    let last = rerun.len() - 1;
    rerun[last] = "b.csv";
    sepqkd(&rerun, dir.path());
    let second = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(first, second);

    let mut serial = rerun.clone();
    serial[last] = "c.csv";
    serial.push("--serial");
    sepqkd(&serial, dir.path());
    let third = std::fs::read(dir.path().join("c.csv")).unwrap();
    assert_eq!(first, third);
}

#[test]
fn unwritable_output_path_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "sweep",
        "--tau",
        "1",
        "--x",
        "bound",
        "--n0",
        "1",
        "--xi",
        "0.95",
        "--phi",
        "10",
        "--variant",
        "separable",
        "--sweep-param",
        "L",
        "--sweep-start",
        "0",
        "--sweep-stop",
        "10",
        "--sweep-steps",
        "2",
    ];
    args.extend_from_slice(&["--out", "no_such_dir/x.csv"]);
    let out = sepqkd(&args, dir.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unknown_figure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepqkd(&["figure", "fig3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown figure preset"));
}

#[test]
fn figure_preset_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepqkd(&["figure", "fig8"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("fig8.csv")).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "eta,omega_proposed_n0_1,omega_original_n0_1,omega_proposed_n0_3,\
         omega_original_n0_3,omega_proposed_n0_5,omega_original_n0_5"
    );
}

#[test]
fn certify_reports_ppt_ancilla_at_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = POINT_ARGS.to_vec();
    args[0] = "certify";
    let out = sepqkd(&args, dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let row = text
        .lines()
        .find(|l| l.starts_with("transmitted") && l.contains("C|AB"))
        .unwrap();
    assert!(row.contains("PPT"), "{row}");
}

#[test]
fn sampler_is_reproducible_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = sepqkd(
            &[
                "sample", "--x", "1", "--count", "500", "--seed", seed, "--out", name,
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let a = run("s1.csv", "7");
    let b = run("s2.csv", "7");
    let c = run("s3.csv", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
}
