//! End-to-end tests of the command-line surface: exit codes, file formats,
//! and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sgi"))
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sgi-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(tag: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("sgi-cli-cfg-{tag}-{}.ini", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const MINIMAL: &str = "\
[squid]
capacitance = 1.0e-12
inductance = 1.0e-10
critical_current = 1.0e-5
resistance = 1.0
ring_width = 1.0e-5
ring_length = 1.0e-3

[apparatus]
geometry_factor = 1.0e13
particle_mass = 1.8e-25
initial_width = 1.0e-6
beam_velocity = 1000.0
apparatus_length = 1.0e-3
temperature = 0.1

[bath]
l0_override = 1.0e-10

[profile]
preset = balanced4
";

#[test]
fn run_writes_trace_units_and_svg() {
    let dir = tempdir("run");
    let out = bin()
        .args(["run", "--preset", "noiseless", "--samples", "50", "--svg", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));

    let csv = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,z_plus,z_minus,sigma_tilde,h,coherence,sx"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 51);
    // 17 significant digits: mantissa with 16 decimal places
    let first_field = rows[1].split(',').next().unwrap();
    let mantissa = first_field.split('e').next().unwrap();
    assert_eq!(mantissa.split('.').nth(1).unwrap().len(), 16);
    // noiseless revival: final coherence back to 1
    let last: Vec<f64> = rows
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((last[5] - 1.0).abs() < 1e-6);
    assert!((last[4] - 1.0).abs() < 1e-12);

    let units = std::fs::read_to_string(dir.join("units.txt")).unwrap();
    for column in ["t", "z_plus", "sigma_tilde", "coherence", "sx"] {
        assert!(units.contains(column), "units.txt missing {column}");
    }
    let svg = std::fs::read_to_string(dir.join("trace.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn run_is_deterministic() {
    let d1 = tempdir("det1");
    let d2 = tempdir("det2");
    for d in [&d1, &d2] {
        let out = bin()
            .args(["run", "--preset", "noisy-desk", "--samples", "60", "--out"])
            .arg(d)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let a = std::fs::read(d1.join("trace.csv")).unwrap();
    let b = std::fs::read(d2.join("trace.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_errors_exit_2_with_line_numbers() {
    // unknown key
    let bad = write_config("unknown-key", &format!("{MINIMAL}\nbogus = 1\n"));
    let out = bin().args(["estimate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"), "{}", stderr(&out));

    // malformed number, line-anchored
    let bad = write_config(
        "bad-number",
        &MINIMAL.replace("capacitance = 1.0e-12", "capacitance = pony"),
    );
    let out = bin().args(["estimate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    // missing file and unknown preset
    let out = bin().args(["estimate", "--config", "/nonexistent.ini"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["estimate", "--preset", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_errors_exit_3() {
    // a huge capacitance puts the cutoff frequencies off the real axis
    let bad = write_config(
        "cutoff",
        &MINIMAL.replace("capacitance = 1.0e-12", "capacitance = 1.0"),
    );
    let out = bin().args(["estimate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("unusable circuit"), "{}", stderr(&out));
}

#[test]
fn estimate_reports_paper_scale_values() {
    let dir = tempdir("estimate");
    let out = bin()
        .args(["estimate", "--preset", "paper-squid", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let table = String::from_utf8_lossy(&out.stdout).into_owned();
    for quantity in [
        "L0", "epsilon", "eta", "Omega", "Omega_prime", "gamma", "relaxation_time", "f0",
        "many_minima_ratio",
    ] {
        assert!(table.contains(quantity), "missing {quantity} in:\n{table}");
    }
    let csv = std::fs::read_to_string(dir.join("estimate.csv")).unwrap();
    assert!(csv.starts_with("quantity,value,unit\n"));
    let eta: f64 = csv
        .lines()
        .find(|l| l.starts_with("eta,"))
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(eta > 1e-41 && eta < 1e-39);
}

#[test]
fn sweep_rows_follow_grid_order() {
    let cfg = write_config(
        "sweep",
        &format!("{MINIMAL}\n[sweep]\naxis = eta_scale\nvalues = 0, 1, 100\n"),
    );
    let dir = tempdir("sweep");
    let out = bin().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(&dir).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "eta_scale,tau,coherence_at_t_exp");
    assert_eq!(lines.len(), 4);
    // eta_scale = 0 must give tau = inf exactly
    assert!(lines[1].contains(",inf,"), "{}", lines[1]);
    let first: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
    let second: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
    assert!(first < second);
}

#[test]
fn sweep_without_section_is_config_error() {
    let cfg = write_config("nosweep", MINIMAL);
    let out = bin().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(tempdir("ns")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_check_passes_and_fails_by_tolerance() {
    let dir = tempdir("oracle");
    let out = bin()
        .args(["oracle-check", "--preset", "noisy-desk", "--quick", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.join("oracle_check.csv")).unwrap();
    assert!(csv.starts_with("check,achieved,tolerance,status\n"));
    assert!(csv.contains("packet-center-vs-rk4"));
    assert!(csv.contains("noiseless-overlap"));
    assert!(!csv.contains("FAIL"));

    // corrupted tolerance forces the deliberate failure path
    let out = bin()
        .args([
            "oracle-check",
            "--preset",
            "noisy-desk",
            "--quick",
            "--tolerance-scale",
            "0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn quad_tol_env_is_validated() {
    let out = bin()
        .env("SGI_QUAD_TOL", "banana")
        .args(["estimate", "--preset", "noiseless"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .env("SGI_QUAD_TOL", "1e-8")
        .args(["estimate", "--preset", "noiseless"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn samples_override_controls_row_count() {
    let dir = tempdir("samples");
    let out = bin()
        .args(["run", "--preset", "noiseless", "--samples", "10", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12); // header + 11 rows
}
