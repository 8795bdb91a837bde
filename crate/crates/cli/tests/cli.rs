use std::path::PathBuf;
use std::process::{Command, Output};

fn magmech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magmech")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("magmech-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bundled_reports_succeed() {
    for name in ["paper-flagship", "paper-two-wire", "paper-homogeneous"] {
        let o = magmech(&["--scenario", name, "report"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("g0_over_kappa"));
    }
}

#[test]
fn csv_report_has_header_and_rows() {
    let o = magmech(&["--format", "csv", "report"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    assert!(lines[0].starts_with("scenario,"));
}

#[test]
fn missing_scenario_is_config_error() {
    let o = magmech(&["--scenario", "no-such-scenario", "report"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_file_is_config_error() {
    let path = scratch("malformed.toml");
    std::fs::write(&path, "name = \"x\"\n[strip]\nwidth = \"1 parsec-ish\"\n").unwrap();
    let o = magmech(&["--scenario", path.to_str().unwrap(), "report"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_sweep_parameter_is_config_error() {
    let o = magmech(&["sweep", "--param", "coil.colour", "--from", "0", "--to", "1", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn negative_width_is_domain_error() {
    let text = include_str!("../../core/scenarios/paper-flagship.toml").replace("width = \"1 um\"", "width = \"-1 um\"");
    let path = scratch("negative.toml");
    std::fs::write(&path, text).unwrap();
    let o = magmech(&["--scenario", path.to_str().unwrap(), "report"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn mem_rejects_uniform_drive() {
    let o = magmech(&["--scenario", "paper-homogeneous", "mem", "--aspects", "5", "--cells", "256"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("report.txt");
    let o = magmech(&["--out", path.to_str().unwrap(), "report"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("cooperativity"));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let runs: [&[&str]; 4] = [
        &["--format", "csv", "report"],
        &["sweep", "--param", "coil.height", "--from", "0.5um", "--to", "4um", "--steps", "9", "--log"],
        &["fieldmap", "--ny", "21", "--nz", "15", "--locus"],
        &["mem", "--aspects", "5,10", "--cells", "256,576"],
    ];
    for args in runs {
        let mut outs = Vec::new();
        for threads in ["1", "3", "1"] {
            let mut full = vec!["--threads", threads];
            full.extend_from_slice(args);
            let o = magmech(&full);
            assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
            outs.push(o.stdout);
        }
        assert!(outs.windows(2).all(|p| p[0] == p[1]), "{args:?} differs across thread counts");
    }
}

#[test]
fn sweep_row_count_matches_steps() {
    let o = magmech(&["sweep", "--param", "zc_over_w", "--from", "0.2", "--to", "5", "--steps", "7", "--log"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 8);
}
